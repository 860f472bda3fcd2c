"""Instance file parsing, validation, and report serialization.

The on-disk format is a versioned JSON object with integer data only; the
implicit z >= 0 rows are never stored. Reports serialize with a fixed key
order and all rationals in lowest terms so equal runs produce identical
bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .cells import Instance
from .engine import SolveReport
from .errors import ValidationError
from .rational import QMatrix, QVector, format_rat

_REQUIRED = ("n", "d", "A", "B", "C", "D", "c", "e", "psi", "u", "p")
_VARIANTS = ("mixed", "pure")


def _int_entry(value, where: str) -> int:
    # bool is an int subclass; true/false in a matrix is a data error
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError("nonintegral-data",
                              f"{where} must be a JSON integer, got {value!r}")
    return value


def _matrix(doc: dict, key: str, ncols: int) -> QMatrix:
    raw = doc[key]
    if not isinstance(raw, list) or any(not isinstance(row, list) for row in raw):
        raise ValidationError("bad-format", f"{key} must be a list of rows")
    entries = [[Fraction(_int_entry(e, key)) for e in row] for row in raw]
    try:
        return QMatrix(entries, ncols=ncols)
    except ValueError as exc:
        raise ValidationError("bad-shape", f"{key}: {exc}") from exc


def _vector(doc: dict, key: str) -> QVector:
    raw = doc[key]
    if not isinstance(raw, list):
        raise ValidationError("bad-format", f"{key} must be a list")
    return QVector([Fraction(_int_entry(e, key)) for e in raw])


def parse_instance(text: str):
    """(Instance, meta) from JSON text; meta carries name and variant."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("bad-json", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("bad-format", "top level must be a JSON object")
    version = doc.get("format_version", 1)
    if isinstance(version, bool) or version != 1:
        raise ValidationError("bad-format", f"unsupported format_version {version!r}")
    for key in _REQUIRED:
        if key not in doc:
            raise ValidationError("bad-format", f"missing field {key!r}")
    variant = doc.get("variant", "mixed")
    if variant not in _VARIANTS:
        raise ValidationError("bad-variant", f"variant must be one of {_VARIANTS}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ValidationError("bad-format", "name must be a string")
    n = _int_entry(doc["n"], "n")
    d = _int_entry(doc["d"], "d")
    if n < 1 or d < 1:
        raise ValidationError("bad-shape", "need n >= 1 and d >= 1")
    inst = Instance(
        n=n, d=d,
        A=_matrix(doc, "A", n), B=_matrix(doc, "B", d),
        C=_matrix(doc, "C", n), D=_matrix(doc, "D", d),
        c=_vector(doc, "c"), e=_vector(doc, "e"), psi=_vector(doc, "psi"),
        u=_vector(doc, "u"), p=_vector(doc, "p"),
    )
    return inst, {"name": name, "variant": variant}


def load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError("unreadable", f"cannot read {path}: {exc}") from exc
    return parse_instance(text)


def parse_and_validate(path) -> Instance:
    """Validated Instance from a file; boundedness checks included."""
    return load_instance(path)[0]


def _matrix_out(m: QMatrix) -> list:
    return [[int(v) for v in row] for row in m.entries]


def _vector_out(v: QVector) -> list:
    return [int(f) for f in v.entries]


def instance_to_json(inst: Instance, name: Optional[str] = None,
                     variant: str = "mixed") -> str:
    doc = {"format_version": 1}
    if name is not None:
        doc["name"] = name
    doc["variant"] = variant
    doc.update({
        "n": inst.n, "d": inst.d,
        "A": _matrix_out(inst.A), "B": _matrix_out(inst.B),
        "C": _matrix_out(inst.C), "D": _matrix_out(inst.D),
        "c": _vector_out(inst.c), "e": _vector_out(inst.e),
        "psi": _vector_out(inst.psi),
        "u": _vector_out(inst.u), "p": _vector_out(inst.p),
    })
    return json.dumps(doc, indent=2) + "\n"


def _solution_out(solution) -> Optional[dict]:
    if solution is None:
        return None
    x, z = solution
    return {"x": [int(v) for v in x], "z": [format_rat(f) for f in z.entries]}


def report_to_dict(report: SolveReport) -> dict:
    doc = {
        "status": report.status.lower(),
        "infimum": None if report.infimum is None else format_rat(report.infimum),
        "solution": _solution_out(report.solution),
        "eps_solution": None,
        "telemetry": report.telemetry.as_dict(),
    }
    if report.eps_solution is not None:
        es = report.eps_solution
        doc["eps_solution"] = {
            "x": [int(v) for v in es.x],
            "z": [format_rat(f) for f in es.z.entries],
            "value": format_rat(es.value),
            "eps": format_rat(es.eps),
        }
    if report.oracle_agreement is not None:
        doc["oracle_agreement"] = report.oracle_agreement
    return doc


def report_to_json(report: SolveReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def render_text(report: SolveReport) -> str:
    lines = [f"status: {report.status.lower()}"]
    if report.infimum is not None:
        lines.append(f"infimum: {format_rat(report.infimum)}")
    if report.solution is not None:
        x, z = report.solution
        xs = ", ".join(str(int(v)) for v in x)
        zs = ", ".join(format_rat(f) for f in z.entries)
        lines.append(f"solution: x = ({xs}), z = ({zs})")
    if report.eps_solution is not None:
        es = report.eps_solution
        xs = ", ".join(str(int(v)) for v in es.x)
        zs = ", ".join(format_rat(f) for f in es.z.entries)
        lines.append(f"eps point: x = ({xs}), z = ({zs}), "
                     f"value = {format_rat(es.value)}, eps = {format_rat(es.eps)}")
    t = report.telemetry
    lines.append(f"telemetry: decision_queries={t.decision_queries} "
                 f"bisection_steps={t.bisection_steps} "
                 f"reconstruction_steps={t.reconstruction_steps} cells={t.cells}")
    if report.oracle_agreement is not None:
        lines.append(f"oracle agreement: {'yes' if report.oracle_agreement else 'no'}")
    return "\n".join(lines) + "\n"
