"""Exact linear programming and polyhedral predicates over the rationals.

The LP core is a two-phase simplex with Bland's rule. The tableau is kept as
an integer matrix over a common positive denominator (fraction-free pivoting),
so every intermediate quantity is an exact integer and every reported optimum
is an exact rational. Divisibility of each pivot update is asserted; a failure
would mean a bug, not bad data.

Conventions: systems are over free variables; rows are "<=", "=", or the
strict "<". Only closed rows ("<=", "=") are legal LP input; strict rows are
the business of strict_feasible_point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import InternalInvariantError, ResourceLimitError
from .rational import QMatrix, QVector, Rat

LE = "<="
EQ = "="
LT = "<"
_RELATIONS = (LE, EQ, LT)


@dataclass(frozen=True)
class LinRow:
    """One linear constraint: coeffs . x  rel  rhs."""

    coeffs: QVector
    rhs: Fraction
    rel: str

    def __post_init__(self):
        if self.rel not in _RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        if not isinstance(self.coeffs, QVector):
            object.__setattr__(self, "coeffs", QVector(self.coeffs))
        if not isinstance(self.rhs, Fraction):
            object.__setattr__(self, "rhs", Fraction(self.rhs))

    def closed(self) -> "LinRow":
        return LinRow(self.coeffs, self.rhs, LE) if self.rel == LT else self

    def satisfied_by(self, point: Sequence) -> bool:
        lhs = self.coeffs.dot(QVector(point))
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == EQ:
            return lhs == self.rhs
        return lhs < self.rhs


def row_le(coeffs: Iterable, rhs) -> LinRow:
    return LinRow(QVector(coeffs), Fraction(rhs), LE)


def row_eq(coeffs: Iterable, rhs) -> LinRow:
    return LinRow(QVector(coeffs), Fraction(rhs), EQ)


def row_lt(coeffs: Iterable, rhs) -> LinRow:
    return LinRow(QVector(coeffs), Fraction(rhs), LT)


@dataclass(frozen=True)
class LinearSystem:
    """A finite set of rows over a fixed ambient dimension."""

    dim: int
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if not isinstance(r, LinRow):
                raise ValueError("LinearSystem rows must be LinRow")
            if r.coeffs.dim != self.dim:
                raise ValueError(f"row of dim {r.coeffs.dim} in system of dim {self.dim}")

    def closure(self) -> "LinearSystem":
        """Replace strict rows by their closed counterparts (idempotent)."""
        return LinearSystem(self.dim, tuple(r.closed() for r in self.rows))

    def has_strict(self) -> bool:
        return any(r.rel == LT for r in self.rows)

    def with_rows(self, extra: Iterable[LinRow]) -> "LinearSystem":
        return LinearSystem(self.dim, self.rows + tuple(extra))

    def satisfied_by(self, point: Sequence) -> bool:
        return all(r.satisfied_by(point) for r in self.rows)


@dataclass(frozen=True)
class LpOutcome:
    tag: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    point: Optional[QVector] = None

    @property
    def is_optimal(self) -> bool:
        return self.tag == "optimal"


_INFEASIBLE = LpOutcome("infeasible")
_UNBOUNDED = LpOutcome("unbounded")


# ---------------------------------------------------------------------------
# fraction-free simplex


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _scale_row_int(coeffs, rhs):
    mult = 1
    for f in coeffs:
        mult = _lcm(mult, f.denominator)
    mult = _lcm(mult, rhs.denominator)
    return [int(f * mult) for f in coeffs], int(rhs * mult)


class _Tableau:
    """Integer simplex tableau: true entries are self.t[i][j] / self.den."""

    def __init__(self, t, den, basis, nrows):
        self.t = t            # list of lists of int, objective rows included
        self.den = den        # positive int
        self.basis = basis    # basis column per constraint row
        self.nrows = nrows    # number of constraint rows (objectives follow)

    def pivot(self, pr: int, pc: int):
        t, den = self.t, self.den
        piv = t[pr][pc]
        if piv == 0:
            raise InternalInvariantError("pivot on a zero element")
        prow = t[pr]
        for i, row in enumerate(t):
            if i == pr:
                continue
            f = row[pc]
            for j in range(len(row)):
                num = row[j] * piv - f * prow[j]
                q, rem = divmod(num, den)
                if rem:
                    raise InternalInvariantError("fraction-free pivot lost integrality")
                row[j] = q
        self.den = piv
        self.basis[pr] = pc
        if self.den < 0:
            self.den = -self.den
            for row in t:
                for j in range(len(row)):
                    row[j] = -row[j]

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(self.t[i][j], self.den)


def _run_phase(tab: _Tableau, objrow: int, allowed, rhs_col: int) -> str:
    """Bland-rule simplex on one objective row; returns 'optimal' or 'unbounded'."""
    t = tab.t
    while True:
        obj = t[objrow]
        pc = None
        for j in allowed:
            if obj[j] < 0:
                pc = j
                break
        if pc is None:
            return "optimal"
        best = None
        for i in range(tab.nrows):
            a = t[i][pc]
            if a <= 0:
                continue
            if best is None:
                best = i
                continue
            lhs = t[i][rhs_col] * t[best][pc]
            rhs = t[best][rhs_col] * a
            if lhs < rhs or (lhs == rhs and tab.basis[i] < tab.basis[best]):
                best = i
        if best is None:
            return "unbounded"
        tab.pivot(best, pc)


def _simplex_free_min(dim: int, rows, cost):
    """Minimize cost . x over closed rows with x free.

    rows: list of (coeffs list[Fraction], rhs Fraction, rel). Returns
    (tag, point list[Fraction] | None).
    """
    kept = []
    for coeffs, rhs, rel in rows:
        if all(f == 0 for f in coeffs):
            ok = rhs >= 0 if rel == LE else rhs == 0
            if not ok:
                return "infeasible", None
            continue
        ia, ib = _scale_row_int(coeffs, rhs)
        kept.append((ia, ib, rel))

    cmult = 1
    for f in cost:
        cmult = _lcm(cmult, f.denominator)
    icost = [int(f * cmult) for f in cost]

    m = len(kept)
    nslack = sum(1 for r in kept if r[2] == LE)
    base_cols = 2 * dim + nslack
    body = []
    slack_seen = 0
    art_rows = []
    for i, (a, b, rel) in enumerate(kept):
        row = [0] * base_cols
        for j, v in enumerate(a):
            row[j] = v
            row[dim + j] = -v
        if rel == LE:
            row[2 * dim + slack_seen] = 1
            slack_seen += 1
        if b < 0:
            row = [-v for v in row]
            b = -b
        body.append((row, b, rel))

    # basis: a slack column with +1 where available, otherwise an artificial
    art_start = base_cols
    basis = []
    columns = base_cols
    for i, (row, b, rel) in enumerate(body):
        slack_col = None
        if rel == LE:
            for j in range(2 * dim, base_cols):
                if row[j] == 1:
                    slack_col = j
                    break
        if slack_col is not None:
            basis.append(slack_col)
        else:
            basis.append(columns)
            art_rows.append(i)
            columns += 1
    nart = columns - art_start

    rhs_col = columns
    t = []
    for i, (row, b, rel) in enumerate(body):
        full = row + [0] * nart + [0]
        if basis[i] >= art_start:
            full[basis[i]] = 1
        full[rhs_col] = b
        t.append(full)

    # phase-2 objective row: costs on u and v, slack and artificial costs zero
    p2 = [0] * (columns + 1)
    for j in range(dim):
        p2[j] = icost[j]
        p2[dim + j] = -icost[j]
    t.append(p2)
    p2row = m

    tab = _Tableau(t, 1, basis, m)
    non_art = list(range(base_cols))

    if nart:
        # phase-1 objective: reduced costs of sum(artificials) given the basis
        p1 = [0] * (columns + 1)
        for j in range(columns + 1):
            s = 0
            for i in art_rows:
                s += t[i][j]
            p1[j] = -s
        for j in range(art_start, columns):
            p1[j] += 1
        t.append(p1)
        p1row = m + 1
        tag = _run_phase(tab, p1row, non_art, rhs_col)
        if tag != "optimal":
            raise InternalInvariantError("phase 1 cannot be unbounded")
        for i in range(tab.nrows):
            if tab.basis[i] >= art_start and tab.t[i][rhs_col] != 0:
                return "infeasible", None
        # pivot remaining zero-valued artificials out, dropping redundant rows
        i = 0
        while i < tab.nrows:
            if tab.basis[i] >= art_start:
                pc = next((j for j in non_art if tab.t[i][j] != 0), None)
                if pc is None:
                    del tab.t[i]
                    del tab.basis[i]
                    tab.nrows -= 1
                    p2row -= 1
                    continue
                tab.pivot(i, pc)
            i += 1
        tab.t.pop()  # phase-1 row

    tag = _run_phase(tab, p2row, non_art, rhs_col)
    if tag == "unbounded":
        return "unbounded", None

    values = [Fraction(0)] * columns
    for i in range(tab.nrows):
        values[tab.basis[i]] = tab.value(i, rhs_col)
    point = [values[j] - values[dim + j] for j in range(dim)]
    return "optimal", point


# ---------------------------------------------------------------------------
# one-dimensional closed systems have a closed-form solution


def _interval_solve(rows, cost: Fraction):
    lo = None  # None encodes the infinite end
    hi = None
    for coeffs, rhs, rel in rows:
        a = coeffs[0]
        if a == 0:
            ok = rhs >= 0 if rel == LE else rhs == 0
            if not ok:
                return "infeasible", None
            continue
        bound = rhs / a
        if rel == EQ:
            lo = bound if lo is None or bound > lo else lo
            hi = bound if hi is None or bound < hi else hi
        elif a > 0:
            hi = bound if hi is None or bound < hi else hi
        else:
            lo = bound if lo is None or bound > lo else lo
    if lo is not None and hi is not None and lo > hi:
        return "infeasible", None
    if cost > 0:
        if lo is None:
            return "unbounded", None
        return "optimal", [lo]
    if cost < 0:
        if hi is None:
            return "unbounded", None
        return "optimal", [hi]
    if lo is not None:
        return "optimal", [lo]
    if hi is not None:
        return "optimal", [hi]
    return "optimal", [Fraction(0)]


# ---------------------------------------------------------------------------
# exact Gaussian helpers


def _rref(vectors, dim):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    rows = []
    pivots = []
    for vec in vectors:
        v = list(vec)
        for r, p in zip(rows, pivots):
            if v[p] != 0:
                f = v[p]
                for j in range(dim):
                    v[j] -= f * r[j]
        lead = next((j for j in range(dim) if v[j] != 0), None)
        if lead is None:
            continue
        f = v[lead]
        v = [e / f for e in v]
        for r, p in zip(rows, pivots):
            if r[lead] != 0:
                g = r[lead]
                for j in range(dim):
                    r[j] -= g * v[j]
        rows.append(v)
        pivots.append(lead)
    return rows, pivots


def _nullspace_direction(vectors, dim):
    """Some nonzero w orthogonal to all vectors, or None if they span R^dim."""
    rows, pivots = _rref(vectors, dim)
    if len(pivots) == dim:
        return None
    free = next(j for j in range(dim) if j not in pivots)
    w = [Fraction(0)] * dim
    w[free] = Fraction(1)
    for r, p in zip(rows, pivots):
        w[p] = -r[free]
    return w


def _solve_square(vectors, rhs, dim):
    """Unique solution of the dim x dim system, or None when singular."""
    aug = [list(v) + [b] for v, b in zip(vectors, rhs)]
    rows, pivots = _rref(aug, dim + 1)
    if dim in pivots:  # a row reduced to 0 = nonzero
        return None
    if len(pivots) < dim:
        return None
    x = [Fraction(0)] * dim
    for r, p in zip(rows, pivots):
        x[p] = r[dim]
    return x


def _purify_to_vertex(dim, rows, point, objective):
    """Slide an optimal point along the optimal face onto a vertex.

    Keeps every row satisfied and the objective value fixed. If the optimal
    face contains a line (only possible for unbounded feasible sets) the
    current point is returned unchanged.
    """
    x = list(point)
    while True:
        active = [list(objective)]
        for coeffs, rhs, rel in rows:
            lhs = sum(c * v for c, v in zip(coeffs, x))
            if rel == EQ or lhs == rhs:
                active.append(list(coeffs))
        w = _nullspace_direction(active, dim)
        if w is None:
            return x
        t_plus = None
        t_minus = None
        for coeffs, rhs, rel in rows:
            aw = sum(c * v for c, v in zip(coeffs, w))
            if aw == 0:
                continue
            slack = rhs - sum(c * v for c, v in zip(coeffs, x))
            if aw > 0:
                step = slack / aw
                if t_plus is None or step < t_plus:
                    t_plus = step
            else:
                step = slack / (-aw)
                if t_minus is None or step < t_minus:
                    t_minus = step
        if t_plus is not None:
            x = [v + t_plus * d for v, d in zip(x, w)]
        elif t_minus is not None:
            x = [v - t_minus * d for v, d in zip(x, w)]
        else:
            return x


# ---------------------------------------------------------------------------
# public operations


def _raw_rows(sys: LinearSystem):
    return [(list(r.coeffs.entries), r.rhs, r.rel) for r in sys.rows]


def lp_solve(sys: LinearSystem, objective: QVector, sense: str = "min",
             config: SolverConfig = DEFAULT_CONFIG) -> LpOutcome:
    """Exact LP over a closed system with free variables.

    Returns Infeasible, Unbounded, or Optimal with an exact value and a point
    that is a vertex of the optimal face whenever one exists.
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    if sys.has_strict():
        raise ValueError("lp_solve takes closed rows only")
    if objective.dim != sys.dim:
        raise ValueError("objective dimension does not match the system")

    rows = _raw_rows(sys)
    cost = list(objective.entries)
    if sense == "max":
        cost = [-f for f in cost]

    if sys.dim == 0:
        ok = all((rhs >= 0 if rel == LE else rhs == 0) for _, rhs, rel in rows)
        return LpOutcome("optimal", Fraction(0), QVector(())) if ok else _INFEASIBLE
    if sys.dim == 1:
        tag, point = _interval_solve(rows, cost[0])
    else:
        tag, point = _simplex_free_min(sys.dim, rows, cost)

    if tag == "infeasible":
        return _INFEASIBLE
    if tag == "unbounded":
        return _UNBOUNDED

    point = _purify_to_vertex(sys.dim, rows, point, list(objective.entries))
    value = sum((c * v for c, v in zip(objective.entries, point)), Fraction(0))
    out = LpOutcome("optimal", value, QVector(point))
    for r in sys.rows:
        if not r.satisfied_by(out.point):
            raise InternalInvariantError("lp_solve produced an infeasible point")
    return out


def strict_feasible_point(sys: LinearSystem,
                          config: SolverConfig = DEFAULT_CONFIG) -> Optional[QVector]:
    """A point satisfying closed rows and every strict row strictly, or None.

    Maximizes one uniform slack t in [0, 1] applied to all strict rows; a
    point exists exactly when the optimum slack is positive.
    """
    closed = []
    strict = []
    for r in sys.rows:
        coeffs = list(r.coeffs.entries)
        if all(f == 0 for f in coeffs):
            if r.rel == LE and r.rhs < 0:
                return None
            if r.rel == EQ and r.rhs != 0:
                return None
            if r.rel == LT and r.rhs <= 0:
                return None
            continue
        (strict if r.rel == LT else closed).append(r)

    if not strict:
        out = lp_solve(LinearSystem(sys.dim, tuple(closed)), QVector([0] * sys.dim), "min", config)
        return out.point if out.is_optimal else None

    dim = sys.dim + 1
    lifted = []
    for r in closed:
        lifted.append(LinRow(QVector(list(r.coeffs.entries) + [0]), r.rhs, r.rel))
    for r in strict:
        lifted.append(LinRow(QVector(list(r.coeffs.entries) + [1]), r.rhs, LE))
    lifted.append(row_le([0] * sys.dim + [-1], 0))   # t >= 0
    lifted.append(row_le([0] * sys.dim + [1], 1))    # t <= 1
    objective = QVector([0] * sys.dim + [1])
    out = lp_solve(LinearSystem(dim, tuple(lifted)), objective, "max", config)
    if not out.is_optimal or out.value == 0:
        return None
    point = QVector(out.point.entries[:sys.dim])
    for r in sys.rows:
        if not r.satisfied_by(point):
            raise InternalInvariantError("strict feasibility witness failed re-verification")
    return point


def recession_rows(sys: LinearSystem):
    """Coefficient rows of the recession cone of the closed system."""
    out = []
    for r in sys.closure().rows:
        out.append(tuple(r.coeffs.entries))
        if r.rel == EQ:
            out.append(tuple(-f for f in r.coeffs.entries))
    return out


def _cone_coords_zero(coeff_rows, dim: int, coords,
                      config: SolverConfig = DEFAULT_CONFIG) -> bool:
    """True iff every y with (rows) . y <= 0 has y_i = 0 for i in coords."""
    rows = [row_le(r, 0) for r in coeff_rows]
    for j in range(dim):
        unit = [0] * dim
        unit[j] = 1
        rows.append(row_le(unit, 1))
        rows.append(row_le([-v for v in unit], 1))
    cone = LinearSystem(dim, tuple(rows))
    for i in coords:
        unit = [0] * dim
        unit[i] = 1
        for sense in ("max", "min"):
            out = lp_solve(cone, QVector(unit), sense, config)
            if not out.is_optimal:
                raise InternalInvariantError("truncated cone LP must be optimal")
            if out.value != 0:
                return False
    return True


def recession_bounded(m: QMatrix, config: SolverConfig = DEFAULT_CONFIG) -> bool:
    """Whether {y : m y <= 0} is the origin alone."""
    if m.ncols == 0:
        return True
    return _cone_coords_zero([tuple(row) for row in m.entries], m.ncols, range(m.ncols), config)


def vertices(sys: LinearSystem, config: SolverConfig = DEFAULT_CONFIG) -> list:
    """All vertices of the closed feasible region, deduplicated, in lex order.

    Infeasible systems give []. Raises on an unbounded (nonempty) region, and
    raises ResourceLimitError if C(rows, dim) exceeds the configured cap.
    """
    closed = sys.closure()
    feas = lp_solve(closed, QVector([0] * sys.dim), "min", config)
    if not feas.is_optimal:
        return []
    if sys.dim == 0:
        return [QVector(())]
    if not _cone_coords_zero(recession_rows(closed), sys.dim, range(sys.dim), config):
        raise ValueError("vertex enumeration on an unbounded system")
    rows = [r for r in closed.rows if any(f != 0 for f in r.coeffs.entries)]
    if math.comb(len(rows), sys.dim) > config.basis_cap:
        raise ResourceLimitError(f"vertex enumeration over {len(rows)} rows exceeds the basis cap")
    found = set()
    for subset in combinations(rows, sys.dim):
        x = _solve_square([list(r.coeffs.entries) for r in subset],
                          [r.rhs for r in subset], sys.dim)
        if x is None:
            continue
        if all(r.satisfied_by(x) for r in closed.rows):
            found.add(tuple(x))
    return [QVector(v) for v in sorted(found)]


def affinely_independent_vertices(sys: LinearSystem,
                                  config: SolverConfig = DEFAULT_CONFIG):
    """(k, vertices) with k = 1 + affine dimension of the feasible region.

    Vertices are chosen greedily from the lex-ordered vertex list; an
    infeasible system gives (0, []).
    """
    verts = vertices(sys, config)
    if not verts:
        return 0, []
    chosen = [verts[0]]
    echelon = []
    pivots = []
    for v in verts[1:]:
        diff = list((v - chosen[0]).entries)
        for r, p in zip(echelon, pivots):
            if diff[p] != 0:
                f = diff[p]
                for j in range(len(diff)):
                    diff[j] -= f * r[j]
        lead = next((j for j in range(len(diff)) if diff[j] != 0), None)
        if lead is None:
            continue
        f = diff[lead]
        echelon.append([e / f for e in diff])
        pivots.append(lead)
        chosen.append(v)
    return len(chosen), chosen
