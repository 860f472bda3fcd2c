import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import support
from bilevel_exact import (DEFAULT_CONFIG, Cell, Instance, LinearSystem, QVector,
                           ResourceLimitError, SolverConfig, ValidationError,
                           bilevel_feasible, cell_infimum, cell_region, enumerate_cells,
                           floor_rhs, is_valid_cell, random_instance, row_le,
                           strict_feasible_point, vertices)

CFG = DEFAULT_CONFIG


def upper_region_for_x(inst, x):
    """The leader's closed region {z >= 0 : D z <= p - C x} for one fixed x."""
    rows = []
    for cr, dr, pv in zip(inst.C.entries, inst.D.entries, inst.p.entries):
        shift = pv - sum(a * Fraction(b) for a, b in zip(cr, x))
        rows.append(row_le(list(dr), shift))
    for j in range(inst.d):
        unit = [0] * inst.d
        unit[j] = -1
        rows.append(row_le(unit, 0))
    return LinearSystem(inst.d, tuple(rows))


def sample_hull(verts, rng, count):
    """Random rational convex combinations of the given vertices."""
    out = []
    dim = len(verts[0])
    for _ in range(count):
        weights = [Fraction(rng.randint(0, 4)) for _ in verts]
        total = sum(weights)
        if total == 0:
            weights[rng.randrange(len(weights))] = Fraction(1)
            total = Fraction(1)
        pt = [sum(w * v[j] for w, v in zip(weights, verts)) / total for j in range(dim)]
        out.append(QVector(pt))
    return out


# ---------------------------------------------------------------- validation


def test_instance_rejects_bad_shapes():
    with pytest.raises(ValidationError) as err:
        Instance(n=0, d=1, A=[[1]], B=[[0]], C=[[1]], D=[[1]], c=[1], e=[1],
                 psi=[1], u=[1], p=[1])
    assert err.value.code == "bad-shape"
    with pytest.raises(ValidationError) as err:
        Instance(n=1, d=1, A=[[1, 2]], B=[[0]], C=[[1]], D=[[1]], c=[1], e=[1],
                 psi=[1], u=[1], p=[1])
    assert err.value.code == "bad-shape"


def test_instance_rejects_fractions():
    with pytest.raises(ValidationError) as err:
        Instance(n=1, d=1, A=[[Fraction(1, 2)], [-1]], B=[[0], [0]],
                 C=[[1], [-1]], D=[[1], [0]], c=[1], e=[1], psi=[1], u=[1, 0], p=[1, 0])
    assert err.value.code == "nonintegral-data"


def test_instance_rejects_unbounded_upper():
    # no upper row touches z, so P recedes along +z
    with pytest.raises(ValidationError) as err:
        Instance(n=1, d=1, A=[[1], [-1]], B=[[0], [0]],
                 C=[[1], [-1]], D=[[0], [0]], c=[1], e=[1], psi=[1], u=[1, 0], p=[1, 0])
    assert err.value.code == "unbounded-P"


def test_instance_rejects_unbounded_follower():
    with pytest.raises(ValidationError) as err:
        Instance(n=1, d=1, A=[[1]], B=[[0]],
                 C=[[1], [-1], [0]], D=[[0], [0], [1]], c=[1], e=[1], psi=[1],
                 u=[1], p=[1, 0, 1])
    assert err.value.code == "unbounded-follower"


# ------------------------------------------------------------ frozen examples


def test_floor_rhs_examples(example1):
    assert floor_rhs(example1, QVector([Fraction(1, 2)])) == (-1, 1, 0)
    assert floor_rhs(example1, QVector([0])) == (0, 1, 0)
    assert floor_rhs(example1, QVector([1])) == (-1, 1, 0)


def test_is_valid_cell_examples(example1):
    assert is_valid_cell(example1, Cell((1,), (-1, 1, 0)), (), CFG)
    assert is_valid_cell(example1, Cell((0,), (0, 1, 0)), (), CFG)
    assert not is_valid_cell(example1, Cell((1,), (0, 1, 0)), (), CFG)


def test_enumerate_cells_example(example1):
    cells = enumerate_cells(example1, (), CFG)
    assert [(c.x, c.r) for c in cells] == [((0,), (0, 1, 0)), ((1,), (-1, 1, 0))]


def test_enumerate_cells_contradictory_upper():
    inst = support.make_infeasible_upper()
    assert enumerate_cells(inst, (), CFG) == []


def test_enumerate_cells_with_killing_extra(example1):
    # objective row -x + z <= -1 forces z <= 0 inside the only candidate cell,
    # which its strict z > 0 row rejects
    extras = (row_le([-1, 1], -1),)
    assert enumerate_cells(example1, extras, CFG) == []


def test_cell_region_shape(example1):
    region = cell_region(example1, Cell((1,), (-1, 1, 0)))
    assert region.dim == 1
    assert region.satisfied_by(QVector([Fraction(1, 2)]))
    assert region.satisfied_by(QVector([1]))
    assert not region.satisfied_by(QVector([0]))      # strict floor row
    assert not region.satisfied_by(QVector([Fraction(3, 2)]))


def test_cell_infimum_examples(example1):
    obj = example1.objective_vector()
    c1 = Cell((1,), (-1, 1, 0))
    inf, attained, witness = cell_infimum(example1, c1, obj, CFG)
    assert (inf, attained) == (-1, False)
    wval = obj.dot(witness)
    assert -1 < wval <= -1 + CFG.witness_delta * 1    # objective range is 1 here
    c0 = Cell((0,), (0, 1, 0))
    inf0, attained0, witness0 = cell_infimum(example1, c0, obj, CFG)
    assert (inf0, attained0) == (0, True)
    assert witness0.entries == (0, 0)
    flipped = QVector([1, 1])
    inf2, attained2, _ = cell_infimum(example1, c1, flipped, CFG)
    assert (inf2, attained2) == (1, False)


def test_bilevel_feasible_examples(example1):
    assert bilevel_feasible(example1, (0,), QVector([0]), CFG)
    assert bilevel_feasible(example1, (1,), QVector([Fraction(1, 2)]), CFG)
    assert not bilevel_feasible(example1, (1,), QVector([0]), CFG)


def test_cell_cap_enforced(example1):
    with pytest.raises(ResourceLimitError):
        enumerate_cells(example1, (), SolverConfig(cell_cap=1))


# ---------------------------------------------------------- invariant suites


def _region_samples(inst, cell, rng, count):
    region = cell_region(inst, cell)
    pts = [strict_feasible_point(region, CFG)]
    verts = [tuple(v.entries) for v in vertices(region, CFG)]
    pts.extend(p for p in sample_hull(verts, rng, count) if region.satisfied_by(p))
    return region, [p for p in pts if p is not None]


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_partition_invariant(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    for entry_x in {c.x for c in enumerate_cells(inst, (), CFG)}:
        upper = upper_region_for_x(inst, entry_x)
        verts = [tuple(v.entries) for v in vertices(upper, CFG)]
        if not verts:
            continue
        for z in sample_hull(verts, rng, 10):
            r = floor_rhs(inst, z)
            assert cell_region(inst, Cell(entry_x, r)).satisfied_by(z)
            for i in range(inst.m):
                for delta in (-1, 1):
                    other = list(r)
                    other[i] += delta
                    assert not cell_region(inst, Cell(entry_x, tuple(other))).satisfied_by(z)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_equivalence_invariant(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    xs = [tuple(rng.randint(-2, 2) for _ in range(inst.n)) for _ in range(4)]
    xs.extend(c.x for c in enumerate_cells(inst, (), CFG))
    for x in xs:
        upper = upper_region_for_x(inst, x)
        verts = [tuple(v.entries) for v in vertices(upper, CFG)]
        zs = sample_hull(verts, rng, 8) if verts else []
        zs.append(QVector([Fraction(rng.randint(-2, 4), rng.randint(1, 3))
                           for _ in range(inst.d)]))
        for z in zs:
            cell = Cell(x, floor_rhs(inst, z))
            via_cells = (is_valid_cell(inst, cell, (), CFG)
                         and cell_region(inst, cell).satisfied_by(z))
            assert bilevel_feasible(inst, x, z, CFG) == via_cells


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_constancy_invariant(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    for cell in enumerate_cells(inst, (), CFG):
        _, pts = _region_samples(inst, cell, rng, 10)
        for z in pts:
            assert floor_rhs(inst, z) == cell.r


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_cell_infimum_certificate(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    obj = inst.objective_vector()
    obj_z = list(obj.entries[inst.n:])
    for cell in enumerate_cells(inst, (), CFG):
        inf, attained, witness = cell_infimum(inst, cell, obj, CFG)
        obj_x = sum(a * Fraction(b) for a, b in zip(obj.entries[: inst.n], cell.x))
        region, pts = _region_samples(inst, cell, rng, 10)
        # independent certificate: closure minimum by brute vertex scan
        ref = support.ref_lp_min(region.closure(), obj_z)
        assert ref is not None and obj_x + ref[0] == inf
        for z in pts:
            assert obj_x + sum(a * b for a, b in zip(obj_z, z)) >= inf
        wval = obj.dot(witness)
        assert wval >= inf
        if attained:
            assert wval == inf
            assert region.satisfied_by(QVector(witness.entries[inst.n:]))
