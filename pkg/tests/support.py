"""Shared helpers for the test suite: fixture instances and brute-force oracles.

The oracles here are deliberately independent of the solver internals: plain
Fraction Gaussian elimination for vertex enumeration, grid scans for integer
sets, and a denominator scan for simplest-rational questions. They are slow
and only meant for small reference problems.
"""
import itertools
import os
from fractions import Fraction

from bilevel_exact import LE, EQ, LT, Instance

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXAMPLE1_PATH = os.path.join(ROOT, "instances", "example1.json")


def make_example1():
    """Canonical instance: leader pays z - x, follower picks the smallest x >= z."""
    return Instance(
        n=1, d=1,
        A=[[-1], [1], [-1]], B=[[-1], [0], [0]],
        C=[[0], [1], [-1]], D=[[1], [0], [0]],
        c=[-1], e=[1], psi=[1], u=[0, 1, 0], p=[1, 1, 0],
    )


def make_empty_follower_pure():
    """Upper level needs x >= 1 but the follower argmin is {0}: F' is empty."""
    return Instance(
        n=1, d=1,
        A=[[1], [-1]], B=[[0], [0]],
        C=[[-1], [1], [0]], D=[[0], [0], [1]],
        c=[1], e=[1], psi=[1], u=[1, 0], p=[-1, 1, 0],
    )


def make_infeasible_upper():
    """z <= -1 contradicts the implicit z >= 0."""
    return Instance(
        n=1, d=1,
        A=[[1], [-1]], B=[[0], [0]],
        C=[[0], [1], [-1]], D=[[1], [0], [0]],
        c=[1], e=[1], psi=[1], u=[1, 0], p=[-1, 1, 0],
    )


def _solve_square(rows, rhs):
    """Gaussian elimination over Fraction; None if singular."""
    n = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [aug[i][n] for i in range(n)]


def row_holds(row, point, closed=False):
    val = sum(c * p for c, p in zip(row.coeffs, point))
    if row.rel == EQ:
        return val == row.rhs
    if row.rel == LT and not closed:
        return val < row.rhs
    return val <= row.rhs


def ref_vertices(system):
    """All basic feasible points of the closure, by brute combination."""
    dim = system.dim
    rows = list(system.rows)
    seen = set()
    out = []
    for combo in itertools.combinations(range(len(rows)), dim):
        pt = _solve_square([rows[i].coeffs for i in combo], [rows[i].rhs for i in combo])
        if pt is None:
            continue
        if not all(row_holds(r, pt, closed=True) for r in rows):
            continue
        key = tuple(pt)
        if key not in seen:
            seen.add(key)
            out.append(pt)
    return out


def ref_lp_min(system, objective):
    """Minimum of objective over the closure, via vertex scan.

    Only valid for bounded systems; returns (value, argmin) or None when no
    vertex is feasible. EQ rows count toward the vertex bases like the rest.
    """
    best = None
    for pt in ref_vertices(system):
        val = sum(c * p for c, p in zip(objective, pt))
        if best is None or val < best[0]:
            best = (val, pt)
    return best


def grid_points(dim, lo, hi):
    return itertools.product(range(lo, hi + 1), repeat=dim)


def brute_integer_points(system, lo, hi):
    """Integer points of the closed system inside the box [lo, hi]^dim, lex order."""
    out = []
    for pt in grid_points(system.dim, lo, hi):
        fp = [Fraction(v) for v in pt]
        if all(row_holds(r, fp, closed=True) for r in system.rows):
            out.append(pt)
    return out


def brute_bilevel_points(inst, box=(-6, 6), z_denoms=(1, 2, 3, 4)):
    """Sampled bilevel-feasible points: integer x, z on a coarse rational grid.

    Every returned (x, z) is genuinely feasible (the follower check is exact);
    the sample is not exhaustive in z, which is fine for one-sided tests.
    """
    lo, hi = box
    out = []
    zs = sorted({Fraction(k, q) for q in z_denoms for k in range(0, hi * q + 1)})
    for ztup in itertools.product(zs, repeat=inst.d):
        for xtup in grid_points(inst.n, lo, hi):
            if _brute_feasible(inst, xtup, list(ztup)):
                out.append((xtup, ztup))
    return out


def _brute_feasible(inst, x, z):
    xz = [Fraction(v) for v in x] + [Fraction(v) for v in z]
    if any(v < 0 for v in xz[inst.n:]):
        return False
    for cr, dr, pv in zip(inst.C.entries, inst.D.entries, inst.p.entries):
        if sum(a * b for a, b in zip(cr, xz[:inst.n])) + \
           sum(a * b for a, b in zip(dr, xz[inst.n:])) > pv:
            return False
    rhs = [sum(a * b for a, b in zip(br, xz[inst.n:])) + uv
           for br, uv in zip(inst.B.entries, inst.u.entries)]
    def fol_ok(xc):
        return all(sum(a * b for a, b in zip(ar, xc)) <= rv
                   for ar, rv in zip(inst.A.entries, rhs))
    if not fol_ok(xz[:inst.n]):
        return False
    mine = sum(a * b for a, b in zip(inst.psi.entries, xz[:inst.n]))
    for cand in grid_points(inst.n, -8, 8):
        fc = [Fraction(v) for v in cand]
        if fol_ok(fc) and sum(a * b for a, b in zip(inst.psi.entries, fc)) < mine:
            return False
    return True


def simplest_in_interval_scan(lo, hi, qmax):
    """All lowest-terms rationals with denominator <= qmax inside [lo, hi]."""
    found = []
    for q in range(1, qmax + 1):
        p_lo = -(-lo.numerator * q // lo.denominator)  # ceil(lo*q)
        p_hi = hi.numerator * q // hi.denominator      # floor(hi*q)
        for p in range(p_lo, p_hi + 1):
            f = Fraction(p, q)
            if f.denominator == q:
                found.append(f)
    return found
