"""Solver-wide configuration knobs.

All caps are plain counts; the witness slack is a fraction of the objective
range over a cell, so it scales with the instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SolverConfig:
    cell_cap: int = 10**6            # closed (x, r) pairs visited per enumeration
    integer_point_cap: int = 10**6   # points emitted by enumerate_integers
    basis_cap: int = 10**6           # row subsets tried during vertex enumeration
    node_cap: int = 10**6            # branch-and-bound nodes per search
    witness_delta: Fraction = Fraction(1, 2**20)  # of the cell's objective range


DEFAULT_CONFIG = SolverConfig()
