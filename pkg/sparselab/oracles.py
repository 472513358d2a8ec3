"""
Brute-force evaluators in exact rational arithmetic.

These follow the defining formulas cell by cell with fractions.Fraction and
share no code with the numpy kernels in sparselab.operators, so tests can
compare the two with exact equality on dyadic fixtures.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .config import EXACT_ORACLE_MAX_CELLS
from .errors import DomainError, SpaceSizeError
from .space import CellFunction, MeasSet


def exact_values(f: CellFunction) -> List[Fraction]:
    if f.space.cell_count > EXACT_ORACLE_MAX_CELLS:
        raise SpaceSizeError(f"Exact oracles are limited to {EXACT_ORACLE_MAX_CELLS} cells")
    return [Fraction(float(v)) for v in f.values]


def exact_average(values: Sequence[Fraction], B: MeasSet) -> Fraction:
    if B.size == 0:
        raise DomainError("Average over an empty set is undefined")
    return sum((abs(values[c]) for c in B.cells), Fraction(0)) / B.size


def sparse_oracle(sets: Sequence[MeasSet], f: CellFunction) -> List[Fraction]:
    values = exact_values(f)
    out = [Fraction(0)] * len(values)
    for S in sets:
        a = exact_average(values, S)
        for c in S.cells:
            out[c] += a
    return out


def maximal_oracle(sets: Sequence[MeasSet], f: CellFunction) -> List[Fraction]:
    values = exact_values(f)
    out = [Fraction(0)] * len(values)
    for B in sets:
        a = exact_average(values, B)
        for c in B.cells:
            if a > out[c]:
                out[c] = a
    return out


def max_sparse_oracle(collections: Sequence[Sequence[MeasSet]], f: CellFunction) -> List[Fraction]:
    stacks = [sparse_oracle(list(c), f) for c in collections]
    return [max(column) for column in zip(*stacks)]


def alpha_sparse_oracle(sets: Sequence[MeasSet], subsets: Dict[MeasSet, MeasSet],
                        f: CellFunction) -> List[Fraction]:
    """Λ^1 with G(R) in place of R for the indicator; α = 1 only"""
    values = exact_values(f)
    out = [Fraction(0)] * len(values)
    for R in sets:
        a = exact_average(values, R)
        for c in subsets[R].cells:
            out[c] += a
    return out


def overlap_oracle(sets: Sequence[MeasSet], R0: Optional[MeasSet], cell_count: int) -> List[int]:
    out = [0] * cell_count
    for S in sets:
        if R0 is None or S.issubset(R0):
            for c in S.cells:
                out[c] += 1
    return out


def exact_distribution(values: Sequence[Fraction], lam: Fraction, cell_count: int) -> Fraction:
    """μ{|f| > λ} as an exact fraction of the unit measure"""
    return Fraction(sum(1 for v in values if abs(v) > lam), cell_count)


def as_exact(f: CellFunction) -> List[Fraction]:
    """Float outputs of a kernel converted for comparison with an oracle"""
    return [Fraction(float(v)) for v in f.values]
