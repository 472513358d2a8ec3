"""
Finite dyadic measure spaces.

A DyadicSpace is [0,1)^d cut into 2^(dL) equal cells carrying Lebesgue
measure. Functions are constant on cells (CellFunction) and sets are unions
of cells (MeasSet). Cells are numbered in row-major multi-index order, which
is also the canonical order of every reduction in the package.

Level sets are strict everywhere: {|f| > lambda}.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import MAX_CELL_EXPONENT
from .errors import DomainError, SpaceSizeError


@dataclass(frozen=True)
class DyadicSpace:
    """[0,1)^dimension split into 2^(dimension*depth) cells"""

    dimension: int
    depth: int

    @property
    def side(self) -> int:
        """Number of cells along each axis"""
        return 2 ** self.depth

    @property
    def cell_count(self) -> int:
        return 2 ** (self.dimension * self.depth)

    @property
    def cell_measure(self) -> float:
        return 2.0 ** -(self.dimension * self.depth)

    @property
    def exact_cell_measure(self) -> Fraction:
        return Fraction(1, self.cell_count)

    def multi_index(self, cell: int) -> Tuple[int, ...]:
        """Row-major multi-index of a finest cell; first coordinate varies slowest"""
        if not 0 <= cell < self.cell_count:
            raise DomainError(f"Cell {cell} outside a space of {self.cell_count} cells")
        index = []
        for _ in range(self.dimension):
            cell, r = divmod(cell, self.side)
            index.append(r)
        return tuple(reversed(index))

    def flat_index(self, multi: Sequence[int]) -> int:
        if len(multi) != self.dimension:
            raise DomainError(f"Expected a {self.dimension}-index, got {tuple(multi)}")
        flat = 0
        for i in multi:
            if not 0 <= i < self.side:
                raise DomainError(f"Index {tuple(multi)} outside the {self.side}-cell grid")
            flat = flat * self.side + i
        return flat

    def ancestor(self, cell: int, level: int) -> Tuple[int, ...]:
        """Index of the level-`level` dyadic cube containing `cell`"""
        if not 0 <= level <= self.depth:
            raise DomainError(f"Level {level} outside 0..{self.depth}")
        shift = self.depth - level
        return tuple(i >> shift for i in self.multi_index(cell))

    def cube_cells(self, level: int, index: Sequence[int]) -> np.ndarray:
        """Sorted flat indices of the cells of a dyadic cube"""
        if not 0 <= level <= self.depth:
            raise DomainError(f"Level {level} outside 0..{self.depth}")
        if len(index) != self.dimension or any(not 0 <= k < 2 ** level for k in index):
            raise DomainError(f"Cube index {tuple(index)} invalid at level {level}")
        width = 2 ** (self.depth - level)
        flat = np.zeros(1, dtype=np.int64)
        for k in index:
            axis = np.arange(k * width, (k + 1) * width, dtype=np.int64)
            flat = np.add.outer(flat * self.side, axis).ravel()
        return flat

    def cube(self, level: int, index: Sequence[int]) -> "MeasSet":
        return MeasSet(self, self.cube_cells(level, index))

    def cube_children(self, level: int, index: Sequence[int]) -> List[Tuple[int, ...]]:
        """Indices of the 2^d children of a cube, in row-major order"""
        if level >= self.depth:
            raise DomainError(f"Cube at level {level} has no children in a depth-{self.depth} space")
        children = [()]
        for k in index:
            children = [c + (2 * k + b,) for c in children for b in (0, 1)]
        return children

    def cube_of(self, s: "MeasSet") -> Optional[Tuple[int, Tuple[int, ...]]]:
        """Return (level, index) if the set is a dyadic cube, else None"""
        if len(s) == 0:
            return None
        per_axis = round(len(s) ** (1.0 / self.dimension))
        if per_axis ** self.dimension != len(s) or per_axis & (per_axis - 1):
            return None
        level = self.depth - (per_axis.bit_length() - 1)
        index = self.ancestor(int(s.cells[0]), level)
        if np.array_equal(self.cube_cells(level, index), s.cells):
            return level, index
        return None

    def whole(self) -> "MeasSet":
        return MeasSet(self, np.arange(self.cell_count, dtype=np.int64))

    def __repr__(self):
        return f"DyadicSpace(d={self.dimension}, L={self.depth})"


def build_space(d: int, L: int, max_exponent: int = MAX_CELL_EXPONENT) -> DyadicSpace:
    """
    Create the dyadic space with 2^(dL) cells, each of measure 2^(-dL).

    Args:
        d: Dimension, at least 1
        L: Depth, the number of halvings along each axis
        max_exponent: Largest allowed d*L

    Returns:
        The DyadicSpace

    Raises:
        DomainError: d < 1 or L < 0
        SpaceSizeError: d*L above max_exponent
    """
    if d < 1:
        raise DomainError(f"Dimension must be at least 1, got {d}")
    if L < 0:
        raise DomainError(f"Depth must be non-negative, got {L}")
    if d * L > max_exponent:
        raise SpaceSizeError(
            f"A space with d={d}, L={L} has 2^{d * L} cells, above the cap of 2^{max_exponent}"
        )
    return DyadicSpace(d, L)


class MeasSet:
    """
    A measurable set: a sorted array of finest-cell indices of one space.

    Sets compare and hash by (space, cells), so collections can use set
    semantics. The empty set is allowed here; collections reject it.
    """

    __slots__ = ("space", "cells", "_key")

    def __init__(self, space: DyadicSpace, cells: Iterable[int]):
        if not isinstance(cells, np.ndarray):
            cells = list(cells)
        arr = np.unique(np.asarray(cells, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= space.cell_count):
            raise DomainError(f"Cells out of range for {space}")
        arr.flags.writeable = False
        self.space = space
        self.cells = arr
        self._key = arr.tobytes()

    @classmethod
    def empty(cls, space: DyadicSpace) -> "MeasSet":
        return cls(space, np.zeros(0, dtype=np.int64))

    @classmethod
    def interval(cls, space: DyadicSpace, start: int, stop: int) -> "MeasSet":
        """Contiguous cells [start, stop) of a one-dimensional space"""
        if space.dimension != 1:
            raise DomainError("Intervals are only defined on one-dimensional spaces")
        if not 0 <= start < stop <= space.cell_count:
            raise DomainError(f"Interval [{start}, {stop}) is empty or out of range")
        return cls(space, np.arange(start, stop, dtype=np.int64))

    @classmethod
    def from_ranges(cls, space: DyadicSpace, ranges: Sequence[Sequence[int]]) -> "MeasSet":
        parts = [np.arange(a, b, dtype=np.int64) for a, b in ranges]
        cells = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return cls(space, cells)

    @property
    def size(self) -> int:
        """Number of cells"""
        return int(self.cells.size)

    @property
    def measure(self) -> float:
        return self.size * self.space.cell_measure

    @property
    def exact_measure(self) -> Fraction:
        return self.size * self.space.exact_cell_measure

    def ranges(self) -> List[List[int]]:
        """Maximal runs of consecutive cells as [start, stop) pairs"""
        if self.size == 0:
            return []
        breaks = np.nonzero(np.diff(self.cells) != 1)[0]
        starts = np.concatenate(([self.cells[0]], self.cells[breaks + 1]))
        stops = np.concatenate((self.cells[breaks] + 1, [self.cells[-1] + 1]))
        return [[int(a), int(b)] for a, b in zip(starts, stops)]

    def issubset(self, other: "MeasSet") -> bool:
        if self.size == 0:
            return True
        if self.size > other.size:
            return False
        pos = np.searchsorted(other.cells, self.cells)
        if pos[-1] >= other.size:
            return False
        return bool(np.all(other.cells[pos] == self.cells))

    def intersection(self, other: "MeasSet") -> "MeasSet":
        return MeasSet(self.space, np.intersect1d(self.cells, other.cells, assume_unique=True))

    def union(self, other: "MeasSet") -> "MeasSet":
        return MeasSet(self.space, np.union1d(self.cells, other.cells))

    def isdisjoint(self, other: "MeasSet") -> bool:
        return np.intersect1d(self.cells, other.cells, assume_unique=True).size == 0

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.space.cell_count, dtype=bool)
        out[self.cells] = True
        return out

    def __len__(self):
        return self.size

    def __contains__(self, cell) -> bool:
        i = np.searchsorted(self.cells, cell)
        return bool(i < self.size and self.cells[i] == cell)

    def __eq__(self, other):
        if not isinstance(other, MeasSet):
            return NotImplemented
        return self.space == other.space and self._key == other._key

    def __hash__(self):
        return hash((self.space, self._key))

    def __repr__(self):
        runs = self.ranges()
        shown = ", ".join(f"[{a},{b})" for a, b in runs[:4])
        if len(runs) > 4:
            shown += ", ..."
        return f"<MeasSet {self.size} cells {shown}>"


class CellFunction:
    """A real function constant on the finest cells of a space; read-only"""

    __slots__ = ("space", "values")

    def __init__(self, space: DyadicSpace, values):
        arr = np.array(values, dtype=np.float64)
        if arr.shape != (space.cell_count,):
            raise DomainError(
                f"Expected {space.cell_count} cell values, got array of shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("Cell values must be finite")
        arr.flags.writeable = False
        self.space = space
        self.values = arr

    @classmethod
    def zeros(cls, space: DyadicSpace) -> "CellFunction":
        return cls(space, np.zeros(space.cell_count))

    @classmethod
    def constant(cls, space: DyadicSpace, c: float) -> "CellFunction":
        return cls(space, np.full(space.cell_count, float(c)))

    @classmethod
    def indicator(cls, s: MeasSet, height: float = 1.0) -> "CellFunction":
        values = np.zeros(s.space.cell_count)
        values[s.cells] = height
        return cls(s.space, values)

    def abs(self) -> "CellFunction":
        return CellFunction(self.space, np.abs(self.values))

    def scaled(self, c: float) -> "CellFunction":
        return CellFunction(self.space, self.values * c)

    def with_block(self, cells: np.ndarray, factor: float) -> "CellFunction":
        """Copy with the values on `cells` multiplied by `factor`"""
        values = self.values.copy()
        values[cells] *= factor
        return CellFunction(self.space, values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __len__(self):
        return self.values.size

    def __getitem__(self, cell):
        return self.values[cell]

    def __eq__(self, other):
        if not isinstance(other, CellFunction):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"<CellFunction on {self.space} max|f|={self.max_abs():.6g}>"


def average(f: CellFunction, B: MeasSet) -> float:
    """<f>_B = mu(B)^-1 * integral over B of |f|"""
    if B.size == 0:
        raise DomainError("Average over an empty set is undefined")
    return float(np.abs(f.values[B.cells]).sum() / B.size)


def lp_norm(f: CellFunction, p: float) -> float:
    """L^p norm for p in [1, inf); p = math.inf gives max|f|"""
    if not p >= 1:
        raise DomainError(f"lp_norm needs p >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    if p == 1:
        return float(a.sum() * f.space.cell_measure)
    return float((np.sum(a ** p) * f.space.cell_measure) ** (1.0 / p))


def distribution(f: CellFunction, lam: float) -> float:
    """
    mu{x : |f(x)| > lam}, summed exactly over cells.

    The inequality is strict, so distribution(1, 1) == 0.
    """
    return int(np.count_nonzero(np.abs(f.values) > lam)) * f.space.cell_measure


def level_set(f: CellFunction, lam: float) -> MeasSet:
    """The set {|f| > lam}"""
    return MeasSet(f.space, np.nonzero(np.abs(f.values) > lam)[0])


def distinct_levels(f: CellFunction) -> np.ndarray:
    """Sorted distinct values of |f|; the distribution function only jumps here"""
    return np.unique(np.abs(f.values))
