"""
Discrete directional rectangles on the 2-D torus.

A direction is a shear: column i of the grid is shifted by floor(a*i/2^L)
rows, so the rectangle over a dyadic column interval I in band b is
{(i, b + floor(a*i/2^L) mod 2^L) : i in I}, one row high. Shears keep every
rectangle cell-exact with measure |I|·(one row), and rectangles of one band
with nested I stay nested. Directions steeper than 45° swap the two axes.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .collections import SetFamily, SparseCollection, laminar_collection
from .errors import DomainError
from .operators import Operator, apply_maximal
from .space import CellFunction, DyadicSpace, MeasSet


@dataclass(frozen=True)
class ShearDirection:
    """Slope a/2^depth, |a| ≤ 2^depth; swap=True transposes the picture"""

    a: int
    depth: int
    swap: bool = False
    label: str = ""

    def __post_init__(self):
        if abs(self.a) > 2 ** self.depth:
            raise DomainError(
                f"Shear {self.a} out of range for depth {self.depth}; |a| must be <= {2 ** self.depth}"
            )

    @property
    def slope(self) -> float:
        return self.a / 2 ** self.depth

    def offsets(self) -> np.ndarray:
        n = 2 ** self.depth
        return np.floor_divide(self.a * np.arange(n, dtype=np.int64), n)

    def grid(self) -> np.ndarray:
        """grid[b, i] = flat index of the cell of band b in column i"""
        return _shear_grid(self.a, self.depth, self.swap)

    def name(self) -> str:
        return self.label or f"{'swap:' if self.swap else ''}{self.a}/2^{self.depth}"


@lru_cache(maxsize=64)
def _shear_grid(a: int, depth: int, swap: bool) -> np.ndarray:
    n = 2 ** depth
    cols = np.arange(n, dtype=np.int64)
    off = np.floor_divide(a * cols, n)
    rows = (np.arange(n, dtype=np.int64)[:, None] + off[None, :]) % n
    grid = rows * n + cols[None, :] if swap else cols[None, :] * n + rows
    grid.flags.writeable = False
    return grid


def rectangle(space: DyadicSpace, direction: ShearDirection, band: int, level: int, k: int
              ) -> MeasSet:
    """The rectangle over the level-`level` column interval k, in band `band`"""
    _check_space(space, direction)
    n = space.side
    if not 0 <= band < n or not 0 <= level <= space.depth or not 0 <= k < 2 ** level:
        raise DomainError(f"No rectangle at band {band}, level {level}, index {k}")
    width = 2 ** (space.depth - level)
    return MeasSet(space, direction.grid()[band, k * width:(k + 1) * width])


def _check_space(space: DyadicSpace, direction: ShearDirection):
    if space.dimension != 2:
        raise DomainError(f"Directional families live on 2-D spaces, got {space}")
    if direction.depth != space.depth:
        raise DomainError(f"Direction built for depth {direction.depth}, space has {space.depth}")


@dataclass
class ShearRectangleFamily:
    """Towers of sheared rectangles, one per chosen band, and their union"""

    space: DyadicSpace
    direction: ShearDirection
    bands: Dict[int, SparseCollection]
    collection: SparseCollection = field(init=False)

    def __post_init__(self):
        sets = [s for b in sorted(self.bands) for s in self.bands[b]]
        self.collection = SparseCollection.from_collection(laminar_collection(sets, self.space))

    def metadata(self) -> Dict[str, object]:
        return {"slope": self.direction.slope, "a": self.direction.a,
                "swap": self.direction.swap, "bands": sorted(self.bands)}


def build_shear_family(space: DyadicSpace, direction: ShearDirection, seed, density: float,
                       max_start_level: int = 2, bands: Optional[Sequence[int]] = None
                       ) -> ShearRectangleFamily:
    """
    Pick bands with probability `density` (at least one), and in each band
    grow a tower of rectangles from a random dyadic column interval of level
    at most max_start_level down to single columns, halving at every step.

    Passing `bands` fixes the band list instead of drawing it.

    Args:
        space: Two-dimensional space
        direction: Shear slope, with optional axis swap
        seed: Seed or Generator for the band and start choices
        density: Probability that a band carries a tower
        max_start_level: Coarsest level a tower may start from
        bands: Fixed band indices

    Returns:
        ShearRectangleFamily with per-band towers and their union
    """
    _check_space(space, direction)
    if not 0 < density <= 1:
        raise DomainError(f"Band density must lie in (0, 1], got {density}")
    n = space.side
    rng = np.random.default_rng(seed)
    if bands is None:
        chosen = [int(b) for b in np.nonzero(rng.random(n) < density)[0]]
        if not chosen:
            chosen = [int(rng.integers(n))]
    else:
        chosen = sorted(set(int(b) for b in bands))
        if any(not 0 <= b < n for b in chosen):
            raise DomainError(f"Band outside 0..{n - 1}: {chosen}")
    top = min(max_start_level, space.depth)
    towers = {}
    for b in chosen:
        level = int(rng.integers(top + 1))
        k = int(rng.integers(2 ** level))
        chain = [rectangle(space, direction, b, level, k)]
        while level < space.depth:
            k = 2 * k + int(rng.integers(2))
            level += 1
            chain.append(rectangle(space, direction, b, level, k))
        towers[b] = SparseCollection(chain, [None] + list(range(len(chain) - 1)), space=space)
    return ShearRectangleFamily(space, direction, towers)


def full_rectangle_family(space: DyadicSpace, direction: ShearDirection) -> SetFamily:
    """𝓡_v: every rectangle of every band and column level, as a SetFamily"""
    _check_space(space, direction)
    grid = direction.grid()
    sets = []
    for level in range(space.depth + 1):
        width = 2 ** (space.depth - level)
        for b in range(space.side):
            for k in range(2 ** level):
                sets.append(MeasSet(space, grid[b, k * width:(k + 1) * width]))
    return SetFamily(sets, space)


def _rectangle_arrays(space: DyadicSpace, direction: ShearDirection):
    # Flat (cells, owner) arrays of 𝓡_v with each rectangle's cells sorted,
    # the layout SetFamily.averages uses, so averages match it bit for bit
    grid = direction.grid()
    n = space.side
    cells, sizes = [], []
    for level in range(space.depth + 1):
        width = 2 ** (space.depth - level)
        block = np.sort(grid.reshape(n, n // width, width), axis=2)
        cells.append(block.reshape(-1))
        sizes.append(np.full(n * (n // width), width, dtype=np.int64))
    sizes = np.concatenate(sizes)
    owner = np.repeat(np.arange(sizes.size, dtype=np.int64), sizes)
    return np.concatenate(cells), owner, sizes


def _directions(V) -> List[ShearDirection]:
    out: Dict[ShearDirection, None] = {}
    for v in V:
        out.setdefault(v.direction if isinstance(v, ShearRectangleFamily) else v, None)
    return list(out)


def directional_maximal(V: Sequence[Union[ShearRectangleFamily, ShearDirection]],
                        f: CellFunction) -> CellFunction:
    """M_V f = max over directions v of V of 𝓜_{𝓡_v} f"""
    space = f.space
    out = np.zeros(space.cell_count)
    absf = np.abs(f.values)
    for v in _directions(V):
        _check_space(space, v)
        cells, owner, sizes = _rectangle_arrays(space, v)
        sums = np.bincount(owner, weights=absf[cells], minlength=sizes.size)
        np.maximum.at(out, cells, (sums / sizes)[owner])
    return CellFunction(space, out)


class DirectionalMaximal(Operator):
    def __init__(self, space: DyadicSpace, V):
        self._space = space
        self.directions = _directions(V)

    @property
    def space(self):
        return self._space

    def apply(self, f):
        return directional_maximal(self.directions, f)

    def describe(self):
        return f"directional maximal operator over {len(self.directions)} directions"


@dataclass
class MVDominationReport:
    """Result of comparing 𝓜_𝒮 f with M_V f cell by cell"""

    first_violation: Optional[int]
    max_excess: float
    checked_cells: int

    @property
    def passed(self) -> bool:
        return self.first_violation is None

    def __bool__(self):
        return self.passed


def union_family(families: Sequence[ShearRectangleFamily]) -> SetFamily:
    """All rectangles of all families, deduplicated"""
    seen: Dict[MeasSet, None] = {}
    for fam in families:
        for s in fam.collection:
            seen.setdefault(s, None)
    space = families[0].space if families else None
    return SetFamily(list(seen), space)


def verify_MV_domination(families: Sequence[ShearRectangleFamily], f: CellFunction
                         ) -> MVDominationReport:
    """
    Check 𝓜_𝒮 f ≤ M_V f everywhere, 𝒮 the union of the families.

    Args:
        families: Shear families; their directions make up V
        f: Test function

    Returns:
        MVDominationReport with the first offending cell, if any, and the
        largest excess of the left side over the right
    """
    lhs = apply_maximal(union_family(families), f).values
    rhs = directional_maximal(families, f).values
    bad = np.nonzero(lhs > rhs)[0]
    excess = float(np.max(lhs - rhs)) if lhs.size else 0.0
    first = int(bad[0]) if bad.size else None
    return MVDominationReport(first, max(excess, 0.0), int(lhs.size))
