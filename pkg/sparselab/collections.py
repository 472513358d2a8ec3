"""
Set families over a dyadic space.

SetFamily is any finite family of nonempty cell sets (the union of an
operator family need not be laminar). MartingaleCollection adds the
containment forest of a laminar family, SparseCollection adds a sparsity
constant with disjoint portions. The helpers below build, certify and
decompose those families.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConstructionError, DomainError, InvariantViolation
from .space import CellFunction, DyadicSpace, MeasSet, average

Portion = Dict[int, Fraction]


def _canonical_order(sets: Sequence[MeasSet]) -> List[MeasSet]:
    # Larger sets first, so every parent precedes its children
    return sorted(sets, key=lambda s: (-s.size, int(s.cells[0]), s.cells.tobytes()))


class SetFamily:
    """A finite family of distinct, nonempty sets of one space"""

    def __init__(self, sets: Sequence[MeasSet], space: Optional[DyadicSpace] = None):
        sets = list(sets)
        if space is None and sets:
            space = sets[0].space
        for s in sets:
            if s.space != space:
                raise DomainError(f"Set {s!r} belongs to {s.space}, expected {space}")
            if s.size == 0:
                raise DomainError("Collections cannot contain the empty set")
        if len(set(sets)) != len(sets):
            raise DomainError("Collections cannot contain duplicate sets")
        self.space = space
        self.sets: Tuple[MeasSet, ...] = tuple(sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i) -> MeasSet:
        return self.sets[i]

    def __contains__(self, s) -> bool:
        return s in self.index

    @cached_property
    def index(self) -> Dict[MeasSet, int]:
        return {s: i for i, s in enumerate(self.sets)}

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([s.size for s in self.sets], dtype=np.int64)

    @cached_property
    def flat_cells(self) -> np.ndarray:
        """All member cells concatenated in family order"""
        if not self.sets:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([s.cells for s in self.sets])

    @cached_property
    def flat_owner(self) -> np.ndarray:
        """Position in the family of the set each entry of flat_cells came from"""
        return np.repeat(np.arange(len(self.sets), dtype=np.int64), self.sizes)

    def averages(self, f: CellFunction) -> np.ndarray:
        """<f>_S for every member, summed in canonical cell order"""
        if not self.sets:
            return np.zeros(0)
        sums = np.bincount(self.flat_owner, weights=np.abs(f.values)[self.flat_cells],
                           minlength=len(self.sets))
        return sums / self.sizes

    def contained_in(self, region: Optional[MeasSet]) -> np.ndarray:
        """Boolean mask of the members S with S ⊆ region; None means the whole space"""
        if region is None:
            return np.ones(len(self.sets), dtype=bool)
        inside = region.indicator()[self.flat_cells]
        hits = np.bincount(self.flat_owner, weights=inside, minlength=len(self.sets))
        return hits == self.sizes

    def total_measure(self) -> float:
        return float(self.sizes.sum()) * self.space.cell_measure if self.sets else 0.0

    def __repr__(self):
        return f"<{type(self).__name__} of {len(self.sets)} sets on {self.space}>"


class MartingaleCollection(SetFamily):
    """
    A laminar family with its containment forest.

    Sets are kept in canonical order (descending size) so parent indices
    are always smaller than child indices. Build through verify_laminar.
    """

    def __init__(self, sets: Sequence[MeasSet], parent: Sequence[Optional[int]],
                 space: Optional[DyadicSpace] = None):
        super().__init__(sets, space)
        self.parent: Tuple[Optional[int], ...] = tuple(parent)

    @cached_property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        kids: List[List[int]] = [[] for _ in self.sets]
        for i, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(i)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def roots(self) -> Tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.parent) if p is None)

    @cached_property
    def subtree_sizes(self) -> np.ndarray:
        """Cell count of Σ_{S ⊆ R} |S| for each member R"""
        sub = self.sizes.copy()
        for i in range(len(self.sets) - 1, -1, -1):
            p = self.parent[i]
            if p is not None:
                sub[p] += sub[i]
        return sub

    @cached_property
    def child_sizes(self) -> np.ndarray:
        """Cell count of the union of the children of each member"""
        out = np.zeros(len(self.sets), dtype=np.int64)
        for i, p in enumerate(self.parent):
            if p is not None:
                out[p] += self.sizes[i]
        return out

    def descendants(self, i: int) -> List[int]:
        """Indices of the members contained in member i, including i"""
        out, stack = [], [i]
        while stack:
            k = stack.pop()
            out.append(k)
            stack.extend(reversed(self.children[k]))
        return sorted(out)

    def depth_of(self, i: int) -> int:
        d = 0
        while self.parent[i] is not None:
            i = self.parent[i]
            d += 1
        return d

    @cached_property
    def nesting_depth(self) -> int:
        """Length of the longest chain minus one; -1 for the empty family"""
        depth = [0] * len(self.sets)
        for i, p in enumerate(self.parent):
            if p is not None:
                depth[i] = depth[p] + 1
        return max(depth, default=-1)


class SparseCollection(MartingaleCollection):
    """A laminar family certified γ-sparse; portions are built on demand"""

    def __init__(self, sets: Sequence[MeasSet], parent: Sequence[Optional[int]],
                 gamma: Optional[Fraction] = None, space: Optional[DyadicSpace] = None):
        super().__init__(sets, parent, space)
        best = _min_ratio(self)
        if gamma is None:
            gamma = best
        gamma = Fraction(gamma)
        if not 0 < gamma <= 1:
            raise DomainError(f"Sparsity constant must lie in (0, 1], got {gamma}")
        if gamma > best:
            raise DomainError(f"Collection is at most {best}-sparse, cannot certify {gamma}")
        self.gamma = gamma

    @classmethod
    def from_collection(cls, collection: MartingaleCollection,
                        gamma: Optional[Fraction] = None) -> "SparseCollection":
        return cls(collection.sets, collection.parent, gamma, collection.space)

    @cached_property
    def portions(self) -> Dict[MeasSet, Portion]:
        return _assign_portions(self, self.gamma)


@dataclass(frozen=True)
class LaminarViolation:
    """Two members that are neither nested nor disjoint"""

    first: MeasSet
    second: MeasSet
    overlap_measure: float

    def __bool__(self):
        return False

    def __str__(self):
        return (f"{self.first!r} and {self.second!r} overlap in measure "
                f"{self.overlap_measure:.6g} without nesting")


def verify_laminar(sets: Sequence[MeasSet], space: Optional[DyadicSpace] = None
                   ) -> Union[MartingaleCollection, LaminarViolation]:
    """
    Check that every pair of sets is nested or disjoint.

    Args:
        sets: Candidate members; duplicates and empty sets are rejected
        space: Space of the family, needed only when `sets` is empty

    Returns:
        The containment forest, or a LaminarViolation naming the first
        straddling pair met in canonical order. A violation is falsy.
    """
    family = SetFamily(sets, space)
    ordered = _canonical_order(family.sets)
    if not ordered:
        return MartingaleCollection([], [], family.space)
    owner = np.full(family.space.cell_count, -1, dtype=np.int64)
    parent: List[Optional[int]] = []
    for i, s in enumerate(ordered):
        o = owner[s.cells]
        if o.min() == o.max():
            parent.append(None if o[0] < 0 else int(o[0]))
            owner[s.cells] = i
            continue
        for k in np.unique(o[o >= 0]):
            partner = ordered[int(k)]
            if not s.issubset(partner):
                overlap = partner.intersection(s).measure
                return LaminarViolation(partner, s, overlap)
        raise InvariantViolation(f"Owner map inconsistent at {s!r}")
    return MartingaleCollection(ordered, parent, family.space)


def laminar_collection(sets: Sequence[MeasSet], space: Optional[DyadicSpace] = None
                       ) -> MartingaleCollection:
    """verify_laminar, raising DomainError on a violation"""
    result = verify_laminar(sets, space)
    if isinstance(result, LaminarViolation):
        raise DomainError(f"Not a martingale collection: {result}")
    return result


def sparse_collection(sets: Sequence[MeasSet], space: Optional[DyadicSpace] = None,
                      gamma: Optional[Fraction] = None) -> SparseCollection:
    return SparseCollection.from_collection(laminar_collection(sets, space), gamma)


def _min_ratio(collection: MartingaleCollection) -> Fraction:
    if not len(collection):
        return Fraction(1)
    return min(Fraction(int(n), int(d)) for n, d in
               zip(collection.sizes, collection.subtree_sizes))


def _assign_portions(collection: MartingaleCollection, gamma: Fraction) -> Dict[MeasSet, Portion]:
    # Children before parents; each set takes gamma*|S| of the mass its
    # descendants left free, cell by cell in canonical order.
    used: Dict[int, Fraction] = {}
    portions: Dict[MeasSet, Portion] = {}
    for i in range(len(collection) - 1, -1, -1):
        s = collection[i]
        need = gamma * s.size
        portion: Portion = {}
        for c in s.cells:
            if need == 0:
                break
            c = int(c)
            free = 1 - used.get(c, 0)
            if free <= 0:
                continue
            take = min(free, need)
            portion[c] = take
            used[c] = used.get(c, 0) + take
            need -= take
        if need > 0:
            raise ConstructionError(f"No room for a {gamma}-portion of {s!r}")
        portions[s] = portion
    return portions


def portion_measure(portion: Portion, space: DyadicSpace) -> Fraction:
    return sum(portion.values(), Fraction(0)) * space.exact_cell_measure


def max_sparsity(collection: MartingaleCollection) -> Tuple[Fraction, Dict[MeasSet, Portion]]:
    """
    Largest γ for which the family has disjoint portions μ(E_S) ≥ γμ(S).

    For laminar families this is min_R μ(R) / Σ_{S⊆R} μ(S). The witness
    portions are fractional: each maps a cell to the share of it used.
    """
    gamma = _min_ratio(collection)
    return gamma, _assign_portions(collection, gamma)


def carleson_constant(collection: MartingaleCollection) -> Fraction:
    """max_R Σ_{S⊆R} μ(S) / μ(R); 1 for the empty family"""
    if not len(collection):
        return Fraction(1)
    return max(Fraction(int(n), int(d)) for n, d in
               zip(collection.subtree_sizes, collection.sizes))


def decay_ratio(collection: MartingaleCollection) -> Fraction:
    """max_R μ(G_1(R)) / μ(R), the share of each set taken by its children"""
    if not len(collection):
        return Fraction(0)
    return max(Fraction(int(n), int(d)) for n, d in
               zip(collection.child_sizes, collection.sizes))


def _member_index(collection: MartingaleCollection, R: MeasSet) -> int:
    try:
        return collection.index[R]
    except KeyError:
        raise DomainError(f"{R!r} is not a member of the collection") from None


def generations(collection: MartingaleCollection, R: MeasSet, j: int) -> List[MeasSet]:
    """The j-th generation of R: members j levels below R in the forest"""
    if j < 0:
        raise DomainError(f"Generation index must be non-negative, got {j}")
    layer = [_member_index(collection, R)]
    for _ in range(j):
        layer = [k for i in layer for k in collection.children[i]]
        if not layer:
            break
    return [collection[i] for i in sorted(layer)]


def generation_union(collection: MartingaleCollection, R: MeasSet, j: int) -> MeasSet:
    """G_j(R), possibly empty"""
    members = generations(collection, R, j)
    if not members:
        return MeasSet.empty(R.space)
    return MeasSet(R.space, np.concatenate([s.cells for s in members]))


def generation_family(collection: MartingaleCollection, j: int) -> Dict[MeasSet, MeasSet]:
    """R ↦ G_j(R) for every member R"""
    return {R: generation_union(collection, R, j) for R in collection}


def build_tower(space: DyadicSpace, start: MeasSet, m: int, child_selector="left"
                ) -> SparseCollection:
    """
    A chain start = R_0 ⊃ R_1 ⊃ ... ⊃ R_m of dyadic cubes.

    child_selector is "left" (first child in cell order), "right" (last
    child), an integer seed, or a numpy Generator picking children at random.
    """
    located = space.cube_of(start)
    if located is None:
        raise DomainError(f"Tower start {start!r} is not a dyadic cube")
    level, index = located
    if m < 0 or level + m > space.depth:
        raise DomainError(
            f"A tower of height {m} from level {level} does not fit in depth {space.depth}"
        )
    if isinstance(child_selector, str):
        if child_selector not in ("left", "right"):
            raise DomainError(f"Unknown child selector {child_selector!r}")
        rng = None
    else:
        rng = np.random.default_rng(child_selector)
    chain = [start]
    for step in range(m):
        kids = space.cube_children(level + step, index)
        if rng is None:
            index = kids[0] if child_selector == "left" else kids[-1]
        else:
            index = kids[int(rng.integers(len(kids)))]
        chain.append(space.cube(level + step + 1, index))
    return SparseCollection(chain, [None] + list(range(m)), space=space)


def _draw_sparse(space: DyadicSpace, rng: np.random.Generator, target: Fraction, count: int,
                 attempts: int) -> Tuple[MartingaleCollection, int]:
    # Finer levels are drawn more often; level l has weight 2^l
    weights = 2.0 ** np.arange(space.depth + 1)
    weights /= weights.sum()
    chosen: List[MeasSet] = []
    seen = set()
    collection = MartingaleCollection([], [], space)
    while len(chosen) < count and attempts > 0:
        attempts -= 1
        level = int(rng.choice(space.depth + 1, p=weights))
        index = tuple(int(k) for k in rng.integers(2 ** level, size=space.dimension))
        cube = space.cube(level, index)
        if cube in seen:
            continue
        seen.add(cube)
        trial = laminar_collection(chosen + [cube], space)
        if _min_ratio(trial) >= target:
            chosen.append(cube)
            collection = trial
    return collection, len(chosen)


def build_random_sparse(space: DyadicSpace, seed, target_gamma: float, count: int,
                        max_attempts: Optional[int] = None, restarts: int = 20
                        ) -> SparseCollection:
    """
    Draw dyadic cubes at random, keeping a cube only while the family stays
    target_gamma-sparse. Deterministic for a given seed.

    A few large cubes can use up the room of their ancestors before `count`
    sets are in; such a draw starts over with the next numbers of the same
    stream, at most `restarts` times.
    """
    target = Fraction(target_gamma)
    if not 0 < target <= 1:
        raise DomainError(f"Target sparsity must lie in (0, 1], got {target_gamma}")
    if count < 0:
        raise DomainError(f"Count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    attempts = max_attempts if max_attempts is not None else 50 * max(count, 1)
    best = 0
    for _ in range(max(restarts, 1)):
        collection, found = _draw_sparse(space, rng, target, count, attempts)
        if found == count:
            return SparseCollection.from_collection(collection, target)
        best = max(best, found)
    raise ConstructionError(
        f"Only {best} of {count} cubes fit a {target}-sparse family on {space}"
    )


# Finite-martingale covers of intervals by three shifted dyadic grids

COVER_CONSTANT = 8
GRID_COUNT = 3


@dataclass(frozen=True)
class CoverImage:
    grid: int
    level: int
    image: MeasSet


@dataclass
class FiniteMartingaleCover:
    """
    Intervals of a 1-D space mapped into three shifted dyadic grids.

    The space sits at cell offset `offset` inside `ambient`, a line four
    times as long, so grid intervals may run past either end.
    """

    space: DyadicSpace
    ambient: DyadicSpace
    offset: int
    images: Dict[MeasSet, CoverImage] = field(default_factory=dict)
    constant: int = COVER_CONSTANT

    def embed(self, s: MeasSet) -> MeasSet:
        return MeasSet(self.ambient, s.cells + self.offset)

    def ratio(self, s: MeasSet) -> Fraction:
        return Fraction(self.images[s].image.size, s.size)

    @property
    def max_ratio(self) -> Fraction:
        return max((self.ratio(s) for s in self.images), default=Fraction(1))

    def grid_collections(self) -> List[MartingaleCollection]:
        """The distinct images of each grid, one laminar family per grid used"""
        out = []
        for g in range(GRID_COUNT):
            members = {im.image for im in self.images.values() if im.grid == g}
            if members:
                out.append(laminar_collection(sorted(members, key=lambda s: int(s.cells[0])),
                                              self.ambient))
        return out


def grid_offset(grid: int, level: int) -> int:
    """Offset of the level-`level` intervals of shifted grid `grid`; offsets nest"""
    return ((-1) ** level * grid * 2 ** level) // 3


def _grid_interval(ambient: DyadicSpace, grid: int, level: int, start: int) -> Tuple[int, int]:
    width = 2 ** level
    o = grid_offset(grid, level)
    k = (start - o) // width
    lo, hi = k * width + o, (k + 1) * width + o
    return max(lo, 0), min(hi, ambient.cell_count)


def cover_shifted_grids(space: DyadicSpace, intervals: Sequence[MeasSet]) -> FiniteMartingaleCover:
    """Map every interval B to the smallest shifted-grid interval B′ ⊇ B"""
    if space.dimension != 1:
        raise DomainError("Shifted-grid covers are only implemented on one-dimensional spaces")
    ambient = DyadicSpace(1, space.depth + 2)
    cover = FiniteMartingaleCover(space, ambient, offset=space.cell_count)
    for b in intervals:
        if b.size == 0 or b.size != int(b.cells[-1]) - int(b.cells[0]) + 1:
            raise DomainError(f"{b!r} is not a nonempty interval of cells")
        start = int(b.cells[0]) + cover.offset
        stop = int(b.cells[-1]) + 1 + cover.offset
        best = None
        for g in range(GRID_COUNT):
            for level in range(ambient.depth + 1):
                lo, hi = _grid_interval(ambient, g, level, start)
                if lo <= start and stop <= hi:
                    if best is None or hi - lo < best[0]:
                        best = (hi - lo, g, level, lo, hi)
                    break
        _, g, level, lo, hi = best
        cover.images[b] = CoverImage(g, level, MeasSet.interval(ambient, lo, hi))
    return cover


@dataclass
class DominationResult:
    """Martingale collections on the ambient line dominating an interval family"""

    cover: FiniteMartingaleCover
    collections: List[SparseCollection]
    constant: Fraction

    def extend(self, f: CellFunction) -> CellFunction:
        """f extended by zero to the ambient line"""
        values = np.zeros(self.cover.ambient.cell_count)
        values[self.cover.offset:self.cover.offset + f.space.cell_count] = f.values
        return CellFunction(self.cover.ambient, values)

    def restrict(self, values: np.ndarray) -> np.ndarray:
        return values[self.cover.offset:self.cover.offset + self.cover.space.cell_count]


def dominate_by_martingale(family: Union[SetFamily, Sequence[MeasSet]],
                           cover: Optional[FiniteMartingaleCover] = None) -> DominationResult:
    """
    Replace each interval by its cover image, grouped per grid and deduplicated.

    The returned constant is max over images B′ of Σ_{B ↦ B′} μ(B′)/μ(B), so
    Λ_family f ≤ constant · Σ_i Λ_{collections[i]} f pointwise for f ≥ 0.

    Args:
        family: One-dimensional sets, intervals in practice
        cover: Cover to use; three shifted grids over the family's space by default

    Returns:
        DominationResult holding the image collections on the ambient line
        and the constant
    """
    sets = list(family)
    if cover is None:
        if not sets:
            space = family.space if isinstance(family, SetFamily) else None
            if space is None:
                raise DomainError("An empty family needs a space to build a cover")
            cover = FiniteMartingaleCover(space, DyadicSpace(1, space.depth + 2), space.cell_count)
        else:
            cover = cover_shifted_grids(sets[0].space, sets)
    load: Dict[MeasSet, Fraction] = {}
    for b in sets:
        image = cover.images[b].image
        load[image] = load.get(image, Fraction(0)) + Fraction(image.size, b.size)
    constant = max(load.values(), default=Fraction(1))
    used = {cover.images[b].image for b in sets}
    collections = [SparseCollection.from_collection(
                       laminar_collection([s for s in c if s in used], cover.ambient))
                   for c in cover.grid_collections()]
    return DominationResult(cover, [c for c in collections if len(c)], constant)


# Stratification of a collection by averages

ZERO_BUCKET = math.inf


@dataclass
class Stratification:
    """
    Buckets of a collection by the size of ⟨f⟩_R against t = δλ/log_+N.

    Bucket 0 holds ⟨f⟩_R > t; bucket s ≥ 1 holds t2^-s < ⟨f⟩_R ≤ t2^(1-s);
    sets with zero average go to ZERO_BUCKET.
    """

    threshold: float
    lam: float
    delta: float
    N: int
    buckets: Dict[float, List[MeasSet]]

    def finite_buckets(self) -> List[int]:
        return sorted(int(s) for s in self.buckets if s != ZERO_BUCKET)


def log_plus(n: float) -> float:
    """log_+ n = max(1, log2 n)"""
    return max(1.0, math.log2(n))


def stratify_by_average(family: Union[SetFamily, Sequence[MeasSet]], f: CellFunction,
                        lam: float, delta: float, N: int) -> Stratification:
    if not lam > 0:
        raise DomainError(f"Level must be positive, got {lam}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if N < 1:
        raise DomainError(f"N must be at least 1, got {N}")
    t = delta * lam / log_plus(N)
    buckets: Dict[float, List[MeasSet]] = {}
    for R in family:
        avg = average(f, R)
        if avg == 0:
            key = ZERO_BUCKET
        elif avg > t:
            key = 0
        else:
            key = 1
            while avg <= t * 2.0 ** -key:
                key += 1
        buckets.setdefault(key, []).append(R)
    return Stratification(t, lam, delta, N, buckets)
