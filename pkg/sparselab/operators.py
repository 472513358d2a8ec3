"""
Pointwise evaluation of the sparse-type operators.

Every operator reads |f| only, so all outputs are non-negative. Kernels work
on the flattened (cell, owner) arrays of a family: per-set sums come from
np.bincount, which accumulates in canonical order, and pointwise maxima from
np.maximum.at. Two evaluations over the same family therefore agree
bit-for-bit.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .collections import (DominationResult, MartingaleCollection, SetFamily, carleson_constant,
                          log_plus, stratify_by_average, verify_laminar)
from .errors import DomainError, UnsupportedOperatorError
from .space import CellFunction, DyadicSpace, MeasSet

# Absolute constant of the level-set covering chain; Σ_{s≥1} c2^(-s/2) < 1
COVER_CHAIN_CONSTANT = 1 - 2 ** -0.5


def _as_family(sets: Union[SetFamily, Sequence[MeasSet]], space: Optional[DyadicSpace] = None
               ) -> SetFamily:
    return sets if isinstance(sets, SetFamily) else SetFamily(sets, space)


def _spread(space: DyadicSpace, cells: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return np.bincount(cells, weights=weights, minlength=space.cell_count).astype(np.float64)


def apply_sparse(family: Union[SetFamily, Sequence[MeasSet]], f: CellFunction) -> CellFunction:
    """Λ_𝒮 f = Σ_S ⟨f⟩_S 1_S"""
    family = _as_family(family, f.space)
    if not len(family):
        return CellFunction.zeros(f.space)
    avg = family.averages(f)
    return CellFunction(f.space, _spread(f.space, family.flat_cells, avg[family.flat_owner]))


def apply_maximal(family: Union[SetFamily, Sequence[MeasSet]], f: CellFunction) -> CellFunction:
    """𝓜_𝔅 f = sup_B ⟨f⟩_B 1_B, zero off the union of 𝔅"""
    family = _as_family(family, f.space)
    out = np.zeros(f.space.cell_count)
    if len(family):
        np.maximum.at(out, family.flat_cells, family.averages(f)[family.flat_owner])
    return CellFunction(f.space, out)


class OperatorFamily:
    """The tuple 𝔊 = (𝒮_1, ..., 𝒮_N) and the deduplicated union of its members"""

    def __init__(self, collections: Sequence[SetFamily]):
        collections = tuple(collections)
        if not collections:
            raise DomainError("An operator family needs at least one collection")
        spaces = {c.space for c in collections if c.space is not None}
        if len(spaces) > 1:
            raise DomainError("All collections of an operator family must share one space")
        self.collections = collections
        self.space = spaces.pop() if spaces else None

    @property
    def N(self) -> int:
        return len(self.collections)

    @cached_property
    def union(self) -> SetFamily:
        seen: Dict[MeasSet, None] = {}
        for c in self.collections:
            for s in c:
                seen.setdefault(s, None)
        return SetFamily(list(seen), self.space)

    def __len__(self):
        return self.N

    def __iter__(self):
        return iter(self.collections)

    def __repr__(self):
        return f"<OperatorFamily N={self.N} union={len(self.union)} sets>"


def _running_max(family: OperatorFamily, f: CellFunction) -> Tuple[np.ndarray, np.ndarray]:
    # Strict comparison keeps the lowest k on ties
    best = apply_sparse(family.collections[0], f).values.copy()
    choice = np.zeros(f.space.cell_count, dtype=np.int64)
    for k in range(1, family.N):
        values = apply_sparse(family.collections[k], f).values
        better = values > best
        best[better] = values[better]
        choice[better] = k
    return best, choice


def apply_max_sparse(family: OperatorFamily, f: CellFunction) -> CellFunction:
    """Λ_𝔊 f = max_k Λ_{𝒮_k} f"""
    return CellFunction(f.space, _running_max(family, f)[0])


@dataclass
class AlphaSpec:
    """
    Base collection, subset map R ↦ G(R) ⊆ R, exponent α and fraction bound δ.

    G may map a set to the empty set. Construction checks G(R) ⊆ R,
    μ(G(R)) ≤ δμ(R), and that the distinct nonempty G(R) form a laminar
    family at least as sparse as the base collection.
    """

    collection: SetFamily
    subsets: Dict[MeasSet, MeasSet]
    alpha: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.delta <= 1:
            raise DomainError(f"delta must lie in (0, 1], got {self.delta}")
        bound = Fraction(self.delta)
        for R in self.collection:
            if R not in self.subsets:
                raise DomainError(f"No subset given for {R!r}")
            G = self.subsets[R]
            if not G.issubset(R):
                raise DomainError(f"G(R) is not contained in R for {R!r}")
            if G.size > bound * R.size:
                raise DomainError(f"μ(G(R)) exceeds {self.delta}·μ(R) for {R!r}")
        images = {G for G in self.subsets.values() if G.size}
        laminar = verify_laminar(list(images), self.collection.space)
        if not isinstance(laminar, MartingaleCollection):
            raise DomainError("The sets G(R) do not form a laminar family")
        gamma = self.base_gamma
        if gamma is not None and 1 / carleson_constant(laminar) < gamma:
            raise DomainError(
                f"The sets G(R) are only {1 / carleson_constant(laminar)}-sparse, "
                f"the collection is {gamma}-sparse"
            )

    @property
    def base_gamma(self) -> Optional[Fraction]:
        """Sparsity constant the G(R) must share; None for a non-laminar base family"""
        gamma = getattr(self.collection, "gamma", None)
        if gamma is not None:
            return Fraction(gamma)
        if isinstance(self.collection, MartingaleCollection):
            return 1 / carleson_constant(self.collection)
        return None

    @classmethod
    def identity(cls, collection: SetFamily, alpha: float = 1.0) -> "AlphaSpec":
        return cls(collection, {R: R for R in collection}, alpha, 1.0)

    @cached_property
    def is_identity(self) -> bool:
        return all(self.subsets[R] == R for R in self.collection)

    @cached_property
    def _flat(self) -> Tuple[np.ndarray, np.ndarray]:
        parts = [self.subsets[R].cells for R in self.collection]
        if not parts:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        owner = np.repeat(np.arange(len(parts), dtype=np.int64), [p.size for p in parts])
        return np.concatenate(parts), owner

    def image_family(self) -> SetFamily:
        """The distinct nonempty sets G(R), the 𝒮′ of the α-operator"""
        return SetFamily(list(dict.fromkeys(G for G in self.subsets.values() if G.size)),
                         self.collection.space)


def apply_alpha_sparse(spec: AlphaSpec, f: CellFunction) -> CellFunction:
    """Λ^α f = (Σ_R ⟨f⟩_R^α 1_{G(R)})^(1/α)"""
    if spec.is_identity and spec.alpha == 1:
        return apply_sparse(spec.collection, f)
    if not len(spec.collection):
        return CellFunction.zeros(f.space)
    avg = spec.collection.averages(f)
    cells, owner = spec._flat
    if spec.alpha == 1:
        return CellFunction(f.space, _spread(f.space, cells, avg[owner]))
    total = _spread(f.space, cells, (avg ** spec.alpha)[owner])
    return CellFunction(f.space, total ** (1.0 / spec.alpha))


def overlap_function(family: SetFamily, R0: Optional[MeasSet] = None) -> CellFunction:
    """
    Σ_{S ∈ 𝒮, S ⊆ R0} 1_S; R0 = None stands for the whole space.

    Inclusion is not strict, so R0 counts itself.
    """
    if R0 is not None and R0 not in family:
        raise DomainError(f"{R0!r} is not a member of the collection")
    space = family.space if family.space is not None else (R0.space if R0 else None)
    if space is None:
        raise DomainError("Cannot count overlaps of an empty family without a space")
    if not len(family):
        return CellFunction.zeros(space)
    keep = family.contained_in(R0)[family.flat_owner]
    counts = np.bincount(family.flat_cells[keep], minlength=space.cell_count)
    return CellFunction(space, counts.astype(np.float64))


@dataclass
class LinearizationPartition:
    """
    E_k = cells where collection k is the lowest index attaining Λ_𝔊 f.

    `choice[x]` is the k owning cell x.
    """

    family: OperatorFamily
    choice: np.ndarray
    parts: List[MeasSet]

    def trace(self, k: int, R: MeasSet) -> MeasSet:
        """E_{k,R} = E_k ∩ R"""
        return self.parts[k].intersection(R)

    def reconstruct(self, f: CellFunction) -> CellFunction:
        """Σ_k Σ_{R∈𝒮_k} ⟨f⟩_R 1_{E_{k,R}}"""
        out = np.zeros(f.space.cell_count)
        for k, c in enumerate(self.family.collections):
            mask = self.choice == k
            out[mask] = apply_sparse(c, f).values[mask]
        return CellFunction(f.space, out)


def linearize(family: OperatorFamily, f: CellFunction) -> LinearizationPartition:
    """Split the space by which Λ_{𝒮_k} f attains the maximum; ties go to the lowest k"""
    choice = _running_max(family, f)[1]
    choice.flags.writeable = False
    parts = [MeasSet(f.space, np.nonzero(choice == k)[0]) for k in range(family.N)]
    return LinearizationPartition(family, choice, parts)


@dataclass
class LevelCoverReport:
    lam: float
    delta: float
    level_set: MeasSet
    uncovered: MeasSet
    bucket_count: int

    @property
    def passed(self) -> bool:
        return self.uncovered.size == 0

    def __bool__(self):
        return self.passed


def level_cover_threshold(s: int, N: int, delta: float) -> float:
    """Overlap height c·2^(s/2-1)·log_+N/δ for bucket s ≥ 1"""
    return COVER_CHAIN_CONSTANT * 2.0 ** (s / 2 - 1) * log_plus(N) / delta


def verify_level_cover(family: OperatorFamily, f: CellFunction, lam: float, delta: float
                       ) -> LevelCoverReport:
    """
    Check {Λ_𝔊 f > λ} against the union of the bucket-0 sets and the
    high-overlap regions of the buckets s ≥ 1, for every collection k.

    Args:
        family: The collections 𝒮_1, ..., 𝒮_N
        f: Input function
        lam: Positive level λ
        delta: Fraction in (0, 1) setting the overlap thresholds

    Returns:
        LevelCoverReport whose `uncovered` set must be empty
    """
    if not lam > 0:
        raise DomainError(f"Level must be positive, got {lam}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    space = f.space
    level = apply_max_sparse(family, f).values > lam
    covered = np.zeros(space.cell_count, dtype=bool)
    buckets = 0
    for c in family.collections:
        strat = stratify_by_average(c, f, lam, delta, family.N)
        for R in strat.buckets.get(0, []):
            covered[R.cells] = True
        for s in strat.finite_buckets():
            buckets += 1
            if s == 0:
                continue
            overlap = overlap_function(SetFamily(strat.buckets[s], space))
            covered |= overlap.values > level_cover_threshold(s, family.N, delta)
    level_set = MeasSet(space, np.nonzero(level)[0])
    uncovered = MeasSet(space, np.nonzero(level & ~covered)[0])
    return LevelCoverReport(lam, delta, level_set, uncovered, buckets)


def dominating_sum(result: DominationResult, f: CellFunction) -> CellFunction:
    """Σ_i Λ_{𝒮_i} f over the dominating collections, restricted back to f's space"""
    extended = result.extend(f)
    total = np.zeros(result.cover.ambient.cell_count)
    for c in result.collections:
        total += apply_sparse(c, extended).values
    return CellFunction(f.space, result.restrict(total))


class Operator(ABC):
    """A map from cell functions to cell functions on one space"""

    linear = False

    @property
    @abstractmethod
    def space(self) -> DyadicSpace:
        pass

    @abstractmethod
    def apply(self, f: CellFunction) -> CellFunction:
        pass

    def __call__(self, f: CellFunction) -> CellFunction:
        if f.space != self.space:
            raise DomainError(f"Operator on {self.space} applied to a function on {f.space}")
        return self.apply(f)

    def factors(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        (A, B) with T f = A Bᵀ f for f ≥ 0, each of shape (cells, k).

        Only positive linear operators have them.
        """
        raise UnsupportedOperatorError(f"{type(self).__name__} is not linear")

    def matrix(self) -> np.ndarray:
        """Dense matrix in the cell basis"""
        a, b = self.factors()
        return a @ b.T

    def describe(self) -> str:
        return type(self).__name__


def _factor_columns(space: DyadicSpace, pairs) -> Tuple[np.ndarray, np.ndarray]:
    # Column j of A is 1_{rows_j}, column j of B is 1_{cols_j}/|cols_j|
    pairs = list(pairs)
    a = np.zeros((space.cell_count, len(pairs)))
    b = np.zeros((space.cell_count, len(pairs)))
    for j, (rows, cols) in enumerate(pairs):
        a[rows, j] = 1.0
        b[cols, j] = 1.0 / cols.size
    return a, b


class SparseOperator(Operator):
    linear = True

    def __init__(self, family: SetFamily, space: Optional[DyadicSpace] = None):
        self.family = _as_family(family, space)
        self._space = space or self.family.space

    @property
    def space(self):
        return self._space

    def apply(self, f):
        return apply_sparse(self.family, f)

    def factors(self):
        return _factor_columns(self.space, ((s.cells, s.cells) for s in self.family))

    def describe(self):
        return f"sparse operator over {len(self.family)} sets"


class MaximalOperator(Operator):
    def __init__(self, family: SetFamily, space: Optional[DyadicSpace] = None):
        self.family = _as_family(family, space)
        self._space = space or self.family.space

    @property
    def space(self):
        return self._space

    def apply(self, f):
        return apply_maximal(self.family, f)

    def describe(self):
        return f"maximal operator over {len(self.family)} sets"


class MaxSparseOperator(Operator):
    def __init__(self, family: OperatorFamily):
        self.family = family

    @property
    def space(self):
        return self.family.space

    def apply(self, f):
        return apply_max_sparse(self.family, f)

    def describe(self):
        return f"maximal sparse operator, N={self.family.N}"


class AlphaSparseOperator(Operator):
    def __init__(self, spec: AlphaSpec):
        self.spec = spec
        self.linear = spec.alpha == 1

    @property
    def space(self):
        return self.spec.collection.space

    def apply(self, f):
        return apply_alpha_sparse(self.spec, f)

    def factors(self):
        if not self.linear:
            return super().factors()
        return _factor_columns(self.space, ((self.spec.subsets[R].cells, R.cells)
                                            for R in self.spec.collection))

    def describe(self):
        return f"alpha-sparse operator, alpha={self.spec.alpha:g}, delta={self.spec.delta:g}"
