"""
Invariant predicates for verification suites.

Each predicate is called with a Fixture (see sparselab.suite) and returns
True when the invariant holds on every function and set of the fixture.
Predicates that do not apply to a fixture (no directional families, a
space too large for the exact oracles) hold vacuously.
"""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .collections import (LaminarViolation, MartingaleCollection, decay_ratio, generation_union,
                          portion_measure, verify_laminar)
from .config import EXACT_ORACLE_MAX_CELLS
from .directional import verify_MV_domination
from .experiments import tail_experiment
from .operators import (AlphaSpec, apply_alpha_sparse, apply_max_sparse, apply_maximal,
                        apply_sparse, verify_level_cover)
from .oracles import as_exact, max_sparse_oracle, maximal_oracle, sparse_oracle


class Predicate(ABC):
    """Base class for fixture invariants"""

    @abstractmethod
    def __call__(self, fixture) -> bool:
        """Returns True if the invariant holds on the fixture"""
        pass

    @property
    def name(self) -> str:
        return self.__class__.__name__


class OR(Predicate):
    """Holds when any of the predicates holds"""

    def __init__(self, *xs: Predicate):
        self.xs = xs

    def __call__(self, fixture):
        return any(x(fixture) for x in self.xs)

    @property
    def name(self):
        return "OR(" + ",".join(x.name for x in self.xs) + ")"


class ALL(Predicate):
    """Holds when every predicate holds"""

    def __init__(self, *xs: Predicate):
        self.xs = xs

    def __call__(self, fixture):
        return all(x(fixture) for x in self.xs)

    @property
    def name(self):
        return "ALL(" + ",".join(x.name for x in self.xs) + ")"


class LAMINAR(Predicate):
    """Every pair of sets in the collection is nested or disjoint"""

    def __call__(self, fixture):
        return not isinstance(verify_laminar(fixture.collection.sets, fixture.space),
                              LaminarViolation)


class SPARSE(Predicate):
    """
    The certified portions sit inside their sets, use each cell at most
    once in total, and have measure at least γμ(S).
    """

    def __init__(self, gamma: Optional[float] = None):
        self.gamma = None if gamma is None else Fraction(gamma)

    def __call__(self, fixture):
        c = fixture.collection
        if not hasattr(c, "portions"):
            return False
        gamma = c.gamma if self.gamma is None else self.gamma
        if gamma > c.gamma:
            return False
        used = {}
        for s in c:
            portion = c.portions[s]
            if any(cell not in s for cell in portion):
                return False
            if portion_measure(portion, fixture.space) < gamma * s.exact_measure:
                return False
            for cell, mass in portion.items():
                used[cell] = used.get(cell, 0) + mass
        return all(v <= 1 for v in used.values())


class ORACLE_AGREES(Predicate):
    """
    The numpy kernels equal the rational brute-force evaluators exactly.
    Vacuous above the oracle size cap.
    """

    def __call__(self, fixture):
        if fixture.space.cell_count > EXACT_ORACLE_MAX_CELLS:
            return True
        sets = list(fixture.collection)
        identity = AlphaSpec.identity(fixture.collection)
        for f in fixture.functions:
            if as_exact(apply_sparse(fixture.collection, f)) != sparse_oracle(sets, f):
                return False
            if as_exact(apply_maximal(fixture.collection, f)) != maximal_oracle(sets, f):
                return False
            if as_exact(apply_alpha_sparse(identity, f)) != sparse_oracle(sets, f):
                return False
            if fixture.family is not None:
                expected = max_sparse_oracle([list(c) for c in fixture.family], f)
                if as_exact(apply_max_sparse(fixture.family, f)) != expected:
                    return False
        return True


class MAXIMAL_BELOW_SPARSE(Predicate):
    """𝓜_𝒮 f ≤ Λ_𝒮 f at every cell"""

    def __call__(self, fixture):
        return all(np.all(apply_maximal(fixture.collection, f).values
                          <= apply_sparse(fixture.collection, f).values)
                   for f in fixture.functions)


class GENERATION_BOUND(Predicate):
    """μ(G_j(R)) ≤ η^j μ(R) for every member R and generation j, η the decay ratio"""

    def __call__(self, fixture):
        c = fixture.collection
        if not isinstance(c, MartingaleCollection):
            return False
        eta = decay_ratio(c)
        for R in c:
            for j in range(c.nesting_depth + 2):
                if generation_union(c, R, j).exact_measure > eta ** j * R.exact_measure:
                    return False
        return True


class TAIL_BOUND(Predicate):
    """μ{Σ_{S⊆R0} 1_S > λ} ≤ η^⌊λ⌋ μ(R0) for every root R0 on the default λ grid"""

    def __call__(self, fixture):
        return tail_experiment([(fixture.name, fixture.collection)]).passed


class LEVEL_COVERED(Predicate):
    """
    {Λ_𝔊 f > λ} lies in the union of the stratified covering sets for every
    positive value λ taken by Λ_𝔊 f.
    """

    def __init__(self, delta: float = 0.5):
        self.delta = delta

    def __call__(self, fixture):
        if fixture.family is None:
            return True
        for f in fixture.functions:
            values = apply_max_sparse(fixture.family, f).values
            for lam in _positive_levels(values):
                if not verify_level_cover(fixture.family, f, lam, self.delta):
                    return False
        return True


def _positive_levels(values: np.ndarray) -> List[float]:
    return [float(v) for v in np.unique(values) if v > 0]


class MV_DOMINATES(Predicate):
    """𝓜_𝒮 f ≤ M_V f for the union 𝒮 of the fixture's directional families"""

    def __call__(self, fixture):
        if not fixture.directional:
            return True
        return all(verify_MV_domination(fixture.directional, f) for f in fixture.functions)
