"""
Fluent verification suites.

A suite runs a chain of predicates over a list of fixtures and streams one
CheckResult per (fixture, predicate) pair into a reducer:

    report = (standard_suite(space, seed=1)
              .exclude_when(lambda fx: fx.name.startswith("tower"))
              .limit(3)
              .reduce_all(SuiteReportReducer(seed=1)))
"""

from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from .collections import SetFamily
from .config import DEFAULT_SEED, ENSEMBLES
from .console import progress
from .directional import ShearDirection, ShearRectangleFamily, build_shear_family
from .experiments import child_seed, sparse_fixtures
from .operators import OperatorFamily
from .predicates import (GENERATION_BOUND, LAMINAR, LEVEL_COVERED, MAXIMAL_BELOW_SPARSE,
                         MV_DOMINATES, ORACLE_AGREES, SPARSE, TAIL_BOUND, Predicate)
from .space import CellFunction, DyadicSpace


@dataclass
class Fixture:
    """A collection, the test functions to run through it, and optional extras"""

    name: str
    collection: SetFamily
    functions: List[CellFunction]
    family: Optional[OperatorFamily] = None
    directional: List[ShearRectangleFamily] = field(default_factory=list)

    @property
    def space(self) -> DyadicSpace:
        return self.collection.space


@dataclass
class CheckResult:
    fixture: str
    check: str
    passed: bool
    detail: str = ""


class VerificationSuite:
    """Fixtures filtered through include/exclude predicates, then checked"""

    def __init__(self, fixtures: Sequence[Fixture]):
        self.fixtures = list(fixtures)
        self._filters: List[Callable[[Fixture], bool]] = []
        self._checks: List[Predicate] = []
        self._limit: Optional[int] = None

    def include_when(self, predicate: Callable[[Fixture], bool]):
        """Keep only fixtures for which predicate returns True"""
        self._filters.append(predicate)
        return self

    def exclude_when(self, predicate: Callable[[Fixture], bool]):
        """Drop fixtures for which predicate returns True"""
        self._filters.append(lambda fx: not predicate(fx))
        return self

    def check(self, predicate: Predicate):
        """Add an invariant to run on every selected fixture"""
        self._checks.append(predicate)
        return self

    def limit(self, max_count: int):
        """
        Run on at most `max_count` fixtures.

        Args:
            max_count: Number of selected fixtures to keep, in order

        Returns:
            self for method chaining
        """
        if max_count < 0:
            raise ValueError(f"Limit must be non-negative, got {max_count}")
        self._limit = max_count
        return self

    @property
    def checks(self) -> List[str]:
        return [c.name for c in self._checks]

    def selected(self) -> List[Fixture]:
        out = [fx for fx in self.fixtures if all(f(fx) for f in self._filters)]
        return out if self._limit is None else out[:self._limit]

    def __iter__(self) -> Iterator[CheckResult]:
        for fx in self.selected():
            for check in self._checks:
                try:
                    passed = bool(check(fx))
                    detail = "" if passed else "invariant does not hold"
                except Exception as e:
                    passed, detail = False, f"{e.__class__.__name__}: {e}"
                yield CheckResult(fx.name, check.name, passed, detail)

    def reduce_all(self, reducer, verbose: bool = False):
        """
        Apply a Reducer object to every check result.

        Args:
            reducer: Reducer whose fold sees one CheckResult per (fixture, check)
            verbose: Print each result to the console

        Returns:
            The final result from reducer.final()
        """
        reducer.verbose = verbose
        reducer.init_value()
        count = 0
        for result in self:
            count += 1
            progress(verbose, f"{result.fixture}: {result.check} "
                              f"{'ok' if result.passed else 'FAILED'}")
            reducer.fold(result)
        progress(verbose, f"Verification completed. Ran {count} checks.")
        return reducer.final()


def standard_functions(space: DyadicSpace, seed: int = DEFAULT_SEED, count: int = 3
                       ) -> List[CellFunction]:
    """f ≡ 1, the indicator of the first half-cube, and `count` random multiples of 1/16"""
    rng = np.random.default_rng(child_seed(seed, 100))
    out = [CellFunction.constant(space, 1.0)]
    if space.depth > 0:
        out.append(CellFunction.indicator(space.cube(1, (0,) * space.dimension)))
    for _ in range(count):
        out.append(CellFunction(space, rng.integers(0, 17, space.cell_count) / 16.0))
    return out


def standard_fixtures(space: DyadicSpace, seed: int = DEFAULT_SEED, gamma: float = 0.5
                      ) -> List[Fixture]:
    """
    Towers and random sparse families of `space`, an "ensemble" fixture
    holding all of them as one operator family, and on 2-D spaces a
    directional fixture of shear families with slopes 1..3 over 2^L.
    """
    functions = standard_functions(space, seed)
    sets = max(1, min(12, 2 * space.depth))
    named = sparse_fixtures(space, seed, gamma=gamma, sets=sets)
    fixtures = [Fixture(name, c, functions) for name, c in named]
    fixtures.append(Fixture("ensemble", named[0][1], functions,
                            family=OperatorFamily([c for _, c in named])))
    if space.dimension == 2 and space.depth > 0:
        preset = ENSEMBLES["shear"]
        shear = [build_shear_family(space, ShearDirection(a, space.depth), child_seed(seed, a),
                                    preset["density"], preset["max_start_level"])
                 for a in range(1, min(3, space.side) + 1)]
        fixtures.append(Fixture("shear", shear[0].collection, functions, directional=shear))
    return fixtures


def standard_suite(space: DyadicSpace, seed: int = DEFAULT_SEED, gamma: float = 0.5
                   ) -> VerificationSuite:
    """Oracle equivalence, laminarity, sparsity, tail and covering checks"""
    return (VerificationSuite(standard_fixtures(space, seed, gamma))
            .check(LAMINAR())
            .check(SPARSE())
            .check(ORACLE_AGREES())
            .check(MAXIMAL_BELOW_SPARSE())
            .check(GENERATION_BOUND())
            .check(TAIL_BOUND())
            .check(LEVEL_COVERED())
            .check(MV_DOMINATES()))
