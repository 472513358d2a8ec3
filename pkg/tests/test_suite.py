import pytest

from sparselab import (ALL, OR, CountReducer, FailureCollector, SuiteReportReducer,
                       VerificationSuite, build_space, standard_suite)
from sparselab.predicates import (LAMINAR, LEVEL_COVERED, MV_DOMINATES, ORACLE_AGREES, SPARSE,
                                  TAIL_BOUND, Predicate)
from sparselab.reducers import Reducer
from sparselab.suite import CheckResult, Fixture, standard_fixtures


class NEVER(Predicate):
    def __call__(self, fixture):
        return False


class BROKEN(Predicate):
    def __call__(self, fixture):
        raise RuntimeError("no such level")


class TestReduceAll:
    """Test VerificationSuite.reduce_all with Reducer objects"""

    def setup_method(self):
        self.space = build_space(1, 4)
        # tower-left, tower-right, random-0..2 and the ensemble fixture
        self.fixtures = standard_fixtures(self.space, seed=1)

    def test_count_reducer(self):
        suite = VerificationSuite(self.fixtures).check(LAMINAR()).check(SPARSE())
        assert suite.reduce_all(CountReducer()) == 2 * len(self.fixtures)

    def test_standard_suite_passes(self):
        report = standard_suite(self.space, seed=1).reduce_all(SuiteReportReducer(seed=1))
        assert report.passed, report.failures()
        assert report.summary["checks"] == 8 * len(self.fixtures)
        assert report.summary["failures"] == 0

    def test_standard_suite_on_a_plane(self):
        space = build_space(2, 3)
        fixtures = standard_fixtures(space, seed=2)
        assert fixtures[-1].name == "shear"
        assert len(fixtures[-1].directional) == 3
        report = standard_suite(space, seed=2).reduce_all(SuiteReportReducer())
        assert report.passed, report.failures()

    def test_failure_collector(self):
        suite = VerificationSuite(self.fixtures).check(LAMINAR()).check(NEVER())
        failures = suite.reduce_all(FailureCollector())
        assert len(failures) == len(self.fixtures)
        assert all(f.check == "NEVER" for f in failures)
        assert failures[0].detail == "invariant does not hold"

    def test_exception_becomes_failure(self):
        report = (VerificationSuite(self.fixtures)
                  .limit(1)
                  .check(BROKEN())
                  .reduce_all(SuiteReportReducer()))
        assert report.rows == [["tower-left", "BROKEN", False, "RuntimeError: no such level"]]
        assert not report.passed


class TestSuiteChain:
    def setup_method(self):
        self.fixtures = standard_fixtures(build_space(1, 3), seed=4)

    def test_include_and_exclude(self):
        suite = (VerificationSuite(self.fixtures)
                 .include_when(lambda fx: fx.name.startswith("tower") or fx.name == "ensemble")
                 .exclude_when(lambda fx: fx.name == "tower-right"))
        assert [fx.name for fx in suite.selected()] == ["tower-left", "ensemble"]

    def test_limit(self):
        suite = VerificationSuite(self.fixtures).limit(2)
        assert len(suite.selected()) == 2
        with pytest.raises(ValueError):
            suite.limit(-1)

    def test_check_names(self):
        suite = VerificationSuite(self.fixtures).check(OR(NEVER(), LAMINAR())).check(ALL(LAMINAR()))
        assert suite.checks == ["OR(NEVER,LAMINAR)", "ALL(LAMINAR)"]
        assert all(r.passed for r in suite)


class TestPredicates:
    def setup_method(self):
        self.space = build_space(1, 4)
        self.fixtures = {fx.name: fx for fx in standard_fixtures(self.space, seed=3)}

    def test_vacuous_without_extras(self):
        tower = self.fixtures["tower-left"]
        assert LEVEL_COVERED()(tower)
        assert MV_DOMINATES()(tower)

    def test_oracles_and_tail(self):
        for fx in self.fixtures.values():
            assert ORACLE_AGREES()(fx), fx.name
            assert TAIL_BOUND()(fx), fx.name

    def test_sparse_with_explicit_gamma(self):
        tower = self.fixtures["tower-left"]
        assert SPARSE()(tower)
        assert SPARSE(gamma=0.5)(tower)

    def test_non_laminar_fixture(self):
        from sparselab import MeasSet, SetFamily
        family = SetFamily([MeasSet.interval(self.space, 0, 8), MeasSet.interval(self.space, 4, 12)])
        fx = Fixture("straddle", family, [])
        assert not LAMINAR()(fx)


class TestReducers:
    def test_fold_errors_are_handled(self):
        class Strict(Reducer):
            def init_value(self):
                self.errors = []

            def _fold(self, result):
                raise KeyError(result.check)

            def _handle_error(self, result, error):
                self.errors.append(type(error).__name__)

            def final(self):
                return self.errors

        reducer = Strict()
        reducer.init_value()
        reducer.fold(CheckResult("a", "LAMINAR", True))
        assert reducer.final() == ["KeyError"]

    def test_report_rows(self):
        reducer = SuiteReportReducer("checks", seed=3, params={"depth": 4})
        reducer.init_value()
        reducer.fold(CheckResult("a", "LAMINAR", True))
        reducer.fold(CheckResult("a", "SPARSE", False, "too dense"))
        report = reducer.final()
        assert report.experiment == "checks"
        assert report.columns == ["fixture", "check", "pass", "detail"]
        assert report.summary == {"checks": 2, "failures": 1}
        assert report.params == {"depth": 4}
