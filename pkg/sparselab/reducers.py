"""
Reducer classes for VerificationSuite.reduce_all().

Reducers fold a stream of CheckResult rows into a single result: a count,
a list of failures, or an ExperimentReport that the storage backends can
write like any other report.
"""

from abc import ABC, abstractmethod
from typing import Any, List

from .console import console
from .experiments import ExperimentReport


class Reducer(ABC):
    """Base class for check-result reducers"""

    verbose = False

    @abstractmethod
    def init_value(self):
        """Initialize the reducer's internal state"""
        pass

    def fold(self, result):
        """Fold the next check result into the accumulator with error handling"""
        try:
            self._fold(result)
        except Exception as e:
            if self.verbose:
                console.print(f"Warning: could not fold {result.fixture}/{result.check} "
                              f"in {self.__class__.__name__}: {e}")
            self._handle_error(result, e)

    @abstractmethod
    def _fold(self, result):
        pass

    def _handle_error(self, result, error: Exception):
        """Default: skip the row"""
        pass

    @abstractmethod
    def final(self) -> Any:
        """Return the final result"""
        pass


class CountReducer(Reducer):
    """Count the checks that ran"""

    def init_value(self):
        self.count = 0

    def _fold(self, result):
        self.count += 1

    def final(self) -> int:
        return self.count


class FailureCollector(Reducer):
    """Collect the checks that did not pass"""

    def init_value(self):
        self.failures: List = []

    def _fold(self, result):
        if not result.passed:
            self.failures.append(result)

    def final(self) -> List:
        return self.failures


class SuiteReportReducer(Reducer):
    """
    One report row per check: fixture, check, pass, detail.
    A row that cannot be folded is recorded as a failure.
    """

    COLUMNS = ["fixture", "check", "pass", "detail"]

    def __init__(self, experiment: str = "verify", seed=None, params=None):
        self.experiment = experiment
        self.seed = seed
        self.params = params or {}

    def init_value(self):
        self.report = ExperimentReport(self.experiment, list(self.COLUMNS), seed=self.seed,
                                       params=dict(self.params))

    def _fold(self, result):
        self.report.add_row(result.fixture, result.check, bool(result.passed), result.detail)

    def _handle_error(self, result, error):
        self.report.add_row(str(result.fixture), str(result.check), False,
                            f"{error.__class__.__name__}: {error}")

    def final(self) -> ExperimentReport:
        self.report.summary["checks"] = len(self.report.rows)
        self.report.summary["failures"] = len(self.report.failures())
        return self.report
