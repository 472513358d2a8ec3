"""
Exception classes raised by sparselab.

Every error derives from SparseLabError and from the builtin exception a
caller would naturally catch (ValueError for bad inputs, TypeError for
unsupported operator kinds).
"""


class SparseLabError(Exception):
    """Base class for all sparselab errors"""


class SpaceSizeError(SparseLabError, ValueError):
    """A dyadic space would exceed the configured cell cap"""


class DomainError(SparseLabError, ValueError):
    """An operation was called outside its domain"""


class ConstructionError(SparseLabError, ValueError):
    """A seeded construction could not meet its target"""


class UnsupportedOperatorError(SparseLabError, TypeError):
    """The requested computation is not available for this operator"""


class InvariantViolation(SparseLabError, AssertionError):
    """An inequality that must always hold was found to fail"""
