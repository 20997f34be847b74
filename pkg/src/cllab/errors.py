"""Exception types shared across the package."""


class CllabError(Exception):
    """Base class for all package errors."""


class InvalidClassCountError(CllabError):
    """Class count outside the valid range for the requested builder."""


class InvalidSparsityError(CllabError):
    """Candidate-set / kept-entry size outside [1, C-1] (or [1, C])."""


class UndefinedRowError(CllabError):
    """A count row has zero total and no smoothing to rescue it."""


class SingularTransitionError(CllabError):
    """Transition matrix is singular or too ill-conditioned to invert."""


class ShapeError(CllabError):
    """Dimension mismatch between a matrix, prior, or dataset."""


class InvalidArgumentError(CllabError):
    """Generic precondition violation on sizes, rates, or ranges."""
