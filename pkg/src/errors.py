"""
Exception hierarchy shared by all sub-packages
"""


class LabError(Exception):
    """Base class for all errors raised by the lab"""


class DomainError(LabError, ValueError):
    """A parameter lies outside the range an operation is defined for"""


class QuadratureAccuracyError(LabError):
    """Quadrature settings cannot meet the requested accuracy"""


class GridAlignmentError(LabError, ValueError):
    """A coarse grid is not contained in the fine grid it is paired with"""


class TransformRangeError(LabError, ValueError):
    """A point lies outside the tabulated range of a transform"""


class ExperimentAbortError(LabError):
    """Too many replications were aborted for the estimate to be trusted"""

    def __init__(self, message: str, aborted: int = 0, reps: int = 0):
        super().__init__(message)
        self.aborted = aborted
        self.reps = reps
