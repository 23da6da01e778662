"""
Exception hierarchy for spdcluster.

Every error carries an optional ``index`` naming the offending data point,
so batch operations can report where they failed.
"""

from typing import Optional, Tuple


class SpdClusterError(Exception):
    """Base class for all spdcluster errors."""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        if index is not None:
            message = f'{message} (at index {index})'
        super().__init__(message)

    def attach_index(self, index: int) -> 'SpdClusterError':
        """Record the offending data point index unless one is already set."""
        if self.index is None:
            self.index = index
            self.args = (f'{self.args[0]} (at index {index})',) + tuple(self.args[1:])
        return self


# Input validation

class NotSymmetric(SpdClusterError, ValueError):
    """Matrix asymmetry exceeds sym_tol."""


class NotPositiveDefinite(SpdClusterError, ValueError):
    """Smallest eigenvalue is at or below pd_tol."""

    def __init__(self, message: str, min_eigenvalue: float = float('nan'),
                 index: Optional[int] = None):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(message, index)


class EigenFailure(SpdClusterError, ArithmeticError):
    """Symmetric eigendecomposition did not converge or produced non-finite values."""


class DimMismatch(SpdClusterError, ValueError):
    """Operands have incompatible shapes."""


class AtReferencePoint(SpdClusterError, ValueError):
    """The 1-Frechet map is not differentiable at a reference point."""


# Euclidean multilateration

class DegenerateRefs(SpdClusterError, ValueError):
    """Reference points are not affinely independent."""


class NoSolution(SpdClusterError):
    """Distance vector lies outside the image of the Frechet map."""


class RefTouchesSet(SpdClusterError, ValueError):
    """A reference point coincides with a point of the evaluated set."""


# Clustering and generation

class TooFewPoints(SpdClusterError, ValueError):
    """Fewer data points than clusters or requested references."""


class DegenerateClusters(SpdClusterError):
    """Pre-clustering produced an empty cluster or coincident means."""


class RetriesExhausted(SpdClusterError):
    """Rejection sampling gave up; carries the tightest violated pair."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None,
                 ratio: float = float('nan')):
        self.pair = pair
        self.ratio = ratio
        super().__init__(message)


class LabelOutOfRange(SpdClusterError, ValueError):
    """A label is negative or not below the cluster count."""


# I/O and configuration

class ParseError(SpdClusterError):
    """Dataset file is malformed; carries the byte offset."""

    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(f'{message} at byte offset {offset}')


class IoError(SpdClusterError, OSError):
    """Reading or writing a result file failed."""


class ConfigError(SpdClusterError, ValueError):
    """Experiment configuration is incomplete or inconsistent."""


class MaxIterExceeded(UserWarning):
    """Iterative solver stopped at max_iter; the best iterate is returned."""
