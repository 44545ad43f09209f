from typing import *

__all__ = [
    'SolverError', 'DegenerateConfigurationError', 'ConsistencyError',
    'CertificationError', 'NotFoundError', 'FormDisagreementError',
]


class SolverError(Exception):
    """
    Base class of the errors raised by the solvers.

    >>> err = ConsistencyError('not a root', residual=0.5)
    >>> err.to_dict()
    {'error': 'ConsistencyError', 'message': 'not a root', 'residual': 0.5}
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = dict(details)

    def to_dict(self) -> Dict[str, Any]:
        """Get the machine-readable error object."""
        ret = {'error': self.__class__.__name__, 'message': self.message}
        ret.update(self.details)
        return ret


class DegenerateConfigurationError(SolverError):
    """The continuity bracket of some edge vanishes at the given root."""


class ConsistencyError(SolverError):
    """A wave number which is not a root was passed to the eigenfunction
    assembly."""

    @property
    def residual(self) -> Optional[float]:
        return self.details.get('residual')


class CertificationError(SolverError):
    """The winding count of a region is unavailable."""


class NotFoundError(SolverError):
    """A scan finished without locating the requested transition."""


class FormDisagreementError(SolverError):
    """Two forms of the secular function disagree on some sample point."""

    @property
    def disagreements(self) -> List[Dict[str, Any]]:
        return self.details.get('disagreements', [])
