"""Exception types raised by the recovery pipeline."""


class SphFriError(Exception):
    """Base class. ``stage`` is set when the error passes through :func:`recover`."""

    stage = None

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class DomainError(SphFriError, ValueError):
    pass


class SingularDiagonalError(SphFriError):
    pass


class DuplicateNodeError(SphFriError):
    pass


class AmbiguousNullSpaceError(SphFriError):
    """The two smallest singular values are not separated; the filter is not unique."""


class DegeneratePolynomialError(SphFriError):
    pass


class BandlimitError(SphFriError, ValueError):
    pass


class InsufficientRowsError(SphFriError):
    pass


class ZeroNodeError(SphFriError):
    pass


class AmplitudeFloorError(SphFriError):
    pass


class GenerationError(SphFriError):
    pass


class CountMismatchError(SphFriError, ValueError):
    pass


class PrecisionWarning(UserWarning):
    pass


class IllConditionedWarning(UserWarning):
    pass
