"""Exceptions carrying a witness for the check that failed."""


class AssumptionError(RuntimeError):
    """Base class: a structural check on the symbol failed. ``witness`` says where."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class GapViolationError(AssumptionError):
    pass


class LocalizationError(AssumptionError):
    pass


class BoundViolationError(AssumptionError):
    pass


class DegenerateProfileError(ValueError):
    pass


class BlowUpError(FloatingPointError):
    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class DivergenceError(ValueError):
    """A field that must be divergence-free is not, beyond the projection tolerance."""


class InconsistentCorrectorError(ValueError):
    pass
