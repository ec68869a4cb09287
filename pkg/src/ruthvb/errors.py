"""Exception types shared across the library."""


class RuthvbError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(RuthvbError):
    """Operands have incompatible shapes, levels, or ambient dimensions."""


class NoSolutionError(RuthvbError):
    """A linear system has no solution."""


class NonUniqueSolutionError(RuthvbError):
    """A linear system has more than one solution where a unique one is required."""


class ValidationError(RuthvbError):
    """An axiom or invariant failed; carries a reproducible witness when available."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
