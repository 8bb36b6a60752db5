"""Exception types shared across the package."""


class SuperQFTError(Exception):
    """Base class for all errors raised by superqft."""


class DimensionError(SuperQFTError, ValueError):
    """Operands live over different generator counts, fields or shapes."""


class InvalidMorphismError(SuperQFTError, ValueError):
    """A morphism violates its parity or range constraints."""


class SingularError(SuperQFTError, ArithmeticError):
    """The body of an element or matrix is not invertible."""


class GridError(SuperQFTError, ValueError):
    """A grid is too small or two sections live on incompatible grids."""


class SupportError(SuperQFTError, ValueError):
    """A section is not compactly supported where it has to be."""


class PreconditionError(SuperQFTError, ValueError):
    """An operation was called outside its documented domain."""


class UnsupportedError(SuperQFTError, NotImplementedError):
    """The requested structure does not exist for this model."""
