"""Exception types raised by utlearn."""


class UTLearnError(ValueError):
    """Base class for all utlearn input and model errors."""


class InvalidDimensionError(UTLearnError):
    pass


class InvalidSparsityError(UTLearnError):
    pass


class ShapeError(UTLearnError):
    pass


class NumericError(UTLearnError):
    """Non-finite entries where finite ones are required."""


class DegenerateModelError(UTLearnError):
    """A coefficient matrix has a zero column."""


class SingularModelError(UTLearnError):
    """A coefficient matrix is not of full row rank."""


class ConfigurationError(UTLearnError):
    pass


class MatrixFormatError(UTLearnError):
    """A matrix text file could not be parsed."""
