"""Exception types raised across the package."""


class ProductSpaceError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ProductSpaceError, ValueError):
    """A malformed row in an input file."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class DuplicateKeyError(ParseError):
    pass


class EmptyInputError(ProductSpaceError, ValueError):
    pass


class UnknownCodeError(ProductSpaceError, KeyError):
    """A country or product code that is not part of the matrix universe."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UndefinedStatisticError(ProductSpaceError, ValueError):
    """A statistic that cannot be computed on the given sample."""
