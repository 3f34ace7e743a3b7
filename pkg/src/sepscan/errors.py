"""Exception hierarchy.

Every error raised by the package derives from :class:`SepscanError`. The CLI
maps :class:`InputError` subclasses to exit code 2 and :class:`MethodError`
subclasses to exit code 3.
"""


class SepscanError(Exception):
    """Base class for all package errors."""


class InputError(SepscanError, ValueError):
    """The caller supplied something malformed."""


class MethodError(SepscanError, ArithmeticError):
    """A numerical method could not produce a trustworthy answer."""


class NotHermitian(InputError):
    pass


class NotDensityMatrix(InputError):
    pass


class BadSubset(InputError):
    pass


class BadDimension(InputError):
    pass


class DimMismatch(InputError):
    pass


class NotOrthogonal(InputError):
    pass


class BadParameter(InputError):
    pass


class BadLoo(InputError):
    pass


class IncompleteCoefficients(InputError):
    pass


class SingularMatrix(MethodError):
    pass


class SingularReduction(MethodError):
    def __init__(self, party: int, min_eig: float):
        super().__init__(f"reduced state of party {party} is singular (min eigenvalue {min_eig:.3e})")
        self.party = party
        self.min_eig = min_eig


class NotFullRank(MethodError):
    pass


class NoConvergence(MethodError):
    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class NotNormalForm(MethodError):
    pass


class NoSignChange(MethodError):
    pass


class NotDetected(MethodError):
    pass
