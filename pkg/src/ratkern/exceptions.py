"""Exception and warning classes raised across the package."""


class RatkernError(Exception):
    """Base class for all errors raised by ratkern."""


class ParameterOutOfDomain(RatkernError, ValueError):
    """A kernel parameter violates its family's singularity bound."""


class DenominatorRoot(RatkernError, ValueError):
    """A piece denominator vanishes inside its interval."""


class NoSuchTarget(RatkernError, ValueError):
    pass


class RootNotBracketed(RatkernError, RuntimeError):
    pass


class UnsupportedFamily(RatkernError, ValueError):
    pass


class QuadratureNonconvergence(RatkernError, RuntimeError):
    pass


class EmptyRow(RatkernError, ValueError):
    """No input sample contributes to an output sample."""


class DimsNotDivisible(RatkernError, ValueError):
    pass


class DimMismatch(RatkernError, ValueError):
    pass


class TooSmall(RatkernError, ValueError):
    pass


class RankDeficient(RatkernError, ValueError):
    pass


class ParseError(RatkernError, ValueError):
    pass


class MissingInput(RatkernError, FileNotFoundError):
    pass


class DegenerateRange(UserWarning):
    """All values in a normalization set are equal; they were mapped to 0."""
