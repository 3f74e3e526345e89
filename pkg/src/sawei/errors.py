"""Exception types shared across the package."""


class SaweiError(Exception):
    """Base class for all package-specific errors."""


class FitError(SaweiError):
    """Surrogate fitting failed (Cholesky broke down even at maximum jitter)."""


class NumericalError(SaweiError):
    """A linear-algebra primitive failed on otherwise valid inputs."""


class DomainError(SaweiError):
    """An argument lies outside the mathematical domain of an operation."""


class UnknownFunction(SaweiError):
    """Requested synthetic benchmark function id is not implemented."""


class ParseError(SaweiError):
    """A tabular benchmark file violates the documented schema."""


class EmptyTable(SaweiError):
    """A tabular benchmark file contains no candidate rows."""


class GridMismatch(SaweiError):
    """Regret curves passed to rank aggregation do not share a step grid."""


class MissingManifest(SaweiError):
    """Report generation was pointed at a directory without a manifest."""
