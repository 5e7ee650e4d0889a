"""Exception Hierarchy"""
from typing import Optional, Sequence


class KronError(Exception):
    """Base class for every error raised by kronred."""
    exit_code = 2


class ConfigurationError(KronError):
    """Invalid runtime setting (environment variable or flag)."""


class NetworkFileError(KronError):
    """A network file failed to parse or validate.

    `location` is the JSON path of the offending element, when known.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(prefix + message)


class LawError(KronError):
    """Problem with an edge-law expression or its evaluation."""


class LawSyntaxError(LawError):
    """Malformed law text; `offset` is the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")


class UnknownIdentifierError(LawSyntaxError):
    """Identifier other than `y` or a supported function name."""

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier `{name}`", offset)


class NonIntegerExponentError(LawSyntaxError):
    """The right operand of `^` is not an integer literal."""

    def __init__(self, offset: int):
        super().__init__("exponent must be an integer literal", offset)


class OutOfIntervalError(LawError):
    """An edge voltage left the validity interval of its law."""
    exit_code = 3

    def __init__(self, value: float, interval: Sequence[float], edge: Optional[str] = None):
        self.value = value
        self.interval = tuple(interval)
        self.edge = edge
        where = f"edge {edge}: " if edge else ""
        super().__init__(f"{where}y={value!r} outside validity interval [{interval[0]}, {interval[1]}]")


class ConvexityError(LawError):
    """g' is not positive at a sampled point (co-content not strongly convex)."""

    def __init__(self, y: float, slope: float, law: str = ""):
        self.y = y
        self.slope = slope
        super().__init__(f"law `{law}` violates strong convexity: g'({y!r}) = {slope!r}")


class GraphError(KronError):
    """Invalid graph data: self-loop, duplicate or unknown node, disconnection."""


class LaplacianStructureError(GraphError):
    """Matrix is not a weighted Laplacian within tolerance."""


class SolverError(KronError):
    """Interior elimination failed."""
    exit_code = 3


class NonConvergenceError(SolverError):
    """Newton iteration hit its cap; carries the last iterate."""

    def __init__(self, message: str, last_iterate=None, residual: float = float("nan")):
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__(message)


class SingularHessianError(SolverError):
    """Cholesky factorization of the interior Hessian failed."""


class AssumptionError(KronError):
    """A modelling assumption could not be certified.

    The partial `certificate` (if any) is attached so callers can still report it.
    """
    exit_code = 4

    def __init__(self, message: str, certificate=None):
        self.certificate = certificate
        super().__init__(message)


class InconsistentPairsError(AssumptionError):
    """Pooled (voltage, current) pairs are not a function of the voltage."""


class NonMonotoneError(AssumptionError):
    """Recovered law is not strictly increasing."""


class RankDeficiencyError(AssumptionError):
    """Least-squares system for cyclic recovery is rank deficient."""


class HomogeneityError(AssumptionError):
    """Network potential failed the sampled homogeneity test."""

    def __init__(self, message: str, z=None, t: float = float("nan")):
        self.z = z
        self.t = t
        super().__init__(message)


class LinearLawError(AssumptionError):
    """A non-quadratic law reached the exact linear fast path."""
    exit_code = 2
