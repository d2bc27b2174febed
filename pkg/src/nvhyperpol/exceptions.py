"""Exception hierarchy shared by the solver layers and the CLI."""


class NVHyperpolError(Exception):
    """Base class for all package errors."""


class DomainError(NVHyperpolError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class SingularMatrixError(NVHyperpolError, ArithmeticError):
    """A linear system is rank deficient beyond tolerance.

    Parameters
    ----------
    message : str
    condition : float
        Condition-number estimate of the offending matrix.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class NonUniqueSteadyStateError(NVHyperpolError):
    """The Liouvillian has more than one stationary state."""

    def __init__(self, message, nullity):
        super().__init__(message)
        self.nullity = nullity


class SolverError(NVHyperpolError):
    """A numerical solve failed to meet its residual contract."""

    def __init__(self, message, tag=None):
        if tag is not None:
            message = f"{message} [orientation={tag[0]}, field={tag[1]} mT]"
        super().__init__(message)
        self.tag = tag


class ConfigError(NVHyperpolError):
    """Invalid run configuration (unknown key, bad value, missing seed)."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.key = key
        self.line = line


class PropagationWarning(UserWarning):
    """Spectral propagation was replaced by the scaling-and-squaring fallback."""
