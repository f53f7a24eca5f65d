# Exception hierarchy shared by every subpackage


class SbmreError(Exception):
    """Base class for all laboratory errors."""


class ConfigError(SbmreError, ValueError):
    """Invalid or unknown experiment configuration."""


class DimensionMismatchError(SbmreError, ValueError):
    """Operands live in different dimensions or on different grids."""


class DomainError(SbmreError, ValueError):
    """Argument outside the domain where the operation is defined."""


class IndefiniteCovarianceError(SbmreError):
    """Covariance matrix is not positive semi-definite beyond the jitter tolerance."""

    def __init__(self, min_eigenvalue: float, tolerance: float):
        self.min_eigenvalue = min_eigenvalue
        self.tolerance = tolerance
        super().__init__(
            f"covariance matrix is indefinite: most negative eigenvalue {min_eigenvalue:.3e} "
            f"exceeds jitter tolerance {tolerance:.3e}"
        )


class QuadratureError(SbmreError):
    """Numerical quadrature did not reach the requested tolerance."""


class SolverDivergenceError(SbmreError, FloatingPointError):
    """A time-stepping scheme produced non-finite values."""

    def __init__(self, step: int, what: str = "solution"):
        self.step = step
        super().__init__(f"non-finite {what} at step {step}")


class PopulationCapError(SbmreError):
    """The particle population exceeded its configured cap."""

    def __init__(self, epoch: int, population: int, cap: int):
        self.epoch = epoch
        self.population = population
        self.cap = cap
        super().__init__(f"population {population} exceeds cap {cap} at epoch {epoch}")


class ReplayError(SbmreError):
    """A manifest cannot be replayed against the current config or versions."""

    def __init__(self, message: str, diff: str = ""):
        self.diff = diff
        super().__init__(message if not diff else f"{message}\n{diff}")
