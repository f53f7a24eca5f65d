# Spatial correlation kernels C(x, y) and their dominating radial profiles
import logging
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from ..errors import ConfigError, DimensionMismatchError, DomainError

logger = logging.getLogger(__name__)

VARIANTS = ("constant", "stationary_power", "scaled_theta", "indicator_ball", "tabulated")

# Theta profiles for the scaled kernel a*Theta(x - y); every profile has Theta(0) = 1
THETA_PROFILES = {
    "gaussian": lambda r: np.exp(-r ** 2),
    "flat": lambda r: np.ones_like(r),
}


@dataclass(frozen=True)
class RadialProfile:
    """A bounded non-negative function g(|x|) dominating a stationary kernel."""

    func: Callable[[np.ndarray], np.ndarray]
    sup: float
    non_increasing: bool
    support: Optional[float] = None
    decays: bool = True

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class CovarianceKernel:
    """Correlation C(x, y) of the environment; `params` is a sorted tuple of pairs."""

    d: int
    variant: str
    params: tuple

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"kernel dimension must be positive, got {self.d}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown kernel variant {self.variant!r}")

    def param(self, name: str):
        return dict(self.params)[name]

    @property
    def sup_bound(self) -> float:
        if self.variant == "constant":
            return float(self.param("c"))
        if self.variant == "stationary_power":
            return float(self.param("eps"))
        if self.variant == "scaled_theta":
            return float(self.param("a"))
        if self.variant == "indicator_ball":
            return float(self.param("height"))
        return float(max(self.param("values")))

    @property
    def is_constant(self) -> bool:
        return self.variant == "constant"

    def radial(self, r: np.ndarray) -> np.ndarray:
        """Kernel value as a function of the distance |x - y|."""
        r = np.asarray(r, dtype=float)
        if self.variant == "constant":
            return np.full(r.shape, float(self.param("c")))
        if self.variant == "stationary_power":
            return self.param("eps") / (1.0 + r ** self.param("alpha"))
        if self.variant == "scaled_theta":
            return self.param("a") * THETA_PROFILES[self.param("profile")](r)
        if self.variant == "indicator_ball":
            return np.where(r <= self.param("radius"), float(self.param("height")), 0.0)
        radii = np.asarray(self.param("radii"))
        values = np.asarray(self.param("values"))
        return np.interp(r, radii, values, right=0.0)

    def _check_points(self, *arrays):
        for arr in arrays:
            if arr.shape[-1] != self.d:
                raise DimensionMismatchError(
                    f"point of dimension {arr.shape[-1]} for a {self.d}-d kernel")

    def eval(self, x, y) -> np.ndarray:
        """C(x, y), vectorized over leading axes; exactly symmetric in (x, y)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        self._check_points(x, y)
        r = np.sqrt(np.sum((x - y) ** 2, axis=-1))
        out = self.radial(r)
        return float(out) if out.ndim == 0 else out

    def matrix(self, points: np.ndarray) -> np.ndarray:
        """Covariance matrix [C(x_i, x_j)] for an (N, d) array of points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        self._check_points(points)
        diff = points[:, None, :] - points[None, :, :]
        return self.radial(np.sqrt(np.sum(diff ** 2, axis=-1)))

    def profile(self) -> RadialProfile:
        """The radial function g with C(x, y) <= g(x - y)."""
        if self.variant == "constant":
            c = float(self.param("c"))
            return RadialProfile(self.radial, c, True, None, decays=(c == 0.0))
        if self.variant == "indicator_ball":
            return RadialProfile(self.radial, self.sup_bound, True, float(self.param("radius")))
        if self.variant == "tabulated":
            values = np.asarray(self.param("values"))
            return RadialProfile(self.radial, self.sup_bound, bool(np.all(np.diff(values) <= 0)),
                                 float(self.param("radii")[-1]))
        if self.variant == "scaled_theta" and self.param("profile") == "flat":
            return RadialProfile(self.radial, self.sup_bound, True, None, decays=False)
        return RadialProfile(self.radial, self.sup_bound, True, None)


def _make(d: int, variant: str, **params) -> CovarianceKernel:
    return CovarianceKernel(int(d), variant, tuple(sorted(params.items())))


def constant(c: float, d: int = 1) -> CovarianceKernel:
    if c < 0:
        raise DomainError(f"constant kernel needs c >= 0, got {c}")
    return _make(d, "constant", c=float(c))


def stationary_power(eps: float, alpha: float, d: int = 3) -> CovarianceKernel:
    if eps <= 0 or alpha <= 0:
        raise DomainError("power kernel needs eps > 0 and alpha > 0")
    return _make(d, "stationary_power", eps=float(eps), alpha=float(alpha))


def scaled_theta(a: float, d: int = 1, profile: str = "gaussian") -> CovarianceKernel:
    if a < 0:
        raise DomainError(f"scaled kernel needs a >= 0, got {a}")
    if profile not in THETA_PROFILES:
        raise ConfigError(f"unknown theta profile {profile!r}")
    return _make(d, "scaled_theta", a=float(a), profile=profile)


def indicator_ball(radius: float, height: float = 1.0, d: int = 3) -> CovarianceKernel:
    if radius <= 0 or height <= 0:
        raise DomainError("indicator kernel needs radius > 0 and height > 0")
    return _make(d, "indicator_ball", radius=float(radius), height=float(height))


def tabulated(radii, values, d: int = 1) -> CovarianceKernel:
    radii = tuple(float(r) for r in radii)
    values = tuple(float(v) for v in values)
    if len(radii) != len(values) or len(radii) < 2:
        raise ConfigError("tabulated kernel needs at least two (radius, value) rows")
    if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] < 0:
        raise ConfigError("tabulated radii must start at >= 0 and increase strictly")
    if min(values) < 0:
        raise ConfigError("tabulated kernel values must be non-negative")
    return _make(d, "tabulated", radii=radii, values=values)


def load_tabulated(path: str, d: int = 1) -> CovarianceKernel:
    """Reads a two-column (radius, value) text file."""
    table = np.loadtxt(path, ndmin=2)
    if table.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns, found {table.shape[1]}")
    logger.debug("loaded %d kernel rows from %s", table.shape[0], path)
    return tabulated(table[:, 0], table[:, 1], d)


def kernel_from_mapping(block: Mapping[str, str], d: int) -> CovarianceKernel:
    """Builds a kernel from a config block: `variant` plus named numeric parameters."""
    block = dict(block)
    variant = block.pop("variant", None)
    try:
        if variant == "constant":
            return constant(float(block["c"]), d)
        if variant == "stationary_power":
            return stationary_power(float(block["eps"]), float(block["alpha"]), d)
        if variant == "scaled_theta":
            return scaled_theta(float(block["a"]), d, block.get("profile", "gaussian"))
        if variant == "indicator_ball":
            return indicator_ball(float(block["radius"]), float(block.get("height", 1.0)), d)
        if variant == "tabulated":
            return load_tabulated(block["file"], d)
    except KeyError as e:
        raise ConfigError(f"kernel variant {variant!r} is missing parameter {e}") from e
    except ValueError as e:
        raise ConfigError(f"kernel block: {e}") from e
    raise ConfigError(f"unknown kernel variant {variant!r}")


def eval_kernel(kernel: CovarianceKernel, x, y):
    """C(x, y) for a single pair of points (or broadcast arrays of points)."""
    return kernel.eval(x, y)
