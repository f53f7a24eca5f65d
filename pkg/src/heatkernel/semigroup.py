# Heat kernel, spectral heat semigroup on the torus and the weight family phi_rho
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from ..errors import DomainError
from .grid import GridFunction, Torus

logger = logging.getLogger(__name__)

DEFAULT_CELLS = {1: 512, 2: 128, 3: 48}
HERMITE_ORDER = {1: 60, 2: 32, 3: 20}


def heat_kernel(t: float, x, d: int) -> np.ndarray:
    """Gaussian density p(t, x) with variance t per axis; scalar x is read as |x|."""
    if t <= 0:
        raise DomainError(f"heat kernel needs t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    r2 = x ** 2 if x.ndim == 0 else np.sum(x ** 2, axis=-1)
    out = (2.0 * np.pi * t) ** (-0.5 * d) * np.exp(-r2 / (2.0 * t))
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=64)
def heat_multiplier(torus: Torus, t: float) -> np.ndarray:
    """Fourier multiplier exp(-|k|^2 t / 2) of the periodized heat kernel."""
    out = np.exp(-0.5 * t * torus.wavenumbers_squared())
    out.setflags(write=False)
    return out


def heat_step(values: np.ndarray, torus: Torus, t: float, floor: bool = True) -> np.ndarray:
    """Applies P_t over the trailing grid axes of `values` (leading axes are replicas)."""
    if t == 0:
        return values.copy()
    spectrum = np.fft.rfftn(values, axes=torus.axes) * heat_multiplier(torus, float(t))
    out = np.fft.irfftn(spectrum, s=torus.shape, axes=torus.axes)
    if floor:
        # FFT round-off leaves tiny negatives where the exact flow of non-negative data is ~0
        np.maximum(out, 0.0, out=out)
    return out


def apply_heat_semigroup(f: GridFunction, t: float) -> GridFunction:
    """P_t f on the torus; P_0 is the identity and non-negative data stays non-negative."""
    if t < 0:
        raise DomainError(f"semigroup time must be >= 0, got {t}")
    return GridFunction(f.torus, heat_step(f.values, f.torus, t, floor=bool(f.values.min() >= 0)))


def heat_expectation(func: Callable[[np.ndarray], np.ndarray], x, t: float, d: int,
                     order: Optional[int] = None) -> float:
    """P_t f(x) on R^d as E f(x + sqrt(t) Z) by tensor Gauss-Hermite quadrature."""
    x = np.asarray(x, dtype=float).reshape(d)
    if t == 0:
        return float(func(x[None, :])[0])
    nodes, weights = hermegauss(order or HERMITE_ORDER[d])
    weights = weights / np.sqrt(2.0 * np.pi)
    mesh = np.meshgrid(*([nodes] * d), indexing="ij")
    wmesh = np.meshgrid(*([weights] * d), indexing="ij")
    points = x + np.sqrt(t) * np.stack([m.reshape(-1) for m in mesh], axis=-1)
    w = np.prod(np.stack([m.reshape(-1) for m in wmesh], axis=-1), axis=-1)
    return float(np.sum(w * func(points)))


@dataclass(frozen=True)
class WeightFamily:
    """phi_rho(x) = (1 + |x|^2)^(-rho/2)."""

    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise DomainError(f"rho must be positive, got {self.rho}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r2 = x ** 2 if x.ndim == 0 else np.sum(x ** 2, axis=-1)
        return (1.0 + r2) ** (-0.5 * self.rho)

    def on(self, torus: Torus) -> GridFunction:
        return GridFunction.from_callable(torus, self)


@dataclass(frozen=True)
class DominationReport:
    rho: float
    d: int
    t_max: float
    constant: float
    argmax_t: float
    argmax_x: tuple
    finite: bool


def check_weight_domination(rho: float, t_max: float, d: int = 1, n_times: int = 20,
                            extent: Optional[float] = None,
                            cells: Optional[int] = None) -> DominationReport:
    """Empirical smallest C with P_t phi_rho <= C phi_rho for t in (0, t_max].

    The ratio is read on the inner half of a torus wide enough that periodization does not
    reach it.
    """
    if rho <= 0 or t_max <= 0:
        raise DomainError("rho and t_max must be positive")
    extent = extent or max(16.0, 8.0 * np.sqrt(t_max))
    torus = Torus(d, extent, cells or DEFAULT_CELLS[d])
    weight = WeightFamily(rho)
    phi = weight.on(torus)
    centers = torus.centers()
    inner = (np.max(np.abs(centers), axis=-1) <= extent / 4).reshape(torus.shape)
    best, best_t, best_x = -np.inf, 0.0, ()
    for t in np.linspace(t_max / n_times, t_max, n_times):
        ratio = apply_heat_semigroup(phi, t).values / phi.values
        masked = np.where(inner, ratio, -np.inf)
        i = int(np.argmax(masked))
        if masked.flat[i] > best:
            best, best_t, best_x = float(masked.flat[i]), float(t), tuple(centers[i])
    logger.debug("weight domination rho=%s d=%d: C=%.6f at t=%.3f", rho, d, best, best_t)
    return DominationReport(rho, d, t_max, best, best_t, best_x, bool(np.isfinite(best)))
