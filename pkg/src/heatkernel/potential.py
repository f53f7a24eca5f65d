# Green function, the persistence threshold and Green-weighted potentials of the environment
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate, optimize, special

from ..covariance.kernels import CovarianceKernel, RadialProfile
from ..errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

EXTINCTION_CAVEAT = "requires a >= N_0, N_0 unknown"


def _require_transient(d: int):
    if d < 3:
        raise DomainError(f"needs d >= 3, got d={d}")


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2.0 * np.pi ** (d / 2) / special.gamma(d / 2)


def green_constant(d: int) -> float:
    """c_d with G(x, y) = c_d |x - y|^(2-d)."""
    _require_transient(d)
    return special.gamma(d / 2 - 1) / (4.0 * np.pi ** (d / 2))


def green(x, y, d: int) -> float:
    """G(x, y) = int_0^inf p(2t, x - y) dt in closed form."""
    _require_transient(d)
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))))
    if r == 0.0:
        raise DomainError("Green function is singular at x = y")
    return green_constant(d) * r ** (2 - d)


def persistence_threshold(d: int) -> float:
    """8 (d-2) pi^(d/2) / (d 2^d Gamma(d/2 - 1))."""
    _require_transient(d)
    return 8.0 * (d - 2) * np.pi ** (d / 2) / (d * 2.0 ** d * special.gamma(d / 2 - 1))


def _quad(func, lower, upper, tol, points=None):
    kwargs = {"limit": 400, "epsabs": tol, "epsrel": tol, "full_output": 1}
    if points is not None and np.isfinite(upper):
        kwargs["points"] = points
    result = integrate.quad(func, lower, upper, **kwargs)
    value, error = result[0], result[1]
    accepted = max(1e-6, 1e-6 * abs(value))
    if not np.isfinite(value) or error > accepted:
        raise QuadratureError(f"radial quadrature on [{lower}, {upper}] did not converge "
                              f"(value {value:.6g}, error estimate {error:.2g})")
    if len(result) > 3:
        logger.debug("quadrature warning accepted (error %.2g): %s", error, result[3])
    return value


def potential_at(g: RadialProfile, d: int, s: float, tol: float = 1e-10) -> float:
    """int |x - y|^(2-d) g(|y|) dy at |x| = s, by the shell formula for radial g."""
    _require_transient(d)
    if not g.decays:
        raise QuadratureError("profile does not decay; the potential is infinite")
    upper = g.support if g.support is not None else np.inf
    inner = 0.0
    if s > 0:
        inner = s ** (2 - d) * _quad(lambda r: g(r) * r ** (d - 1), 0.0, min(s, upper), tol)
    outer = 0.0
    if s < upper:
        outer = _quad(lambda r: g(r) * r, s, upper, tol)
    return sphere_area(d) * (inner + outer)


def theta_potential(g: RadialProfile, d: int, scan_radius: Optional[float] = None,
                    scan_points: int = 41) -> float:
    """theta = sup_x int |x - y|^(2-d) g(y) dy.

    For radially non-increasing g the supremum sits at the origin. Otherwise |x| is
    scanned on a coarse mesh and the best cell refined with a bounded search.
    """
    _require_transient(d)
    at_origin = potential_at(g, d, 0.0)
    if g.non_increasing:
        logger.debug("theta at origin (non-increasing profile): %.10g", at_origin)
        return at_origin
    radius = scan_radius or (g.support if g.support is not None else 10.0)
    mesh = np.linspace(0.0, radius, scan_points)
    values = np.array([potential_at(g, d, s) for s in mesh])
    i = int(np.argmax(values))
    lo, hi = mesh[max(i - 1, 0)], mesh[min(i + 1, scan_points - 1)]
    best = optimize.minimize_scalar(lambda s: -potential_at(g, d, s), bounds=(lo, hi),
                                    method="bounded", options={"xatol": 1e-8})
    return float(max(values[i], -best.fun))


class Regime(str, Enum):
    PERSISTENCE_SUFFICIENT = "PersistenceSufficient"
    EXTINCTION_SUFFICIENT = "ExtinctionSufficient"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    theta: float
    threshold: float
    gap: float
    caveat: str = ""


def classify_regime(kernel: CovarianceKernel, d: Optional[int] = None) -> RegimeReport:
    """Which of the persistence/extinction criteria the kernel meets; gap = theta - threshold."""
    d = d or kernel.d
    theta, threshold = np.nan, np.nan
    if d >= 3:
        threshold = persistence_threshold(d)
        try:
            theta = theta_potential(kernel.profile(), d)
        except QuadratureError as e:
            logger.info("theta potential diverges for %s: %s", kernel.variant, e)
            theta = np.inf
        if theta < threshold:
            return RegimeReport(Regime.PERSISTENCE_SUFFICIENT, theta, threshold, theta - threshold)
    gap = theta - threshold
    if kernel.variant == "scaled_theta":
        return RegimeReport(Regime.EXTINCTION_SUFFICIENT, theta, threshold, gap, EXTINCTION_CAVEAT)
    return RegimeReport(Regime.INCONCLUSIVE, theta, threshold, gap)


def sup_green_potential(g: RadialProfile, d: int) -> float:
    """sup_x int G(x, z) g(z) dz = c_d * theta."""
    return green_constant(d) * theta_potential(g, d)


def bridge_potential(x, y, g: RadialProfile, d: int, spacing: Optional[float] = None,
                     half_width: Optional[float] = None) -> float:
    """int G(x, z) G(z, y) / G(x, y) g(z) dz by lattice quadrature.

    Cells within one spacing of x or y are replaced by the analytic integral of the
    Newtonian singularity over a ball of that radius.
    """
    _require_transient(d)
    x = np.asarray(x, dtype=float).reshape(d)
    y = np.asarray(y, dtype=float).reshape(d)
    if np.array_equal(x, y):
        raise DomainError("bridge potential is singular at x = y")
    R = half_width or (g.support if g.support is not None else 8.0)
    h = spacing or R / 40.0
    axis = np.arange(-R + 0.5 * h, R, h)
    c = green_constant(d)
    gxy = green(x, y, d)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    z = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    weight = g(np.linalg.norm(z, axis=-1))
    rx = np.linalg.norm(z - x, axis=-1)
    ry = np.linalg.norm(z - y, axis=-1)
    regular = (rx >= h) & (ry >= h) & (weight > 0)
    integrand = c * rx[regular] ** (2 - d) * c * ry[regular] ** (2 - d) / gxy * weight[regular]
    ball = c * sphere_area(d) * h ** 2 / 2.0
    singular = ball * (g(np.linalg.norm(x)) + g(np.linalg.norm(y)))
    return float(h ** d * np.sum(integrand) + singular)


def khasminskii_bound(s: float) -> float:
    """(1 - s)^(-1), the exponential-moment bound for a sup-potential s < 1."""
    if s < 0:
        raise DomainError(f"sup-potential must be >= 0, got {s}")
    if s >= 1:
        raise DomainError(f"sup-potential {s} >= 1: the persistence argument does not apply")
    return 1.0 / (1.0 - s)


def khasminskii_exponent(theta: float, d: int, p: Optional[float] = None) -> float:
    """s = p c_d theta; p defaults to 2d/(d-2), the smallest integrability exponent."""
    _require_transient(d)
    p = p if p is not None else 2.0 * d / (d - 2)
    return p * green_constant(d) * theta
