# Numerical duality gap and the third-moment boundedness probe for the dual process
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..covariance import CovarianceKernel
from ..errors import DomainError
from ..feynmankac import Estimate, estimate
from ..heatkernel import GridFunction, WeightFamily
from ..particles import BranchingConfig, run_replica
from ..spde import NoisePath, SplittingScheme, solve_log_laplace
from ..streams import derived_seed
from .process import evolve_dual

logger = logging.getLogger(__name__)

SPDE_TAG = 2
PARTICLE_TAG = 3


@dataclass(frozen=True)
class TorusConstant:
    """Initial measure with constant density on the torus."""

    density: float

    def pair(self, Y: GridFunction) -> np.ndarray:
        return self.density * np.atleast_1d(Y.integral())


@dataclass(frozen=True)
class PointMass:
    point: tuple
    mass: float = 1.0

    def pair(self, Y: GridFunction) -> np.ndarray:
        return self.mass * np.atleast_1d(Y.at(np.asarray(self.point, dtype=float)))[..., 0]


InitialMeasure = Union[TorusConstant, PointMass]


@dataclass(frozen=True)
class DualityGap:
    left: Estimate
    right: Estimate

    @property
    def gap(self) -> float:
        return abs(self.left.value - self.right.value)

    @property
    def se(self) -> float:
        return float(np.hypot(self.left.se, self.right.se))


def _particle_initial(mu: InitialMeasure, phi: GridFunction, n: int) -> np.ndarray:
    torus = phi.torus
    if isinstance(mu, PointMass):
        count = int(round(mu.mass * n))
        return np.tile(np.asarray(mu.point, dtype=float), (count, 1))
    # one particle per 1/n of mass, spread over cell centers in order
    count = int(round(mu.density * torus.volume * n))
    centers = torus.centers()
    return centers[np.arange(count) % len(centers)]


def laplace_left(phi: GridFunction, mu: InitialMeasure, t: float, kernel: CovarianceKernel,
                 replicas: int, seed: int, left: str = "spde", n: int = 100,
                 dt: float = 1e-3) -> Estimate:
    """E exp(-<u(t), mu>) from the log-Laplace equation, or E exp(-<phi, X_t>) from particles.

    The particle route reads phi at the torus cell containing each particle.
    """
    if left == "spde":
        noise = NoisePath.from_kernel(kernel, phi.torus, dt, derived_seed(seed, SPDE_TAG), replicas)
        u = solve_log_laplace(phi, 1.0, t, noise, SplittingScheme(dt)).final
        return estimate(np.exp(-mu.pair(u)))
    if left == "particles":
        config = BranchingConfig(n, kernel, _particle_initial(mu, phi, n), t)
        seed = derived_seed(seed, PARTICLE_TAG)
        samples = np.empty(replicas)
        for r in range(replicas):
            final = run_replica(config, [t], seed, r)[-1]
            samples[r] = np.exp(-np.sum(phi.at(final.positions)) / n) if final.count else 1.0
        return estimate(samples)
    raise DomainError(f"unknown left-hand route {left!r}")


def duality_gap(phi: GridFunction, mu: InitialMeasure, t: float, n: int, kernel: CovarianceKernel,
                replicas: int, seed: int, left: str = "spde", dt: float = 1e-3,
                left_estimate: Optional[Estimate] = None) -> DualityGap:
    """|E exp(-<phi, X_t>) - E exp(-<X_0, Y_t>)| with the combined standard error."""
    lhs = left_estimate or laplace_left(phi, mu, t, kernel, replicas, seed, left, n, dt)
    state = evolve_dual(phi, t, n, kernel, seed, replicas, dt)
    rhs = estimate(np.exp(-mu.pair(state.Y)))
    out = DualityGap(lhs, rhs)
    logger.info("duality gap n=%d: %.5f (se %.5f)", n, out.gap, out.se)
    return out


def duality_ladder(phi: GridFunction, mu: InitialMeasure, t: float, n_ladder: Sequence[int],
                   kernel: CovarianceKernel, replicas: int, seed: int, left: str = "spde",
                   dt: float = 1e-3) -> pd.DataFrame:
    rows = []
    lhs = laplace_left(phi, mu, t, kernel, replicas, seed, left, max(n_ladder), dt) if left == "spde" else None
    for n in n_ladder:
        g = duality_gap(phi, mu, t, n, kernel, replicas, seed, left, dt, lhs)
        rows.append({"n": n, "left": g.left.value, "left_se": g.left.se, "right": g.right.value,
                     "right_se": g.right.se, "gap": g.gap, "se": g.se})
    return pd.DataFrame(rows)


def ladder_non_increasing(ladder: pd.DataFrame, tolerance_se: float = 1.0) -> bool:
    """gap(n_{i+1}) <= gap(n_i) + tolerance_se combined SE at every rung."""
    gaps, se = ladder["gap"].to_numpy(), ladder["se"].to_numpy()
    return bool(np.all(gaps[1:] <= gaps[:-1] + tolerance_se * np.hypot(se[1:], se[:-1]) + 1e-12))


@dataclass(frozen=True)
class ThirdMomentScan:
    frame: pd.DataFrame
    spread: float
    stable: bool


def third_moment_scan(phi: GridFunction, t_grid: Sequence[float], n_ladder: Sequence[int],
                      kernel: CovarianceKernel, replicas: int, seed: int, rho: float = 2.0,
                      dt: float = 1e-3, tolerance: float = 0.5) -> ThirdMomentScan:
    """max_x E[Y_t(x)^3] / phi_rho(x)^3 per (n, t); stable when it varies by less than
    `tolerance` across the n-ladder at every t.
    """
    weight = WeightFamily(rho).on(phi.torus).values
    t_grid = np.asarray(t_grid, dtype=float)
    rows = []
    for n in n_ladder:
        state = evolve_dual(phi, float(t_grid.max()), n, kernel, seed, replicas, dt, save_times=t_grid)
        for t, Y in zip(state.times, state.trajectory):
            third = np.mean(Y ** 3, axis=0)
            rows.append({"n": n, "t": float(t), "max_ratio": float(np.max(third / weight ** 3))})
    frame = pd.DataFrame(rows)
    spread = 0.0
    for _, group in frame.groupby("t"):
        hi, lo = group["max_ratio"].max(), group["max_ratio"].min()
        if hi > 0:
            spread = max(spread, hi / lo - 1.0 if lo > 0 else np.inf)
    return ThirdMomentScan(frame, float(spread), bool(spread < tolerance))
