# The dual jump process Y: logistic heat flow between Poisson arrivals, multiplicative jumps
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..covariance import (CovarianceKernel, grid_covariance_factor, sample_increment,
                          truncate_field)
from ..errors import DomainError, SolverDivergenceError
from ..heatkernel.grid import GridFunction, Torus
from ..spde import NoisePath, SplittingScheme, SplittingStepper
from ..streams import derived_seed, replica_rng

logger = logging.getLogger(__name__)

CLOCK_TAG = 0
MARK_TAG = 1


class PoissonClock:
    """Arrivals of a rate-`rate` Poisson process: i.i.d. exponential gaps with mean 1/rate."""

    def __init__(self, rate: float, rng: np.random.Generator):
        if rate <= 0:
            raise DomainError(f"clock rate must be positive, got {rate}")
        self.rate = float(rate)
        self.rng = rng

    def arrivals(self, t: float) -> np.ndarray:
        times = []
        clock = self.rng.exponential(1.0 / self.rate)
        while clock <= t:
            times.append(clock)
            clock += self.rng.exponential(1.0 / self.rate)
        return np.array(times)


@dataclass
class DualState:
    """Y per replica on the grid after `elapsed`; jumps[r] lists (time, mark_seed)."""

    Y: GridFunction
    elapsed: float
    n: int
    jumps: List[List[Tuple[float, int]]]
    times: Optional[np.ndarray] = None
    trajectory: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def replicas(self) -> int:
        return len(self.jumps)

    @property
    def jump_counts(self) -> np.ndarray:
        return np.array([len(j) for j in self.jumps])


def replay_jump(kernel: CovarianceKernel, torus: Torus, n: int, mark_seed: int) -> np.ndarray:
    """The truncated field mark h drawn for a jump, regenerated from its seed."""
    factor = grid_covariance_factor(kernel, torus)
    h = sample_increment(factor, 1.0, np.random.default_rng(mark_seed)).values
    return truncate_field(h, n)


def _jump_schedule(n: int, t: float, seed: int, replicas: int, dt: float):
    """Per replica arrival times, their mark seeds and the substep after which each lands."""
    jumps, landing = [], {}
    for r in range(replicas):
        arrivals = PoissonClock(n, replica_rng(seed, r, CLOCK_TAG)).arrivals(t)
        log = [(float(s), derived_seed(seed, r, MARK_TAG, j)) for j, s in enumerate(arrivals)]
        jumps.append(log)
        for s, mark in log:
            # arrivals snap to the next substep boundary
            k = max(1, int(np.ceil(s / dt - 1e-9)))
            landing.setdefault(k, []).append((r, mark))
    return jumps, landing


def evolve_dual(phi: GridFunction, t: float, n: int, kernel: CovarianceKernel, seed: int,
                replicas: int = 1, dt: float = 1e-3, save_times: Optional[Sequence[float]] = None,
                forced_marks: Optional[dict] = None) -> DualState:
    """dY = (1/2 Lap Y - Y^2/2) dt between arrivals of a rate-n clock; Y <- Y (1 + h/sqrt n) at each.

    `forced_marks` maps a substep index to a grid field used for every replica at that
    boundary, in place of the Poisson jumps.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if phi.values.min() < 0:
        raise DomainError("dual initial datum must be non-negative")
    torus = phi.torus
    scheme = SplittingScheme(dt)
    steps = scheme.steps(t)
    stepper = SplittingStepper(torus, scheme, NoisePath.silent(torus, dt, replicas))
    if forced_marks is None:
        jumps, landing = _jump_schedule(n, t, seed, replicas, dt)
    else:
        jumps, landing = [[] for _ in range(replicas)], {}
    save = None if save_times is None else np.unique(np.rint(np.asarray(save_times) / dt).astype(int))
    saved = []
    Y = np.broadcast_to(phi.values, (replicas,) + torus.shape).astype(float, copy=True)
    for k in range(steps + 1):
        if save is not None and k in save:
            saved.append(Y.copy())
        if k == steps:
            break
        (Y,) = stepper.step([Y], k, [True])
        for r, mark in landing.get(k + 1, ()):
            Y[r] *= 1.0 + replay_jump(kernel, torus, n, mark) / np.sqrt(n)
        if forced_marks is not None and k + 1 in forced_marks:
            Y *= 1.0 + truncate_field(np.asarray(forced_marks[k + 1]), n) / np.sqrt(n)
        if not np.all(np.isfinite(Y)):
            raise SolverDivergenceError(k + 1, "dual process")
    logger.debug("dual n=%d t=%g: %d replicas, mean jumps %.2f", n, t, replicas,
                 np.mean([len(j) for j in jumps]) if jumps else 0.0)
    times = None if save is None else save * dt
    trajectory = None if save is None else np.stack(saved)
    return DualState(GridFunction(torus, Y), float(t), n, jumps, times, trajectory)


def jump_log_frame(state: DualState) -> pd.DataFrame:
    rows = [{"replica": r, "jump_time": s, "field_seed": mark}
            for r, log in enumerate(state.jumps) for s, mark in log]
    return pd.DataFrame(rows, columns=["replica", "jump_time", "field_seed"])
