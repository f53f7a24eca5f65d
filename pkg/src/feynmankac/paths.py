# Brownian pair paths and the Feynman-Kac semigroup Q_t^C by Monte Carlo
import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from ..covariance import CovarianceKernel
from ..errors import DomainError, SolverDivergenceError

logger = logging.getLogger(__name__)

PairFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

BATCH_PATHS = 4096


@dataclass(frozen=True)
class MCConfig:
    paths: int = 4000
    dt: float = 1e-2
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.paths < 2:
            raise DomainError(f"need at least 2 paths, got {self.paths}")
        if self.dt <= 0:
            raise DomainError(f"path time step must be positive, got {self.dt}")

    def steps(self, t: float) -> int:
        n = int(round(t / self.dt))
        if t < 0 or abs(n * self.dt - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"path dt={self.dt} does not divide t={t}")
        return n


class Estimate(NamedTuple):
    value: float
    se: float
    n: int


def estimate(samples: np.ndarray) -> Estimate:
    """Mean and standard error; np.sum reduces pairwise so the result is order-stable."""
    samples = np.asarray(samples, dtype=float).reshape(-1)
    n = samples.size
    mean = float(np.sum(samples) / n)
    se = float(np.sqrt(np.sum((samples - mean) ** 2) / (n - 1) / n)) if n > 1 else np.inf
    return Estimate(mean, se, n)


def combined_se(a: Estimate, b: Estimate) -> float:
    return float(np.hypot(a.se, b.se))


def gap_in_se(a: Estimate, b: Estimate) -> float:
    """|a - b| in units of the combined standard error."""
    gap = abs(a.value - b.value)
    se = combined_se(a, b)
    if se == 0:
        return 0.0 if gap == 0 else np.inf
    return gap / se


def tensor(f: Callable, g: Optional[Callable] = None) -> PairFunction:
    """(f x g)(x, y) = f(x) g(y); g defaults to f."""
    g = g or f
    return lambda x, y: f(x) * g(y)


def pi_diagonal(F: PairFunction) -> Callable[[np.ndarray], np.ndarray]:
    """x -> F(x, x)."""
    return lambda x: F(x, x)


def kernel_pair(kernel: CovarianceKernel) -> PairFunction:
    return lambda x, y: np.broadcast_to(kernel.eval(x, y), x.shape[:-1])


def ones_pair(x, y) -> np.ndarray:
    return np.ones(np.shape(x)[:-1])


@dataclass
class PairPath:
    """Two independent Brownian trajectories, shape (steps + 1, paths, d) each."""

    times: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    @property
    def difference(self) -> np.ndarray:
        return self.b - self.b_prime

    @property
    def sum(self) -> np.ndarray:
        return self.b + self.b_prime


def _increments(rng: np.random.Generator, shape, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return rng.standard_normal(shape)
    half = rng.standard_normal((shape[0] - shape[0] // 2,) + tuple(shape[1:]))
    return np.concatenate([half, -half[:shape[0] // 2]], axis=0)


def sample_pair_paths(x, y, t: float, mc: MCConfig, rng: Optional[np.random.Generator] = None) -> PairPath:
    """Stored pair trajectories started at (x, y)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rng = rng if rng is not None else np.random.default_rng(mc.seed)
    steps = mc.steps(t)
    d = x.size
    z = _increments(rng, (mc.paths, steps, 2, d), mc.antithetic) * np.sqrt(mc.dt)
    walk = np.concatenate([np.zeros((mc.paths, 1, 2, d)), np.cumsum(z, axis=1)], axis=1)
    walk = np.moveaxis(walk, 0, 1)
    return PairPath(np.arange(steps + 1) * mc.dt, x + walk[:, :, 0], y + walk[:, :, 1])


def _batches(mc: MCConfig):
    done, index = 0, 0
    while done < mc.paths:
        size = min(BATCH_PATHS, mc.paths - done)
        yield index, size, np.random.default_rng(np.random.SeedSequence(mc.seed, spawn_key=(index,)))
        done += size
        index += 1


def _pair_samples(F: PairFunction, x, y, t: float, kernel: CovarianceKernel, mc: MCConfig,
                  size: int, rng: np.random.Generator, durations=None) -> np.ndarray:
    """F(B_s, B'_s) exp(int_0^s C(B, B') dr) with s = t, or s = durations per path."""
    steps = mc.steps(t)
    d = kernel.d
    b = np.broadcast_to(np.asarray(x, dtype=float), (size, d)).copy()
    bp = np.broadcast_to(np.asarray(y, dtype=float), (size, d)).copy()
    dt = np.full(size, mc.dt) if durations is None else np.asarray(durations) / max(steps, 1)
    exponent = np.zeros(size)
    scale = np.sqrt(dt)[:, None]
    for _ in range(steps):
        # left endpoint Riemann sum
        exponent += kernel.eval(b, bp) * dt
        z = _increments(rng, (size, 2, d), mc.antithetic)
        b += z[:, 0] * scale
        bp += z[:, 1] * scale
    values = F(b, bp) * np.exp(exponent)
    if not np.all(np.isfinite(values)):
        raise SolverDivergenceError(steps, "path functional")
    return values


def antithetic_pairs(samples: np.ndarray) -> np.ndarray:
    """Averages each path with its mirrored partner (layout of `_increments`)."""
    size = samples.size
    m, start = size // 2, size - size // 2
    return 0.5 * (samples[:m] + samples[start:start + m])


def qtc(F: PairFunction, x, y, t: float, kernel: CovarianceKernel, mc: MCConfig) -> Estimate:
    """Q_t^C F(x, y) = E[F(B_t, B'_t) exp(int_0^t C(B_s, B'_s) ds)] with its standard error."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size != kernel.d or y.size != kernel.d:
        raise DomainError(f"start points must be {kernel.d}-dimensional")
    chunks = []
    for _, size, rng in _batches(mc):
        samples = _pair_samples(F, x, y, t, kernel, mc, size, rng)
        chunks.append(antithetic_pairs(samples) if mc.antithetic else samples)
    out = estimate(np.concatenate(chunks))
    logger.debug("qtc t=%g %s: %.6g +- %.2g (%d paths)", t, kernel.variant, out.value, out.se, out.n)
    return out
