# Annealed moments E[w_a(t, x)^k] of the time-scaled Feynman-Kac functional
import logging
from typing import Optional

import numpy as np

from ..covariance import THETA_PROFILES, grid_covariance_factor, sample_increment, scaled_theta
from ..errors import DomainError
from ..heatkernel.grid import Torus
from .paths import Estimate, MCConfig, _batches, estimate

logger = logging.getLogger(__name__)

MAX_ORDER = 4


def _check(a: float, k: int, profile: str):
    if not 1 <= k <= MAX_ORDER:
        raise DomainError(f"moment order must be in 1..{MAX_ORDER}, got {k}")
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    if profile not in THETA_PROFILES:
        raise DomainError(f"unknown Theta profile {profile!r}")


def annealed_moment_w(a: float, t: float, x, k: int, mc: MCConfig,
                      profile: str = "gaussian", d: int = 1) -> Estimate:
    """E[w_a(t, x)^k] with the field integrated out.

    Given k independent paths X_i = x + B_i / sqrt(a), sum_i eta_i is Gaussian with variance
    sum_{i,j} int_0^t Theta(X_i - X_j) ds, so E w^k = E_B exp(1/2 of that variance).
    """
    _check(a, k, profile)
    theta = THETA_PROFILES[profile]
    steps = mc.steps(t)
    chunks = []
    for _, size, rng in _batches(mc):
        walk = np.zeros((size, k, d))
        cross = np.zeros(size)
        for _ in range(steps):
            for i in range(k):
                for j in range(i + 1, k):
                    r = np.linalg.norm(walk[:, i] - walk[:, j], axis=-1)
                    cross += theta(r) * mc.dt
            walk += rng.standard_normal((size, k, d)) * np.sqrt(mc.dt / a)
        chunks.append(np.exp(0.5 * (k * t + 2.0 * cross)))
    out = estimate(np.concatenate(chunks))
    logger.debug("annealed moment a=%g t=%g k=%d: %.6g +- %.2g", a, t, k, out.value, out.se)
    return out


def frozen_path_moment(t: float, k: int) -> float:
    """a -> infinity limit: paths freeze, every Theta term is Theta(0) = 1."""
    return float(np.exp(0.5 * k * k * t))


def annealed_moment_bruteforce(a: float, t: float, k: int, profile: str = "gaussian",
                               field_replicas: int = 200, paths: int = 200, dt: float = 1e-2,
                               torus: Optional[Torus] = None, seed: int = 0) -> Estimate:
    """Double Monte Carlo oracle in d = 1: space-time noise on a grid, then paths.

    For each field realization w^k is estimated without bias by the product of k sample
    means over disjoint path groups; the estimate averages these over fields.
    """
    _check(a, k, profile)
    torus = torus or Torus(1, 16.0, 128)
    factor = grid_covariance_factor(scaled_theta(1.0, 1, profile), torus)
    steps = MCConfig(2, dt).steps(t)
    products = np.empty(field_replicas)
    for r in range(field_replicas):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        pos = np.zeros((k, paths, 1))
        eta = np.zeros((k, paths))
        for _ in range(steps):
            dw = sample_increment(factor, dt, rng).values.reshape(-1)
            eta += dw[torus.locate(pos.reshape(-1, 1))].reshape(k, paths)
            pos += rng.standard_normal(pos.shape) * np.sqrt(dt / a)
        products[r] = np.prod(np.mean(np.exp(eta), axis=1))
    return estimate(products)
