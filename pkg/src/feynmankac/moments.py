# First and second moment formulas of the superprocess, and the PAM two-point oracle
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..covariance import CovarianceKernel
from ..errors import DomainError
from ..heatkernel.semigroup import heat_expectation
from .paths import (Estimate, MCConfig, _batches, _increments, _pair_samples, antithetic_pairs,
                    estimate, qtc, tensor)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite measure sum_i w_i delta_{x_i}."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if points.shape[0] != weights.shape[0]:
            raise DomainError("one weight per atom")
        if np.any(weights < 0):
            raise DomainError("atomic measure weights must be non-negative")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def dirac(cls, point: Sequence[float], mass: float = 1.0) -> "AtomicMeasure":
        return cls(np.atleast_2d(np.asarray(point, dtype=float)), np.array([mass]))

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def _heat_flow(f, t: float, x, d: int) -> float:
    if hasattr(f, "heat_flow"):
        return f.heat_flow(t, x)
    return heat_expectation(f, x, t, d)


def first_moment_rhs(f: Callable, nu: AtomicMeasure, t: float) -> float:
    """<P_t f, nu> = sum_i w_i P_t f(x_i)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return float(sum(w * _heat_flow(f, t, x, nu.d) for x, w in zip(nu.points, nu.weights)))


def _split_pair_samples(F, x, t, kernel: CovarianceKernel, mc: MCConfig, size: int,
                        rng: np.random.Generator) -> np.ndarray:
    """t * F(B_t, B'_t) exp(int C) for a pair that moves together until t - s, then splits.

    s is stratified uniform on [0, t], so the mean estimates int_0^t P_{t-s} pi Q_s F ds.
    """
    d = kernel.d
    s = t * (np.arange(size) + rng.random(size)) / size
    joint = np.asarray(x, dtype=float) + np.sqrt(t - s)[:, None] * _increments(rng, (size, d), mc.antithetic)
    return t * _pair_samples(F, joint, joint, t, kernel, mc, size, rng, durations=s)


def second_moment_rhs(f: Callable, nu: AtomicMeasure, t: float, kernel: CovarianceKernel,
                      mc: MCConfig) -> Estimate:
    """<Q_t^C(f x f), nu x nu> + <int_0^t P_{t-s} pi Q_s^C (f x f) ds, nu>."""
    if nu.d != kernel.d:
        raise DomainError(f"{nu.d}-d measure with a {kernel.d}-d kernel")
    F = tensor(f)
    value, var = 0.0, 0.0
    for i, (xi, wi) in enumerate(zip(nu.points, nu.weights)):
        for j, (xj, wj) in enumerate(zip(nu.points, nu.weights)):
            est = qtc(F, xi, xj, t, kernel, MCConfig(mc.paths, mc.dt, _atom_seed(mc.seed, i, j),
                                                     mc.antithetic))
            value += wi * wj * est.value
            var += (wi * wj * est.se) ** 2
    if t > 0:
        for i, (xi, wi) in enumerate(zip(nu.points, nu.weights)):
            seed = _atom_seed(mc.seed, i, -1)
            split_mc = MCConfig(mc.paths, mc.dt, seed, mc.antithetic)
            chunks = []
            for _, size, rng in _batches(split_mc):
                samples = _split_pair_samples(F, xi, t, kernel, split_mc, size, rng)
                chunks.append(antithetic_pairs(samples) if mc.antithetic else samples)
            est = estimate(np.concatenate(chunks))
            value += wi * est.value
            var += (wi * est.se) ** 2
    out = Estimate(value, float(np.sqrt(var)), mc.paths)
    logger.debug("second moment t=%g: %.6g +- %.2g", t, out.value, out.se)
    return out


def _atom_seed(seed: int, i: int, j: int) -> int:
    state = np.random.SeedSequence(seed, spawn_key=(i, j + 1)).generate_state(1, np.uint32)
    return int(state[0])


def pam_second_moment_oracle(f: Callable, t: float, x, y, kernel: CovarianceKernel,
                             mc: MCConfig) -> Estimate:
    """E[v(t, x) v(t, y)] for the PAM with datum f, as Q_t^C (f x f)(x, y)."""
    return qtc(tensor(f), x, y, t, kernel, mc)


def second_moment_closed_form(c: float, t: float, mass: float = 1.0) -> float:
    """E<1, X_t>^2 from a point mass under C = c: m^2 e^{ct} + m (e^{ct} - 1) / c."""
    growth = np.exp(c * t)
    integral = t if c == 0 else (growth - 1.0) / c
    return float(mass ** 2 * growth + mass * integral)
