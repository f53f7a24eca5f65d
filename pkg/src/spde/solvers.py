# Splitting schemes for the parabolic Anderson model and the log-Laplace equation
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import DomainError, SolverDivergenceError
from ..heatkernel.grid import GridFunction, Torus
from ..heatkernel.semigroup import heat_step
from .noise import NoisePath

logger = logging.getLogger(__name__)

ORDERINGS = ("symmetric", "lie")


@dataclass(frozen=True)
class SplittingScheme:
    dt: float = 1e-3
    ordering: str = "symmetric"
    ito_correction: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.ordering not in ORDERINGS:
            raise DomainError(f"unknown operator ordering {self.ordering!r}")

    def steps(self, T: float) -> int:
        n = int(round(T / self.dt))
        if T < 0 or abs(n * self.dt - T) > 1e-9 * max(1.0, T):
            raise DomainError(f"dt={self.dt} does not divide T={T}")
        return n


@dataclass
class SpdeSolution:
    """Saved slices: values has shape (save, *replicas, *grid)."""

    torus: Torus
    times: np.ndarray
    values: np.ndarray
    scheme: SplittingScheme
    seed: int

    def slice(self, i: int) -> GridFunction:
        return GridFunction(self.torus, self.values[i])

    @property
    def final(self) -> GridFunction:
        return self.slice(-1)

    @property
    def replicas(self) -> int:
        return int(np.prod(self.values.shape[1:self.values.ndim - self.torus.d]))


@dataclass
class PamSolution(SpdeSolution):
    kind: str = "ito"


@dataclass
class LogLaplaceSolution(SpdeSolution):
    lam: float = 1.0


@dataclass
class DerivativePair:
    """u(lam), u(lam + delta), their quotient w and the PAM solution v, on one noise path."""

    lam: float
    delta: float
    times: np.ndarray
    u: np.ndarray
    u_shift: np.ndarray
    w: np.ndarray
    v: np.ndarray
    torus: Torus = field(repr=False, default=None)


class SplittingStepper:
    """One step of heat / reaction / noise splitting applied to any number of states."""

    def __init__(self, torus: Torus, scheme: SplittingScheme, noise: NoisePath,
                 floor: bool = True):
        if abs(noise.dt - scheme.dt) > 1e-15:
            raise DomainError(f"noise dt {noise.dt} differs from scheme dt {scheme.dt}")
        if noise.torus != torus:
            raise DomainError("noise path lives on a different torus")
        self.torus = torus
        self.scheme = scheme
        self.noise = noise
        self.floor = floor
        self._drift = 0.5 * noise.variance * scheme.dt if scheme.ito_correction else 0.0

    def heat(self, u: np.ndarray, t: float) -> np.ndarray:
        return heat_step(u, self.torus, t, floor=self.floor)

    def noise_factor(self, step: int) -> Optional[np.ndarray]:
        if self.noise.is_silent:
            return None
        return np.exp(self.noise.increment(step) - self._drift)

    def absorb(self, u: np.ndarray) -> np.ndarray:
        # exact flow of du = -u^2/2 over dt
        return u / (1.0 + 0.5 * self.scheme.dt * u)

    def step(self, states: List[np.ndarray], step: int, nonlinear: Sequence[bool]) -> List[np.ndarray]:
        dt = self.scheme.dt
        factor = self.noise_factor(step)
        half = 0.5 * dt if self.scheme.ordering == "symmetric" else dt
        out = []
        for u, nl in zip(states, nonlinear):
            u = self.heat(u, half)
            if nl:
                u = self.absorb(u)
            if factor is not None:
                u = u * factor
            if self.scheme.ordering == "symmetric":
                u = self.heat(u, half)
            out.append(u)
        return out


def _save_indices(T: float, scheme: SplittingScheme, save_times) -> np.ndarray:
    n = scheme.steps(T)
    if save_times is None:
        return np.array([0, n])
    idx = np.unique(np.rint(np.asarray(save_times, dtype=float) / scheme.dt).astype(int))
    if idx.min() < 0 or idx.max() > n:
        raise DomainError(f"save times must lie in [0, {T}]")
    return idx


def _initial(f: GridFunction, noise: NoisePath) -> np.ndarray:
    return np.broadcast_to(f.values, noise.batch + f.torus.shape).astype(float, copy=True)


def integrate(initials: List[np.ndarray], nonlinear: Sequence[bool], T: float,
              noise: NoisePath, scheme: SplittingScheme, save_times=None, floor: bool = True):
    """Steps every state through the same noise; returns (times, [saved arrays])."""
    torus = noise.torus
    stepper = SplittingStepper(torus, scheme, noise, floor)
    idx = _save_indices(T, scheme, save_times)
    saved = [np.empty((len(idx),) + u.shape) for u in initials]
    states = list(initials)
    cursor = 0
    for k in range(idx[-1] + 1):
        while cursor < len(idx) and idx[cursor] == k:
            for buf, u in zip(saved, states):
                buf[cursor] = u
            cursor += 1
        if k == idx[-1]:
            break
        states = stepper.step(states, k, nonlinear)
        for u in states:
            if not np.all(np.isfinite(u)):
                raise SolverDivergenceError(k + 1)
    return idx * scheme.dt, saved


def solve_pam(f: GridFunction, T: float, noise: NoisePath,
              scheme: Optional[SplittingScheme] = None, save_times=None) -> PamSolution:
    """dv = (1/2) Lap v dt + v dW, v(0) = f, in Ito form."""
    scheme = scheme or SplittingScheme(noise.dt)
    floor = bool(f.values.min() >= 0)
    times, (v,) = integrate([_initial(f, noise)], [False], T, noise, scheme, save_times, floor)
    return PamSolution(f.torus, times, v, scheme, noise.seed)


def solve_log_laplace(f: GridFunction, lam: float, T: float, noise: NoisePath,
                      scheme: Optional[SplittingScheme] = None, save_times=None) -> LogLaplaceSolution:
    """du = ((1/2) Lap u - u^2/2) dt + u dW, u(0) = lam f."""
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if f.values.min() < 0:
        raise DomainError("log-Laplace initial datum must be non-negative")
    scheme = scheme or SplittingScheme(noise.dt)
    times, (u,) = integrate([lam * _initial(f, noise)], [True], T, noise, scheme, save_times)
    return LogLaplaceSolution(f.torus, times, u, scheme, noise.seed, lam)


def _theta_amplitude(noise: NoisePath) -> float:
    kernel = noise.kernel
    if kernel is None or kernel.variant != "scaled_theta":
        raise DomainError("Stratonovich PAM needs a scaled_theta kernel")
    return float(kernel.param("a"))


def solve_stratonovich_pam(f: GridFunction, T: float, noise: NoisePath,
                           scheme: Optional[SplittingScheme] = None, save_times=None,
                           direct: bool = False) -> PamSolution:
    """PAM with a Stratonovich product; C = a Theta with Theta(0) = 1.

    By default the Ito solution is multiplied by exp(a t / 2); `direct` drops the Ito
    correction from the noise factor instead.
    """
    a = _theta_amplitude(noise)
    scheme = scheme or SplittingScheme(noise.dt)
    if direct:
        sol = solve_pam(f, T, noise, replace(scheme, ito_correction=False), save_times)
        return PamSolution(sol.torus, sol.times, sol.values, scheme, noise.seed, "stratonovich-direct")
    sol = solve_pam(f, T, noise, replace(scheme, ito_correction=True), save_times)
    growth = np.exp(0.5 * a * sol.times).reshape((-1,) + (1,) * (sol.values.ndim - 1))
    return PamSolution(sol.torus, sol.times, sol.values * growth, scheme, noise.seed, "stratonovich")


def stratonovich_identity_gap(f: GridFunction, T: float, noise: NoisePath,
                              scheme: Optional[SplittingScheme] = None) -> float:
    """Relative sup-norm distance between the direct scheme and v * exp(a t / 2) at T."""
    via_identity = solve_stratonovich_pam(f, T, noise, scheme).values[-1]
    direct = solve_stratonovich_pam(f, T, noise, scheme, direct=True).values[-1]
    return float(np.max(np.abs(direct - via_identity)) / np.max(np.abs(via_identity)))


def derivative_quotient(f: GridFunction, lam: float, delta: float, T: float, noise: NoisePath,
                        scheme: Optional[SplittingScheme] = None, save_times=None) -> DerivativePair:
    """w_delta = (u(lam + delta) - u(lam)) / delta alongside v, all driven by one noise path."""
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if lam < 0 or f.values.min() < 0:
        raise DomainError("needs lam >= 0 and a non-negative datum")
    scheme = scheme or SplittingScheme(noise.dt)
    base = _initial(f, noise)
    times, (u, u_shift, v) = integrate([lam * base, (lam + delta) * base, base.copy()],
                                       [True, True, False], T, noise, scheme, save_times)
    return DerivativePair(lam, delta, times, u, u_shift, (u_shift - u) / delta, v, f.torus)


def total_mass_series(sol: SpdeSolution) -> pd.DataFrame:
    """<u(t), m> on the torus per save time (rows) and replica (columns)."""
    mass = sol.torus.cell_volume * sol.values.sum(axis=sol.torus.axes)
    mass = mass.reshape(len(sol.times), -1)
    frame = pd.DataFrame(mass, index=pd.Index(sol.times, name="t"))
    frame.columns.name = "replica"
    return frame
