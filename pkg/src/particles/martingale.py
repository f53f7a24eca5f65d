# Martingale-problem residuals and snapshot export for particle trajectories
from typing import List, Mapping, Sequence

import numpy as np
import pandas as pd

from ..covariance import CovarianceKernel
from ..errors import DomainError
from .branching import ParticlePopulation
from .readouts import Readout


def _pairing(pop: ParticlePopulation, func) -> float:
    if pop.count == 0:
        return 0.0
    return float(np.sum(func(pop.positions))) / pop.n


def _kernel_pairing(pop: ParticlePopulation, f: Readout, kernel: CovarianceKernel) -> float:
    """<C f x f, X x X>, summing over distinct sites with multiplicities."""
    if pop.count == 0:
        return 0.0
    if kernel.is_constant:
        return kernel.sup_bound * _pairing(pop, f) ** 2
    sites, counts = np.unique(pop.positions, axis=0, return_counts=True)
    weights = counts * f(sites) / pop.n
    return float(weights @ kernel.matrix(sites) @ weights)


def _trapezoid(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    out[1:] = np.cumsum(0.5 * np.diff(times) * (values[1:] + values[:-1]))
    return out


def martingale_residual(trajectory: Sequence[ParticlePopulation], f: Readout,
                        kernel: CovarianceKernel) -> pd.DataFrame:
    """M_t = <f, X_t> - <f, X_0> - (1/2) int <Lap f, X_s> ds and its predicted bracket.

    bracket_t = int <f^2, X_s> ds + int <C f x f, X_s x X_s> ds; both integrals by the
    trapezoidal rule over the snapshot times.
    """
    times = np.array([p.time for p in trajectory])
    pair = np.array([_pairing(p, f) for p in trajectory])
    drift = np.array([_pairing(p, f.laplacian) for p in trajectory])
    square = np.array([_pairing(p, lambda x: f(x) ** 2) for p in trajectory])
    noise = np.array([_kernel_pairing(p, f, kernel) for p in trajectory])
    residual = pair - pair[0] - 0.5 * _trapezoid(times, drift)
    bracket = _trapezoid(times, square) + _trapezoid(times, noise)
    return pd.DataFrame({"t": times, "residual": residual, "bracket": bracket})


def conditional_martingale_residual(trajectory: Sequence[ParticlePopulation],
                                    f: Readout) -> pd.DataFrame:
    """Residual with the environment term removed; bracket int <f^2, X_s> ds only.

    Needs every epoch: the environment term sums (1/n) sum_j f(y_j) xi(y_j) / sqrt(n)
    over the parents y_j of each epoch.
    """
    epochs = np.array([p.epoch for p in trajectory])
    if np.any(np.diff(epochs) != 1):
        raise DomainError("conditional residual needs consecutive epochs")
    times = np.array([p.time for p in trajectory])
    pair = np.array([_pairing(p, f) for p in trajectory])
    drift = np.array([_pairing(p, f.laplacian) for p in trajectory])
    square = np.array([_pairing(p, lambda x: f(x) ** 2) for p in trajectory])
    env = np.zeros(len(trajectory))
    for i, p in enumerate(trajectory[1:], start=1):
        if p.parents is not None and len(p.parents):
            env[i] = float(np.sum(f(p.parents) * p.xi)) / (p.n * np.sqrt(p.n))
    residual = pair - pair[0] - 0.5 * _trapezoid(times, drift) - np.cumsum(env)
    return pd.DataFrame({"t": times, "residual": residual, "bracket": _trapezoid(times, square)})


def residual_summary(frames: Sequence[pd.DataFrame]) -> pd.DataFrame:
    """Across replicas: mean residual with SE, sample variance and mean bracket with SE."""
    stacked = pd.concat(frames, keys=range(len(frames)), names=["replica", "row"])
    grouped = stacked.groupby("t")
    count = grouped["residual"].count()
    out = pd.DataFrame({
        "mean": grouped["residual"].mean(),
        "se": grouped["residual"].std(ddof=1) / np.sqrt(count),
        "variance": grouped["residual"].var(ddof=1),
        "bracket": grouped["bracket"].mean(),
        "bracket_se": grouped["bracket"].std(ddof=1) / np.sqrt(count),
    })
    # SE of the sample variance of M from its fourth moment
    m4 = grouped["residual"].apply(lambda r: np.mean((r - r.mean()) ** 4))
    out["variance_se"] = np.sqrt(np.maximum(m4 - out["variance"] ** 2, 0.0) / count)
    return out.reset_index()


def snapshot_frame(trajectories: Sequence[List[ParticlePopulation]],
                   readouts: Mapping[str, Readout]) -> pd.DataFrame:
    """Rows (replica, t, particle_count, <f, X_t> per readout)."""
    rows = []
    for replica, trajectory in enumerate(trajectories):
        for pop in trajectory:
            row = {"replica": replica, "t": pop.time, "particle_count": pop.count}
            for name, f in readouts.items():
                row[name] = _pairing(pop, f)
            rows.append(row)
    return pd.DataFrame(rows, columns=["replica", "t", "particle_count", *readouts])
