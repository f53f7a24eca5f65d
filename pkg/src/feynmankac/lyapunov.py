# Lyapunov slopes, large-deviation tail probes and the Harnack-type smoothness scan
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from ..covariance import scaled_theta
from ..errors import DomainError, SolverDivergenceError
from ..heatkernel.grid import Torus
from ..spde import NoisePath, SplittingScheme, SplittingStepper

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LyapunovEstimate:
    """Median late slope of log sup_x v~ with its interquartile band.

    rate = slope / a estimates lambda(a); ito_slope = slope - a / 2. Rates are NaN without a plateau.
    """

    a: float
    slope: float
    q25: float
    q75: float
    rate: float
    ito_slope: float
    plateau: bool
    early_slope: float
    slopes: np.ndarray

    @property
    def rates(self) -> np.ndarray:
        if not self.plateau:
            return np.full_like(self.slopes, np.nan)
        return self.slopes / self.a if self.a > 0 else np.zeros_like(self.slopes)


@dataclass(frozen=True)
class TailProbe:
    probability: float
    low: float
    high: float
    hits: int
    replicas: int


def log_sup_series(a: float, T: float, torus: Torus, replicas: int, seed: int,
                   dt: float = 1e-3, samples: int = 40, stratonovich: bool = True,
                   profile: str = "gaussian", region: Optional[np.ndarray] = None
                   ) -> Tuple[np.ndarray, np.ndarray]:
    """(times, log sup_x v(t, x)) for v(0) = 1, shape (samples + 1, replicas).

    The state is renormalized by its per-replica maximum at every sample time and the
    logarithms accumulated, so neither growth nor decay leaves floating-point range.
    `region` is an optional boolean grid mask restricting the supremum.
    """
    times = np.linspace(0.0, T, samples + 1)
    scheme = SplittingScheme(dt, ito_correction=not stratonovich)
    if a == 0:
        return times, np.zeros((samples + 1, replicas))
    stride = scheme.steps(T / samples)
    noise = NoisePath.from_kernel(scaled_theta(a, torus.d, profile), torus, dt, seed, replicas)
    stepper = SplittingStepper(torus, scheme, noise)
    mask = np.ones(torus.shape, dtype=bool) if region is None else region
    state = np.ones((replicas,) + torus.shape)
    scale = np.zeros(replicas)
    out = np.zeros((samples + 1, replicas))
    axes = tuple(range(1, state.ndim))
    step = 0
    for i in range(1, samples + 1):
        for _ in range(stride):
            (state,) = stepper.step([state], step, [False])
            step += 1
        peak = np.max(np.where(mask, state, 0.0), axis=axes)
        if not np.all(np.isfinite(peak)) or np.any(peak <= 0):
            raise SolverDivergenceError(step, "spatial maximum")
        out[i] = scale + np.log(peak)
        norm = np.max(state, axis=axes)
        scale += np.log(norm)
        state /= norm.reshape((-1,) + (1,) * torus.d)
    return times, out


def _slopes(times: np.ndarray, logs: np.ndarray, lo: float, hi: float) -> np.ndarray:
    window = (times >= lo - 1e-12) & (times <= hi + 1e-12)
    return np.polyfit(times[window], logs[window], 1)[0]


def slope_estimate(a: float, late: np.ndarray, early: np.ndarray) -> LyapunovEstimate:
    """Summarizes per-replica late and early slopes.

    The plateau flag is set when the two medians agree within the late interquartile range.
    Without a plateau the slope is kept for inspection but the rate is NaN.
    """
    late, early = np.atleast_1d(late), np.atleast_1d(early)
    q25, median, q75 = np.percentile(late, [25, 50, 75])
    early_median = float(np.median(early))
    plateau = bool(abs(median - early_median) <= max(q75 - q25, 1e-12))
    if not plateau:
        logger.warning("no plateau for a=%g: late slope %.4f vs early %.4f", a, median, early_median)
        rate = np.nan
    else:
        rate = float(median / a) if a > 0 else 0.0
    return LyapunovEstimate(a, float(median), float(q25), float(q75), rate, float(median - a / 2),
                            plateau, early_median, late)


def lyapunov_estimate(a: float, T: float, torus: Torus, replicas: int, seed: int,
                      dt: float = 1e-3, profile: str = "gaussian", samples: int = 40) -> LyapunovEstimate:
    """Late slope over [T/2, T], checked against the slope over [T/4, T/2]."""
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a}")
    times, logs = log_sup_series(a, T, torus, replicas, seed, dt, samples, True, profile)
    return slope_estimate(a, _slopes(times, logs, T / 2, T), _slopes(times, logs, T / 4, T / 2))


def lyapunov_ladder(a_values: Sequence[float], T: float, torus: Torus, replicas: int, seed: int,
                    dt: float = 1e-3, profile: str = "gaussian") -> pd.DataFrame:
    """Per-replica rates on one seed per rung, so replica r sees the same normals on every rung."""
    rows = []
    for a in a_values:
        est = lyapunov_estimate(a, T, torus, replicas, seed, dt, profile)
        for r, rate in enumerate(est.rates):
            rows.append({"a": a, "replica": r, "rate": float(rate), "slope": float(est.slopes[r]),
                         "plateau": est.plateau})
    return pd.DataFrame(rows)


def paired_fraction(ladder: pd.DataFrame, low: float, high: float) -> float:
    """Fraction of replicas whose rate at a=high is below the rate at a=low; NaN if either rung has no rate."""
    table = ladder.pivot(index="replica", columns="a", values="rate")
    high_rates, low_rates = table[high].to_numpy(), table[low].to_numpy()
    if np.isnan(high_rates).any() or np.isnan(low_rates).any():
        return float("nan")
    return float(np.mean(high_rates < low_rates))


def ldp_tail_probe(a: float, t: float, L: float, replicas: int, seed: int,
                   torus: Optional[Torus] = None, dt: float = 1e-3,
                   profile: str = "gaussian", confidence: float = 0.95) -> TailProbe:
    """Fraction of replicas with sup_{|x| <= L} v(t, x) > exp(-a t / 3), Wilson interval.

    a <= 0 is excluded: the event is then degenerate.
    """
    if a <= 0:
        raise DomainError(f"tail probe needs a > 0, got {a}")
    torus = torus or Torus(1, max(2.0 * L + 8.0, 16.0), 128)
    if torus.extent < 2 * L:
        raise DomainError(f"torus extent {torus.extent} is below 2L = {2 * L}")
    region = (np.linalg.norm(torus.centers(), axis=-1) <= L).reshape(torus.shape)
    _, logs = log_sup_series(a, t, torus, replicas, seed, dt, samples=1, stratonovich=False,
                             profile=profile, region=region)
    hits = int(np.sum(logs[-1] > -a * t / 3.0))
    ci = stats.binomtest(hits, replicas).proportion_ci(confidence, method="wilson")
    return TailProbe(hits / replicas, float(ci.low), float(ci.high), hits, replicas)


@dataclass(frozen=True)
class HarnackScan:
    fraction: float
    pairs: int
    threshold: float


def harnack_scan(values: np.ndarray, torus: Torus, t: float) -> HarnackScan:
    """Share of neighbouring cell pairs with |log v(x) - log v(y)| > (t |x - y|)^(1/3)."""
    logs = np.log(np.maximum(values, np.finfo(float).tiny))
    threshold = (t * torus.h) ** (1.0 / 3.0)
    exceed, pairs = 0, 0
    for axis in torus.axes:
        jump = np.abs(logs - np.roll(logs, 1, axis=axis))
        exceed += int(np.sum(jump > threshold))
        pairs += jump.size
    return HarnackScan(exceed / pairs, pairs, threshold)
