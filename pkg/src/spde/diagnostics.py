# Ensemble statistics, comparison checks and regularity probes for SPDE solutions
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from ..heatkernel.grid import GridFunction
from ..heatkernel.semigroup import WeightFamily, apply_heat_semigroup
from .solvers import DerivativePair, SpdeSolution

COMPARISON_ATOL = 1e-12
ROUNDOFF_ULPS = 256


def ensemble_mean(values: np.ndarray, replica_axes: Tuple[int, ...] = (0,)) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over the replica axes."""
    n = int(np.prod([values.shape[a] for a in replica_axes]))
    mean = values.mean(axis=replica_axes)
    se = values.std(axis=replica_axes, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, se


def ensemble_at(sol: SpdeSolution, i: int = -1) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell ensemble mean and SE of the i-th saved slice."""
    values = sol.values[i]
    batch_axes = tuple(range(values.ndim - sol.torus.d))
    return ensemble_mean(values, batch_axes)


def comparison_violations(pair: DerivativePair) -> Dict[str, float]:
    """Largest violation of each comparison inequality (<= 0 means it holds)."""
    lam = pair.lam
    return {
        "u_nonnegative": float(np.max(-pair.u)),
        "u_below_lam_v": float(np.max(pair.u - lam * pair.v)),
        "u_monotone_in_lam": float(np.max(pair.u - pair.u_shift)),
        "w_nonnegative": float(np.max(-pair.w)),
        "w_below_v": float(np.max(pair.w - pair.v)),
    }


def comparison_allowance(pair: DerivativePair, dt: float) -> Dict[str, float]:
    """Round-off allowance per comparison inequality, keyed like `comparison_violations`.

    Each step adds FFT round-off of order eps * sup|v| to both sides, so the allowance is
    1e-12 plus ROUNDOFF_ULPS * eps * steps * max(1, sup|v|), scaled by lam + delta for u and
    by 1 / delta for the difference quotient w.
    """
    steps = max(1, int(round(float(pair.times[-1]) / dt)))
    sup_v = float(np.max(np.abs(pair.v))) if pair.v.size else 0.0
    base = COMPARISON_ATOL + ROUNDOFF_ULPS * np.finfo(float).eps * steps * max(1.0, sup_v)
    on_u = base * max(1.0, pair.lam + pair.delta)
    on_w = base / min(1.0, pair.delta)
    return {"u_nonnegative": on_u, "u_below_lam_v": on_u, "u_monotone_in_lam": on_u,
            "w_nonnegative": on_w, "w_below_v": on_w}


def moment_profile(sol: SpdeSolution, p: float) -> pd.Series:
    """sup_x of the empirical E|v(t, x)|^p per save time."""
    batch_axes = tuple(range(1, sol.values.ndim - sol.torus.d))
    moments = np.mean(np.abs(sol.values) ** p, axis=batch_axes)
    sup = moments.reshape(len(sol.times), -1).max(axis=1)
    return pd.Series(sup, index=pd.Index(sol.times, name="t"), name=f"sup_E|v|^{p:g}")


def weighted_sup_moments(sol: SpdeSolution, rho: float, p: int) -> pd.Series:
    """Empirical E[(sup_x v(t, x) phi_rho(x))^(2p)] per save time."""
    weight = WeightFamily(rho).on(sol.torus).values
    weighted = sol.values * weight
    sup = weighted.reshape(weighted.shape[:weighted.ndim - sol.torus.d] + (-1,)).max(axis=-1)
    moments = (sup ** (2 * p)).reshape(len(sol.times), -1).mean(axis=1)
    return pd.Series(moments, index=pd.Index(sol.times, name="t"), name=f"E_sup_weighted^{2 * p}")


def holder_scan(sol: SpdeSolution, f: GridFunction, p: int = 1, max_lag: Optional[int] = None) -> pd.DataFrame:
    """Empirical increments E|r(x) - r(x + lag h)|^(2p) of r = v(t) - P_t f at the last save time.

    The fitted log-log slope divided by 2p estimates the spatial Holder exponent.
    """
    torus = sol.torus
    t = float(sol.times[-1])
    residual = sol.values[-1] - apply_heat_semigroup(f, t).values
    max_lag = max_lag or max(2, torus.cells // 8)
    lags = np.unique(np.geomspace(1, max_lag, num=8).astype(int))
    rows = []
    for lag in lags:
        shifted = np.roll(residual, int(lag), axis=-1)
        rows.append({"lag": int(lag), "distance": lag * torus.h,
                     "moment": float(np.mean(np.abs(residual - shifted) ** (2 * p)))})
    frame = pd.DataFrame(rows)
    positive = frame["moment"] > 0
    if positive.sum() >= 2:
        slope = np.polyfit(np.log(frame.loc[positive, "distance"]), np.log(frame.loc[positive, "moment"]), 1)[0]
        frame.attrs["exponent"] = float(slope / (2 * p))
    return frame


def trajectory_frame(sol: SpdeSolution, summarized: bool = True) -> pd.DataFrame:
    """Long-format trajectory: (t, replica, cell_index, value) or per-slice summaries."""
    n_save = len(sol.times)
    flat = sol.values.reshape(n_save, -1, sol.torus.size)
    if summarized:
        mass = sol.torus.cell_volume * flat.sum(axis=-1)
        return pd.DataFrame({
            "t": np.repeat(sol.times, flat.shape[1]),
            "replica": np.tile(np.arange(flat.shape[1]), n_save),
            "min": flat.min(axis=-1).reshape(-1),
            "max": flat.max(axis=-1).reshape(-1),
            "mean": flat.mean(axis=-1).reshape(-1),
            "total_mass": mass.reshape(-1),
        })
    index = pd.MultiIndex.from_product(
        [sol.times, np.arange(flat.shape[1]), np.arange(sol.torus.size)],
        names=["t", "replica", "cell_index"])
    return pd.DataFrame({"value": flat.reshape(-1)}, index=index).reset_index()
