# The named experiments: each returns its acceptance checks and data tables
import logging
import time
from functools import partial
from typing import Callable, Dict, Tuple

import numpy as np
import pandas as pd

from ..covariance import constant, indicator_ball, scaled_theta, stationary_power
from ..dual import (TorusConstant, duality_ladder, evolve_dual, jump_log_frame,
                    ladder_non_increasing, third_moment_scan)
from ..errors import PopulationCapError
from ..feynmankac import (AtomicMeasure, Estimate, annealed_moment_bruteforce, annealed_moment_w,
                          estimate, gap_in_se, harnack_scan, ldp_tail_probe, log_sup_series,
                          lyapunov_ladder, paired_fraction, pam_second_moment_oracle,
                          second_moment_closed_form, second_moment_rhs, first_moment_rhs)
from ..heatkernel import (GridFunction, Torus, apply_heat_semigroup, bridge_potential,
                          check_weight_domination, classify_regime, green_constant,
                          khasminskii_exponent, persistence_threshold, potential_at,
                          sup_green_potential, theta_potential)
from ..particles import (BranchingConfig, conditional_martingale_residual, martingale_residual,
                         residual_summary, run_replica, snapshot_frame)
from ..spde import (NoisePath, SplittingScheme, comparison_allowance, comparison_violations,
                    derivative_quotient, holder_scan, moment_profile, solve_log_laplace, solve_pam,
                    stratonovich_identity_gap, weighted_sup_moments)
from ..streams import derived_seed
from .pool import map_replicas
from .report import CheckList, RunReport, versions
from .settings import ExperimentConfig, validate_config

logger = logging.getLogger(__name__)

THRESHOLD_CLOSED_FORMS = {3: np.pi / 3, 4: np.pi ** 2 / 4, 5: 3 * np.pi ** 2 / 10}

Outcome = Tuple[CheckList, Dict[str, pd.DataFrame]]


def within(gap: float, se: float, k: float, atol: float = 1e-9) -> bool:
    return bool(abs(gap) <= k * se + atol)


def _first_readout(config: ExperimentConfig):
    catalog = config.readout_catalog()
    name = next(iter(catalog))
    return name, catalog[name]


def threshold_table(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    rows = []
    for d, closed in THRESHOLD_CLOSED_FORMS.items():
        value = persistence_threshold(d)
        rows.append({"d": d, "threshold": value, "closed_form": closed, "green_constant": green_constant(d)})
        checks.add(f"threshold_d{d}", value, abs(value - closed) <= 1e-12, tolerance=1e-12)
    theta = theta_potential(indicator_ball(1.0, 1.0, 3).profile(), 3)
    checks.add("theta_unit_ball_d3", theta, abs(theta - 2 * np.pi) <= 1e-6, tolerance=1e-6)

    bump = GridFunction.from_callable(Torus(1, 16.0, 256), lambda x: np.exp(-np.sum(x ** 2, axis=-1)))
    once = apply_heat_semigroup(bump, 0.7)
    mass_gap = abs(once.integral() - bump.integral())
    composed = float(np.max(np.abs(apply_heat_semigroup(apply_heat_semigroup(bump, 0.3), 0.4).values
                                   - once.values)))
    identity = bool(np.array_equal(apply_heat_semigroup(bump, 0.0).values, bump.values))
    checks.add("heat_mass_conservation", mass_gap, mass_gap <= 1e-10, tolerance=1e-10)
    checks.add("semigroup_composition", composed, composed <= 1e-10, tolerance=1e-10)
    checks.add("semigroup_identity", float(identity), identity)
    domination = []
    for rho in config.param_tuple("rho", (2.0, 4.0)):
        for d in config.param_tuple("domination_d", (1, 3), int):
            rep = check_weight_domination(rho, config.param("domination_t", 1.0), d)
            domination.append({"case": f"rho{rho:g}_d{d}", "constant": rep.constant,
                               "argmax_t": rep.argmax_t, "finite": rep.finite})
            checks.add(f"weight_domination_rho{rho:g}_d{d}", rep.constant, rep.finite)
    return checks, {"thresholds": pd.DataFrame(rows), "domination": pd.DataFrame(domination)}


def _pam_chunk(kernel, torus, scheme, T, f, seed, start, stop):
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, derived_seed(seed, start), stop - start)
    sol = solve_pam(GridFunction.from_callable(torus, f), T, noise, scheme)
    origin = torus.locate(np.zeros((1, torus.d)))[0]
    return list(sol.values[-1].reshape(stop - start, -1)[:, origin])


def pam_oracle(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    kernel, torus, scheme = config.kernel(), config.torus(), config.scheme()
    T = config.horizon
    _, f = _first_readout(config)
    values = np.array(map_replicas(partial(_pam_chunk, kernel, torus, scheme, T, f),
                                   config.replicas, config.seed, workers, config.chunk))
    first, second = estimate(values), estimate(values ** 2)
    origin = np.zeros(config.d)
    mean_target = f.heat_flow(T, origin) if kernel.is_constant else first.value
    oracle = pam_second_moment_oracle(f, T, origin, origin, kernel, config.mc())
    if kernel.is_constant:
        c = kernel.sup_bound
        target = f.heat_flow(T, origin) ** 2 * np.exp(c * T)
        checks.add("pam_mean", first.value, within(first.value - mean_target, first.se, 3), first.se, 3)
        checks.add("pam_second_moment", second.value, within(second.value - target, second.se, 3), second.se, 3)
        checks.add("oracle_second_moment", oracle.value, within(oracle.value - target, oracle.se, 3), oracle.se, 3)
    agree = gap_in_se(second, oracle)
    checks.add("ensemble_vs_oracle", agree, agree <= 5, tolerance=5)

    fine = Torus(1, config.param("degeneracy_extent", 16.0), 256)
    bump = GridFunction.from_callable(fine, lambda x: np.exp(-np.sum(x ** 2, axis=-1)))
    solved = solve_pam(bump, 1.0, NoisePath.silent(fine, 1e-3), SplittingScheme(1e-3)).final.values
    exact = apply_heat_semigroup(bump, 1.0).values
    degeneracy = float(np.max(np.abs(solved - exact)))
    checks.add("zero_noise_equals_heat_flow", degeneracy, degeneracy <= 1e-8, tolerance=1e-8)

    strat_torus = Torus(1, 16.0, 64)
    strat_dt = config.param("stratonovich_dt", 1e-4)
    noise = NoisePath.from_kernel(scaled_theta(config.param("stratonovich_a", 1.0), 1), strat_torus,
                                  strat_dt, derived_seed(config.seed, 7))
    gap = stratonovich_identity_gap(GridFunction.constant(strat_torus, 1.0), 1.0, noise,
                                    SplittingScheme(strat_dt))
    checks.add("stratonovich_identity", gap, gap <= 1e-3, tolerance=1e-3)
    data = {"moments": pd.DataFrame([
        {"quantity": "mean_v", "estimate": first.value, "se": first.se, "n": first.n},
        {"quantity": "mean_v2", "estimate": second.value, "se": second.se, "n": second.n},
        {"quantity": "oracle_v2", "estimate": oracle.value, "se": oracle.se, "n": oracle.n},
    ])}
    return checks, data


def _particle_chunk(config, save_times, readout, seed, start, stop):
    out = []
    for r in range(start, stop):
        try:
            final = run_replica(config, save_times, seed, r)[-1]
            out.append(float(np.sum(readout(final.positions))) / config.n if final.count else 0.0)
        except PopulationCapError as e:
            logger.warning("replica %d: %s", r, e)
            out.append(np.nan)
    return out


def _residual_chunk(config, readout, seed, start, stop):
    frames = []
    for r in range(start, stop):
        trajectory = run_replica(config, None, seed, r)
        frame = martingale_residual(trajectory, readout, config.kernel)
        frame["conditional"] = conditional_martingale_residual(trajectory, readout)["residual"]
        frames.append(frame)
    return frames


def _laplace_chunk(kernel, torus, scheme, T, lams, seed, start, stop):
    """exp(-u_lam(T, 0)) per replica for each lam, on one shared noise path per replica."""
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, derived_seed(seed, start), stop - start)
    ones = GridFunction.constant(torus, 1.0)
    origin = torus.locate(np.zeros((1, torus.d)))[0]
    columns = []
    for lam in lams:
        u = solve_log_laplace(ones, lam, T, noise, scheme).final.values.reshape(stop - start, -1)
        columns.append(np.exp(-u[:, origin]))
    return list(np.stack(columns, axis=1))


def moments_triangle(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    kernel = config.kernel()
    T = config.horizon
    name, f = _first_readout(config)
    n = config.param("n", 200, int)
    branching = BranchingConfig.point_mass(n, kernel, horizon=T)
    masses = np.array(map_replicas(partial(_particle_chunk, branching, [T], f), config.replicas,
                                   config.seed, workers, config.chunk))
    blowups = int(np.isnan(masses).sum())
    masses = masses[~np.isnan(masses)]
    first, second = estimate(masses), estimate(masses ** 2)
    nu = AtomicMeasure.dirac(np.zeros(config.d))
    first_rhs = first_moment_rhs(f, nu, T)
    rhs = second_moment_rhs(f, nu, T, kernel, config.mc())
    checks.add("particle_first_moment", first.value, within(first.value - first_rhs, first.se, 3), first.se, 3)
    checks.add("second_moment_rhs_vs_particles", gap_in_se(second, rhs), gap_in_se(second, rhs) <= 5, tolerance=5)

    # log-Laplace route: E<1, X>^2 = L''(0), second-order one-sided difference in lam
    delta = config.param("laplace_delta", 1e-3)
    lams = [0.0, delta, 2 * delta, 3 * delta]
    torus, scheme = config.torus(), config.scheme()
    laplace = np.array(map_replicas(partial(_laplace_chunk, kernel, torus, scheme, T, lams),
                                    config.replicas, derived_seed(config.seed, 11), workers, config.chunk))
    spde = estimate((2 * laplace[:, 0] - 5 * laplace[:, 1] + 4 * laplace[:, 2] - laplace[:, 3]) / delta ** 2)
    checks.add("spde_vs_particles", gap_in_se(spde, second), gap_in_se(spde, second) <= 5, tolerance=5)
    checks.add("spde_vs_second_moment_rhs", gap_in_se(spde, rhs), gap_in_se(spde, rhs) <= 5, tolerance=5)
    if kernel.is_constant and f.heat_flow(T, np.zeros(config.d)) == 1.0:
        closed = second_moment_closed_form(kernel.sup_bound, T)
        exact = Estimate(closed, 0.0, 1)
        checks.add("particle_second_moment_closed_form", second.value, gap_in_se(second, exact) <= 5, second.se, 5)
        checks.add("second_moment_rhs_closed_form", rhs.value, within(rhs.value - closed, rhs.se, 3), rhs.se, 3)
    checks.add("variance_nonnegative", rhs.value - first_rhs ** 2, rhs.value >= first_rhs ** 2 - 5 * rhs.se)

    m_n = config.param("martingale_n", 100, int)
    m_replicas = config.param("martingale_replicas", config.replicas, int)
    m_times = np.linspace(0.0, T, 6)[1:]
    bump_name = config.params.get("martingale_readout", name)
    bump = config.readout_catalog()[bump_name]
    m_config = BranchingConfig.point_mass(m_n, kernel, horizon=T)
    frames = map_replicas(partial(_residual_chunk, m_config, bump), m_replicas,
                          derived_seed(config.seed, 13), workers, config.chunk)
    summary = residual_summary(frames)
    conditional = residual_summary([fr[["t", "conditional"]].rename(columns={"conditional": "residual"})
                                    .assign(bracket=0.0) for fr in frames])
    probes = summary[np.isin(np.round(summary["t"] * m_n).astype(int), np.round(m_times * m_n).astype(int))]
    for _, row in probes.iterrows():
        checks.add(f"martingale_mean_t{row['t']:.2f}", row["mean"], within(row["mean"], row["se"], 3), row["se"], 3)
    last = summary.iloc[-1]
    bracket_se = float(np.hypot(last["variance_se"], last["bracket_se"]))
    checks.add("martingale_bracket", last["variance"], within(last["variance"] - last["bracket"], bracket_se, 5),
               bracket_se, 5)
    data = {
        "moments": pd.DataFrame([
            {"quantity": "particles_first", "estimate": first.value, "se": first.se, "n": first.n},
            {"quantity": "particles_second", "estimate": second.value, "se": second.se, "n": second.n},
            {"quantity": "second_moment_rhs", "estimate": rhs.value, "se": rhs.se, "n": rhs.n},
            {"quantity": "spde_second", "estimate": spde.value, "se": spde.se, "n": spde.n},
            {"quantity": "blowups", "estimate": blowups, "se": 0.0, "n": config.replicas},
        ]),
        "martingale": summary,
        "conditional_martingale": conditional[["t", "mean", "se", "variance"]],
    }
    if config.trajectory:
        trajectories = [run_replica(m_config, m_times, derived_seed(config.seed, 17), r) for r in range(10)]
        data["snapshots"] = snapshot_frame(trajectories, config.readout_catalog())
    return checks, data


def _comparison_chunk(kernel, torus, scheme, T, f, lams, delta, seed, start, stop):
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, derived_seed(seed, start), stop - start)
    datum = GridFunction.from_callable(torus, f)
    saves = np.linspace(0.0, T, 5)
    worst = {}
    for lam in lams:
        pair = derivative_quotient(datum, lam, delta, T, noise, scheme, saves)
        allowance = comparison_allowance(pair, scheme.dt)
        for key, value in comparison_violations(pair).items():
            seen, allowed = worst.get((lam, key), (-np.inf, np.inf))
            worst[(lam, key)] = (max(seen, value), min(allowed, allowance[key]))
    return [worst]


def _weighted_moments(kernel, torus, scheme, T, f, rho, seed, replicas):
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, seed, replicas)
    sol = solve_pam(GridFunction.from_callable(torus, f), T, noise, scheme, np.linspace(0.0, T, 5))
    return weighted_sup_moments(sol, rho, 1)


def comparison_suite(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    kernel, torus, scheme = config.kernel(), config.torus(), config.scheme()
    T = config.horizon
    _, f = _first_readout(config)
    lams = config.param_tuple("lams", (0.5, 1.0))
    delta = config.param("delta", 0.1)
    parts = map_replicas(partial(_comparison_chunk, kernel, torus, scheme, T, f, lams, delta),
                         config.replicas, config.seed, workers, config.chunk)
    rows = []
    for (lam, key) in parts[0]:
        worst = max(part[(lam, key)][0] for part in parts)
        allowed = min(part[(lam, key)][1] for part in parts)
        rows.append({"inequality": f"{key}_lam{lam:g}", "max_violation": worst, "allowance": allowed})
        checks.add(f"{key}_lam{lam:g}", worst, worst <= allowed, tolerance=allowed)
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, derived_seed(config.seed, 19), 20)
    sol = solve_pam(GridFunction.from_callable(torus, f), T, noise, scheme, np.linspace(0.0, T, 5))
    profile = moment_profile(sol, 2).reset_index()
    holder = holder_scan(sol, GridFunction.from_callable(torus, f))
    holder = holder.assign(exponent=holder.attrs.get("exponent", np.nan))

    rho = config.param("rho", 1.0)
    fine = Torus(torus.d, torus.extent, 2 * torus.cells)
    coarse_m = _weighted_moments(kernel, torus, scheme, T, f, rho, derived_seed(config.seed, 43), 20)
    fine_m = _weighted_moments(kernel, fine, scheme, T, f, rho, derived_seed(config.seed, 43), 20)
    weighted = pd.DataFrame({"t": coarse_m.index.to_numpy(), "coarse": coarse_m.to_numpy(),
                             "fine": fine_m.to_numpy()})
    ratio = float(np.max(np.maximum(weighted["fine"] / weighted["coarse"],
                                    weighted["coarse"] / weighted["fine"])))
    bounded = bool(np.all(np.isfinite(weighted[["coarse", "fine"]].to_numpy())) and ratio <= 10.0)
    checks.add("weighted_moments_bounded_under_refinement", ratio, bounded, tolerance=10.0)
    return checks, {"violations": pd.DataFrame(rows), "moment_profile": profile, "holder": holder,
                    "weighted_moments": weighted}


def _extinction_chunk(kernel, torus, scheme, T, k, saves, seed, start, stop):
    noise = NoisePath.from_kernel(kernel, torus, scheme.dt, derived_seed(seed, start), stop - start)
    u = solve_log_laplace(GridFunction.constant(torus, 1.0), k, T, noise, scheme, saves)
    return list(np.moveaxis(u.values.mean(axis=torus.axes), 0, 1))


def extinction_scan(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    kernel, torus, scheme = config.kernel(), config.torus(), config.scheme()
    T = config.horizon
    levels = config.param_tuple("k", (1.0, 10.0))
    saves = np.linspace(0.0, T, 9)
    quiet_dt = config.param("quiet_dt", 1e-4)
    quiet_torus = Torus(1, 4.0, 8)
    rows = []
    for k in levels:
        bound = 1.0 / (saves / 2 + 1.0 / k)
        quiet = solve_log_laplace(GridFunction.constant(quiet_torus, 1.0), k, T,
                                  NoisePath.silent(quiet_torus, quiet_dt), SplittingScheme(quiet_dt), saves)
        err = float(np.max(np.abs(quiet.values.reshape(len(saves), -1) - bound[:, None])))
        checks.add(f"noise_off_closed_form_k{k:g}", err, err <= 1e-6, tolerance=1e-6)
        means = np.array(map_replicas(partial(_extinction_chunk, kernel, torus, scheme, T, k, saves),
                                      config.replicas, derived_seed(config.seed, int(k * 1000)), workers,
                                      config.chunk))
        mean = means.mean(axis=0)
        se = means.std(axis=0, ddof=1) / np.sqrt(len(means))
        worst = float(np.max(mean - bound - 3 * se))
        checks.add(f"jensen_bound_k{k:g}", worst, worst <= 1e-12, tolerance=3)
        for t, m, s, b in zip(saves, mean, se, bound):
            rows.append({"k": k, "t": t, "mean_u": m, "se": s, "bound": b})
    regime = classify_regime(kernel)
    data = {"extinction": pd.DataFrame(rows),
            "regime": pd.DataFrame([{"kernel": kernel.variant, "regime": regime.regime.value,
                                     "theta": regime.theta, "threshold": regime.threshold,
                                     "caveat": regime.caveat}])}
    return checks, data


def persistence_scan(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    alpha = config.param("alpha", 3.0)
    eps_ladder = config.param_tuple("eps", (0.01, 0.05, 0.1, 0.5))
    rows = []
    for d in config.param_tuple("dims", (3, 4, 5), int):
        for eps in eps_ladder:
            kernel = stationary_power(eps, alpha, d)
            report = classify_regime(kernel)
            # at the largest integrability exponent s = theta / threshold
            s = khasminskii_exponent(report.theta, d, 2 ** (d - 1) * d / (d - 2))
            rows.append({"case": f"d{d}_eps{eps:g}", "d": d, "eps": eps, "theta": report.theta,
                         "threshold": report.threshold, "gap": report.gap, "regime": report.regime.value,
                         "khasminskii_s": s, "khasminskii_ok": bool(s < 1)})
    frame = pd.DataFrame(rows)
    # below the threshold the Khasminskii exponent is below one, and conversely
    consistent = bool(((frame["gap"] < 0) == frame["khasminskii_ok"]).all())
    checks.add("regime_matches_khasminskii", float(consistent), consistent)
    checks.add("weak_power_kernel_persists", float(frame.loc[0, "theta"]),
               frame.loc[0, "regime"] == "PersistenceSufficient")

    ball = indicator_ball(1.0, 1.0, 3).profile()
    theta = theta_potential(ball, 3)
    bridge = bridge_potential(np.zeros(3), np.array([2.0, 0.0, 0.0]), ball, 3)
    bound = 2.0 * sup_green_potential(ball, 3)
    checks.add("bridge_potential_unit_ball", bridge, abs(bridge - 0.5) <= 0.02, tolerance=0.02)
    checks.add("three_g_bound", bridge, bridge <= bound, tolerance=bound)
    scan = pd.DataFrame({"s": np.linspace(0.0, 2.0, 9)})
    scan["potential"] = [potential_at(ball, 3, s) for s in scan["s"]]
    checks.add("potential_peak_at_origin", float(scan["potential"].max()),
               abs(scan["potential"].max() - theta) <= 1e-9)
    return checks, {"regimes": frame, "ball_potential": scan}


def duality_ladder_experiment(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    torus = config.torus()
    T = config.horizon
    k = config.param("phi", 1.0)
    phi = GridFunction.constant(torus, k)
    mu = TorusConstant(config.param("density", 1.0 / torus.volume))
    dt = config.dt
    n_ladder = config.param_tuple("n_ladder", (10, 40, 160), int)

    zero = duality_ladder(phi, mu, T, [n_ladder[0]], constant(0.0, torus.d), config.replicas, config.seed,
                          dt=dt).iloc[0]
    closed = np.exp(-mu.density * torus.volume / (T / 2 + 1 / k))
    checks.add("zero_kernel_gap", zero["gap"], within(zero["gap"], zero["se"], 2, 1e-12), zero["se"], 2)
    checks.add("zero_kernel_closed_form", zero["right"], abs(zero["right"] - closed) <= 1e-6, tolerance=1e-6)

    kernel = config.kernel()
    ladder = duality_ladder(phi, mu, T, n_ladder, kernel, config.replicas, config.seed, dt=dt)
    checks.add("gap_non_increasing", float(ladder["gap"].iloc[-1]), ladder_non_increasing(ladder, 2.0), tolerance=2)

    n_clock = n_ladder[len(n_ladder) // 2]
    state = evolve_dual(phi, T, n_clock, kernel, derived_seed(config.seed, 23), config.replicas, dt)
    counts = estimate(state.jump_counts)
    checks.add("poisson_jump_count", counts.value, within(counts.value - n_clock * T, counts.se, 3), counts.se, 3)

    scan = third_moment_scan(phi, [T / 2, T], n_ladder, kernel, config.param("moment_replicas", 100, int),
                             derived_seed(config.seed, 29), config.param("rho", 2.0), dt)
    checks.add("third_moment_stable", scan.spread, scan.stable, tolerance=0.5)
    data = {"ladder": ladder, "third_moment": scan.frame}
    if config.trajectory:
        data["jumps"] = jump_log_frame(state)
    return checks, data


def lyapunov_ladder_experiment(config: ExperimentConfig, workers: int) -> Outcome:
    checks = CheckList()
    torus, dt, T = config.torus(), config.dt, config.horizon
    profile = config.kernel_block.get("profile", "gaussian")
    a_values = config.param_tuple("a_ladder", (1.0, 4.0, 16.0, 64.0))
    ladder = lyapunov_ladder(a_values, T, torus, config.replicas, config.seed, dt, profile)
    plateaus = ladder.groupby("a")["plateau"].all()
    fraction = paired_fraction(ladder, a_values[0], a_values[-1])
    # a rung without a plateau has no rate to compare
    checks.add("rate_decreases_along_ladder", fraction, fraction >= 0.9, tolerance=0.9,
               inconclusive=not plateaus.all())

    a_mid = a_values[1]
    times, strat = log_sup_series(a_mid, T, torus, 4, config.seed, dt, profile=profile)
    _, ito = log_sup_series(a_mid, T, torus, 4, config.seed, dt, stratonovich=False, profile=profile)
    shift = float(np.max(np.abs(strat - ito - a_mid * times[:, None] / 2)))
    checks.add("stratonovich_shift", shift, shift <= 1e-6 * max(1.0, a_mid * T), tolerance=1e-6)
    zero = log_sup_series(0.0, T, torus, 2, config.seed, dt)[1]
    checks.add("zero_noise_slope", float(np.abs(zero).max()), bool(np.all(zero == 0)))

    tail_a = config.param_tuple("tail_a", (1.0, 64.0))
    tail_t = config.param_tuple("tail_t", (2.0, 4.0))
    L = config.param("tail_L", 4.0)
    replicas = config.param("tail_replicas", config.replicas, int)
    probes = {}
    for a in tail_a:
        for t in tail_t:
            probes[(a, t)] = ldp_tail_probe(a, t, L, replicas, derived_seed(config.seed, 31), dt=dt, profile=profile)
    rows = [{"case": f"a{a:g}_t{t:g}", "a": a, "t": t, "probability": p.probability, "low": p.low,
             "high": p.high} for (a, t), p in probes.items()]
    lo_a, hi_a, lo_t, hi_t = tail_a[0], tail_a[-1], tail_t[0], tail_t[-1]
    strong, weak = probes[(hi_a, hi_t)], probes[(lo_a, hi_t)]
    checks.add("tail_decreasing_in_a", strong.probability, strong.high < weak.low)
    checks.add("tail_non_increasing_in_t", strong.probability,
               strong.probability <= probes[(hi_a, lo_t)].high)
    checks.add("tail_small_at_large_a", strong.probability, strong.probability < 0.1, tolerance=0.1)

    mc = config.mc()
    annealed_t = config.param("annealed_t", 0.5)
    one = annealed_moment_w(1.0, annealed_t, 0.0, 1, mc, profile)
    checks.add("annealed_first_moment", one.value, abs(one.value - np.exp(annealed_t / 2)) <= 1e-12)
    two = annealed_moment_w(1.0, annealed_t, 0.0, 2, mc, profile)
    brute = annealed_moment_bruteforce(1.0, annealed_t, 2, profile,
                                       field_replicas=config.param("brute_fields", 200, int),
                                       paths=config.param("brute_paths", 200, int), seed=derived_seed(config.seed, 37))
    checks.add("annealed_vs_bruteforce", gap_in_se(two, brute), gap_in_se(two, brute) <= 4, tolerance=4)

    noise = NoisePath.from_kernel(scaled_theta(a_values[0], torus.d, profile), torus, dt,
                                  derived_seed(config.seed, 41), 4)
    sol = solve_pam(GridFunction.constant(torus, 1.0), T, noise, SplittingScheme(dt))
    harnack = [harnack_scan(sol.values[-1][r], torus, T) for r in range(4)]
    summary = ladder.groupby("a").agg(rate=("rate", "median"), slope=("slope", "median"),
                                      plateau=("plateau", "all")).reset_index()
    data = {
        "lyapunov": summary,
        "tail": pd.DataFrame(rows),
        "annealed": pd.DataFrame([
            {"quantity": "k1", "estimate": one.value, "se": one.se},
            {"quantity": "k2", "estimate": two.value, "se": two.se},
            {"quantity": "k2_bruteforce", "estimate": brute.value, "se": brute.se},
        ]),
        "harnack": pd.DataFrame([{"replica": r, "fraction": h.fraction, "threshold": h.threshold}
                                 for r, h in enumerate(harnack)]),
    }
    return checks, data


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig, int], Outcome]] = {
    "threshold-table": threshold_table,
    "pam-oracle": pam_oracle,
    "moments-triangle": moments_triangle,
    "comparison-suite": comparison_suite,
    "extinction-scan": extinction_scan,
    "persistence-scan": persistence_scan,
    "duality-ladder": duality_ladder_experiment,
    "lyapunov-ladder": lyapunov_ladder_experiment,
}


def run_experiment(config: ExperimentConfig, workers: int = 1) -> RunReport:
    validate_config(config)
    logger.info("running %s (hash %s, seed %d, %d workers)", config.name, config.config_hash,
                config.seed, workers)
    start = time.perf_counter()
    checks, data = EXPERIMENTS[config.name](config, workers)
    report = RunReport(config, config.config_hash, checks.frame(), data,
                       time.perf_counter() - start, versions(), workers)
    logger.info("%s finished in %.1fs: %s", config.name, report.wall_clock,
                "all checks passed" if report.passed else f"failed {report.failures}")
    return report
