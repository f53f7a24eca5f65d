import numpy as np
import pytest

from src.covariance import constant, scaled_theta
from src.errors import DomainError
from src.heatkernel import GridFunction, Torus, apply_heat_semigroup
from src.spde import (NoisePath, SplittingScheme, SplittingStepper, comparison_allowance,
                      comparison_violations, derivative_quotient, ensemble_at, holder_scan,
                      moment_profile, solve_log_laplace, solve_pam, stratonovich_identity_gap,
                      total_mass_series, trajectory_frame, weighted_sup_moments)


def test_scheme_needs_dt_dividing_horizon():
    assert SplittingScheme(0.25).steps(1.0) == 4
    with pytest.raises(DomainError):
        SplittingScheme(0.3).steps(1.0)
    with pytest.raises(DomainError):
        SplittingScheme(0.1, ordering="strang")


def test_noise_path_replays_bit_identically(line):
    kernel = scaled_theta(1.0, 1)
    first = NoisePath.from_kernel(kernel, line, 1e-2, seed=42, batch=3)
    second = NoisePath.from_kernel(kernel, line, 1e-2, seed=42, batch=3)
    later = first.increment(7).copy()
    first.increment(0)
    assert np.array_equal(first.increment(7), later)
    assert np.array_equal(second.increment(7), later)
    assert not np.array_equal(NoisePath.from_kernel(kernel, line, 1e-2, seed=43, batch=3).increment(7), later)


def test_stepper_rejects_mismatched_noise(line):
    noise = NoisePath.silent(line, 1e-2)
    with pytest.raises(DomainError):
        SplittingStepper(line, SplittingScheme(1e-3), noise)


def test_zero_noise_pam_is_the_heat_flow(fine_line):
    f = GridFunction.from_callable(fine_line, lambda x: np.exp(-x[:, 0] ** 2))
    noise = NoisePath.silent(fine_line, 1e-3, batch=2)
    sol = solve_pam(f, 0.5, noise)
    expected = apply_heat_semigroup(f, 0.5).values
    assert np.max(np.abs(sol.values[-1] - expected)) <= 1e-8


def test_constant_kernel_pam_has_unit_mean():
    torus = Torus(1, 4.0, 4)
    noise = NoisePath.from_kernel(constant(1.0, 1), torus, 1e-2, seed=5, batch=2000)
    sol = solve_pam(GridFunction.constant(torus, 1.0), 1.0, noise)
    mean, se = ensemble_at(sol)
    assert np.all(np.abs(mean - 1.0) <= 5 * se)
    # a flat datum under flat noise stays flat
    assert np.allclose(sol.values[-1], sol.values[-1][:, :1])


def test_log_laplace_domain(line, bump_datum):
    noise = NoisePath.silent(line, 1e-2)
    zero = solve_log_laplace(bump_datum, 0.0, 0.1, noise)
    assert np.all(zero.values == 0.0)
    with pytest.raises(DomainError):
        solve_log_laplace(bump_datum, -1.0, 0.1, noise)
    with pytest.raises(DomainError):
        solve_log_laplace(bump_datum * -1.0, 1.0, 0.1, noise)


def test_noise_off_log_laplace_closed_form():
    torus = Torus(1, 4.0, 8)
    k = 10.0
    sol = solve_log_laplace(GridFunction.constant(torus, 1.0), k, 1.0, NoisePath.silent(torus, 1e-3),
                            save_times=[0.0, 0.5, 1.0])
    expected = 1.0 / (sol.times / 2 + 1.0 / k)
    assert np.max(np.abs(sol.values.reshape(3, -1) - expected[:, None])) <= 1e-6


def test_comparison_inequalities_hold_pathwise(line, bump_datum):
    noise = NoisePath.from_kernel(constant(1.0, 1), line, 1e-3, seed=9, batch=8)
    pair = derivative_quotient(bump_datum, 1.0, 0.1, 0.5, noise)
    violations = comparison_violations(pair)
    assert set(violations) == {"u_nonnegative", "u_below_lam_v", "u_monotone_in_lam",
                               "w_nonnegative", "w_below_v"}
    assert max(violations.values()) <= 1e-12
    allowance = comparison_allowance(pair, 1e-3)
    assert set(allowance) == set(violations)
    assert min(allowance.values()) >= 1e-12


def test_derivative_quotient_needs_positive_delta(line, bump_datum):
    with pytest.raises(DomainError):
        derivative_quotient(bump_datum, 1.0, 0.0, 0.1, NoisePath.silent(line, 1e-2))


def test_stratonovich_identity(line):
    noise = NoisePath.from_kernel(scaled_theta(1.0, 1), line, 1e-4, seed=3, batch=2)
    f = GridFunction.constant(line, 1.0)
    assert stratonovich_identity_gap(f, 0.05, noise) <= 1e-3


def test_stratonovich_needs_scaled_kernel(line):
    noise = NoisePath.from_kernel(constant(1.0, 1), line, 1e-2, seed=0)
    with pytest.raises(DomainError):
        stratonovich_identity_gap(GridFunction.constant(line, 1.0), 0.1, noise)


def test_diagnostic_frames(line, bump_datum):
    noise = NoisePath.from_kernel(scaled_theta(0.5, 1), line, 1e-2, seed=1, batch=4)
    sol = solve_pam(bump_datum, 0.2, noise, save_times=[0.0, 0.1, 0.2])
    mass = total_mass_series(sol)
    assert mass.shape == (3, 4)
    assert mass.iloc[0].to_numpy() == pytest.approx(bump_datum.integral())
    profile = moment_profile(sol, 2)
    assert list(profile.index) == pytest.approx([0.0, 0.1, 0.2])
    summary = trajectory_frame(sol)
    assert list(summary.columns) == ["t", "replica", "min", "max", "mean", "total_mass"]
    assert len(trajectory_frame(sol, summarized=False)) == 3 * 4 * line.size
    scan = holder_scan(sol, bump_datum)
    assert {"lag", "distance", "moment"} <= set(scan.columns)


@pytest.mark.parametrize("lam", [0.5, 1.0])
def test_comparison_holds_for_a_sharp_datum(lam):
    torus = Torus(1, 16.0, 256)
    step = GridFunction.from_callable(torus, lambda x: (np.abs(x[:, 0]) <= 1.0).astype(float))
    noise = NoisePath.from_kernel(scaled_theta(1.0, 1), torus, 1e-3, seed=17, batch=20)
    pair = derivative_quotient(step, lam, 0.1, 0.2, noise)
    violations = comparison_violations(pair)
    allowance = comparison_allowance(pair, 1e-3)
    for key, value in violations.items():
        assert value <= allowance[key], key


def test_comparison_allowance_grows_with_steps_and_shrinking_delta(line, bump_datum):
    noise = NoisePath.from_kernel(scaled_theta(1.0, 1), line, 1e-2, seed=2, batch=2)
    short = comparison_allowance(derivative_quotient(bump_datum, 1.0, 0.1, 0.1, noise), 1e-2)
    longer = comparison_allowance(derivative_quotient(bump_datum, 1.0, 0.1, 0.5, noise), 1e-2)
    narrow = comparison_allowance(derivative_quotient(bump_datum, 1.0, 0.01, 0.1, noise), 1e-2)
    assert longer["u_below_lam_v"] > short["u_below_lam_v"]
    assert narrow["w_below_v"] > short["w_below_v"]


def test_pam_is_linear_in_the_datum(line, bump_datum):
    noise = NoisePath.from_kernel(scaled_theta(1.0, 1), line, 1e-2, seed=8, batch=4)
    other = GridFunction.from_callable(line, lambda x: 1.0 + np.cos(np.pi * x[:, 0] / 4.0))
    v = solve_pam(bump_datum, 0.5, noise).values
    w = solve_pam(other, 0.5, noise).values
    scaled = solve_pam(bump_datum * 2.5, 0.5, noise).values
    summed = solve_pam(bump_datum + other, 0.5, noise).values
    assert np.max(np.abs(scaled - 2.5 * v)) <= 1e-12 * np.max(np.abs(scaled))
    assert np.max(np.abs(summed - (v + w))) <= 1e-12 * np.max(np.abs(summed))


def test_ito_mean_follows_the_heat_flow(line, bump_datum):
    noise = NoisePath.from_kernel(scaled_theta(1.0, 1), line, 1e-2, seed=21, batch=4000)
    sol = solve_pam(bump_datum, 0.5, noise)
    mean, se = ensemble_at(sol)
    expected = apply_heat_semigroup(bump_datum, 0.5).values
    assert np.all(np.abs(mean - expected) <= 5 * se + 1e-12)


def test_weighted_sup_moments(line, bump_datum):
    noise = NoisePath.from_kernel(scaled_theta(0.5, 1), line, 1e-2, seed=4, batch=6)
    sol = solve_pam(bump_datum, 0.2, noise, save_times=[0.0, 0.1, 0.2])
    moments = weighted_sup_moments(sol, rho=1.0, p=1)
    assert list(moments.index) == pytest.approx([0.0, 0.1, 0.2])
    # every replica starts from the datum
    start = np.max(bump_datum.values * (1 + line.centers()[:, 0] ** 2) ** -0.5) ** 2
    assert moments.iloc[0] == pytest.approx(start)
    assert np.all(np.isfinite(moments.to_numpy()))
