import numpy as np
import pytest
from scipy import integrate, special

from src.covariance import constant, indicator_ball, scaled_theta, stationary_power
from src.errors import DimensionMismatchError, DomainError, QuadratureError
from src.heatkernel import (GridFunction, Regime, Torus, WeightFamily, apply_heat_semigroup,
                            bridge_potential, check_weight_domination, classify_regime, green,
                            green_constant, heat_expectation, heat_kernel, khasminskii_bound,
                            khasminskii_exponent, persistence_threshold, potential_at,
                            sup_green_potential, theta_potential)
from src.particles import GaussianBump


@pytest.mark.parametrize("d, expected", [(3, np.pi / 3), (4, np.pi ** 2 / 4), (5, 3 * np.pi ** 2 / 10)])
def test_persistence_threshold_closed_forms(d, expected):
    assert abs(persistence_threshold(d) - expected) <= 1e-12


def test_threshold_needs_transient_dimension():
    with pytest.raises(DomainError):
        persistence_threshold(2)


def test_green_function_in_three_dimensions():
    assert green_constant(3) == pytest.approx(1 / (4 * np.pi))
    assert green([0, 0, 0], [2, 0, 0], 3) == pytest.approx(1 / (8 * np.pi))
    with pytest.raises(DomainError):
        green([1, 1, 1], [1, 1, 1], 3)


def test_heat_kernel_values():
    assert heat_kernel(1.0, 0.0, 1) == pytest.approx(1 / np.sqrt(2 * np.pi))
    mesh = np.linspace(-20, 20, 4001)
    assert integrate.trapezoid(heat_kernel(2.0, mesh[:, None], 1), mesh) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        heat_kernel(0.0, 0.0, 1)


def test_torus_rejects_unsupported_dimension():
    with pytest.raises(DomainError):
        Torus(4, 1.0, 4)


def test_torus_locate_wraps():
    torus = Torus(1, 4.0, 4)
    assert torus.locate(np.array([[2.5]]))[0] == torus.locate(np.array([[-1.5]]))[0] == 0


def test_grid_function_shapes():
    torus = Torus(1, 1.0, 4)
    with pytest.raises(DimensionMismatchError):
        GridFunction(torus, np.zeros(5))
    batched = GridFunction(torus, np.ones((3, 4)))
    with pytest.raises(DimensionMismatchError):
        batched + GridFunction(torus, np.ones(4))
    assert np.allclose(batched.integral(), [1.0, 1.0, 1.0])
    assert GridFunction.constant(Torus(2, 2.0, 8), 3.0).integral() == pytest.approx(12.0)


def test_semigroup_identity_and_mass(bump_datum):
    assert np.array_equal(apply_heat_semigroup(bump_datum, 0.0).values, bump_datum.values)
    flowed = apply_heat_semigroup(bump_datum, 0.7)
    assert flowed.integral() == pytest.approx(bump_datum.integral(), rel=1e-12)
    with pytest.raises(DomainError):
        apply_heat_semigroup(bump_datum, -1.0)


def test_semigroup_composes(fine_line):
    f = GridFunction.from_callable(fine_line, lambda x: np.exp(-x[:, 0] ** 2))
    direct = apply_heat_semigroup(f, 0.7).values
    composed = apply_heat_semigroup(apply_heat_semigroup(f, 0.3), 0.4).values
    assert np.max(np.abs(direct - composed)) <= 1e-10


def test_semigroup_matches_gaussian_flow(fine_line):
    bump = GaussianBump((0.0,), 1.0)
    flowed = apply_heat_semigroup(GridFunction.from_callable(fine_line, bump), 0.5)
    exact = np.array([bump.heat_flow(0.5, x) for x in fine_line.centers()])
    assert np.max(np.abs(flowed.values - exact)) <= 1e-8


def test_semigroup_keeps_nonnegative_data_nonnegative(line):
    step = GridFunction.from_callable(line, lambda x: (np.abs(x[:, 0]) < 1).astype(float))
    assert apply_heat_semigroup(step, 0.01).values.min() >= 0.0


def test_heat_expectation_is_exact_on_quadratics():
    value = heat_expectation(lambda p: np.sum(p ** 2, axis=-1), np.array([1.0, 2.0]), 0.3, 2)
    assert value == pytest.approx(5.0 + 2 * 0.3, rel=1e-12)


def test_weight_family():
    phi = WeightFamily(2.0)
    assert phi(np.array([0.0])) == pytest.approx(1.0)
    assert phi(np.array([1.0])) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        WeightFamily(0.0)


def test_weight_domination_constant_is_finite():
    report = check_weight_domination(2.0, 1.0, d=1)
    assert report.finite
    assert report.constant > 1.0


def test_theta_of_unit_ball_is_two_pi():
    assert abs(theta_potential(indicator_ball(1.0, 1.0, 3).profile(), 3) - 2 * np.pi) <= 1e-6


def test_potential_peaks_at_origin_for_ball():
    ball = indicator_ball(1.0, 1.0, 3).profile()
    assert potential_at(ball, 3, 0.5) < potential_at(ball, 3, 0.0)
    # outside the ball the potential is Newtonian: |B_1| / s
    assert potential_at(ball, 3, 2.0) == pytest.approx(4 * np.pi / 3 / 2.0, rel=1e-8)


def test_non_decaying_profile_has_no_potential():
    with pytest.raises(QuadratureError):
        potential_at(constant(1.0, 3).profile(), 3, 0.0)


def test_classify_regime():
    assert classify_regime(indicator_ball(1.0, 0.1, 3)).regime is Regime.PERSISTENCE_SUFFICIENT
    assert classify_regime(indicator_ball(1.0, 1.0, 3)).regime is Regime.INCONCLUSIVE
    extinct = classify_regime(scaled_theta(1.0, 3))
    assert extinct.regime is Regime.EXTINCTION_SUFFICIENT
    assert extinct.caveat
    assert classify_regime(constant(1.0, 3)).theta == np.inf
    low = classify_regime(constant(1.0, 1))
    assert low.regime is Regime.INCONCLUSIVE and np.isnan(low.theta)


def test_weak_power_kernel_persists():
    report = classify_regime(stationary_power(0.01, 3.0, 3))
    assert report.regime is Regime.PERSISTENCE_SUFFICIENT
    assert report.gap < 0


def test_bridge_potential_of_unit_ball():
    ball = indicator_ball(1.0, 1.0, 3).profile()
    bridge = bridge_potential(np.zeros(3), np.array([2.0, 0.0, 0.0]), ball, 3)
    assert abs(bridge - 0.5) <= 0.02
    assert bridge <= 2 * sup_green_potential(ball, 3)
    with pytest.raises(DomainError):
        bridge_potential(np.zeros(3), np.zeros(3), ball, 3)


def test_bridge_potential_obeys_three_g_bound(rng):
    ball = indicator_ball(1.0, 1.0, 3).profile()
    bound = 2 * sup_green_potential(ball, 3)
    for _ in range(100):
        x, y = rng.uniform(-1.5, 1.5, size=(2, 3))
        assert bridge_potential(x, y, ball, 3) <= bound


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 3.0])
def test_gaussian_potential_closed_form(s):
    g = scaled_theta(1.0, 3).profile()
    expected = 2 * np.pi if s == 0 else np.pi ** 1.5 * special.erf(s) / s
    assert potential_at(g, 3, s) == pytest.approx(expected, rel=1e-7)


def test_green_integrates_to_potential(rng):
    # int G(x, z) exp(-|z|^2) dz = pi^(3/2) E G(x, Z) with Z ~ N(0, I / 2)
    x = np.array([0.7, 0.0, 0.0])
    z = rng.normal(scale=np.sqrt(0.5), size=(20000, 3))
    samples = np.pi ** 1.5 * np.array([green(x, point, 3) for point in z])
    mean, se = samples.mean(), samples.std(ddof=1) / np.sqrt(samples.size)
    expected = green_constant(3) * potential_at(scaled_theta(1.0, 3).profile(), 3, 0.7)
    assert abs(mean - expected) <= 5 * se


def test_khasminskii():
    assert khasminskii_bound(0.5) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        khasminskii_bound(1.0)
    # at the largest exponent the Khasminskii s is theta over the threshold
    theta = 0.3
    for d in (3, 4, 5):
        s = khasminskii_exponent(theta, d, 2 ** (d - 1) * d / (d - 2))
        assert s == pytest.approx(theta / persistence_threshold(d), rel=1e-12)
