import numpy as np
import pytest

from src.covariance import constant
from src.errors import ConfigError, DomainError, PopulationCapError
from src.heatkernel import heat_expectation
from src.particles import (BranchingConfig, ConstantReadout, FixedEnvironment, GaussianBump,
                           IndicatorBall, ParticlePopulation, conditional_martingale_residual,
                           empirical_pairing, martingale_residual, parse_readout,
                           residual_summary, run, run_replica, snapshot_frame, step_epoch)


def doubling_config(n=4, **kwargs):
    """Every particle splits: the field sits at the truncation level sqrt(n)."""
    return BranchingConfig.point_mass(n, constant(1.0, 1), environment=FixedEnvironment(np.sqrt(n)),
                                      **kwargs)


def test_population_doubles_when_split_probability_is_one():
    config = doubling_config(4)
    trajectory = run(config, rng=np.random.default_rng(0))
    assert [p.count for p in trajectory] == [4, 8, 16, 32, 64]
    assert trajectory[-1].mass == pytest.approx(16.0)
    assert trajectory[-1].time == pytest.approx(1.0)


def test_population_dies_when_split_probability_is_zero():
    config = BranchingConfig.point_mass(4, constant(1.0, 1), environment=FixedEnvironment(-2.0))
    trajectory = run(config, rng=np.random.default_rng(0))
    assert [p.count for p in trajectory] == [4, 0, 0, 0, 0]


def test_population_cap():
    config = doubling_config(4, max_population=10)
    with pytest.raises(PopulationCapError) as info:
        run(config, rng=np.random.default_rng(0))
    assert info.value.cap == 10


def test_config_validation():
    with pytest.raises(DomainError):
        BranchingConfig.point_mass(0, constant(1.0, 1))
    config = BranchingConfig.point_mass(10, constant(1.0, 2), point=[1.0, 2.0], mass=0.5, horizon=2.0)
    assert config.initial.shape == (5, 2)
    assert config.epochs == 20
    with pytest.raises(DomainError):
        run(config, save_times=[3.0])


def test_empirical_pairing():
    snapshot = ParticlePopulation(0, np.zeros((3, 1)), n=2)
    assert empirical_pairing(snapshot, ConstantReadout(1.0)) == (1.5, 2.25)
    empty = ParticlePopulation(0, np.zeros((0, 1)), n=2)
    assert empirical_pairing(empty, ConstantReadout(1.0)) == (0.0, 0.0)


def test_replicas_are_reproducible():
    config = BranchingConfig.point_mass(20, constant(1.0, 1), horizon=0.5)
    a = run_replica(config, [0.25, 0.5], seed=11, index=3)
    b = run_replica(config, [0.25, 0.5], seed=11, index=3)
    assert len(a) == 2
    for x, y in zip(a, b):
        assert np.array_equal(x.positions, y.positions)


def test_step_keeps_parents_and_field():
    config = BranchingConfig.point_mass(9, constant(1.0, 1))
    pop = step_epoch(ParticlePopulation(0, config.initial.copy(), 9), config, np.random.default_rng(2))
    assert pop.parents.shape == (9, 1)
    assert np.all(np.abs(pop.xi) <= 3.0)
    assert pop.count % 2 == 0


def test_total_mass_is_a_martingale():
    config = BranchingConfig.point_mass(50, constant(1.0, 1), horizon=1.0)
    masses = np.array([run_replica(config, [1.0], 2024, r)[-1].mass for r in range(400)])
    se = masses.std(ddof=1) / np.sqrt(len(masses))
    assert abs(masses.mean() - 1.0) <= 5 * se


def test_conditional_residual_vanishes_for_certain_splitting():
    config = doubling_config(4)
    trajectory = run(config, rng=np.random.default_rng(0))
    frame = conditional_martingale_residual(trajectory, ConstantReadout(1.0))
    assert np.all(frame["residual"] == 0.0)
    with pytest.raises(DomainError):
        conditional_martingale_residual(trajectory[::2], ConstantReadout(1.0))


def test_martingale_residual_and_summary():
    config = BranchingConfig.point_mass(10, constant(0.5, 1), horizon=0.5)
    f = GaussianBump((0.0,), 1.0)
    frames = [martingale_residual(run_replica(config, None, 1, r), f, config.kernel) for r in range(5)]
    assert frames[0]["residual"].iloc[0] == 0.0
    assert frames[0]["bracket"].is_monotonic_increasing
    summary = residual_summary(frames)
    assert list(summary.columns) == ["t", "mean", "se", "variance", "bracket", "bracket_se", "variance_se"]
    assert len(summary) == config.epochs + 1


def test_snapshot_frame():
    config = doubling_config(4)
    frame = snapshot_frame([run(config, [0.0, 0.5], np.random.default_rng(0))],
                           {"one": ConstantReadout(1.0)})
    assert list(frame.columns) == ["replica", "t", "particle_count", "one"]
    assert frame["one"].tolist() == [1.0, 4.0]


def test_gaussian_bump_laplacian_matches_finite_differences():
    bump = GaussianBump((0.2, -0.1), 0.7)
    x, h = np.array([[0.5, 0.3]]), 1e-4
    fd = sum((bump(x + h * e) - 2 * bump(x) + bump(x - h * e)) / h ** 2 for e in np.eye(2))
    assert bump.laplacian(x) == pytest.approx(fd, abs=1e-5)


def test_gaussian_bump_heat_flow_matches_quadrature():
    bump = GaussianBump((0.5,), 0.8)
    assert bump.heat_flow(0.6, [0.1]) == pytest.approx(heat_expectation(bump, [0.1], 0.6, 1), rel=1e-9)


def test_indicator_has_no_laplacian():
    with pytest.raises(DomainError):
        IndicatorBall((0.0,), 1.0).laplacian(np.zeros((1, 1)))


def test_parse_readout():
    bump = parse_readout("gaussian_bump(0.5)", 2)
    assert bump == GaussianBump((0.0, 0.0), 0.5)
    assert parse_readout("indicator_ball(1, 2, 0.5)", 2) == IndicatorBall((1.0, 2.0), 0.5)
    assert parse_readout(" constant(3) ", 1) == ConstantReadout(3.0, 1)
    for bad in ("bump(1)", "gaussian_bump(1, 2)", "gaussian_bump(-1)", "gaussian_bump", "constant(a)"):
        with pytest.raises(ConfigError):
            parse_readout(bad, 3)
