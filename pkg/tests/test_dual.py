import numpy as np
import pandas as pd
import pytest

from src.covariance import constant, scaled_theta
from src.dual import (PointMass, PoissonClock, TorusConstant, duality_gap, evolve_dual,
                      jump_log_frame, ladder_non_increasing, laplace_left, replay_jump,
                      third_moment_scan)
from src.errors import DomainError
from src.heatkernel import GridFunction, Torus
from src.streams import replica_rng


@pytest.fixture
def ring():
    return Torus(1, 4.0, 16)


def test_poisson_clock_counts():
    counts = [len(PoissonClock(20.0, replica_rng(0, r)).arrivals(1.0)) for r in range(400)]
    # Poisson(20): mean 20, standard error sqrt(20 / 400)
    assert abs(np.mean(counts) - 20.0) <= 5 * np.sqrt(20.0 / 400)
    with pytest.raises(DomainError):
        PoissonClock(0.0, replica_rng(0, 0))


def test_arrivals_are_sorted_and_inside_horizon():
    times = PoissonClock(50.0, replica_rng(1, 0)).arrivals(0.5)
    assert np.all(np.diff(times) > 0)
    assert times.max() <= 0.5


def test_zero_kernel_dual_follows_logistic_closed_form():
    torus = Torus(1, 4.0, 8)
    k, t = 2.0, 1.0
    state = evolve_dual(GridFunction.constant(torus, k), t, 10, constant(0.0, 1), seed=0, replicas=3)
    assert np.allclose(state.Y.values, 1.0 / (t / 2 + 1.0 / k), atol=1e-10)
    assert state.replicas == 3
    assert np.all(state.jump_counts >= 0)


def test_dual_is_reproducible_from_its_seed(ring):
    phi = GridFunction.constant(ring, 1.0)
    kernel = scaled_theta(1.0, 1)
    a = evolve_dual(phi, 0.1, 50, kernel, seed=8, replicas=2, dt=1e-3)
    b = evolve_dual(phi, 0.1, 50, kernel, seed=8, replicas=2, dt=1e-3)
    assert a.jumps == b.jumps
    assert np.array_equal(a.Y.values, b.Y.values)
    log = jump_log_frame(a)
    assert list(log.columns) == ["replica", "jump_time", "field_seed"]
    assert len(log) == int(a.jump_counts.sum())


def test_jump_marks_replay_from_seed(ring):
    kernel = scaled_theta(1.0, 1)
    h = replay_jump(kernel, ring, 4, 123)
    assert np.array_equal(h, replay_jump(kernel, ring, 4, 123))
    assert np.all(np.abs(h) <= 2.0)


def test_forced_mark_multiplies_by_one_plus_h_over_root_n():
    torus = Torus(1, 4.0, 8)
    n, dt = 4, 1e-3
    mark = np.full(torus.shape, 2.0)
    state = evolve_dual(GridFunction.constant(torus, 1.0), dt, n, constant(0.0, 1), seed=0, dt=dt,
                        forced_marks={1: mark})
    assert np.allclose(state.Y.values, 2.0 / (1.0 + dt / 2))


def test_dual_argument_checks(ring):
    with pytest.raises(DomainError):
        evolve_dual(GridFunction.constant(ring, -1.0), 0.1, 10, constant(0.0, 1), seed=0)
    with pytest.raises(DomainError):
        evolve_dual(GridFunction.constant(ring, 1.0), 0.1, 0, constant(0.0, 1), seed=0)


def test_initial_measure_pairings(ring):
    Y = GridFunction(ring, np.arange(16, dtype=float))
    assert TorusConstant(0.5).pair(Y)[0] == pytest.approx(0.5 * Y.integral())
    assert PointMass((0.1,), 2.0).pair(Y) == pytest.approx(2.0 * 8.0)
    batched = GridFunction(ring, np.stack([Y.values, 2 * Y.values]))
    assert PointMass((0.1,), 2.0).pair(batched) == pytest.approx([16.0, 32.0])


def test_duality_gap_vanishes_without_noise(ring):
    phi = GridFunction.constant(ring, 1.0)
    gap = duality_gap(phi, TorusConstant(0.25), 0.5, 20, constant(0.0, 1), replicas=4, seed=1)
    assert gap.gap <= 1e-12
    assert gap.se <= 1e-12


def test_unknown_left_route(ring):
    with pytest.raises(DomainError):
        laplace_left(GridFunction.constant(ring, 1.0), TorusConstant(1.0), 0.1, constant(0.0, 1),
                     2, 0, left="oracle")


def test_particle_left_route_without_noise_or_mass():
    torus = Torus(1, 4.0, 8)
    est = laplace_left(GridFunction.constant(torus, 0.0), PointMass((0.0,)), 0.1, constant(1.0, 1),
                       replicas=3, seed=0, left="particles", n=10)
    assert est.value == 1.0


def test_ladder_non_increasing():
    ladder = pd.DataFrame({"n": [10, 100, 1000], "gap": [0.1, 0.05, 0.06], "se": [0.01, 0.01, 0.01]})
    assert ladder_non_increasing(ladder)
    ladder.loc[2, "gap"] = 0.2
    assert not ladder_non_increasing(ladder)


def test_third_moment_scan_frame(ring):
    scan = third_moment_scan(GridFunction.constant(ring, 1.0), [0.05, 0.1], [10, 20], constant(0.0, 1),
                             replicas=2, seed=0, dt=1e-3)
    assert list(scan.frame.columns) == ["n", "t", "max_ratio"]
    assert len(scan.frame) == 4
    # without noise Y does not depend on n
    assert scan.spread == pytest.approx(0.0, abs=1e-12)
    assert scan.stable
