"""Finite-N jump process: exactness, determinism, and convergence to the flow."""

import numpy as np
import pytest

from meanrotor import (
    ConvergenceError,
    OccupationState,
    discretize_gibbs,
    equidistribution,
    integrate_flow,
    lln_error,
    round_to_counts,
    simulate_path,
    solve_magnetization,
    sup_tv_error,
    tv_distance,
)


def test_occupation_state_validation():
    OccupationState(counts=np.array([2, 3, 5]), n_total=10)
    with pytest.raises(ValueError):
        OccupationState(counts=np.array([2, 3]), n_total=10)
    with pytest.raises(ValueError):
        OccupationState(counts=np.array([-1, 11]), n_total=10)


def test_single_particle_walks_the_cycle(params310):
    counts = np.zeros(10, dtype=np.int64)
    counts[0] = 1
    path = simulate_path(params310, counts, t_final=30.0, seed=7)
    states = path.states
    assert np.all(states.sum(axis=1) == 1)  # one particle, always somewhere
    position = states.argmax(axis=1)
    assert np.all((np.diff(position) - 1) % 10 == 0)  # strictly forward steps
    assert len(path.event_times) > 20  # rate ~ q/(2 pi) per unit time


def test_particle_conservation_and_single_moves(params310, rng):
    counts = round_to_counts(rng.dirichlet(np.ones(10)), 500)
    path = simulate_path(params310, counts, t_final=1.0, seed=3)
    states = path.states
    assert np.all(states.sum(axis=1) == 500)
    assert np.all(states >= 0)
    diff = np.diff(states, axis=0)
    assert np.all(np.abs(diff).sum(axis=1) == 2)  # one particle moved
    assert np.all(np.diff(path.event_times) > 0)


def test_seed_determinism(params310):
    counts = round_to_counts(equidistribution(10), 1000)
    a = simulate_path(params310, counts, t_final=1.0, seed=42)
    b = simulate_path(params310, counts, t_final=1.0, seed=42)
    assert np.array_equal(a.event_times, b.event_times)
    assert np.array_equal(a.jump_arcs, b.jump_arcs)
    c = simulate_path(params310, counts, t_final=1.0, seed=43)
    assert not np.array_equal(a.event_times, c.event_times)


def test_equidistribution_fluctuations_stay_small(params310):
    # eq is a fixed point of the flow; at N = 10^4 the empirical state should
    # stay within 0.05 TV for t <= 1 in at least 18 of 20 seeds
    counts = round_to_counts(equidistribution(10), 10_000)
    eq = equidistribution(10)
    hits = 0
    for seed in range(20):
        path = simulate_path(params310, counts, t_final=1.0, seed=seed)
        worst = max(tv_distance(row / 10_000, eq) for row in path.states)
        hits += worst <= 0.05
    assert hits >= 18


def test_round_to_counts():
    counts = round_to_counts(np.full(4, 0.25), 2)
    assert counts.tolist() == [1, 1, 0, 0]  # remainder ties go to low index
    nu = np.array([0.4, 0.35, 0.25])
    for n in (7, 23, 100):
        c = round_to_counts(nu, n)
        assert c.sum() == n
        assert np.abs(c / n - nu).max() < 1.0 / n


def test_lazy_mode_runs_and_is_deterministic(params310):
    counts = round_to_counts(equidistribution(10), 2000)
    a = simulate_path(params310, counts, t_final=0.5, seed=1, lazy_tv=1.0 / 4000)
    b = simulate_path(params310, counts, t_final=0.5, seed=1, lazy_tv=1.0 / 4000)
    assert np.array_equal(a.event_times, b.event_times)
    assert np.all(a.states.sum(axis=1) == 2000)


def test_event_budget_carries_partial_path(params310):
    counts = round_to_counts(equidistribution(10), 1000)
    with pytest.raises(ConvergenceError) as err:
        simulate_path(params310, counts, t_final=5.0, seed=0, max_events=25)
    partial = err.value.last_iterate
    assert len(partial.event_times) == 25


def test_orbit_rotates_at_unit_speed(params310):
    # windowed angular velocity of the empirical magnetization over one arc
    window = 2 * np.pi / 10
    counts = round_to_counts(discretize_gibbs(params310, 0.0).nu, 10_000)
    path = simulate_path(params310, counts, t_final=window, seed=5)
    m0 = solve_magnetization(params310, path.states[0] / 10_000).m
    m1 = solve_magnetization(params310, path.states[-1] / 10_000).m
    swept = np.arctan2(m1[1], m1[0]) - np.arctan2(m0[1], m0[0])
    swept = (swept + np.pi) % (2 * np.pi) - np.pi
    assert abs(swept / window - 1.0) <= 0.05


def test_event_counts_match_integrated_intensity(params310):
    # windowed event counts against the integrated total jump intensity,
    # within 3 sigma Poisson bands
    from meanrotor.consistency import _solve_full
    from meanrotor.dynamics import _rates_from

    n_total = 1000
    counts = round_to_counts(equidistribution(10), n_total)
    t_final = 2.0
    path = simulate_path(params310, counts, t_final, seed=11)
    # total intensity along the path, piecewise constant between events
    times = np.concatenate([[0.0], path.event_times, [t_final]])
    intensities = np.empty(len(path.event_times) + 1)
    m = None
    for i, row in enumerate(path.states):
        m, log_z, _, _ = _solve_full(params310, row / n_total, m, 1e-10, 10000)
        intensities[i] = row @ _rates_from(params310, m, log_z)
    edges = np.linspace(0.0, t_final, 5)
    for a, b in zip(edges[:-1], edges[1:]):
        observed = int(((path.event_times > a) & (path.event_times <= b)).sum())
        overlap = np.clip(np.minimum(times[1:], b) - np.maximum(times[:-1], a), 0.0, None)
        expected = float(intensities @ overlap)
        assert abs(observed - expected) <= 3.0 * np.sqrt(expected)


def test_sup_tv_error_against_constant_flow(params310):
    eq = equidistribution(10)
    traj = integrate_flow(params310, eq, t_final=1.0, output_dt=0.05)
    counts = round_to_counts(eq, 200)
    path = simulate_path(params310, counts, t_final=1.0, seed=2)
    err = sup_tv_error(path, traj)
    direct = max(tv_distance(row / 200, eq) for row in path.states)
    assert abs(err - direct) <= 1e-12


def test_lln_errors_decrease(params310):
    nu0 = 0.8 * discretize_gibbs(params310, 0.0).nu + 0.2 * equidistribution(10)
    table = lln_error(params310, nu0, n_list=[50, 500], t_final=2.0, seeds=range(6))
    med = table.medians()
    assert med[500] < med[50]
    assert table.rows == sorted(table.rows, key=lambda r: (r[0], r[1]))
    assert all(err > 0 for _, _, err in table.rows)


def test_invalid_arguments(params310):
    with pytest.raises(ValueError):
        simulate_path(params310, np.zeros(10, dtype=np.int64), t_final=1.0, seed=0)
    with pytest.raises(ValueError):
        simulate_path(params310, round_to_counts(equidistribution(10), 10), t_final=-1.0, seed=0)
    with pytest.raises(ValueError):
        simulate_path(params310, np.array([5, 5]), t_final=1.0, seed=0)
