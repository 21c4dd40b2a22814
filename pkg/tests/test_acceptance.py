"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines (and timings) as they complete.
"""

import time
from contextlib import contextmanager

import numpy as np
from scipy.linalg import eigvals

import meanrotor as mr

PARAMS = mr.ModelParams(beta=3.0, q=10)


@contextmanager
def criterion(num, desc, budget=None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if budget is not None:
            assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds budget {budget}s"
    except BaseException:
        print(f"criterion {num:2d} FAIL  {desc}")
        raise
    print(f"criterion {num:2d} PASS  {desc}  [{elapsed:.1f}s]")


def rk4_step(params, nu, h):
    k1 = mr.vector_field(params, nu)
    k2 = mr.vector_field(params, nu + 0.5 * h * k1)
    k3 = mr.vector_field(params, nu + 0.5 * h * k2)
    k4 = mr.vector_field(params, nu + h * k3)
    return nu + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def fd_jacobian(params, nu, h=1e-6):
    cols = []
    for l in range(params.q):
        rho = -np.full(params.q, 1.0 / params.q)
        rho[l] += 1.0
        cols.append((mr.vector_field(params, nu + h * rho)
                     - mr.vector_field(params, nu - h * rho)) / (2 * h))
    return np.array(cols).T


def test_criterion_01_equidistribution_is_fixed_point():
    with criterion(1, "F(equidistribution) = 0 at (2.3,10), (3,10), (50,100)", budget=1.0):
        for beta, q in ((2.3, 10), (3.0, 10), (50.0, 100)):
            params = mr.ModelParams(beta=beta, q=q)
            field = mr.vector_field(params, mr.equidistribution(q))
            assert np.abs(field).max() <= 1e-12


def test_criterion_02_eigenvalue_formulas():
    with criterion(2, "closed-form spectrum matches numeric to 1e-8; two unstable modes", budget=5.0):
        for beta, q in ((3.0, 10), (50.0, 100)):
            params = mr.ModelParams(beta=beta, q=q)
            spec = mr.equidistribution_spectrum(params)
            numeric = eigvals(mr.equidistribution_jacobian(params))
            assert mr.match_spectra(spec.eigenvalues, numeric) <= 1e-8
            assert spec.eigenvalues[q - 1] == 0.0
        strong = mr.equidistribution_spectrum(mr.ModelParams(beta=50.0, q=100))
        assert int((strong.eigenvalues.real > 1e-10).sum()) == 2


def test_criterion_03_jacobian_consistency():
    with criterion(3, "analytic Jacobians match finite differences to 1e-5"):
        proj = np.eye(10) - 1.0 / 10
        circulant = mr.equidistribution_jacobian(PARAMS)
        fd = fd_jacobian(PARAMS, mr.equidistribution(10))
        assert np.abs(circulant @ proj - fd).max() <= 1e-5
        rng = np.random.default_rng(3)
        for _ in range(5):
            nu = rng.dirichlet(np.ones(10) * 5)
            jac = mr.jacobian_at(PARAMS, nu)
            assert np.abs(jac @ proj - fd_jacobian(PARAMS, nu)).max() <= 1e-5


def test_criterion_04_lyapunov_property():
    with criterion(4, "free energy descends: rate <= 1e-10 everywhere, 0 on the zero set", budget=120.0):
        rng = np.random.default_rng(4)
        for beta in (2.3, 3.0):
            params = mr.ModelParams(beta=beta, q=10)
            for _ in range(1000):
                rate = mr.free_energy_rate(params, rng.dirichlet(np.ones(10)))
                assert rate is not mr.MINUS_INF and rate <= 1e-10
            assert abs(mr.free_energy_rate(params, mr.equidistribution(10))) <= 1e-8
            for theta in 2 * np.pi * np.arange(20) / 20:
                rate = mr.free_energy_rate(params, mr.discretize_gibbs(params, theta).nu)
                assert abs(rate) <= 1e-8
            # exact formula against the finite-difference derivative along the flow
            traj = mr.integrate_flow(params, rng.dirichlet(np.ones(10)),
                                     t_final=2.0, output_dt=0.5)
            for state in traj.states:
                rate = mr.free_energy_rate(params, state)
                h = 1e-5
                fd = (mr.free_energy(params, rk4_step(params, state, h)).value
                      - mr.free_energy(params, rk4_step(params, state, -h)).value) / (2 * h)
                assert abs(rate - fd) <= 1e-6 * abs(rate)


def test_criterion_05_equivariance_and_periodicity():
    with criterion(5, "one-arc step = cyclic shift; full revolution returns (1e-5 TV)", budget=60.0):
        start = mr.discretize_gibbs(PARAMS, 0.0).nu
        step = 2 * np.pi / 10
        traj = mr.integrate_flow(PARAMS, start, t_final=step, output_dt=step)
        assert mr.tv_distance(traj.states[-1], mr.cyclic_shift(start, 1)) <= 1e-5
        full = mr.integrate_flow(PARAMS, start, t_final=2 * np.pi, output_dt=np.pi)
        assert mr.tv_distance(full.states[-1], start) <= 1e-5


def test_criterion_06_orbit_attractivity():
    with criterion(6, "20 sub-equidistribution starts all reach the orbit by t = 50"):
        rng = np.random.default_rng(6)
        psi_eq = mr.free_energy(PARAMS, mr.equidistribution(10)).value
        for _ in range(20):
            while True:
                mix = rng.uniform(0.2, 0.95)
                nu = (mix * mr.discretize_gibbs(PARAMS, rng.uniform(0, 2 * np.pi)).nu
                      + (1 - mix) * rng.dirichlet(np.ones(10)))
                if mr.free_energy(PARAMS, nu).value < psi_eq:
                    break
            traj = mr.integrate_flow(PARAMS, nu, t_final=50.0, output_dt=1.0)
            dist = [mr.orbit_distance_refined(PARAMS, s) for s in traj.states]
            assert dist[-1] < 1e-2
            tail = dist[len(dist) // 2 :]
            assert all(b <= a + 1e-6 for a, b in zip(tail, tail[1:]))


def test_criterion_07_unstable_manifold():
    with criterion(7, "mode 2 contracts, mode 1 expands; sign criterion = spectral sign"):
        eq = mr.equidistribution(10)
        start2 = eq + 1e-4 * mr.fourier_mode(10, 2)
        end2 = mr.integrate_flow(PARAMS, start2, t_final=5.0, output_dt=5.0).states[-1]
        assert mr.tv_distance(start2, eq) / mr.tv_distance(end2, eq) >= 10.0

        start1 = eq + 1e-4 * mr.fourier_mode(10, 1)
        traj1 = mr.integrate_flow(PARAMS, start1, t_final=40.0, output_dt=0.5)
        tv0 = mr.tv_distance(start1, eq)
        growth = max(mr.tv_distance(s, eq) / tv0
                     for s in traj1.states if mr.tv_distance(s, eq) <= 0.1)
        assert growth >= 10.0

        checked = 0
        for beta in np.linspace(2.2, 40.0, 10):
            for q in range(3, 23):
                params = mr.ModelParams(beta=float(beta), q=q)
                report = mr.unstable_mode_check(params)
                numeric = eigvals(mr.equidistribution_jacobian(params))
                scale = q / (2 * np.pi)
                n_unstable = int((numeric.real > 1e-9 * scale).sum())
                assert (n_unstable == 2) == report.not_purely_attractive
                assert report.spectral_unstable == report.not_purely_attractive
                checked += 1
        assert checked == 200


def test_criterion_08_regime_diagram():
    with criterion(8, "regime grid over beta in (2,100], q in [3,100]", budget=30.0):
        betas = np.linspace(2.05, 100.0, 99)
        qs = list(range(3, 101))
        rows = mr.regime_grid(betas, qs)
        assert len(rows) == 99 * 98
        seen = {"uniq": 0, "nonuniq": 0, "unknown": 0, "attractive": 0}
        for beta, q, lab in rows:
            assert lab.uniqueness == (beta * np.sin(np.pi / q) ** 2 < 1.0)
            if lab.equidistribution_attractive:
                assert lab.non_uniqueness  # white area sits inside non-uniqueness
            assert not (lab.uniqueness and lab.non_uniqueness)
            seen["uniq"] += lab.uniqueness
            seen["nonuniq"] += lab.non_uniqueness
            seen["attractive"] += lab.equidistribution_attractive
            seen["unknown"] += lab.regime is mr.Regime.UNKNOWN
        assert all(count > 0 for count in seen.values())  # qualitative structure


def test_criterion_09_checkerboard():
    with criterion(9, "antipodal constraint: root pair at (6,4), none at (3,10), slope formula"):
        roots = mr.checkerboard_fixed_points(mr.ModelParams(beta=6.0, q=4))
        assert len(roots) == 3 and roots[1] == 0.0
        assert roots[2] > 0.0 and abs(roots[0] + roots[2]) <= 1e-10
        assert len(mr.checkerboard_fixed_points(mr.ModelParams(beta=3.0, q=10))) == 1
        for q in (4, 10):
            h = 1e-6
            slope = (mr.checkerboard_response(h, q) - mr.checkerboard_response(-h, q)) / (2 * h)
            assert abs(slope - (0.5 - q / (4 * np.pi) * np.sin(2 * np.pi / q))) <= 1e-8


def test_criterion_10_lagrangian_zero_cost_flow():
    with criterion(10, "L(nu, F(nu)) = 0, L >= 0, q=4 grid oracle to 1e-4"):
        rng = np.random.default_rng(10)
        for _ in range(100):
            nu = rng.dirichlet(np.ones(10))
            res = mr.lagrangian(PARAMS, nu, mr.vector_field(PARAMS, nu))
            assert res.value <= 1e-10
            assert res.value >= -1e-12
        from test_ldp import brute_force_lagrangian

        params4 = mr.ModelParams(beta=3.0, q=4)
        eq4 = mr.equidistribution(4)
        for u in (1e-2 * mr.fourier_mode(4, 1), 0.1 * mr.fourier_mode(4, 2)):
            res = mr.lagrangian(params4, eq4, u)
            assert res.value >= -1e-12
            assert abs(res.value - brute_force_lagrangian(params4, eq4, u)) <= 1e-4


def test_criterion_11_path_law_of_large_numbers():
    with criterion(11, "sup-TV medians decrease over N in {100, 1000, 10000}; replay identical",
                   budget=600.0):
        nu0 = 0.8 * mr.discretize_gibbs(PARAMS, 0.0).nu + 0.2 * mr.equidistribution(10)
        table = mr.lln_error(PARAMS, nu0, n_list=[100, 1000, 10000],
                             t_final=5.0, seeds=range(20))
        med = table.medians()
        assert med[100] > med[1000] > med[10000]
        counts = mr.round_to_counts(nu0, 1000)
        for seed in (0, 7, 19):
            a = mr.simulate_path(PARAMS, counts, 5.0, seed=seed)
            b = mr.simulate_path(PARAMS, counts, 5.0, seed=seed)
            assert a.event_times.tobytes() == b.event_times.tobytes()
            assert a.jump_arcs.tobytes() == b.jump_arcs.tobytes()
