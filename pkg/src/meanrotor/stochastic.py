"""Finite-N jump process on occupation numbers and law-of-large-numbers checks.

The simulator is an exact-jump (Gillespie) scheme: with occupation counts
``n_k`` summing to N, the total intensity is ``R = sum_k n_k c(k, n/N)``,
waiting times are exponential with rate R, and the jumping arc is drawn
categorically with weights ``n_k c(k, n/N)``.  Rates use the infinite-volume
formula evaluated at the current empirical measure, which is exactly the
process whose trajectories concentrate on the simplex flow as N grows.

Randomness comes from a counter-based generator (Philox), so a seed pins the
whole path bit for bit.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .consistency import _solve_full
from .dynamics import FlowTrajectory, _rates_from, integrate_flow
from .errors import ConvergenceError
from .model import ModelParams
from .simplex import as_simplex, tv_distance


@dataclass(frozen=True)
class OccupationState:
    """Occupation counts of the q arcs for an N-particle configuration."""

    counts: np.ndarray
    n_total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or np.any(counts < 0):
            raise ValueError("counts must be a 1-d array of nonnegative integers")
        if counts.sum() != self.n_total:
            raise ValueError(f"counts sum to {counts.sum()}, expected N = {self.n_total}")
        object.__setattr__(self, "counts", counts)

    def simplex(self) -> np.ndarray:
        return self.counts / self.n_total


@dataclass
class JumpPath:
    """One realization of the N-particle jump process.

    ``jump_arcs[i]`` is the 0-based source column of event ``i``: one particle
    moved from that arc to the next (mod q) at time ``event_times[i]``.
    ``states[i]`` is the occupation row after ``i`` events (``states[0]`` is
    the initial condition), so consecutive rows differ by exactly one such
    move.
    """

    event_times: np.ndarray
    jump_arcs: np.ndarray
    initial_counts: np.ndarray
    n_total: int
    seed: int
    q: int = field(init=False)

    def __post_init__(self):
        self.q = int(self.initial_counts.shape[0])

    @cached_property
    def states(self) -> np.ndarray:
        n_events = len(self.event_times)
        out = np.empty((n_events + 1, self.q), dtype=np.int64)
        out[0] = self.initial_counts
        if n_events:
            dec = np.zeros((n_events, self.q), dtype=np.int64)
            rows = np.arange(n_events)
            dec[rows, self.jump_arcs] = -1
            dec[rows, (self.jump_arcs + 1) % self.q] += 1
            out[1:] = self.initial_counts + np.cumsum(dec, axis=0)
        return out

    def state_at(self, t: float) -> OccupationState:
        idx = bisect_right(self.event_times.tolist(), t)
        return OccupationState(counts=self.states[idx], n_total=self.n_total)

    def states_at(self, times) -> np.ndarray:
        """Occupation rows at the given times (path is right-continuous)."""
        idx = np.searchsorted(self.event_times, np.asarray(times), side="right")
        return self.states[idx]


@dataclass
class LlnTable:
    """sup-TV errors of finite-N paths against the flow, per (N, seed)."""

    rows: list[tuple[int, int, float]]

    def medians(self) -> dict[int, float]:
        byn: dict[int, list[float]] = {}
        for n, _, err in self.rows:
            byn.setdefault(n, []).append(err)
        return {n: float(np.median(v)) for n, v in sorted(byn.items())}


def round_to_counts(nu, n_total: int) -> np.ndarray:
    """Largest-remainder rounding of a probability vector to integer counts.

    Deterministic; ties go to the lowest index.  Minimizes the rounding TV
    error among integer vectors summing to ``n_total``.
    """
    nu = as_simplex(nu)
    scaled = n_total * nu
    counts = np.floor(scaled).astype(np.int64)
    remainder = scaled - counts
    short = int(n_total - counts.sum())
    if short > 0:
        order = np.lexsort((np.arange(len(nu)), -remainder))
        counts[order[:short]] += 1
    return counts


def simulate_path(params: ModelParams, initial, t_final: float, seed: int,
                  fp_tol: float = 1e-10, lazy_tv: float | None = None,
                  max_events: int | None = None) -> JumpPath:
    """Simulate the N-particle jump process up to ``t_final``.

    Parameters
    ----------
    initial : OccupationState or integer array
        Starting occupation counts.
    seed : int
        Philox key; identical seeds give bit-identical paths.
    lazy_tv : float, optional
        If set, the magnetization is re-solved only after the empirical
        measure has moved at least this far in TV since the last solve
        (a speed knob trading one-jump staleness; default: re-solve after
        every jump).
    max_events : int, optional
        Safety cap; exceeding it raises ``ConvergenceError`` carrying the
        partial path.

    Notes
    -----
    A solver failure mid-path raises ``ConvergenceError`` whose
    ``last_iterate`` holds the partial path built so far.
    """
    if isinstance(initial, OccupationState):
        counts = initial.counts.copy()
        n_total = initial.n_total
    else:
        counts = np.asarray(initial, dtype=np.int64).copy()
        n_total = int(counts.sum())
        OccupationState(counts=counts, n_total=n_total)  # validation
    if counts.shape != (params.q,):
        raise ValueError(f"counts must have length q = {params.q}")
    if n_total < 1:
        raise ValueError("need at least one particle")
    if not (np.isfinite(t_final) and t_final > 0):
        raise ValueError(f"t_final must be positive and finite, got {t_final}")

    rng = np.random.Generator(np.random.Philox(seed))
    times: list[float] = []
    arcs: list[int] = []
    initial_counts = counts.copy()

    def partial() -> JumpPath:
        return JumpPath(
            event_times=np.array(times),
            jump_arcs=np.array(arcs, dtype=np.int64),
            initial_counts=initial_counts,
            n_total=n_total,
            seed=seed,
        )

    beta = params.beta
    t = 0.0
    m = None
    nu_solved = None
    rate_per_arc = None
    while True:
        nu = counts / n_total
        if m is None or lazy_tv is None or tv_distance(nu, nu_solved) >= lazy_tv:
            try:
                m, log_z, _, _ = _solve_full(params, nu, m, fp_tol, 10000)
            except ConvergenceError as err:
                err.last_iterate = partial()
                raise
            nu_solved = nu
            rate_per_arc = _rates_from(params, m, log_z)
        intensity = counts * rate_per_arc
        total = float(intensity.sum())
        t += rng.exponential(1.0 / total)
        if t > t_final:
            break
        if max_events is not None and len(times) >= max_events:
            err = ConvergenceError(f"event budget {max_events} exhausted at t = {t:.4g}")
            err.last_iterate = partial()
            raise err
        j = int(np.searchsorted(np.cumsum(intensity), rng.random() * total, side="right"))
        j = min(j, params.q - 1)
        counts[j] -= 1
        counts[(j + 1) % params.q] += 1
        times.append(t)
        arcs.append(j)
    return partial()


def sup_tv_error(path: JumpPath, trajectory: FlowTrajectory) -> float:
    """sup over time of TV(path state, flow state), evaluated on the union of
    the flow grid and the jump times (flow linearly interpolated at the latter)."""
    flow_t = trajectory.times
    flow_states = trajectory.states
    n = path.n_total
    emp = path.states_at(flow_t) / n
    sup = float(0.5 * np.abs(emp - flow_states).sum(axis=1).max())
    if len(path.event_times):
        inside = path.event_times <= flow_t[-1]
        ev = path.event_times[inside]
        if len(ev):
            seg = np.clip(np.searchsorted(flow_t, ev, side="right") - 1, 0, len(flow_t) - 2)
            w = (ev - flow_t[seg]) / (flow_t[seg + 1] - flow_t[seg])
            flow_at_ev = (1 - w[:, None]) * flow_states[seg] + w[:, None] * flow_states[seg + 1]
            emp_ev = path.states[np.searchsorted(path.event_times, ev, side="right")] / n
            sup = max(sup, float(0.5 * np.abs(emp_ev - flow_at_ev).sum(axis=1).max()))
    return sup


def lln_error(params: ModelParams, initial, n_list, t_final: float, seeds,
              flow_dt: float = 0.01, rtol: float = 1e-9, atol: float = 1e-9) -> LlnTable:
    """sup-TV error of the empirical path against the flow, per size and seed.

    ``initial`` is a probability vector; each N starts from its
    largest-remainder rounding.  Rows come back sorted by (N, seed), so the
    result does not depend on evaluation order.
    """
    nu0 = as_simplex(initial, params.q)
    trajectory = integrate_flow(params, nu0, t_final, output_dt=flow_dt, rtol=rtol, atol=atol)
    rows = []
    for n_total in sorted(int(n) for n in n_list):
        counts0 = round_to_counts(nu0, n_total)
        for seed in sorted(int(s) for s in seeds):
            path = simulate_path(params, counts0, t_final, seed)
            rows.append((n_total, seed, sup_tv_error(path, trajectory)))
    return LlnTable(rows=rows)
