"""Free energy of constrained minimizers, its descent rate, and the Gibbs orbit.

The discrete free energy (up to an additive constant that plays no role in
any monotonicity statement) is

    psi(nu) = sum_k nu(k) log(q nu(k)) + beta/2 |M|^2 - sum_k nu(k) log(q Z_k(beta M))

with ``M`` the solved magnetization of ``nu``.  Along the flow it never
increases; its exact time derivative is

    d psi / dt = sum_k c(k, nu) nu(k) log[ nu(k+1) Z_k / (nu(k) Z_{k+1}) ]

which vanishes exactly at the equidistribution and on the orbit of
discretized Gibbs measures, and is minus infinity where the simplex boundary
is approached with mass flowing into an empty arc.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .consistency import continuous_order_parameter, solve_magnetization
from .dynamics import _rates_from
from .model import ModelParams, arc_log_partitions
from .simplex import as_simplex, equidistribution, tv_distance


class _MinusInfinity:
    """Tagged sentinel for the boundary divergence of the descent rate.

    Deliberately not a float: callers must handle the boundary case
    explicitly (``rate is MINUS_INF``) instead of doing arithmetic with it.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MINUS_INF"

    def __float__(self):
        return float("-inf")


MINUS_INF = _MinusInfinity()


@dataclass
class FreeEnergyValue:
    """Free energy split into its three terms; ``value`` is their exact sum."""

    value: float
    entropy_term: float          # sum_k nu(k) log(q nu(k))
    magnetization_term: float    # beta/2 |M|^2
    log_partition_term: float    # sum_k nu(k) log(q Z_k(beta M))


@dataclass
class OrbitPoint:
    """Discretization of a continuous Gibbs minimizer with magnetization angle theta."""

    theta: float
    nu: np.ndarray
    m: np.ndarray


def free_energy(params: ModelParams, nu, warm_start=None) -> FreeEnergyValue:
    """Evaluate the free energy of ``nu`` (unnormalized: no infimum subtracted)."""
    nu = as_simplex(nu, params.q)
    m = solve_magnetization(params, nu, warm_start=warm_start).m
    log_z = arc_log_partitions(params, params.beta * m)
    pos = nu > 0.0
    entropy = float(np.sum(nu[pos] * np.log(params.q * nu[pos])))  # 0 log 0 := 0
    magnet = 0.5 * params.beta * float(m @ m)
    log_part = float(nu @ (np.log(params.q) + log_z))
    return FreeEnergyValue(
        value=entropy + magnet - log_part,
        entropy_term=entropy,
        magnetization_term=magnet,
        log_partition_term=log_part,
    )


def free_energy_rate(params: ModelParams, nu, warm_start=None):
    """Exact time derivative of the free energy along the flow at ``nu``.

    Returns the sentinel :data:`MINUS_INF` when some arc is empty while its
    predecessor carries mass (the log diverges there); otherwise a float
    that is <= 0 up to roundoff.
    """
    nu = as_simplex(nu, params.q)
    m = solve_magnetization(params, nu, warm_start=warm_start).m
    log_z = arc_log_partitions(params, params.beta * m)
    c = _rates_from(params, m, log_z)
    nu_next = np.roll(nu, -1)        # nu(k+1)
    log_z_next = np.roll(log_z, -1)  # log Z_{k+1}
    pos = nu > 0.0
    if np.any(pos & (nu_next == 0.0)):
        return MINUS_INF
    terms = c[pos] * nu[pos] * (np.log(nu_next[pos] / nu[pos]) + log_z[pos] - log_z_next[pos])
    return float(terms.sum())


def discretize_gibbs(params: ModelParams, theta: float) -> OrbitPoint:
    """Push the continuous Gibbs minimizer at angle ``theta`` through the arc partition.

    ``nu(k)`` is the Gibbs mass of arc ``k`` for the density proportional to
    ``exp(beta m cos(w - theta))`` where ``m`` is the continuous order
    parameter.  For ``beta <= 2`` this degenerates to the equidistribution.
    The returned magnetization is re-solved from ``nu`` and matches
    ``m * (cos theta, sin theta)`` to solver accuracy.
    """
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    theta = float(theta) % (2.0 * np.pi)
    m_star = continuous_order_parameter(params.beta)
    if m_star == 0.0:
        return OrbitPoint(theta=theta, nu=equidistribution(params.q), m=np.zeros(2))
    x = params.beta * m_star * np.array([np.cos(theta), np.sin(theta)])
    log_z = arc_log_partitions(params, x)
    w = np.exp(log_z - log_z.max())
    nu = w / w.sum()
    rep = solve_magnetization(params, nu, warm_start=x / params.beta)
    return OrbitPoint(theta=theta, nu=nu, m=rep.m)


def free_energy_offset(params: ModelParams) -> float:
    """Free energy of a minimizer, for callers who want ``psi - inf psi``.

    For ``beta > 2`` the infimum is attained on the periodic orbit (any
    angle, by rotation invariance); below the transition it is attained at
    the equidistribution.  :func:`free_energy` itself stays unnormalized
    because monotonicity statements never need the constant.
    """
    if continuous_order_parameter(params.beta) == 0.0:
        return free_energy(params, equidistribution(params.q)).value
    return free_energy(params, discretize_gibbs(params, 0.0).nu).value


@lru_cache(maxsize=8)
def _orbit_samples(params: ModelParams, theta_samples: int):
    thetas = 2.0 * np.pi * np.arange(theta_samples) / theta_samples
    states = np.empty((theta_samples, params.q))
    m_star = continuous_order_parameter(params.beta)
    if m_star == 0.0:
        states[:] = equidistribution(params.q)
    else:
        for i, th in enumerate(thetas):
            x = params.beta * m_star * np.array([np.cos(th), np.sin(th)])
            log_z = arc_log_partitions(params, x)
            w = np.exp(log_z - log_z.max())
            states[i] = w / w.sum()
    thetas.flags.writeable = False
    states.flags.writeable = False
    return thetas, states


def orbit_samples(params: ModelParams, theta_samples: int | None = None):
    """Angles and simplex states of a uniform sample of the periodic orbit."""
    if theta_samples is None:
        theta_samples = default_theta_samples(params.q)
    if theta_samples < params.q:
        raise ValueError(f"theta_samples must be >= q = {params.q}, got {theta_samples}")
    return _orbit_samples(params, int(theta_samples))


def default_theta_samples(q: int) -> int:
    """Orbit sampling density making grid error negligible against test tolerances."""
    return 64 * q


def orbit_distance(params: ModelParams, nu, theta_samples: int | None = None) -> float:
    """Total-variation distance from ``nu`` to the sampled periodic orbit."""
    nu = as_simplex(nu, params.q)
    _, states = orbit_samples(params, theta_samples)
    return float(0.5 * np.abs(states - nu).sum(axis=1).min())


def _orbit_state(params: ModelParams, m_star: float, theta: float) -> np.ndarray:
    x = params.beta * m_star * np.array([np.cos(theta), np.sin(theta)])
    log_z = arc_log_partitions(params, x)
    w = np.exp(log_z - log_z.max())
    return w / w.sum()


def orbit_distance_refined(params: ModelParams, nu, theta_samples: int | None = None,
                           refine_iters: int = 60) -> float:
    """Like :func:`orbit_distance` but with the angle minimized continuously.

    The sampled minimum is limited by the theta grid (TV resolution ~ 1/
    theta_samples), which masks convergence below that scale; golden-section
    refinement around the best sample removes the grid floor.
    """
    nu = as_simplex(nu, params.q)
    thetas, states = orbit_samples(params, theta_samples)
    m_star = continuous_order_parameter(params.beta)
    if m_star == 0.0:
        return tv_distance(nu, equidistribution(params.q))
    best = int(np.abs(states - nu).sum(axis=1).argmin())
    span = thetas[1] - thetas[0]
    lo, hi = thetas[best] - span, thetas[best] + span

    def distance(theta: float) -> float:
        return tv_distance(nu, _orbit_state(params, m_star, theta))

    golden = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - golden * (b - a)
    d = a + golden * (b - a)
    fc, fd = distance(c), distance(d)
    for _ in range(refine_iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - golden * (b - a)
            fc = distance(c)
        else:
            a, c, fc = c, d, fd
            d = a + golden * (b - a)
            fd = distance(d)
    return min(fc, fd)


def orbit_segment(params: ModelParams, s: float, theta: float = 0.0) -> np.ndarray:
    """Point on the line through the equidistribution (s = 0) and the orbit
    point at ``theta`` (s = 1); s > 1 extends toward the simplex boundary."""
    eq = equidistribution(params.q)
    target = discretize_gibbs(params, theta).nu
    point = (1.0 - s) * eq + s * target
    if point.min() < 0.0:
        raise ValueError(f"segment parameter {s} leaves the simplex")
    return point
