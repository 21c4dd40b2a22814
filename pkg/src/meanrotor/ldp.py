"""Hamiltonian and Lagrangian of the path-level rate function.

The jump process has generating Hamiltonian

    H(nu, p) = sum_k nu(k) c(k, nu) (exp(p(k+1) - p(k)) - 1)

(convex in ``p``, invariant under constant shifts of ``p``) and the cost of
traveling with velocity ``u`` is its Legendre transform

    L(nu, u) = sup_p ( <p, u> - H(nu, p) ) >= 0.

``L(nu, F(nu)) = 0``: the flow is the free motion.  The supremum is computed
by damped Newton ascent with the explicit cyclic-tridiagonal Hessian, after
gauge-fixing ``p(q) = 0`` to remove the constant direction.
"""

from dataclasses import dataclass

import numpy as np

from .consistency import solve_magnetization
from .dynamics import _rates_from
from .errors import ConvergenceError
from .model import ModelParams, arc_log_partitions
from .simplex import as_simplex, check_zero_sum

_EXP_CAP = 700.0  # beyond this, exp(p-differences) overflows a double
_BOUNDARY_EPS = 1e-12


@dataclass
class LagrangianValue:
    """Value of the rate-function density and the momentum realizing it.

    ``maximizer`` carries the gauge ``p[q-1] = 0``.
    """

    value: float
    maximizer: np.ndarray
    converged: bool
    gradient_norm: float


def _weights(params: ModelParams, nu: np.ndarray) -> np.ndarray:
    """Per-arc escape intensities ``nu(k) c(k, nu)``."""
    m = solve_magnetization(params, nu).m
    log_z = arc_log_partitions(params, params.beta * m)
    return nu * _rates_from(params, m, log_z)


def hamiltonian(params: ModelParams, nu, p) -> float:
    """Evaluate ``H(nu, p)``; zero at ``p = 0`` and under constant shifts of ``p``."""
    nu = as_simplex(nu, params.q)
    p = np.asarray(p, dtype=float)
    if p.shape != (params.q,) or not np.all(np.isfinite(p)):
        raise ValueError(f"momentum must be a finite vector of length {params.q}")
    d = np.roll(p, -1) - p
    if np.abs(d).max() > _EXP_CAP:
        raise OverflowError(
            f"momentum difference {np.abs(d).max():.3g} exceeds the exp cap {_EXP_CAP:g}"
        )
    return float(_weights(params, nu) @ np.expm1(d))


def lagrangian(params: ModelParams, nu, u, tol: float = 1e-10,
               max_iter: int = 300) -> LagrangianValue:
    """Legendre transform ``L(nu, u) = sup_p (<p, u> - H(nu, p))``.

    ``u`` must sum to zero.  States on the simplex boundary are nudged toward
    the interior by 1e-12 (mixing with the equidistribution) so the objective
    stays strictly concave; the committed error is O(eps log eps).

    In the momentum differences ``d_k = p(k+1) - p(k)`` (which must sum to
    zero around the cycle) the objective decouples, and the stationarity
    conditions collapse to one scalar equation for the cyclic Lagrange
    multiplier ``lam``:

        d_k = log((lam - C_k) / w_k),   sum_k d_k = 0,

    with ``C_k`` the prefix sums of ``u`` and ``w_k = nu(k) c(k, nu)``.  The
    left side is strictly increasing in ``lam`` on ``(max C, inf)``, so the
    supremum reduces to a monotone root-find; this stays well behaved even
    when the escape intensities spread over many orders of magnitude.

    Raises
    ------
    ConvergenceError
        If the multiplier cannot be bracketed and bisected to tolerance in
        ``max_iter`` steps, or the returned momentum fails the gradient
        (duality) condition.
    """
    nu = as_simplex(nu, params.q)
    u = check_zero_sum(u)
    if u.shape != (params.q,):
        raise ValueError(f"velocity must have length {params.q}")
    if nu.min() == 0.0:
        nu = (1.0 - _BOUNDARY_EPS) * nu + _BOUNDARY_EPS / params.q
    w = _weights(params, nu)

    prefix = np.cumsum(u)  # C_k; C_q = 0 up to roundoff
    # work with the excess t = lam - max C: the root can sit far below the
    # floating-point resolution of max C itself, but the per-component gaps
    # max C - C_k are exact and t + gap stays meaningful at any scale
    gap = prefix.max() - prefix

    def constraint(t: float) -> float:
        with np.errstate(divide="ignore"):
            return float(np.log((t + gap) / w).sum())

    lo, hi = 1e-300, 1.0 + gap.max() + w.max()
    iterations = 0
    while constraint(hi) < 0.0:
        hi *= 10.0
        iterations += 1
        if iterations > max_iter or not np.isfinite(hi):
            raise ConvergenceError("could not bracket the cyclic multiplier",
                                   residual=np.inf, iterations=iterations)
    # bisection in log scale is immune to the huge dynamic range of w
    log_lo, log_hi = np.log(lo), np.log(hi)
    while iterations < max_iter:
        mid = np.exp(0.5 * (log_lo + log_hi))
        if constraint(mid) < 0.0:
            log_lo = np.log(mid)
        else:
            log_hi = np.log(mid)
        iterations += 1
        if log_hi - log_lo < 1e-15:
            break
    t_root = np.exp(0.5 * (log_lo + log_hi))

    d = np.log((t_root + gap) / w)
    shift = d.mean()
    d -= shift  # exact cyclic feasibility; bisection left ~1e-15 slack
    p = np.concatenate([[0.0], np.cumsum(d[:-1])])
    p -= p[-1]  # gauge p(q) = 0
    # after the shift, w exp(d) = (t + gap) exp(-shift) exactly; this avoids
    # forming exp of large momentum differences
    s = (t_root + gap) * np.exp(-shift)
    value = float(p @ u - (s - w).sum())
    gradient_norm = float(np.abs(u - (np.roll(s, 1) - s)).max())
    if not np.isfinite(value) or gradient_norm > max(tol, 1e-8 * np.abs(u).max()):
        raise ConvergenceError(
            f"Lagrangian duality condition violated (|grad| = {gradient_norm:.3e})",
            last_iterate=p, residual=gradient_norm, iterations=iterations,
        )
    return LagrangianValue(value=value, maximizer=p, converged=True,
                           gradient_norm=gradient_norm)


def hamiltonian_gradient(params: ModelParams, nu, p) -> np.ndarray:
    """``dH/dp`` at ``(nu, p)``; equals the velocity dual to ``p``."""
    nu = as_simplex(nu, params.q)
    p = np.asarray(p, dtype=float)
    d = np.roll(p, -1) - p
    s = _weights(params, nu) * np.exp(d)
    return np.roll(s, 1) - s
