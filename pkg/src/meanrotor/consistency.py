"""Mean-field consistency equations and parameter-regime classification.

The central object is the magnetization fixed point

    M = sum_k nu'(k) * m_k(beta * M)

whose solution feeds the jump rates, the free energy, and the linearization.
Below the fineness threshold ``beta * sin(pi/q)**2 < 1`` the fixed point is
unique; a complementary coarseness criterion certifies non-uniqueness through
the antipodal ("checkerboard") constraint; in between, nothing is guaranteed.
"""

from dataclasses import dataclass
from enum import Enum
from math import hypot, isfinite

import numpy as np

from .errors import ConvergenceError, RegimeViolationError
from .model import ModelParams, arc_means, arc_moments
from .simplex import as_simplex


@dataclass
class FixedPointReport:
    """Outcome of a magnetization solve."""

    m: np.ndarray
    iterations: int
    residual: float
    converged: bool


class Regime(Enum):
    UNIQUENESS_GUARANTEED = "UniquenessGuaranteed"
    NON_UNIQUENESS = "NonUniqueness"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RegimeLabel:
    """Closed-form classification of a (beta, q) pair."""

    regime: Regime
    uniqueness: bool
    non_uniqueness: bool
    equidistribution_attractive: bool


_MIN_DAMPING = 1.0 / 64.0


def _solve_full(params: ModelParams, weights: np.ndarray, warm_start, tol: float, max_iter: int):
    """Unvalidated core solver; ``weights`` may sit slightly off the simplex.

    One arc-moment evaluation per iteration.  A Newton candidate (built from
    the arc covariances, the exact derivative of the map) is tried first and
    kept only if it reduces the residual; otherwise the step falls back to
    damped Picard, halving the damping on every residual increase.

    Returns ``(m, log_z, iterations, residual)`` with ``log_z`` the arc log
    partition values at ``beta * m``, which every caller needs next anyway.
    """
    beta = params.beta
    if warm_start is not None:
        m = np.asarray(warm_start, dtype=float).copy()
    else:
        m = weights @ arc_means(params, np.zeros(2))
    log_z, means, cov = arc_moments(params, beta * m, order=2)
    g = weights @ means
    residual = hypot(g[0] - m[0], g[1] - m[1])
    damping = 1.0
    newton_ok = True
    iterations = 0
    while residual > tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f"magnetization fixed point not converged after {max_iter} iterations "
                f"(residual {residual:.3e}); expected only in or near the non-uniqueness regime",
                last_iterate=m,
                residual=residual,
                iterations=iterations,
            )
        iterations += 1
        candidate = None
        if newton_ok:
            a11 = 1.0 - beta * (weights @ cov[:, 0])
            a12 = -beta * (weights @ cov[:, 1])
            a22 = 1.0 - beta * (weights @ cov[:, 2])
            det = a11 * a22 - a12 * a12
            if abs(det) > 1e-14:
                rx, ry = g[0] - m[0], g[1] - m[1]
                cx = m[0] + (a22 * rx - a12 * ry) / det
                cy = m[1] + (a11 * ry - a12 * rx) / det
                norm = hypot(cx, cy)
                if isfinite(norm):
                    if norm > 1.0:  # fixed points live in the closed unit disk
                        cx, cy = cx / norm, cy / norm
                    candidate = np.array([cx, cy])
        via_newton = candidate is not None
        if candidate is None:
            candidate = (1.0 - damping) * m + damping * g
        log_z_new, means_new, cov_new = arc_moments(params, beta * candidate, order=2)
        g_new = weights @ means_new
        residual_new = hypot(g_new[0] - candidate[0], g_new[1] - candidate[1])
        if residual_new > residual:
            if via_newton:
                newton_ok = False  # retry this iterate with a Picard step
                continue
            if damping > _MIN_DAMPING:
                damping *= 0.5
                continue
        m, g, residual = candidate, g_new, residual_new
        log_z, means, cov = log_z_new, means_new, cov_new
        newton_ok = True
    return m, log_z, iterations, residual


def _solve(params: ModelParams, weights: np.ndarray, warm_start, tol: float, max_iter: int) -> FixedPointReport:
    m, _, iterations, residual = _solve_full(params, weights, warm_start, tol, max_iter)
    return FixedPointReport(m=m, iterations=iterations, residual=residual, converged=True)


def solve_magnetization(params: ModelParams, nu, warm_start=None, tol: float = 1e-12,
                        max_iter: int = 10000) -> FixedPointReport:
    """Solve ``M = sum_k nu(k) m_k(beta M)`` for the magnetization of ``nu``.

    Parameters
    ----------
    nu : array_like, shape (q,)
        Probability vector on the arcs.
    warm_start : array_like, shape (2,), optional
        Initial iterate; defaults to the zero-field magnetization
        ``sum_k nu(k) m_k(0)``, which is exact at beta = 0.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` iterations; the error carries the last iterate.
    """
    nu = as_simplex(nu, params.q)
    return _solve(params, nu, warm_start, tol, max_iter)


def find_fixed_points(params: ModelParams, nu, n_starts: int = 8, radius: float = 0.9,
                      tol: float = 1e-12, distinct_tol: float = 1e-6) -> list[FixedPointReport]:
    """Multi-start sweep listing distinct magnetization fixed points.

    Outside the guaranteed-uniqueness regime the fixed point may not be
    unique; this surfaces whatever a ring of ``n_starts`` warm starts of
    radius ``radius`` converges to.  Reports are distinct when separated by
    more than ``distinct_tol``.
    """
    nu = as_simplex(nu, params.q)
    found: list[FixedPointReport] = []
    starts = [None] + [
        radius * np.array([np.cos(a), np.sin(a)])
        for a in 2.0 * np.pi * np.arange(n_starts) / n_starts
    ]
    for start in starts:
        try:
            rep = _solve(params, nu, start, tol, max_iter=10000)
        except ConvergenceError:
            continue
        if all(np.hypot(*(rep.m - other.m)) > distinct_tol for other in found):
            found.append(rep)
    return found


def magnetization(params: ModelParams, nu, **kwargs) -> np.ndarray:
    """Convenience wrapper returning just the solved magnetization vector."""
    return solve_magnetization(params, nu, **kwargs).m


def continuous_order_parameter(beta: float, nodes: int = 512) -> float:
    """Spontaneous magnetization modulus of the continuous rotator model.

    Solves the scalar consistency equation
    ``m = int cos(w) e^{beta m cos w} dw / int e^{beta m cos w} dw``
    by bisection.  Returns 0 for ``beta <= 2`` (no symmetry breaking) and the
    unique positive root otherwise, with residual below 1e-12.
    """
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be a positive finite real, got {beta}")
    if beta <= 2.0:
        return 0.0
    ang = 2.0 * np.pi * np.arange(nodes) / nodes  # periodic trapezoid: spectral here
    cos = np.cos(ang)

    def ratio(x: float) -> float:
        e = np.exp(x * cos - abs(x))
        return float((cos @ e) / e.sum())

    def g(m: float) -> float:
        return m - ratio(beta * m)

    lo, hi = 1e-8, 1.0
    if g(lo) >= 0.0:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def checkerboard_response(x, q: int, nodes: int = 64):
    """One-dimensional response function of the antipodal constraint.

    ``F_q(x) = int_{-pi/q}^{pi/q} sin(w) e^{x sin w} dw / int e^{x sin w} dw``.
    Accepts a scalar or an array of tilt values ``x``.
    """
    from .model import _refined_leggauss

    t, w = _refined_leggauss(nodes)
    s = np.sin((np.pi / q) * t)
    x = np.asarray(x, dtype=float)
    g = x[..., None] * s
    e = np.exp(g - g.max(axis=-1, keepdims=True))
    out = (e @ (s * w)) / (e @ w)
    return float(out) if out.ndim == 0 else out


def checkerboard_fixed_points(params: ModelParams, grid_step: float = 1e-3) -> np.ndarray:
    """All roots of ``m = F_q(beta m)`` in [-1, 1] (antipodal half/half constraint).

    Requires even ``q``.  Sign-scans a grid of the given step and refines each
    bracket by bisection; the trivial root 0 is always present and nontrivial
    roots come in +/- pairs.
    """
    if params.q % 2 != 0:
        raise ValueError(f"checkerboard constraint needs even q, got {params.q}")
    beta, q = params.beta, params.q
    nodes = max(params.nodes_per_arc, 64)

    def g(m):
        return m - checkerboard_response(beta * np.asarray(m), q, nodes)

    grid = np.arange(-1.0, 1.0 + grid_step, grid_step)
    vals = g(grid)
    roots = [0.0]
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(a))
            continue
        if fa * fb < 0.0:
            for _ in range(100):
                mid = 0.5 * (a + b)
                fm = g(mid)
                if fa * fm <= 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
                if b - a < 1e-14:
                    break
            roots.append(0.5 * (a + b))
    roots = np.array(sorted(roots))
    keep = [roots[0]]
    for r in roots[1:]:
        if r - keep[-1] > 1e-8:
            keep.append(r)
    out = np.array(keep)
    out[np.abs(out) < 1e-8] = 0.0  # the trivial root is exact
    return out


def classify_regime(beta: float, q: int) -> RegimeLabel:
    """Evaluate the three closed-form (beta, q) criteria.

    * uniqueness guaranteed:  ``beta * sin(pi/q)**2 < 1``
    * non-uniqueness:         ``beta * (1 - q/(2 pi) * sin(2 pi/q)) > 2``
    * equidistribution purely attractive:
                              ``beta * (1 - (q/pi)**2 * sin(pi/q)**2) > 2``
    """
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be a positive finite real, got {beta}")
    if int(q) != q or q < 3:
        raise ValueError(f"q must be an integer >= 3, got {q}")
    uniqueness = beta * np.sin(np.pi / q) ** 2 < 1.0
    non_uniqueness = beta * (1.0 - q / (2.0 * np.pi) * np.sin(2.0 * np.pi / q)) > 2.0
    eq_attractive = beta * (1.0 - (q / np.pi) ** 2 * np.sin(np.pi / q) ** 2) > 2.0
    if uniqueness:
        regime = Regime.UNIQUENESS_GUARANTEED
    elif non_uniqueness:
        regime = Regime.NON_UNIQUENESS
    else:
        regime = Regime.UNKNOWN
    return RegimeLabel(
        regime=regime,
        uniqueness=bool(uniqueness),
        non_uniqueness=bool(non_uniqueness),
        equidistribution_attractive=bool(eq_attractive),
    )


def regime_grid(beta_values, q_values) -> list[tuple[float, int, RegimeLabel]]:
    """Classify every cell of a (beta, q) grid; betas must lie in the
    phase-transition region beta > 2."""
    beta_values = np.atleast_1d(np.asarray(beta_values, dtype=float))
    if np.any(beta_values <= 2.0):
        raise RegimeViolationError(
            "regime grid is restricted to the phase-transition region beta > 2"
        )
    rows = []
    for beta in beta_values:
        for q in np.atleast_1d(q_values):
            rows.append((float(beta), int(q), classify_regime(float(beta), int(q))))
    return rows
