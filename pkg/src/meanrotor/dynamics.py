"""Limiting jump rates, the simplex vector field, and flow integration.

A particle in arc ``k`` jumps to arc ``k+1`` across the right endpoint
``2*pi*k/q`` at rate

    c(k, nu) = exp(beta * <e_{2*pi*k/q}, M>) / Z_k(beta * M)

where ``M`` is the solved magnetization of ``nu``.  The induced flow on the
probability simplex is ``d nu(k)/dt = c(k-1) nu(k-1) - c(k) nu(k)``: inflow
from below minus outflow upward.
"""

from dataclasses import dataclass

import numpy as np

from .consistency import _solve, _solve_full
from .errors import StiffnessError
from .model import ModelParams, _boundary_trig, arc_moments
from .simplex import as_simplex

_STEP_FLOOR = 1e-14


@dataclass
class FlowTrajectory:
    """Dense output of a flow integration.

    ``times`` is strictly increasing starting at 0; ``states[i]`` is the
    simplex state at ``times[i]`` and ``magnetizations[i]`` its solved
    magnetization.
    """

    times: np.ndarray            # (T,)
    states: np.ndarray           # (T, q)
    magnetizations: np.ndarray   # (T, 2)


def _rates_from(params: ModelParams, m: np.ndarray, log_z: np.ndarray) -> np.ndarray:
    cos, sin = _boundary_trig(params.q)
    return np.exp(params.beta * (cos * m[0] + sin * m[1]) - log_z)


def rates(params: ModelParams, nu, m, residual_tol: float = 1e-10) -> np.ndarray:
    """Jump rates ``c(k, nu)`` for ``k = 1..q`` given the solved magnetization.

    ``m`` must actually solve the consistency equation for ``nu``: the
    residual is rechecked and a stale magnetization is rejected.
    """
    nu = as_simplex(nu, params.q)
    m = np.asarray(m, dtype=float)
    if m.shape != (2,) or not np.all(np.isfinite(m)):
        raise ValueError(f"magnetization must be a finite plane vector, got {m!r}")
    x = params.beta * m
    log_z, means, _ = arc_moments(params, x, order=1)
    residual = float(np.hypot(*(nu @ means - m)))
    if residual > residual_tol:
        raise ValueError(
            f"stale magnetization: consistency residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    return _rates_from(params, m, log_z)


def vector_field(params: ModelParams, nu, warm_start=None, fp_tol: float = 1e-12) -> np.ndarray:
    """Right-hand side ``F(nu)`` of the simplex flow; components sum to zero.

    Solves the magnetization internally (``warm_start`` seeds the solve).
    """
    nu = as_simplex(nu, params.q)
    f, _ = _field_and_m(params, nu, warm_start, fp_tol)
    return f


def _field_and_m(params: ModelParams, weights: np.ndarray, warm_start, fp_tol: float):
    m, log_z, _, _ = _solve_full(params, weights, warm_start, fp_tol, max_iter=10000)
    flux = _rates_from(params, m, log_z) * weights
    return np.roll(flux, 1) - flux, m


def integrate_flow(params: ModelParams, nu0, t_final: float, output_dt: float = 0.1,
                   rtol: float = 1e-9, atol: float = 1e-9, fp_tol: float = 1e-12,
                   max_step: float = np.inf) -> FlowTrajectory:
    """Integrate the simplex flow with an adaptive Dormand-Prince 5(4) pair.

    Dense output is produced at every multiple of ``output_dt`` (the
    integrator steps exactly onto those times) plus ``t_final``.  After each
    accepted step, weights driven below zero by roundoff are clamped and the
    state renormalized; a step producing a weight below ``-10 * atol`` is
    rejected instead.  Magnetization solves are warm-started from call to
    call, which makes the implicit right-hand side cheap.

    Raises
    ------
    StiffnessError
        If step-size control pushes the step below 1e-14.
    """
    if not (np.isfinite(t_final) and t_final > 0):
        raise ValueError(f"t_final must be positive and finite, got {t_final}")
    if not (np.isfinite(output_dt) and output_dt > 0):
        raise ValueError(f"output_dt must be positive and finite, got {output_dt}")
    y = as_simplex(nu0, params.q)

    # output grid: multiples of output_dt, with t_final always included
    n_out = int(np.floor(t_final / output_dt + 1e-9))
    out_times = [i * output_dt for i in range(1, n_out + 1)]
    if not out_times or t_final - out_times[-1] > 1e-12 * max(1.0, t_final):
        out_times.append(t_final)

    first = _solve(params, y, None, fp_tol, 10000)
    warm = [first.m]

    def f(state: np.ndarray) -> np.ndarray:
        field, m = _field_and_m(params, state, warm[0], fp_tol)
        warm[0] = m
        return field

    times = [0.0]
    states = [y.copy()]
    mags = [first.m]

    rhs0 = f(y)
    h_prop = min(output_dt, max_step, 0.1 / max(1.0, float(np.abs(rhs0).max())))
    t = 0.0
    for t_stop in out_times:
        while t < t_stop - 1e-13:
            truncated = h_prop > t_stop - t
            h = min(h_prop, t_stop - t, max_step)
            if h < _STEP_FLOOR:
                raise StiffnessError(
                    f"step size underflow at t = {t:.6g}", t=t, state=y.copy(), step=h,
                )
            y_new, err = _dopri_step(f, y, h)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            with np.errstate(over="ignore"):  # absurd tolerances overflow the ratio
                err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
            if err_norm > 1.0 or y_new.min() < -10.0 * atol:
                h_prop = h * max(0.2, 0.9 * err_norm ** -0.2 if err_norm > 0 else 0.2)
                continue
            # accepted: repair roundoff drift off the simplex
            np.clip(y_new, 0.0, None, out=y_new)
            y_new /= y_new.sum()
            t += h
            y = y_new
            factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2)) if err_norm > 0 else 5.0
            if truncated:
                h_prop = max(h_prop, h * factor)
            else:
                h_prop = h * factor
        t = t_stop
        times.append(t)
        states.append(y.copy())
        mags.append(_solve(params, y, warm[0], fp_tol, 10000).m)
    return FlowTrajectory(
        times=np.array(times), states=np.array(states), magnetizations=np.array(mags)
    )


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dopri_step(f, y: np.ndarray, h: float):
    """One embedded step; returns (5th-order advance, error estimate)."""
    ks = [f(y)]
    for i in range(1, 7):
        ks.append(f(y + h * (_DP_A[i] @ np.array(ks[: i]))))
    ks = np.array(ks)
    y5 = y + h * (_DP_B5 @ ks)
    err = h * ((_DP_B5 - _DP_B4) @ ks)
    return y5, err
