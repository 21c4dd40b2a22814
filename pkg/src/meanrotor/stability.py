"""Linearization of the flow: general Jacobian, the explicit circulant at the
equidistribution, and its closed-form spectrum.

Differentiating the rates through the implicit magnetization (implicit
function theorem on the consistency equation) gives, for a zero-sum
perturbation ``rho``,

    dc(k) = beta c(k) < e_{2 pi k / q} - m_k,  dM >
    dM    = [I - sum_k nu(k) W(k)]^{-1} sum_l rho(l) m_l,
    W(k)  = beta * Cov_k(cos, sin)

and the Jacobian assembles these the same way the field assembles the rates.
At the equidistribution everything collapses to a circulant matrix whose
eigenvalues are explicit in the discrete Fourier basis: all modes rotate and
contract except the two lowest nonzero ones, which expand exactly when
``beta (1 - (q/pi)^2 sin(pi/q)^2) < 2``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .consistency import solve_magnetization
from .dynamics import _rates_from
from .errors import SingularLinearizationError
from .model import ModelParams, arc_moments, boundary_angles
from .simplex import as_simplex

TWO_PI = 2.0 * np.pi


@dataclass
class SpectrumResult:
    """Closed-form eigenvalues at the equidistribution, ordered by Fourier mode.

    ``eigenvalues[j-1]`` belongs to the mode-``j`` eigenvector
    ``exp(i 2 pi j l / q) / sqrt(q)``, ``j = 1..q`` (mode q is the constant
    vector with eigenvalue 0).
    """

    eigenvalues: np.ndarray
    c1: float
    c2: float


@dataclass
class UnstableModeReport:
    """Sign test for the rotation modes at the equidistribution."""

    not_purely_attractive: bool
    half_q_c2: float              # (q/2) c2; > 1 means unstable rotation modes
    criterion_value: float        # beta (1 - (q/pi)^2 sin(pi/q)^2); < 2 means unstable
    spectral_unstable: bool       # same question answered by Re(lambda_1) > 0


@dataclass
class ManifoldProjectors:
    """Complementary projectors on zero-sum vectors.

    ``unstable`` keeps Fourier modes {1, q-1} (the non-attractive plane),
    ``stable`` keeps modes {2..q-2}; the constant mode is excluded by the
    zero-sum constraint.
    """

    stable: np.ndarray
    unstable: np.ndarray


def _denominator(params: ModelParams) -> float:
    beta, q = params.beta, params.q
    return 2.0 * np.pi**2 - beta * np.pi**2 + beta * q**2 * np.sin(np.pi / q) ** 2


def _c1_c2(params: ModelParams) -> tuple[float, float]:
    beta, q = params.beta, params.q
    den = _denominator(params)
    crit = beta * (1.0 - (q / np.pi) ** 2 * np.sin(np.pi / q) ** 2)
    if abs(crit - 2.0) < 1e-10:
        raise SingularLinearizationError(
            f"linearization is singular at beta (1 - (q/pi)^2 sin(pi/q)^2) = 2 "
            f"(got {crit}); the 2x2 self-consistency system has determinant ~ 0",
            determinant=den / np.pi**2,
        )
    s2 = np.sin(np.pi / q) ** 2
    return 4.0 * beta * np.pi * s2 / den, 2.0 * beta * q * s2 / den


def jacobian_at(params: ModelParams, nu, cond_limit: float = 1e12) -> np.ndarray:
    """Jacobian of the flow field at ``nu``, acting on zero-sum perturbations.

    Columns are responses to unit mass shifts; applying the matrix to any
    zero-sum vector yields a zero-sum vector (mass conservation).

    Raises
    ------
    SingularLinearizationError
        When ``I - sum_k nu(k) W(k)`` is not safely invertible.
    """
    nu = as_simplex(nu, params.q)
    beta = params.beta
    m = solve_magnetization(params, nu).m
    log_z, means, cov = arc_moments(params, beta * m, order=2)
    w_sum = beta * np.array(
        [
            [nu @ cov[:, 0], nu @ cov[:, 1]],
            [nu @ cov[:, 1], nu @ cov[:, 2]],
        ]
    )
    system = np.eye(2) - w_sum
    det = float(np.linalg.det(system))
    sv = np.linalg.svd(system, compute_uv=False)
    # the natural scale of the system is the identity, so judge singularity
    # both relatively (cond) and absolutely (smallest singular value)
    if sv[0] / sv[1] > cond_limit or sv[1] < 1.0 / cond_limit:
        raise SingularLinearizationError(
            f"2x2 self-consistency system is near-singular (det = {det:.3e})",
            determinant=det,
        )
    c = _rates_from(params, m, log_z)
    ang = boundary_angles(params)
    e_hi = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    # dc[k, l] = beta c_k <e_hi_k - m_k, K m_l>,  K = system^{-1}
    dm_cols = np.linalg.solve(system, means.T)          # (2, q)
    dc = (beta * c)[:, None] * ((e_hi - means) @ dm_cols)
    flux_part = nu[:, None] * dc
    jac = np.roll(flux_part, 1, axis=0) - flux_part
    idx = np.arange(params.q)
    jac[idx, idx - 1] += np.roll(c, 1)  # inflow c_{k-1} rho(k-1)
    jac[idx, idx] -= c                  # outflow c_k rho(k)
    return jac


def equidistribution_jacobian(params: ModelParams) -> np.ndarray:
    """Explicit circulant Jacobian at the equidistribution.

    Entry ``(i, j)`` is ``q/(2 pi)`` times
    ``delta_{j=i-1} - delta_{j=i} + c1 sin(2 pi (i-j)/q)
    + c2 [cos(2 pi (i-j)/q) - cos(2 pi (i-j-1)/q)]``
    with indices mod q; every row sums to zero (conservation of mass).
    """
    q = params.q
    c1, c2 = _c1_c2(params)
    d = (np.arange(q)[:, None] - np.arange(q)[None, :]) % q
    ang = TWO_PI * d / q
    mat = (
        (d == 1).astype(float)
        - (d == 0).astype(float)
        + c1 * np.sin(ang)
        + c2 * (np.cos(ang) - np.cos(TWO_PI * (d - 1) / q))
    )
    return q / TWO_PI * mat


def equidistribution_spectrum(params: ModelParams) -> SpectrumResult:
    """Closed-form eigenvalues of the equidistribution Jacobian.

    Modes ``j = 2..q-2`` rotate and contract with
    ``lambda_j = q/(2 pi) [(cos(2 pi j/q) - 1) - i sin(2 pi j/q)]``;
    modes 1 and q-1 pick up the self-consistency correction through
    ``c1, c2``; mode q is the conserved constant direction with
    ``lambda_q = 0``.
    """
    q = params.q
    c1, c2 = _c1_c2(params)
    th = TWO_PI / q
    lam = np.empty(q, dtype=complex)
    lam1 = (c2 * q / 2.0 - 1.0) * (1.0 - np.cos(th)) + 1j * (
        (c2 * q / 2.0 - 1.0) * np.sin(th) - c1 * q / 2.0
    )
    lam[0] = q / TWO_PI * lam1
    j = np.arange(2, q - 1)
    lam[1 : q - 2] = q / TWO_PI * ((np.cos(th * j) - 1.0) - 1j * np.sin(th * j))
    lam[q - 2] = np.conj(lam[0])
    lam[q - 1] = 0.0
    return SpectrumResult(eigenvalues=lam, c1=c1, c2=c2)


def match_spectra(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest pairing distance between two unordered spectra.

    Uses minimal-weight bipartite assignment under complex modulus distance;
    eigensolvers return spectra in arbitrary order.
    """
    cost = np.abs(analytic[:, None] - numeric[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def unstable_mode_check(params: ModelParams) -> UnstableModeReport:
    """Decide whether the equidistribution fails to be purely attractive.

    Valid in the phase-transition region beta > 2, where the closed-form
    criterion ``beta (1 - (q/pi)^2 sin(pi/q)^2) < 2`` is equivalent to
    ``(q/2) c2 > 1`` and to ``Re(lambda_1) > 0``.
    """
    if params.beta <= 2.0:
        raise ValueError(f"unstable-mode criterion applies for beta > 2, got beta = {params.beta}")
    beta, q = params.beta, params.q
    criterion_value = beta * (1.0 - (q / np.pi) ** 2 * np.sin(np.pi / q) ** 2)
    spec = equidistribution_spectrum(params)
    return UnstableModeReport(
        not_purely_attractive=bool(criterion_value < 2.0),
        half_q_c2=q / 2.0 * spec.c2,
        criterion_value=criterion_value,
        spectral_unstable=bool(spec.eigenvalues[0].real > 0.0),
    )


def manifold_projectors(params: ModelParams) -> ManifoldProjectors:
    """Projectors onto the non-attractive (modes 1, q-1) and attractive
    (modes 2..q-2) Fourier subspaces of zero-sum perturbations."""
    q = params.q
    if q < 5:
        raise ValueError(f"mode split needs q >= 5, got {q}")
    diff = np.arange(q)[:, None] - np.arange(q)[None, :]
    unstable = (2.0 / q) * np.cos(TWO_PI * diff / q)
    identity_minus_mean = np.eye(q) - 1.0 / q
    return ManifoldProjectors(stable=identity_minus_mean - unstable, unstable=unstable)
