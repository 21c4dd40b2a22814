"""Small helpers for probability vectors on {1..q} and zero-sum perturbations."""

import numpy as np

SIMPLEX_TOL = 1e-12


def equidistribution(q: int) -> np.ndarray:
    return np.full(q, 1.0 / q)


def dirac(q: int, k: int) -> np.ndarray:
    """Point mass on arc ``k`` (1-based)."""
    if not 1 <= k <= q:
        raise ValueError(f"arc index must be in 1..{q}, got {k}")
    nu = np.zeros(q)
    nu[k - 1] = 1.0
    return nu


def as_simplex(nu, q: int | None = None, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate and return a clean copy of a probability vector.

    Entries below zero by at most ``tol`` are clamped to 0 and the vector is
    renormalized; anything worse raises ``ValueError``.
    """
    nu = np.asarray(nu, dtype=float)
    if nu.ndim != 1 or (q is not None and nu.shape[0] != q):
        raise ValueError(f"expected a probability vector of length {q}, got shape {nu.shape}")
    if not np.all(np.isfinite(nu)):
        raise ValueError("probability vector has non-finite entries")
    if nu.min() < -tol:
        raise ValueError(f"negative weight {nu.min()} below tolerance {-tol}")
    s = nu.sum()
    if abs(s - 1.0) > max(tol, 1e-9):
        raise ValueError(f"weights sum to {s}, not 1")
    nu = np.clip(nu, 0.0, None)
    return nu / nu.sum()


def tv_distance(a, b) -> float:
    """Total variation distance: half the l1 distance."""
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())


def cyclic_shift(nu, steps: int = 1) -> np.ndarray:
    """Shift mass by ``steps`` arcs in the rotation direction (k -> k+steps)."""
    return np.roll(np.asarray(nu), steps)


def random_interior(q: int, rng, min_weight: float = 0.0) -> np.ndarray:
    """Dirichlet(1,...,1) sample, optionally resampled until all weights clear a floor."""
    while True:
        nu = rng.dirichlet(np.ones(q))
        if nu.min() > min_weight:
            return nu


def fourier_mode(q: int, j: int, phase: float = 0.0) -> np.ndarray:
    """Real zero-sum vector ``cos(2*pi*j*k/q + phase)`` over ``k = 1..q``."""
    if not 1 <= j <= q - 1:
        raise ValueError(f"mode index must be in 1..{q - 1}, got {j}")
    k = np.arange(1, q + 1)
    v = np.cos(2.0 * np.pi * j * k / q + phase)
    return v - v.mean()


def check_zero_sum(u, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("vector has non-finite entries")
    if abs(u.sum()) > tol * max(1.0, np.abs(u).max()):
        raise ValueError(f"vector must sum to zero, got sum {u.sum()}")
    return u
