"""Per-arc Gibbs integrals: closed forms, symmetries, and calculus identities."""

import numpy as np
import pytest
from scipy import special

from meanrotor import (
    ModelParams,
    arc,
    arc_covariance,
    arc_covariances,
    arc_log_partitions,
    arc_mean,
    arc_means,
    arc_partition_value,
    boundary_angles,
    circle_log_partition,
)


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(beta=-1.0, q=10)
    with pytest.raises(ValueError):
        ModelParams(beta=3.0, q=2)
    with pytest.raises(ValueError):
        ModelParams(beta=3.0, q=10, nodes_per_arc=4)
    with pytest.raises(ValueError):
        ModelParams(beta=np.inf, q=10)


def test_arc_geometry(params310):
    widths = [arc(params310, k).hi - arc(params310, k).lo for k in range(1, 11)]
    assert np.allclose(widths, 2 * np.pi / 10, rtol=0, atol=1e-15)
    assert arc(params310, 1).lo == 0.0
    assert np.isclose(arc(params310, 10).hi, 2 * np.pi)
    with pytest.raises(ValueError):
        arc(params310, 0)
    with pytest.raises(ValueError):
        arc(params310, 11)


def test_partition_value_at_zero_field(params310):
    # integrand is identically 1, so Z_k(0) = arc length
    z = arc_partition_value(params310, 1, (0.0, 0.0))
    assert abs(z - 2 * np.pi / 10) <= 1e-14
    all_z = np.exp(arc_log_partitions(params310, np.zeros(2)))
    assert np.ptp(all_z) <= 1e-15  # identical for every arc by symmetry


def test_partition_self_convergence(params310):
    # doubled-and-more resolution as reference, 1e-12 relative
    hi = ModelParams(beta=3.0, q=10, nodes_per_arc=128)
    for x in [(3.0, 0.0), (1.2, -2.0)]:
        z32 = arc_partition_value(params310, 1, x)
        z128 = arc_partition_value(hi, 1, x)
        assert abs(z32 - z128) / z128 <= 1e-12


def test_partition_accuracy_strong_field():
    # |x| = 200 at default base resolution: internal node escalation keeps
    # the relative error at 1e-12 against a much finer evaluation
    for q in (3, 10):
        lo = ModelParams(beta=3.0, q=q, nodes_per_arc=32)
        hi = ModelParams(beta=3.0, q=q, nodes_per_arc=512)
        x = 200.0 * np.array([np.cos(0.4), np.sin(0.4)])
        za = arc_log_partitions(lo, x)
        zb = arc_log_partitions(hi, x)
        assert np.abs(za - zb).max() <= 1e-12  # log difference = relative error


def test_partition_additivity(params310):
    # sum over the partition equals the full-circle integral 2 pi I_0(|x|)
    for r in (0.5, 3.0, 50.0, 200.0):
        x = r * np.array([np.cos(1.1), np.sin(1.1)])
        total = circle_log_partition(params310, x)
        bessel = np.log(2 * np.pi) + np.log(special.ive(0, r)) + r
        assert abs(total - bessel) <= 1e-12 * max(1.0, abs(bessel))


def test_invalid_field_rejected(params310):
    with pytest.raises(ValueError):
        arc_partition_value(params310, 1, (np.nan, 0.0))
    with pytest.raises(ValueError):
        arc_mean(params310, 1, (np.inf, 0.0))
    with pytest.raises(ValueError):
        arc_mean(params310, 1, (0.0, 0.0, 0.0))


def test_arc_mean_closed_form_at_zero(params310):
    # int_{S_1} e_w dw / (2 pi / q) has modulus (q/pi) sin(pi/q), direction pi/q
    q = 10
    m = arc_mean(params310, 1, (0.0, 0.0))
    mod = (q / np.pi) * np.sin(np.pi / q)
    expected = mod * np.array([np.cos(np.pi / q), np.sin(np.pi / q)])
    assert np.abs(m - expected).max() <= 1e-14
    assert np.hypot(*m) < 1.0


def test_arc_mean_rotation_covariance(params310):
    theta = 2 * np.pi / 10
    x = np.array([1.3, -0.4])
    for k in range(2, 11):
        lhs = arc_mean(params310, k, rot(theta) @ x)
        rhs = rot(theta) @ arc_mean(params310, k - 1, x)
        assert np.abs(lhs - rhs).max() <= 1e-13


def test_arc_mean_strong_field_in_cone(params310):
    m = arc_mean(params310, 1, (50.0, 0.0))
    hi = ModelParams(beta=3.0, q=10, nodes_per_arc=256)
    assert np.abs(m - arc_mean(hi, 1, (50.0, 0.0))).max() <= 1e-12
    assert np.hypot(*m) < 1.0
    angle = np.arctan2(m[1], m[0]) % (2 * np.pi)
    a = arc(params310, 1)
    assert a.lo <= angle <= a.hi  # mean direction inside the arc's cone


def test_covariance_trace_identity(params310):
    # cos^2 + sin^2 = 1 forces Var(cos) + Var(sin) = 1 - |m_k|^2
    for k in (1, 4, 7):
        cov = arc_covariance(params310, k, (0.0, 0.0))
        m = arc_mean(params310, k, (0.0, 0.0))
        assert abs(cov.a + cov.c - (1.0 - m @ m)) <= 1e-13


def test_covariance_rotation_conjugation(params310):
    c1 = arc_covariance(params310, 1, (0.0, 0.0)).matrix()
    for k in range(1, 11):
        theta = 2 * np.pi * (k - 1) / 10
        expected = rot(theta) @ c1 @ rot(theta).T
        got = arc_covariance(params310, k, (0.0, 0.0)).matrix()
        assert np.abs(got - expected).max() <= 1e-13


def test_covariance_is_mean_derivative(params310):
    # covariance = d m_k / d x, checked by central differences
    x = np.array([2.0, 1.0])
    cov = arc_covariance(params310, 3, x).matrix()
    h = 1e-5
    fd = np.empty((2, 2))
    for j in range(2):
        dx = np.zeros(2)
        dx[j] = h
        fd[:, j] = (arc_mean(params310, 3, x + dx) - arc_mean(params310, 3, x - dx)) / (2 * h)
    assert np.abs(cov - fd).max() <= 1e-6


def test_mean_is_log_partition_gradient(params310):
    x = np.array([-0.7, 1.9])
    h = 1e-5
    m = arc_mean(params310, 5, x)
    fd = np.empty(2)
    for j in range(2):
        dx = np.zeros(2)
        dx[j] = h
        fd[j] = (
            arc_log_partitions(params310, x + dx)[4]
            - arc_log_partitions(params310, x - dx)[4]
        ) / (2 * h)
    assert np.abs(m - fd).max() <= 1e-6


def test_covariance_positive_semidefinite(params310, rng):
    for _ in range(25):
        x = rng.normal(scale=3.0, size=2)
        cov = arc_covariances(params310, x)
        assert np.all(cov[:, 0] >= 0)
        assert np.all(cov[:, 2] >= 0)
        assert np.all(cov[:, 1] ** 2 <= cov[:, 0] * cov[:, 2] + 1e-13)


def test_full_rotation_equivariance(params310):
    # rotating x by one arc width and shifting k leaves everything invariant
    theta = 2 * np.pi / 10
    x = np.array([0.8, 2.2])
    rx = rot(theta) @ x
    z = arc_log_partitions(params310, x)
    zr = arc_log_partitions(params310, rx)
    assert np.abs(np.roll(z, 1) - zr).max() <= 1e-12
    m = arc_means(params310, x)
    mr = arc_means(params310, rx)
    assert np.abs(np.roll(m, 1, axis=0) @ rot(theta).T - mr).max() <= 1e-12


def test_boundary_angles(params310):
    ang = boundary_angles(params310)
    assert len(ang) == 10
    assert np.isclose(ang[0], 2 * np.pi / 10)
    assert np.isclose(ang[-1], 2 * np.pi)
