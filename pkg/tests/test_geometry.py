import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from samadyn.geometry import (cross3, dexpinv, euler_rate_matrix,
                              euler_rates_from_omega, euler_to_rot,
                              orthonormalize, polar_project, rot_to_euler,
                              rot_to_rotvec, rotvec_to_rot, skew, wrap_angle)

finite = st.floats(-10.0, 10.0, allow_nan=False)


def test_skew_basis():
    # e3 x e1 = e2
    assert np.allclose(skew([0, 0, 1]) @ [1, 0, 0], [0, 1, 0])


def test_skew_zero():
    assert np.array_equal(skew([0.0, 0.0, 0.0]), np.zeros((3, 3)))


def test_skew_hand_example():
    # (0.1,0,0) x (0,0,196.2): componentwise cross-product formula gives (0,-19.62,0)
    out = skew([0.1, 0.0, 0.0]) @ np.array([0.0, 0.0, 196.2])
    assert np.allclose(out, [0.0, -19.62, 0.0], atol=1e-12)


@given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=3, max_size=3))
@settings(max_examples=100, deadline=None)
def test_skew_matches_cross(v, w):
    v, w = np.array(v), np.array(w)
    assert np.allclose(skew(v) @ w, np.cross(v, w), atol=1e-12)
    assert np.array_equal(skew(v).T, -skew(v))


def test_cross3_matches_numpy(rng):
    for _ in range(50):
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(cross3(a, b), np.cross(a, b), atol=1e-14)


def test_euler_convention_matches_scipy(rng):
    for _ in range(50):
        phi = rng.uniform(-math.pi, math.pi, 3)
        phi[1] = rng.uniform(-1.4, 1.4)  # stay away from the pitch singularity
        R_ref = Rotation.from_euler("ZYX", [phi[2], phi[1], phi[0]]).as_matrix()
        assert np.allclose(euler_to_rot(phi), R_ref, atol=1e-12)


def test_euler_roundtrip(rng):
    for _ in range(100):
        phi = np.array([rng.uniform(-3.1, 3.1), rng.uniform(-1.4, 1.4), rng.uniform(-3.1, 3.1)])
        back = rot_to_euler(euler_to_rot(phi))
        assert np.allclose(back, phi, atol=1e-10)


def test_euler_rate_matrix_finite_difference(rng):
    # omega = vee(R^T dR/dt) compared against E(phi) phidot
    h = 1e-7
    for _ in range(25):
        phi = np.array([rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)])
        phidot = rng.normal(size=3)
        R0 = euler_to_rot(phi - 0.5 * h * phidot)
        R1 = euler_to_rot(phi + 0.5 * h * phidot)
        W = euler_to_rot(phi).T @ ((R1 - R0) / h)
        omega_fd = np.array([W[2, 1], W[0, 2], W[1, 0]])
        assert np.allclose(euler_rate_matrix(phi) @ phidot, omega_fd, atol=1e-6)


def test_euler_rates_inverse_consistency(rng):
    for _ in range(50):
        phi = np.array([rng.uniform(-1.0, 1.0), rng.uniform(-1.2, 1.2), rng.uniform(-3.0, 3.0)])
        omega = rng.normal(size=3)
        rates = euler_rates_from_omega(phi, omega)
        assert np.allclose(euler_rate_matrix(phi) @ rates, omega, atol=1e-12)


def test_rotvec_matches_scipy(rng):
    for scale in (1e-9, 1e-4, 1.0, 3.0):
        for _ in range(20):
            v = rng.normal(size=3) * scale
            assert np.allclose(rotvec_to_rot(v), Rotation.from_rotvec(v).as_matrix(), atol=1e-12)


def test_rotvec_orthonormal(rng):
    for _ in range(50):
        R = rotvec_to_rot(rng.normal(size=3))
        assert np.linalg.norm(R.T @ R - np.eye(3)) < 1e-14


def test_rot_to_rotvec_roundtrip(rng):
    for _ in range(50):
        v = rng.normal(size=3)
        v = v / np.linalg.norm(v) * rng.uniform(1e-6, math.pi - 1e-3)
        assert np.allclose(rot_to_rotvec(rotvec_to_rot(v)), v, atol=1e-8)


def test_rot_to_rotvec_near_pi():
    v = np.array([0.0, 0.0, math.pi - 1e-9])
    back = rot_to_rotvec(rotvec_to_rot(v))
    assert np.allclose(np.abs(back), np.abs(v), atol=1e-6)


def test_dexpinv_identity_at_zero(rng):
    omega = rng.normal(size=3)
    assert np.allclose(dexpinv(np.zeros(3), omega), omega, atol=1e-15)


def test_dexpinv_reconstructs_flow(rng):
    # sigma(h) = sigma + h dexpinv(sigma, omega) must satisfy
    # exp(sigma(h)) ~ exp(sigma) exp(h omega) to second order in h
    def err(h):
        sigma = np.array([0.2, -0.1, 0.15])
        omega = np.array([0.4, 0.3, -0.5])
        lhs = rotvec_to_rot(sigma + h * dexpinv(sigma, omega))
        rhs = rotvec_to_rot(sigma) @ rotvec_to_rot(h * omega)
        return np.abs(lhs - rhs).max()

    e1, e2 = err(1e-3), err(5e-4)
    assert e1 / e2 > 3.0  # at least second-order local agreement


def test_orthonormalize_newton(rng):
    R = rotvec_to_rot(rng.normal(size=3)) + rng.normal(scale=1e-8, size=(3, 3))
    out = orthonormalize(R)
    assert np.linalg.norm(out.T @ out - np.eye(3)) < 1e-14


def test_polar_project_matches_svd(rng):
    M = rotvec_to_rot(rng.normal(size=3)) + rng.normal(scale=0.05, size=(3, 3))
    R = polar_project(M)
    assert np.linalg.norm(R.T @ R - np.eye(3)) < 1e-12
    assert np.linalg.det(R) > 0.0


@pytest.mark.parametrize("a,expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (math.pi + 0.1, -math.pi + 0.1),
])
def test_wrap_angle(a, expected):
    assert wrap_angle(a) == pytest.approx(expected, abs=1e-12)
