"""Rotation parametrizations and small linear-algebra helpers.

Euler angles are Z-Y-X intrinsic (yaw-pitch-roll): R = Rz(yaw) @ Ry(pitch) @ Rx(roll).
All functions are pure and operate on plain numpy arrays.
"""

import math

import numpy as np

E3 = np.array([0.0, 0.0, 1.0])

GIMBAL_GUARD = math.radians(80.0)  # |pitch| beyond this makes the Euler-rate map ill-conditioned


def skew(v) -> np.ndarray:
    """Skew-symmetric matrix S(v) such that S(v) @ w == cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def cross3(a, b) -> np.ndarray:
    """Cross product of two 3-vectors; avoids numpy's generic-axis overhead."""
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def euler_to_rot(phi: np.ndarray) -> np.ndarray:
    """Rotation matrix from (roll, pitch, yaw)."""
    cr, sr = math.cos(phi[0]), math.sin(phi[0])
    cp, sp = math.cos(phi[1]), math.sin(phi[1])
    cy, sy = math.cos(phi[2]), math.sin(phi[2])
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def rot_to_euler(R: np.ndarray) -> np.ndarray:
    """(roll, pitch, yaw) from a rotation matrix; pitch clipped away from +-pi/2."""
    sp = min(1.0, max(-1.0, -R[2, 0]))
    pitch = math.asin(sp)
    if abs(sp) > 0.999999:
        # gimbal neighborhood: roll/yaw not separable, pick yaw = 0
        return np.array([math.atan2(-R[0, 1], R[1, 1]), pitch, 0.0])
    roll = math.atan2(R[2, 1], R[2, 2])
    yaw = math.atan2(R[1, 0], R[0, 0])
    return np.array([roll, pitch, yaw])


def euler_rate_matrix(phi: np.ndarray) -> np.ndarray:
    """Map E with omega = E(phi) @ phidot (body rates from Euler-angle rates)."""
    cr, sr = math.cos(phi[0]), math.sin(phi[0])
    cp, sp = math.cos(phi[1]), math.sin(phi[1])
    return np.array([
        [1.0, 0.0, -sp],
        [0.0, cr, sr * cp],
        [0.0, -sr, cr * cp],
    ])


def euler_rates_from_omega(phi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Euler-angle rates from body angular velocity using the exact inverse map.

    Pitch is clamped to +-80 deg before inversion to stay away from the
    representation singularity.
    """
    pitch = phi[1]
    if abs(pitch) > GIMBAL_GUARD:
        pitch = math.copysign(GIMBAL_GUARD, pitch)
    cr, sr = math.cos(phi[0]), math.sin(phi[0])
    cp = math.cos(pitch)
    tp = math.tan(pitch)
    wx, wy, wz = omega[0], omega[1], omega[2]
    return np.array([
        wx + sr * tp * wy + cr * tp * wz,
        cr * wy - sr * wz,
        (sr * wy + cr * wz) / cp,
    ])


def rotvec_to_rot(sigma: np.ndarray) -> np.ndarray:
    """Rodrigues formula exp(S(sigma)), series expansion near zero angle."""
    x, y, z = float(sigma[0]), float(sigma[1]), float(sigma[2])
    angle2 = x * x + y * y + z * z
    if angle2 < 1e-14:
        # second-order series keeps orthonormality error at rounding level
        a, b = 1.0, 0.5
    else:
        angle = math.sqrt(angle2)
        a = math.sin(angle) / angle
        b = (1.0 - math.cos(angle)) / angle2
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    return np.array([
        [1.0 - b * (yy + zz), b * xy - a * z, b * xz + a * y],
        [b * xy + a * z, 1.0 - b * (xx + zz), b * yz - a * x],
        [b * xz - a * y, b * yz + a * x, 1.0 - b * (xx + yy)],
    ])


def rot_to_rotvec(R: np.ndarray) -> np.ndarray:
    """Logarithm of a rotation matrix as a rotation vector."""
    cos_angle = min(1.0, max(-1.0, 0.5 * (np.trace(R) - 1.0)))
    angle = math.acos(cos_angle)
    if angle < 1e-8:
        return 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if angle > math.pi - 1e-6:
        # near pi the antisymmetric part vanishes; take the axis from R + I
        k = int(np.argmax(np.diag(R)))
        v = R[:, k] + np.eye(3)[:, k]
        v = v / np.linalg.norm(v)
        return angle * v
    return (angle / (2.0 * math.sin(angle))) * np.array(
        [R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]
    )


def dexpinv(sigma: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Coordinate rate of R = R0 exp(S(sigma)) under Rdot = R S(omega).

    Right-trivialized inverse differential of the exponential map, truncated
    at O(|sigma|^3): sigma_dot = omega + sigma x omega / 2
    + sigma x (sigma x omega) / 12. Sufficient for fourth-order integration
    where |sigma| ~ |omega| * dt.
    """
    c1 = cross3(sigma, omega)
    return omega + 0.5 * c1 + (1.0 / 12.0) * cross3(sigma, c1)


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """One symmetric Newton step pulling R back onto SO(3).

    Contracts orthonormality error quadratically; adequate for drift at
    rounding level. Use polar_project for arbitrary matrices.
    """
    return R @ (1.5 * np.eye(3) - 0.5 * (R.T @ R))


def polar_project(M: np.ndarray) -> np.ndarray:
    """Closest rotation matrix to M in the Frobenius norm (polar factor)."""
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0.0:
        U[:, -1] = -U[:, -1]
        R = U @ Vt
    return R


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    return -((-a + math.pi) % (2.0 * math.pi) - math.pi)
