"""Forward kinematics, Jacobians, and link CoM placement for the torso chains.

Chains use the standard (distal) Denavit-Hartenberg convention:
    A_i(q) = Rz(theta_offset + q) @ Tz(d) @ Tx(a) @ Rx(alpha)
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DhRow:
    """One Denavit-Hartenberg row; theta_offset is the constant part of theta."""

    a: float
    alpha: float
    d: float
    theta_offset: float


@dataclass(frozen=True)
class Chain:
    """Serial revolute chain with a fixed mounting pose in the parent frame."""

    rows: tuple
    mount: np.ndarray  # 4x4 homogeneous pose of the chain base

    def __post_init__(self):
        if self.mount.shape != (4, 4):
            raise ValueError("mount must be a 4x4 homogeneous transform")

    @property
    def dof(self) -> int:
        return len(self.rows)


def dh_transform(row: DhRow, q: float) -> np.ndarray:
    """Homogeneous transform of one DH row at joint angle q."""
    ct = math.cos(row.theta_offset + q)
    st = math.sin(row.theta_offset + q)
    ca = math.cos(row.alpha)
    sa = math.sin(row.alpha)
    return np.array([
        [ct, -st * ca, st * sa, row.a * ct],
        [st, ct * ca, -ct * sa, row.a * st],
        [0.0, sa, ca, row.d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def chain_fk(chain: Chain, q) -> np.ndarray:
    """Cumulative frames of every link, mount included.

    Returns an (n, 4, 4) array; frame i is the pose of link i's frame in the
    parent (body) frame. The last frame is the end effector.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint angles, got shape {q.shape}")
    frames = np.empty((chain.dof, 4, 4))
    T = chain.mount
    for i, (row, qi) in enumerate(zip(chain.rows, q)):
        T = T @ dh_transform(row, qi)
        frames[i] = T
    return frames


def end_effector(chain: Chain, q) -> np.ndarray:
    """End-effector position in the parent frame."""
    return chain_fk(chain, q)[-1, :3, 3]


def geometric_jacobian(chain: Chain, q) -> np.ndarray:
    """6xN geometric Jacobian (linear over angular), expressed in the mount frame.

    Column i is (z_{i-1} x (p_e - p_{i-1}); z_{i-1}) for revolute joint i.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint angles, got shape {q.shape}")
    n = chain.dof
    # frames relative to the mount
    local = Chain(chain.rows, np.eye(4))
    frames = chain_fk(local, q)
    p_e = frames[-1, :3, 3]
    J = np.empty((6, n))
    z_prev = np.array([0.0, 0.0, 1.0])
    p_prev = np.zeros(3)
    for i in range(n):
        J[:3, i] = np.cross(z_prev, p_e - p_prev)
        J[3:, i] = z_prev
        z_prev = frames[i, :3, 2]
        p_prev = frames[i, :3, 3]
    return J


def link_com_world(chain: Chain, q, com_local) -> np.ndarray:
    """Per-link CoM positions mapped into the parent frame.

    com_local holds one 3-vector per link, expressed in that link's frame.
    """
    com_local = np.asarray(com_local, dtype=float)
    if com_local.shape != (chain.dof, 3):
        raise ValueError(f"expected {chain.dof} local CoM vectors, got shape {com_local.shape}")
    frames = chain_fk(chain, q)
    return np.einsum("nij,nj->ni", frames[:, :3, :3], com_local) + frames[:, :3, 3]
