"""Composite-body state types and mass/CoM/inertia aggregation.

The vehicle is treated as one rigid body whose mass distribution depends on
the instantaneous torso configuration: total mass is the sum of drone, rod,
and link masses; the CoM is their mass-weighted mean; the inertia about the
body origin collects each link's inertia transported by rotation and
parallel-axis shift.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import euler_to_rot, rot_to_euler
from .kinematics import chain_fk

ARM_DOF = 5
HEAD_DOF = 2
TORSO_DOF = 12


@dataclass
class TorsoConfig:
    """Joint angles of the humanoid torso: two 5-DoF arms and a 2-DoF head."""

    q_la: np.ndarray
    q_ra: np.ndarray
    q_h: np.ndarray

    def __post_init__(self):
        self.q_la = np.asarray(self.q_la, dtype=float).reshape(ARM_DOF)
        self.q_ra = np.asarray(self.q_ra, dtype=float).reshape(ARM_DOF)
        self.q_h = np.asarray(self.q_h, dtype=float).reshape(HEAD_DOF)

    @classmethod
    def zeros(cls) -> "TorsoConfig":
        return cls(np.zeros(ARM_DOF), np.zeros(ARM_DOF), np.zeros(HEAD_DOF))

    @classmethod
    def from_vector(cls, v) -> "TorsoConfig":
        v = np.asarray(v, dtype=float).reshape(TORSO_DOF)
        return cls(v[:5], v[5:10], v[10:])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.q_la, self.q_ra, self.q_h])

    def copy(self) -> "TorsoConfig":
        return TorsoConfig(self.q_la.copy(), self.q_ra.copy(), self.q_h.copy())


@dataclass
class BodyState:
    """Floating-base pose/velocity plus torso joints and hand closures.

    p, v are inertial; omega is body-frame; Phi = (roll, pitch, yaw) is kept
    consistent with R (Z-Y-X intrinsic convention).
    """

    p: np.ndarray
    R: np.ndarray
    Phi: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    torso: TorsoConfig
    torso_rate: np.ndarray = field(default_factory=lambda: np.zeros(TORSO_DOF))
    hand_closure: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @classmethod
    def hover(cls, p=(0.0, 0.0, 0.0), torso: TorsoConfig | None = None) -> "BodyState":
        """At-rest state with identity attitude."""
        return cls(
            p=np.asarray(p, dtype=float).copy(),
            R=np.eye(3),
            Phi=np.zeros(3),
            v=np.zeros(3),
            omega=np.zeros(3),
            torso=torso.copy() if torso is not None else TorsoConfig.zeros(),
        )

    def copy(self) -> "BodyState":
        return BodyState(
            p=self.p.copy(), R=self.R.copy(), Phi=self.Phi.copy(),
            v=self.v.copy(), omega=self.omega.copy(), torso=self.torso.copy(),
            torso_rate=self.torso_rate.copy(), hand_closure=self.hand_closure.copy(),
        )

    def orthonormality_error(self) -> float:
        return float(np.linalg.norm(self.R.T @ self.R - np.eye(3)))

    def euler_roundtrip_error(self) -> float:
        return float(np.abs(euler_to_rot(self.Phi) - self.R).max())

    def require_valid(self, tol: float = 1e-9):
        vals = np.concatenate([self.p, self.v, self.omega, self.R.ravel(), self.torso.vector()])
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("non-finite body state")
        if self.orthonormality_error() > tol:
            raise ValueError("rotation matrix drifted off SO(3)")


@dataclass
class MassSummary:
    """Total mass, CoM, and inertia about the body origin for one torso pose."""

    m: float
    c: np.ndarray
    I_O: np.ndarray

    def with_zero_com(self) -> "MassSummary":
        return MassSummary(self.m, np.zeros(3), self.I_O)


def aggregate_mass(params) -> float:
    """Total mass: drone + suspension rod + every torso link."""
    return float(params.m_fb + params.m_rod + params.link_masses.sum())


def aggregate_com(params, torso: TorsoConfig, link_coms) -> np.ndarray:
    """Mass-weighted CoM in the body frame.

    link_coms are the 12 body-frame link CoM positions (left arm, right arm,
    head order) as produced by kinematics.link_com_world.
    """
    link_coms = np.asarray(link_coms, dtype=float).reshape(TORSO_DOF, 3)
    m = aggregate_mass(params)
    weighted = (
        params.m_fb * params.p_fb
        + params.m_rod * params.p_rod
        + params.link_masses @ link_coms
    )
    return weighted / m


def aggregate_inertia(params, torso: TorsoConfig, link_poses) -> np.ndarray:
    """Inertia about the body origin: base + rod + transported link inertias.

    link_poses are the 12 link frames (4x4, body frame, arm/arm/head order).
    Each link contributes R I_local R^T plus the parallel-axis term of a point
    mass at its CoM.
    """
    link_poses = np.asarray(link_poses, dtype=float).reshape(TORSO_DOF, 4, 4)
    Rs = link_poses[:, :3, :3]
    coms = np.einsum("nij,nj->ni", Rs, params.link_com_local) + link_poses[:, :3, 3]
    rotated = np.einsum("nij,njk,nlk->nil", Rs, params.link_inertia_local, Rs)
    m = params.link_masses
    r2 = np.einsum("ni,ni->n", coms, coms)
    parallel = m[:, None, None] * (
        r2[:, None, None] * np.eye(3) - np.einsum("ni,nj->nij", coms, coms)
    )
    return params.I_fb + params.I_rod + rotated.sum(axis=0) + parallel.sum(axis=0)


def torso_link_frames(params, torso: TorsoConfig) -> np.ndarray:
    """All 12 torso link frames in the body frame (arm, arm, head order)."""
    return np.concatenate([
        chain_fk(params.chain_left(), torso.q_la),
        chain_fk(params.chain_right(), torso.q_ra),
        chain_fk(params.chain_head(), torso.q_h),
    ])


def mass_properties(params, torso: TorsoConfig) -> MassSummary:
    """MassSummary for the given torso pose (runs the three chain FKs)."""
    frames = torso_link_frames(params, torso)
    Rs = frames[:, :3, :3]
    coms = np.einsum("nij,nj->ni", Rs, params.link_com_local) + frames[:, :3, 3]
    m = aggregate_mass(params)
    c = (
        params.m_fb * params.p_fb
        + params.m_rod * params.p_rod
        + params.link_masses @ coms
    ) / m
    rotated = np.einsum("nij,njk,nlk->nil", Rs, params.link_inertia_local, Rs)
    lm = params.link_masses
    r2 = np.einsum("ni,ni->n", coms, coms)
    parallel = lm[:, None, None] * (
        r2[:, None, None] * np.eye(3) - np.einsum("ni,nj->nij", coms, coms)
    )
    I_O = params.I_fb + params.I_rod + rotated.sum(axis=0) + parallel.sum(axis=0)
    return MassSummary(m=m, c=c, I_O=I_O)


class MassPropertiesCache:
    """Memoizes mass_properties by torso joint vector.

    The torso is quasi-static within a physics step, and scenarios frequently
    hold it constant, so this is the hot path's main save.
    """

    def __init__(self, params, maxsize: int = 4096):
        self._params = params
        self._cache: dict = {}
        self._maxsize = maxsize

    def __call__(self, torso: TorsoConfig) -> MassSummary:
        key = torso.vector().tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        summary = mass_properties(self._params, torso)
        if len(self._cache) >= self._maxsize:
            self._cache.clear()
        self._cache[key] = summary
        return summary


def state_euler_from_rot(R: np.ndarray) -> np.ndarray:
    """Re-extract Euler angles after an integration step."""
    return rot_to_euler(R)
