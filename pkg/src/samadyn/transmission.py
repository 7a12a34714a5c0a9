"""Tendon differential drive mapping six motors onto the five arm joints.

The shoulder (joint 1) and wrist (joint 5) are driven directly; the three
middle joints are moved by four tendons in a differential arrangement, scaled
by the pulley transmission ratio r = r_m / r_j.
"""

from dataclasses import dataclass, field

import numpy as np

N_JOINTS = 5
N_MOTORS = 6


def transmission_ratio(r_m: float, r_j: float) -> float:
    """Pulley ratio from motor pulley radius to joint pulley radius."""
    if r_j <= 0.0:
        raise ValueError("joint pulley radius must be > 0")
    return r_m / r_j


def _config_matrix(r: float) -> np.ndarray:
    return np.array([
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, r, -r, 0.0, 0.0, 0.0],
        [0.0, 0.0, r, -r, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, r, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ])


@dataclass
class TendonConfigMatrix:
    """5x6 motor-to-joint projection of the tendon routing."""

    r: float
    F: np.ndarray = field(init=False)
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError("transmission ratio must be > 0")
        self.F = _config_matrix(self.r)
        if np.linalg.matrix_rank(self.F) != N_JOINTS:
            raise ValueError("configuration matrix lost full row rank")
        self._pinv = np.linalg.pinv(self.F)

    @classmethod
    def from_radii(cls, r_m: float, r_j: float) -> "TendonConfigMatrix":
        return cls(transmission_ratio(r_m, r_j))


def joints_from_motors(F: TendonConfigMatrix, q_m) -> np.ndarray:
    """Joint angles realized by the given motor angles: q_a = F q_m."""
    q_m = np.asarray(q_m, dtype=float)
    if q_m.shape != (N_MOTORS,):
        raise ValueError(f"expected {N_MOTORS} motor angles, got shape {q_m.shape}")
    return F.F @ q_m


def motors_from_joints(F: TendonConfigMatrix, q_a) -> np.ndarray:
    """Minimum-norm motor angles realizing the given joints: q_m = F^+ q_a."""
    q_a = np.asarray(q_a, dtype=float)
    if q_a.shape != (N_JOINTS,):
        raise ValueError(f"expected {N_JOINTS} joint angles, got shape {q_a.shape}")
    return F._pinv @ q_a
