"""Outer-loop stabilizing controller, autopilot rate-loop model, and arm/head IK.

The outer loop commands total thrust and attitude-rate references the way a
commercial flight controller expects them: thrust cancels weight minus tether
pull plus an altitude PD term; the rate reference folds the CoM gravity-torque
compensation and an attitude PD through the modeled rate-loop gain. The
baseline variant drops only the CoM compensation term, which is the entire
difference measured in the disturbance-rejection comparison.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .body import BodyState, MassSummary
from .geometry import cross3, euler_rates_from_omega, wrap_angle
from .kinematics import Chain, chain_fk, geometric_jacobian
from .transmission import TendonConfigMatrix, motors_from_joints

E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class ControlGains:
    """Altitude PD, attitude PD, and modeled autopilot rate gain."""

    b1: float = 4.0                      # altitude damping, 1/s
    k1: float = 4.0                      # altitude stiffness, 1/s^2
    B2: np.ndarray = field(default_factory=lambda: np.diag([6.0, 6.0, 4.0]))
    K2: np.ndarray = field(default_factory=lambda: np.diag([9.0, 9.0, 4.0]))
    b_phi: np.ndarray = field(default_factory=lambda: np.array([8.0, 8.0, 8.0]))
    attitude_guard: float = math.radians(45.0)
    com_compensation_exact: bool = False  # use measured R in the gravity-torque term


@dataclass
class References:
    """Setpoints fed by the motion planner / teleoperation layer."""

    p_z_d: float = 0.0
    Phi_d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw_rate_d: float = 0.0
    x_d_left: np.ndarray | None = None    # end-effector targets, body frame
    x_d_right: np.ndarray | None = None
    head_R_d: np.ndarray | None = None
    hand_closure_d: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def copy(self) -> "References":
        return References(
            p_z_d=self.p_z_d,
            Phi_d=self.Phi_d.copy(),
            yaw_rate_d=self.yaw_rate_d,
            x_d_left=None if self.x_d_left is None else self.x_d_left.copy(),
            x_d_right=None if self.x_d_right is None else self.x_d_right.copy(),
            head_R_d=None if self.head_R_d is None else self.head_R_d.copy(),
            hand_closure_d=self.hand_closure_d.copy(),
        )


@dataclass
class IkSettings:
    """Weighted differential IK configuration for the arms."""

    K: np.ndarray = field(default_factory=lambda: np.diag([5.0, 5.0, 5.0]))
    W: np.ndarray = field(default_factory=lambda: np.eye(5))
    dt: float = 0.005
    damping: float = 0.02
    head_gain: float = 5.0


@dataclass
class OuterLoopCommand:
    """Autopilot-interface command: thrust plus Euler-rate reference."""

    T_s_d: float
    Phi_dot_d: np.ndarray
    guard_clamped: bool = False


def equilibrium_feedforward(summary: MassSummary, F_t, g: float):
    """Hover balance: thrust against weight minus vertical tether pull, and the
    moment holding the CoM offset."""
    F_t = np.asarray(F_t, dtype=float)
    T_bar = summary.m * g - F_t[2]
    M_bar = cross3(summary.c, summary.m * g * E3)
    return T_bar, M_bar


def outer_loop(state: BodyState, refs: References, gains: ControlGains,
               summary: MassSummary, F_t, g: float = 9.81) -> OuterLoopCommand:
    """Stabilizing control law in flight-controller form."""
    F_t = np.asarray(F_t, dtype=float)
    m, c, I_O = summary.m, summary.c, summary.I_O

    phi_dot = euler_rates_from_omega(state.Phi, state.omega)

    err = np.array([
        wrap_angle(state.Phi[0] - refs.Phi_d[0]),
        wrap_angle(state.Phi[1] - refs.Phi_d[1]),
        wrap_angle(state.Phi[2] - refs.Phi_d[2]),
    ])
    guard = gains.attitude_guard
    clamped = bool(abs(err[0]) > guard or abs(err[1]) > guard)
    if clamped:
        err[0] = min(max(err[0], -guard), guard)
        err[1] = min(max(err[1], -guard), guard)

    if gains.com_compensation_exact:
        grav_comp = cross3(c, state.R.T @ (m * g * E3))
    else:
        grav_comp = cross3(c, m * g * E3)
    M_d = grav_comp + I_O @ (-gains.B2 @ phi_dot - gains.K2 @ err)
    phi_dot_d = M_d / gains.b_phi + phi_dot

    T_s_d = m * g - F_t[2] + m * (-gains.b1 * state.v[2] - gains.k1 * (state.p[2] - refs.p_z_d))
    return OuterLoopCommand(T_s_d=float(T_s_d), Phi_dot_d=phi_dot_d, guard_clamped=clamped)


def baseline_attitude(state: BodyState, refs: References, gains: ControlGains,
                      summary: MassSummary, F_t, g: float = 9.81) -> OuterLoopCommand:
    """Built-in-autopilot stand-in: same law with no CoM gravity-torque term."""
    return outer_loop(state, refs, gains, summary.with_zero_com(), F_t, g)


def inner_loop_torque(phi_dot_d, phi_dot, gains: ControlGains) -> np.ndarray:
    """Torque the modeled autopilot rate loop produces for a rate error."""
    return gains.b_phi * (np.asarray(phi_dot_d) - np.asarray(phi_dot))


def weighted_pinv(J: np.ndarray, W: np.ndarray, damping: float) -> np.ndarray:
    """W-weighted right pseudo-inverse with damped-least-squares regularization.

    damping = 0 gives the exact weighted pseudo-inverse W^-1 J^T (J W^-1 J^T)^-1.
    """
    WiJt = np.linalg.solve(W, J.T)
    JWiJt = J @ WiJt
    if damping != 0.0:
        JWiJt = JWiJt + (damping * damping) * np.eye(J.shape[0])
    return WiJt @ np.linalg.inv(JWiJt)


def arm_ik_step(chain: Chain, q_a, x_d, settings: IkSettings) -> np.ndarray:
    """One discrete step of the weighted differential IK toward x_d (body frame)."""
    q_a = np.asarray(q_a, dtype=float)
    x_d = np.asarray(x_d, dtype=float)
    x_e = chain_fk(chain, q_a)[-1, :3, 3]
    # position rows of the Jacobian, rotated from the mount frame into the body frame
    J = chain.mount[:3, :3] @ geometric_jacobian(chain, q_a)[:3, :]
    q_dot = weighted_pinv(J, settings.W, settings.damping) @ (settings.K @ (x_d - x_e))
    return q_a + q_dot * settings.dt


def motor_targets(F: TendonConfigMatrix, q_a_d) -> np.ndarray:
    """Motor position references realizing the desired joint vector."""
    return motors_from_joints(F, q_a_d)


def boresight_angles(R: np.ndarray):
    """(yaw, pitch) of the head-frame x axis in the body frame."""
    f = R[:, 0]
    return math.atan2(f[1], f[0]), math.atan2(f[2], math.hypot(f[0], f[1]))


def head_ik_step(chain: Chain, q_h, head_R_d, dt: float, gain: float = 5.0) -> np.ndarray:
    """Proportional joint-space step steering the head boresight.

    The head only has yaw and pitch, so any roll component of the desired
    orientation is ignored. No weighting is needed: the neck motors drive the
    joints directly.
    """
    q_h = np.asarray(q_h, dtype=float)
    if head_R_d is None:
        return q_h.copy()
    yaw0, pitch0 = boresight_angles(chain_fk(chain, np.zeros(chain.dof))[-1, :3, :3])
    yaw_d, pitch_d = boresight_angles(np.asarray(head_R_d, dtype=float))
    err = np.array([
        wrap_angle(yaw_d - (q_h[0] + yaw0)),
        wrap_angle(pitch_d - (q_h[1] + pitch0)),
    ])
    return q_h + gain * dt * err
