"""Suspended rigid-body plant: tether force, Newton-Euler wrench, and stepping.

Frame resolution of the full dynamics: the translational balance lives in the
inertial frame (thrust rotated out by R, CoM coupling terms rotated likewise),
the rotational balance in the body frame about the body origin. At identity
attitude the equations reduce to the near-equilibrium form used for control
design.
"""

import math
from dataclasses import dataclass

import numpy as np

from .body import BodyState, MassSummary, TorsoConfig, mass_properties
from .geometry import (cross3, dexpinv, orthonormalize, rot_to_euler,
                       rotvec_to_rot, skew)

_EYE3 = np.eye(3)


@dataclass
class Wrench:
    """Force and torque about the body origin, body-resolved."""

    F: np.ndarray
    tau: np.ndarray


@dataclass
class TetherParams:
    """Counterweight-over-pulley suspension acting at l e3 above the body origin."""

    anchor: np.ndarray
    counterweight_mass: float
    l: float

    def __post_init__(self):
        self.anchor = np.asarray(self.anchor, dtype=float)
        if self.counterweight_mass < 0.0:
            raise ValueError("counterweight mass must be >= 0")

    @classmethod
    def disabled(cls) -> "TetherParams":
        return cls(anchor=np.zeros(3), counterweight_mass=0.0, l=0.0)


@dataclass
class PlantInputs:
    """Lumped rotor commands: total thrust along body z and body moment."""

    T_s: float
    M: np.ndarray

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)

    def saturated(self, thrust_max: float, moment_max: float):
        """Clamped copy plus (thrust_hit, moment_hit) flags."""
        T = min(max(self.T_s, 0.0), thrust_max)
        M = np.clip(self.M, -moment_max, moment_max)
        return PlantInputs(T, M), (T != self.T_s, bool(np.any(M != self.M)))


def _tether_force(p, R, tether: TetherParams, g: float) -> np.ndarray:
    """Inertial-frame cable force; constant magnitude along the cable."""
    if tether.counterweight_mass == 0.0:
        return np.zeros(3)
    attach = p + tether.l * R[:, 2]
    d = tether.anchor - attach
    dist = math.sqrt(float(d @ d))
    if dist < 1e-9:
        raise ValueError("tether attachment coincides with the anchor")
    return (tether.counterweight_mass * g / dist) * d


def tether_force(state: BodyState, tether: TetherParams, g: float) -> np.ndarray:
    """Cable force on the vehicle in the inertial frame."""
    return _tether_force(state.p, state.R, tether, g)


def rigid_body_wrench(summary: MassSummary, omega, pddot, omegadot) -> Wrench:
    """Newton-Euler map about the body origin, all quantities body-resolved.

    pddot here is the body-resolved acceleration of the origin point.
    """
    omega = np.asarray(omega, dtype=float)
    pddot = np.asarray(pddot, dtype=float)
    omegadot = np.asarray(omegadot, dtype=float)
    m, c, I_O = summary.m, summary.c, summary.I_O
    Sc = skew(c)
    F = m * pddot - m * (Sc @ omegadot) - m * (skew(omega).T @ skew(omega) @ c)
    tau = m * (Sc @ pddot) + I_O @ omegadot + cross3(omega, I_O @ omega)
    return Wrench(F=F, tau=tau)


def _balance_rhs(R, omega, summary: MassSummary, T_s, M, F_t, g, l):
    """Right-hand sides of the translational (inertial) and rotational (body)
    balances, with velocity-product terms moved over."""
    m, c, I_O = summary.m, summary.c, summary.I_O
    centripetal = cross3(omega, cross3(omega, c))
    b1 = T_s * R[:, 2] + F_t - m * (R @ centripetal)
    b1[2] -= m * g
    Rt_Ft = R.T @ F_t
    # external moments about the origin: rotors, tether at l e3, gravity at the CoM
    b2 = (
        M
        + l * np.array([-Rt_Ft[1], Rt_Ft[0], 0.0])
        - m * g * cross3(c, R[2, :])
        - cross3(omega, I_O @ omega)
    )
    return b1, b2


def _com_inertia_inv(summary: MassSummary) -> np.ndarray:
    """Inverse of the CoM inertia, the Schur complement of the mass matrix."""
    Sc = skew(summary.c)
    return np.linalg.inv(summary.I_O + summary.m * (Sc @ Sc))


def _solve_accelerations(R, omega, summary, T_s, M, F_t, g, l, H_inv):
    """Block elimination of the coupled 6x6 balance.

    Eliminating pddot leaves H omegadot = b2 - S(c) R^T b1 with H the CoM
    inertia (always SPD), then pddot back-substitutes.
    """
    m, c = summary.m, summary.c
    b1, b2 = _balance_rhs(R, omega, summary, T_s, M, F_t, g, l)
    omegadot = H_inv @ (b2 - cross3(c, R.T @ b1))
    pddot = b1 / m + R @ cross3(c, omegadot)
    return pddot, omegadot


def accelerations(state: BodyState, summary: MassSummary, u: PlantInputs,
                  F_t, params) -> tuple:
    """(pddot, omegadot) of the suspended body under thrust, moment, and tether."""
    return _solve_accelerations(
        state.R, state.omega, summary, u.T_s, u.M,
        np.asarray(F_t, dtype=float), params.g, params.l,
        _com_inertia_inv(summary),
    )


def _stage_accel(Rs, omega, m, c, I_O, H_inv, T_s, M, F_t, g, l):
    """Scalar-unrolled twin of _solve_accelerations for the integrator hot loop."""
    r00, r01, r02 = Rs[0, 0], Rs[0, 1], Rs[0, 2]
    r10, r11, r12 = Rs[1, 0], Rs[1, 1], Rs[1, 2]
    r20, r21, r22 = Rs[2, 0], Rs[2, 1], Rs[2, 2]
    wx, wy, wz = omega[0], omega[1], omega[2]
    cx, cy, cz = c[0], c[1], c[2]
    fx, fy, fz = F_t[0], F_t[1], F_t[2]
    mx, my, mz = M[0], M[1], M[2]

    # centripetal = w x (w x c)
    ux = wy * cz - wz * cy
    uy = wz * cx - wx * cz
    uz = wx * cy - wy * cx
    ax = wy * uz - wz * uy
    ay = wz * ux - wx * uz
    az = wx * uy - wy * ux

    # translational rhs, inertial frame
    b1x = T_s * r02 + fx - m * (r00 * ax + r01 * ay + r02 * az)
    b1y = T_s * r12 + fy - m * (r10 * ax + r11 * ay + r12 * az)
    b1z = T_s * r22 + fz - m * (r20 * ax + r21 * ay + r22 * az) - m * g

    # rotational rhs, body frame
    tfx = r00 * fx + r10 * fy + r20 * fz   # R^T F_t
    tfy = r01 * fx + r11 * fy + r21 * fz
    tfz = r02 * fx + r12 * fy + r22 * fz
    iwx = I_O[0, 0] * wx + I_O[0, 1] * wy + I_O[0, 2] * wz
    iwy = I_O[1, 0] * wx + I_O[1, 1] * wy + I_O[1, 2] * wz
    iwz = I_O[2, 0] * wx + I_O[2, 1] * wy + I_O[2, 2] * wz
    mg = m * g
    b2x = mx - l * tfy - mg * (cy * r22 - cz * r21) - (wy * iwz - wz * iwy)
    b2y = my + l * tfx - mg * (cz * r20 - cx * r22) - (wz * iwx - wx * iwz)
    b2z = mz - mg * (cx * r21 - cy * r20) - (wx * iwy - wy * iwx)

    # eliminate pddot: H omegadot = b2 - c x (R^T b1)
    qx = r00 * b1x + r10 * b1y + r20 * b1z
    qy = r01 * b1x + r11 * b1y + r21 * b1z
    qz = r02 * b1x + r12 * b1y + r22 * b1z
    ex = b2x - (cy * qz - cz * qy)
    ey = b2y - (cz * qx - cx * qz)
    ez = b2z - (cx * qy - cy * qx)
    wdx = H_inv[0, 0] * ex + H_inv[0, 1] * ey + H_inv[0, 2] * ez
    wdy = H_inv[1, 0] * ex + H_inv[1, 1] * ey + H_inv[1, 2] * ez
    wdz = H_inv[2, 0] * ex + H_inv[2, 1] * ey + H_inv[2, 2] * ez

    # back-substitute: pddot = b1/m + R (c x omegadot)
    sx = cy * wdz - cz * wdy
    sy = cz * wdx - cx * wdz
    sz = cx * wdy - cy * wdx
    pdd = np.array([
        b1x / m + r00 * sx + r01 * sy + r02 * sz,
        b1y / m + r10 * sx + r11 * sy + r12 * sz,
        b1z / m + r20 * sx + r21 * sy + r22 * sz,
    ])
    return pdd, np.array([wdx, wdy, wdz])


def step(state: BodyState, u: PlantInputs, torso_cmd: TorsoConfig, dt: float,
         params, tether: TetherParams, mass_fn=None, hand_cmd=None,
         torso_tau: float = 0.15, hand_tau: float = 0.10) -> BodyState:
    """One fixed-step integration of the floating base plus torso tracking.

    The rigid-body state (p, v, R, omega) advances with a fourth-order
    Runge-Kutta step formulated in exponential coordinates around the current
    attitude, so R stays on the rotation group (re-orthonormalized against
    rounding drift). The torso follows torso_cmd through an exact first-order
    lag; the mass distribution is held quasi-static within the step.
    """
    if not (0.0 < dt <= 0.01):
        raise ValueError("dt must be in (0, 0.01]")
    if mass_fn is None:
        summary = mass_properties(params, state.torso)
    else:
        summary = mass_fn(state.torso)

    R0 = state.R
    g, l = params.g, params.l
    T_s, M = u.T_s, u.M
    H_inv = _com_inertia_inv(summary)
    m, c, I_O = summary.m, summary.c, summary.I_O

    def rates(p, v, sigma, omega):
        Rs = R0 @ rotvec_to_rot(sigma)
        F_t = _tether_force(p, Rs, tether, g)
        pdd, wdd = _stage_accel(Rs, omega, m, c, I_O, H_inv, T_s, M, F_t, g, l)
        return v, pdd, dexpinv(sigma, omega), wdd

    p0, v0, w0 = state.p, state.v, state.omega
    s0 = np.zeros(3)

    k1 = rates(p0, v0, s0, w0)
    h = 0.5 * dt
    k2 = rates(p0 + h * k1[0], v0 + h * k1[1], s0 + h * k1[2], w0 + h * k1[3])
    k3 = rates(p0 + h * k2[0], v0 + h * k2[1], s0 + h * k2[2], w0 + h * k2[3])
    k4 = rates(p0 + dt * k3[0], v0 + dt * k3[1], s0 + dt * k3[2], w0 + dt * k3[3])

    sixth = dt / 6.0
    p1 = p0 + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v1 = v0 + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    s1 = sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    w1 = w0 + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    R1 = orthonormalize(R0 @ rotvec_to_rot(s1))

    # torso joint tracking: exact solution of the first-order lag over dt
    decay = math.exp(-dt / torso_tau)
    q_cmd = torso_cmd.vector()
    q0 = state.torso.vector()
    q1 = q_cmd + (q0 - q_cmd) * decay
    torso1 = TorsoConfig.from_vector(q1)
    rate1 = (q_cmd - q1) / torso_tau

    hand1 = state.hand_closure
    if hand_cmd is not None:
        h_decay = math.exp(-dt / hand_tau)
        hand1 = hand_cmd + (state.hand_closure - hand_cmd) * h_decay

    new = BodyState(
        p=p1, R=R1, Phi=rot_to_euler(R1), v=v1, omega=w1,
        torso=torso1, torso_rate=rate1, hand_closure=np.asarray(hand1, dtype=float),
    )
    if not (np.isfinite(p1).all() and np.isfinite(v1).all()
            and np.isfinite(w1).all() and np.isfinite(R1).all()):
        raise FloatingPointError("simulation state diverged (non-finite values)")
    return new
