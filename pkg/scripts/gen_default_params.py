#!/usr/bin/env python3
"""Generate params/default.json.

Masses published for the platform: 9.5 kg hexacopter, 7.0 kg suspension rod,
2.2 kg per arm split 1.35 kg shoulder block + 0.85 kg distal, 15 kg
counterweight. Everything else (head mass, per-link splits, CoM offsets, link
inertias, mounts, gains) is a documented engineering estimate; the physics
code reads only the emitted JSON.

Link inertia model (also the contract for the point-discretization oracle in
tests): links spanning a segment are uniform thin rods; compact links are
small blocks/balls. The drone CoM x-offset is trimmed so the composite
horizontal CoM is exactly zero at the default (arms down) pose.
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from samadyn.geometry import euler_to_rot
from samadyn.kinematics import Chain, DhRow, chain_fk

EPS_INERTIA = 1e-5  # keeps degenerate (rod-axial) directions positive-definite

DH_ARM = [
    dict(a=0.0, alpha=-math.pi / 2, d=0.0, theta_offset=-math.pi / 2),
    dict(a=0.110, alpha=0.0, d=0.0, theta_offset=-math.pi / 2),
    dict(a=0.140, alpha=0.0, d=0.0, theta_offset=0.0),
    dict(a=0.0, alpha=math.pi / 2, d=0.0, theta_offset=math.pi / 2),
    dict(a=0.0, alpha=0.0, d=0.220, theta_offset=0.0),
]
DH_HEAD = [
    dict(a=0.0, alpha=math.pi / 2, d=0.056, theta_offset=math.pi / 2),
    dict(a=0.094, alpha=0.0, d=0.0, theta_offset=0.52),
]

ARM_MASSES = [1.35, 0.25, 0.22, 0.08, 0.30]   # shoulder block + distal split (sums to 2.2)
HEAD_MASSES = [0.35, 0.45]                     # neck unit + camera head (estimate)

# per-link CoM targets in the chain base frame at q = 0, all on the chain axis;
# segment links are uniform rods, so their CoM sits at the segment midpoint
ARM_COM_TARGETS = [
    [0.0, 0.0, 0.03],    # shoulder block, just below the mount
    [0.0, 0.0, 0.055],   # upper segment midpoint (0 -> 0.11)
    [0.0, 0.0, 0.18],    # mid segment midpoint (0.11 -> 0.25)
    [0.0, 0.0, 0.25],    # wrist-drive block at the joint cluster
    [0.0, 0.0, 0.36],    # forearm tube + hand, midpoint of 0.25 -> 0.47
]
HEAD_COM_TARGETS = [
    [0.0, 0.0, 0.028],   # neck riser midpoint
    None,                # camera link: midpoint of the a=0.094 member, set below
]

# rod segments (base-frame endpoints at q = 0) for thin-rod link inertias
ARM_SEGMENTS = {
    1: ([0.0, 0.0, 0.0], [0.0, 0.0, 0.110]),
    2: ([0.0, 0.0, 0.110], [0.0, 0.0, 0.250]),
    4: ([0.0, 0.0, 0.250], [0.0, 0.0, 0.470]),
}
HEAD_SEGMENTS = {
    0: ([0.0, 0.0, 0.0], [0.0, 0.0, 0.056]),
    1: ([0.0, 0.0, 0.056], [0.0, 0.094 * math.cos(0.52), 0.056 + 0.094 * math.sin(0.52)]),
}


def rod_inertia(mass, p0, p1):
    """Uniform thin rod between p0 and p1, about its center, frame-aligned."""
    p0, p1 = np.asarray(p0), np.asarray(p1)
    L = np.linalg.norm(p1 - p0)
    axis = (p1 - p0) / L
    return (mass * L**2 / 12.0) * (np.eye(3) - np.outer(axis, axis)) + EPS_INERTIA * np.eye(3)


def box_inertia(mass, dims):
    a, b, c = dims
    return np.diag([
        mass * (b**2 + c**2) / 12.0,
        mass * (a**2 + c**2) / 12.0,
        mass * (a**2 + b**2) / 12.0,
    ]) + EPS_INERTIA * np.eye(3)


def build_chain(rows_dicts):
    rows = tuple(DhRow(r["a"], r["alpha"], r["d"], r["theta_offset"]) for r in rows_dicts)
    return Chain(rows, np.eye(4))


def com_locals_and_inertias(chain, com_targets, masses, segments, block_dims):
    """Convert base-frame CoM targets and rod segments into link-frame data."""
    frames = chain_fk(chain, np.zeros(chain.dof))
    com_local, inertia_local = [], []
    for i in range(chain.dof):
        Ri = frames[i, :3, :3]
        pi = frames[i, :3, 3]
        target = np.asarray(com_targets[i])
        com_local.append(Ri.T @ (target - pi))
        if i in segments:
            p0, p1 = segments[i]
            I_base = rod_inertia(masses[i], p0, p1)
        else:
            I_base = box_inertia(masses[i], block_dims)
        inertia_local.append(Ri.T @ I_base @ Ri)
    return com_local, inertia_local


def main():
    out_path = Path(__file__).resolve().parents[1] / "params" / "default.json"

    arm_chain = build_chain(DH_ARM)
    head_chain = build_chain(DH_HEAD)

    head_frames = chain_fk(head_chain, np.zeros(2))
    # camera link CoM: midpoint of the a=0.094 member, expressed via frame 2
    cam_target = head_frames[1, :3, 3] + head_frames[1, :3, :3] @ np.array([-0.047, 0.0, 0.0])
    head_targets = [HEAD_COM_TARGETS[0], cam_target.tolist()]

    arm_com, arm_inertia = com_locals_and_inertias(
        arm_chain, ARM_COM_TARGETS, ARM_MASSES, ARM_SEGMENTS, (0.10, 0.08, 0.08))
    head_com, head_inertia = com_locals_and_inertias(
        head_chain, head_targets, HEAD_MASSES, HEAD_SEGMENTS, (0.09, 0.09, 0.09))

    mount_left = dict(pos=[0.0, 0.18, -0.10], rpy=[math.pi, 0.0, -math.pi / 2])
    mount_right = dict(pos=[0.0, -0.18, -0.10], rpy=[math.pi, 0.0, -math.pi / 2])
    mount_head = dict(pos=[0.10, 0.0, -0.08], rpy=[0.0, 0.0, -math.pi / 2])

    def mount_T(m):
        T = np.eye(4)
        T[:3, :3] = euler_to_rot(np.array(m["rpy"]))
        T[:3, 3] = m["pos"]
        return T

    # body-frame link CoMs at the default pose, for the trim computation
    link_masses = ARM_MASSES + ARM_MASSES + HEAD_MASSES
    coms_body = []
    for mnt, chain, locs in [
        (mount_left, arm_chain, arm_com),
        (mount_right, arm_chain, arm_com),
        (mount_head, head_chain, head_com),
    ]:
        T = mount_T(mnt)
        frames = chain_fk(Chain(chain.rows, T), np.zeros(chain.dof))
        for f, cl in zip(frames, locs):
            coms_body.append(f[:3, :3] @ cl + f[:3, 3])
    coms_body = np.array(coms_body)

    m_fb, m_rod = 9.5, 7.0
    p_rod = np.array([0.0, 0.0, 0.40])
    torso_moment = np.asarray(link_masses) @ coms_body  # kg*m, body frame
    # trim: battery/electronics placement chosen so the outfitted vehicle
    # balances (zero horizontal CoM) at the default pose
    p_fb = np.array([
        -(torso_moment[0] + m_rod * p_rod[0]) / m_fb,
        -(torso_moment[1] + m_rod * p_rod[1]) / m_fb,
        0.0,
    ])

    rod_len = 0.80
    I_rod_com = rod_inertia(m_rod, [0, 0, 0], [0, 0, rod_len])
    I_rod = I_rod_com + m_rod * (
        (p_rod @ p_rod) * np.eye(3) - np.outer(p_rod, p_rod)
    )

    params = {
        "schema": "samadyn-params-v1",
        "robot": {
            "m_fb": m_fb,
            "m_rod": m_rod,
            "p_fb": p_fb.tolist(),
            "p_rod": p_rod.tolist(),
            "I_fb": np.diag([0.55, 0.55, 1.00]).tolist(),
            "I_rod": I_rod.tolist(),
            "link_masses": link_masses,
            "link_com_local": [v.tolist() if hasattr(v, "tolist") else list(v)
                               for v in (arm_com + arm_com + head_com)],
            "link_inertia_local": [I.tolist() for I in (arm_inertia + arm_inertia + head_inertia)],
            "dh_arm": DH_ARM,
            "dh_head": DH_HEAD,
            "mount_left": mount_left,
            "mount_right": mount_right,
            "mount_head": mount_head,
            "r_m": 0.01,
            "r_j": 0.02,
            "l": 0.40,
            "g": 9.81,
            "thrust_max": 240.0,
            "moment_max": 60.0,
        },
        "gains": {
            "b1": 4.0,
            "k1": 4.0,
            "B2": [6.0, 6.0, 4.0],
            "K2": [9.0, 9.0, 4.0],
            "b_phi": [8.0, 8.0, 8.0],
            "attitude_guard_deg": 45.0,
            "com_compensation_exact": False,
        },
        "ik": {
            "K": [5.0, 5.0, 5.0],
            "W": [2.0, 1.0, 1.0, 1.0, 1.5],
            "dt": 0.005,
            "damping": 0.02,
            "head_gain": 5.0,
        },
        "tether": {
            "counterweight_mass": 15.0,
            "anchor_height": 1.0,
        },
        "rig": {
            "max_tilt": math.radians(30.0),
            "radial_limit": 0.052,
            "vertical_halfspan": 0.0425,
        },
        "sim": {
            "physics_dt": 0.001,
            "control_divisor": 5,
            "log_divisor": 10,
            "torso_time_constant": 0.15,
            "hand_time_constant": 0.10,
        },
    }

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as f:
        json.dump(params, f, indent=2)
        f.write("\n")
    print(f"wrote {out_path}")
    print(f"  total mass: {m_fb + m_rod + sum(link_masses):.3f} kg")
    print(f"  p_fb trim:  {p_fb}")


if __name__ == "__main__":
    main()
