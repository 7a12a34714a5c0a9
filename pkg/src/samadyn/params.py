"""Parameter-file schema, loading, and validation.

Everything physical lives in a JSON parameter file (see params/default.json);
no module hard-codes masses, geometry, or gains. Units are SI throughout:
kg, m, s, rad, N, N*m.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import euler_to_rot
from .kinematics import Chain, DhRow

SCHEMA_ID = "samadyn-params-v1"

# q_lb layout: left arm 5, right arm 5, head 2
ARM_DOF = 5
HEAD_DOF = 2
TORSO_DOF = 2 * ARM_DOF + HEAD_DOF


def _pose(pos, rpy) -> np.ndarray:
    T = np.eye(4)
    T[:3, :3] = euler_to_rot(np.asarray(rpy, dtype=float))
    T[:3, 3] = np.asarray(pos, dtype=float)
    return T


@dataclass
class RobotParams:
    """Masses, geometry, and actuation limits of the composite vehicle.

    Inertia conventions: I_fb and I_rod are taken about the body origin in the
    body frame; link_inertia_local entries are about each link's CoM in the
    link frame.
    """

    m_fb: float
    m_rod: float
    link_masses: np.ndarray          # (12,)
    link_com_local: np.ndarray       # (12, 3)
    link_inertia_local: np.ndarray   # (12, 3, 3)
    I_fb: np.ndarray                 # (3, 3)
    I_rod: np.ndarray                # (3, 3)
    p_fb: np.ndarray                 # (3,)
    p_rod: np.ndarray                # (3,)
    dh_arm: tuple                    # 5 DhRow
    dh_head: tuple                   # 2 DhRow
    mount_left: np.ndarray           # 4x4
    mount_right: np.ndarray          # 4x4
    mount_head: np.ndarray           # 4x4
    r_m: float
    r_j: float
    l: float                         # tether attachment height above body origin, body z
    g: float
    thrust_max: float
    moment_max: float
    _chains: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def transmission_ratio(self) -> float:
        return self.r_m / self.r_j

    def chain_left(self) -> Chain:
        return self._chain("left", self.dh_arm, self.mount_left)

    def chain_right(self) -> Chain:
        return self._chain("right", self.dh_arm, self.mount_right)

    def chain_head(self) -> Chain:
        return self._chain("head", self.dh_head, self.mount_head)

    def _chain(self, key, rows, mount) -> Chain:
        if key not in self._chains:
            self._chains[key] = Chain(tuple(rows), mount)
        return self._chains[key]


@dataclass
class SimRates:
    """Fixed stepping cadence: physics 1 kHz, control 200 Hz, logging 100 Hz."""

    physics_dt: float = 1e-3
    control_divisor: int = 5
    log_divisor: int = 10
    torso_time_constant: float = 0.15   # first-order joint tracking lag, s
    hand_time_constant: float = 0.10

    @property
    def control_dt(self) -> float:
        return self.physics_dt * self.control_divisor


@dataclass
class TetherConfig:
    """Counterweight suspension: anchor sits anchor_height above the attachment."""

    counterweight_mass: float = 15.0
    anchor_height: float = 1.0


@dataclass
class RigLimits:
    """Indoor test-rig envelope: tilt, radial, and vertical clamps."""

    max_tilt: float = 0.5235987755982988       # 30 deg
    radial_limit: float = 0.052
    vertical_halfspan: float = 0.0425


@dataclass
class ParameterSet:
    """One loaded parameter file: robot, gains, IK settings, rig, rates."""

    robot: RobotParams
    gains: "ControlGains"
    ik: "IkSettings"
    tether: TetherConfig
    rig: RigLimits
    sim: SimRates
    source: dict = field(repr=False, default_factory=dict)

    @property
    def sha256(self) -> str:
        return params_hash(self.source)

    def make_tether(self, home: np.ndarray) -> "TetherParams":
        """Tether anchored directly above the attachment point at the home pose."""
        from .dynamics import TetherParams

        anchor = np.asarray(home, dtype=float) + np.array(
            [0.0, 0.0, self.robot.l + self.tether.anchor_height]
        )
        return TetherParams(
            anchor=anchor,
            counterweight_mass=self.tether.counterweight_mass,
            l=self.robot.l,
        )


def canonical_json(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def params_hash(d: dict) -> str:
    return hashlib.sha256(canonical_json(d).encode()).hexdigest()


def _dh_rows(entries) -> tuple:
    return tuple(
        DhRow(a=float(e["a"]), alpha=float(e["alpha"]), d=float(e["d"]),
              theta_offset=float(e["theta_offset"]))
        for e in entries
    )


def robot_from_dict(d: dict) -> RobotParams:
    return RobotParams(
        m_fb=float(d["m_fb"]),
        m_rod=float(d["m_rod"]),
        link_masses=np.asarray(d["link_masses"], dtype=float),
        link_com_local=np.asarray(d["link_com_local"], dtype=float),
        link_inertia_local=np.asarray(d["link_inertia_local"], dtype=float),
        I_fb=np.asarray(d["I_fb"], dtype=float),
        I_rod=np.asarray(d["I_rod"], dtype=float),
        p_fb=np.asarray(d["p_fb"], dtype=float),
        p_rod=np.asarray(d["p_rod"], dtype=float),
        dh_arm=_dh_rows(d["dh_arm"]),
        dh_head=_dh_rows(d["dh_head"]),
        mount_left=_pose(d["mount_left"]["pos"], d["mount_left"]["rpy"]),
        mount_right=_pose(d["mount_right"]["pos"], d["mount_right"]["rpy"]),
        mount_head=_pose(d["mount_head"]["pos"], d["mount_head"]["rpy"]),
        r_m=float(d["r_m"]),
        r_j=float(d["r_j"]),
        l=float(d["l"]),
        g=float(d["g"]),
        thrust_max=float(d["thrust_max"]),
        moment_max=float(d["moment_max"]),
    )


def params_from_dict(d: dict) -> ParameterSet:
    from .control import ControlGains, IkSettings

    findings = validate_params_dict(d)
    if findings:
        raise ValueError("invalid parameter file:\n" + "\n".join(findings))
    g = d["gains"]
    gains = ControlGains(
        b1=float(g["b1"]),
        k1=float(g["k1"]),
        B2=np.diag(np.asarray(g["B2"], dtype=float)),
        K2=np.diag(np.asarray(g["K2"], dtype=float)),
        b_phi=np.asarray(g["b_phi"], dtype=float),
        attitude_guard=float(np.radians(g.get("attitude_guard_deg", 45.0))),
        com_compensation_exact=bool(g.get("com_compensation_exact", False)),
    )
    ik = d["ik"]
    ik_settings = IkSettings(
        K=np.diag(np.asarray(ik["K"], dtype=float)),
        W=np.diag(np.asarray(ik["W"], dtype=float)),
        dt=float(ik["dt"]),
        damping=float(ik["damping"]),
        head_gain=float(ik.get("head_gain", 5.0)),
    )
    t = d.get("tether", {})
    s = d.get("sim", {})
    r = d.get("rig", {})
    return ParameterSet(
        robot=robot_from_dict(d["robot"]),
        gains=gains,
        ik=ik_settings,
        tether=TetherConfig(
            counterweight_mass=float(t.get("counterweight_mass", 15.0)),
            anchor_height=float(t.get("anchor_height", 1.0)),
        ),
        rig=RigLimits(
            max_tilt=float(r.get("max_tilt", RigLimits.max_tilt)),
            radial_limit=float(r.get("radial_limit", RigLimits.radial_limit)),
            vertical_halfspan=float(r.get("vertical_halfspan", RigLimits.vertical_halfspan)),
        ),
        sim=SimRates(
            physics_dt=float(s.get("physics_dt", 1e-3)),
            control_divisor=int(s.get("control_divisor", 5)),
            log_divisor=int(s.get("log_divisor", 10)),
            torso_time_constant=float(s.get("torso_time_constant", 0.15)),
            hand_time_constant=float(s.get("hand_time_constant", 0.10)),
        ),
        source=d,
    )


def load_params(path) -> ParameterSet:
    with open(path) as f:
        d = json.load(f)
    return params_from_dict(d)


def _spd(M, tol=1e-9) -> bool:
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.allclose(M, M.T, atol=1e-9):
        return False
    return bool(np.linalg.eigvalsh(M).min() > tol)


def validate_params_dict(d: dict) -> list:
    """Invariant checks on a raw parameter dict; returns human-readable findings."""
    findings = []
    if d.get("schema") != SCHEMA_ID:
        findings.append(f"schema: expected '{SCHEMA_ID}', got {d.get('schema')!r}")
    r = d.get("robot")
    if not isinstance(r, dict):
        return findings + ["robot: section missing"]

    for key in ("m_fb", "m_rod"):
        if not (float(r.get(key, -1)) > 0):
            findings.append(f"robot.{key}: must be > 0")
    masses = np.asarray(r.get("link_masses", []), dtype=float)
    if masses.shape != (TORSO_DOF,):
        findings.append(f"robot.link_masses: expected {TORSO_DOF} entries")
    elif not np.all(masses > 0):
        findings.append("robot.link_masses: all masses must be > 0")
    if np.asarray(r.get("link_com_local", [])).shape != (TORSO_DOF, 3):
        findings.append(f"robot.link_com_local: expected shape ({TORSO_DOF}, 3)")
    inertias = np.asarray(r.get("link_inertia_local", []))
    if inertias.shape != (TORSO_DOF, 3, 3):
        findings.append(f"robot.link_inertia_local: expected shape ({TORSO_DOF}, 3, 3)")
    else:
        for i, I in enumerate(inertias):
            if not _spd(I, tol=0.0):
                findings.append(f"robot.link_inertia_local[{i}]: not symmetric positive-definite")
    for key in ("I_fb", "I_rod"):
        if not _spd(r.get(key, np.zeros((3, 3)))):
            findings.append(f"robot.{key}: not symmetric positive-definite")
    if len(r.get("dh_arm", [])) != ARM_DOF:
        findings.append(f"robot.dh_arm: expected exactly {ARM_DOF} rows")
    if len(r.get("dh_head", [])) != HEAD_DOF:
        findings.append(f"robot.dh_head: expected exactly {HEAD_DOF} rows")
    for key in ("r_m", "r_j"):
        if not (float(r.get(key, -1)) > 0):
            findings.append(f"robot.{key}: must be > 0")
    if not (float(r.get("g", -1)) > 0):
        findings.append("robot.g: must be > 0")
    if not (float(r.get("thrust_max", -1)) > 0):
        findings.append("robot.thrust_max: must be > 0")
    if not (float(r.get("moment_max", -1)) > 0):
        findings.append("robot.moment_max: must be > 0")

    g = d.get("gains")
    if not isinstance(g, dict):
        findings.append("gains: section missing")
    else:
        for key in ("b1", "k1"):
            if not (float(g.get(key, -1)) > 0):
                findings.append(f"gains.{key}: must be > 0")
        for key in ("B2", "K2", "b_phi"):
            v = np.asarray(g.get(key, []), dtype=float)
            if v.shape != (3,) or not np.all(v > 0):
                findings.append(f"gains.{key}: expected 3 positive diagonal entries")

    ik = d.get("ik")
    if not isinstance(ik, dict):
        findings.append("ik: section missing")
    else:
        K = np.asarray(ik.get("K", []), dtype=float)
        if K.shape != (3,) or not np.all(K > 0):
            findings.append("ik.K: expected 3 positive diagonal entries")
        W = np.asarray(ik.get("W", []), dtype=float)
        if W.shape != (ARM_DOF,) or not np.all(W > 0):
            findings.append(f"ik.W: expected {ARM_DOF} positive diagonal entries")
        if not (float(ik.get("dt", -1)) > 0):
            findings.append("ik.dt: must be > 0")
        if float(ik.get("damping", -1)) < 0:
            findings.append("ik.damping: must be >= 0")

    t = d.get("tether", {})
    if float(t.get("counterweight_mass", 0.0)) < 0:
        findings.append("tether.counterweight_mass: must be >= 0")
    rig = d.get("rig", {})
    for key in ("max_tilt", "radial_limit", "vertical_halfspan"):
        if key in rig and not (float(rig[key]) > 0):
            findings.append(f"rig.{key}: must be > 0")
    s = d.get("sim", {})
    if "physics_dt" in s and not (0.0 < float(s["physics_dt"]) <= 0.01):
        findings.append("sim.physics_dt: must be in (0, 0.01]")
    return findings
