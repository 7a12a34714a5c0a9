"""Scenario scripting, test-rig constraints, experiment runner, and reports.

Rates are fixed by design so result files are comparable across runs:
physics at 1 kHz, control at 200 Hz, logging at 100 Hz.
"""

import io
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .body import BodyState, MassPropertiesCache, TorsoConfig
from .control import (OuterLoopCommand, References, baseline_attitude,
                      inner_loop_torque, outer_loop)
from .dynamics import PlantInputs, TetherParams, step, tether_force
from .geometry import euler_rate_matrix, euler_rates_from_omega, euler_to_rot
from .params import ParameterSet, RigLimits

CONTROLLERS = ("proposed", "baseline")

LOG_COLUMNS = (
    ["t", "px", "py", "pz", "phi", "theta", "psi", "wx", "wy", "wz",
     "cx", "cy", "cz", "Ts", "Mx", "My", "Mz"]
    + [f"q{i}" for i in range(12)]
    + ["ref_pz", "ref_phi", "ref_theta", "ref_psi",
       "sat_thrust", "sat_moment", "clamp_radial", "clamp_vertical", "clamp_tilt"]
)


@dataclass
class Scenario:
    """A scripted torso-motion experiment for one controller."""

    name: str
    duration: float
    controller: str = "proposed"
    seed: int = 0
    home: np.ndarray = field(default_factory=lambda: np.zeros(3))
    timeline: list = field(default_factory=list)      # [(t, TorsoConfig), ...]
    refs: list = field(default_factory=list)          # [(t, References), ...]
    rig_enabled: bool = True
    tether_enabled: bool = True

    def __post_init__(self):
        self.home = np.asarray(self.home, dtype=float)
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if not self.timeline:
            self.timeline = [(0.0, TorsoConfig.zeros())]
        times = [t for t, _ in self.timeline]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("timeline waypoint times must be strictly increasing")
        if self.duration < times[-1]:
            raise ValueError("duration must cover the last waypoint")
        if not self.refs:
            self.refs = [(0.0, References(p_z_d=float(self.home[2])))]

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        timeline = [
            (float(w["t"]),
             TorsoConfig(np.asarray(w["q_la"], dtype=float),
                         np.asarray(w["q_ra"], dtype=float),
                         np.asarray(w["q_h"], dtype=float)))
            for w in d.get("timeline", [])
        ]
        home = np.asarray(d.get("home", [0.0, 0.0, 0.0]), dtype=float)
        refs = []
        for r in d.get("refs", []):
            refs.append((float(r.get("t", 0.0)), References(
                p_z_d=float(r.get("p_z_d", home[2])),
                Phi_d=np.array([float(r.get("phi_d", 0.0)),
                                float(r.get("theta_d", 0.0)),
                                float(r.get("psi_d", 0.0))]),
            )))
        return cls(
            name=str(d.get("name", "scenario")),
            duration=float(d["duration"]),
            controller=str(d.get("controller", "proposed")),
            seed=int(d.get("seed", 0)),
            home=home,
            timeline=timeline,
            refs=refs,
            rig_enabled=bool(d.get("rig_enabled", True)),
            tether_enabled=bool(d.get("tether_enabled", True)),
        )

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def with_controller(self, controller: str) -> "Scenario":
        s = Scenario(name=self.name, duration=self.duration, controller=controller,
                     seed=self.seed, home=self.home.copy(),
                     timeline=list(self.timeline), refs=list(self.refs),
                     rig_enabled=self.rig_enabled, tether_enabled=self.tether_enabled)
        return s


def scripted_motion(timeline, t: float) -> TorsoConfig:
    """Torso waypoint interpolation: cubic ease with zero endpoint velocity.

    Holds the first/last waypoint outside the scripted span.
    """
    if t < 0.0:
        raise ValueError("time before scenario start")
    times = [w[0] for w in timeline]
    i = bisect_right(times, t)
    if i == 0:
        return timeline[0][1].copy()
    if i == len(times):
        return timeline[-1][1].copy()
    t0, c0 = timeline[i - 1]
    t1, c1 = timeline[i]
    s = (t - t0) / (t1 - t0)
    h = s * s * (3.0 - 2.0 * s)
    v = c0.vector() + (c1.vector() - c0.vector()) * h
    return TorsoConfig.from_vector(v)


@dataclass
class RigClampFlags:
    radial: bool = False
    vertical: bool = False
    tilt: bool = False

    def any(self) -> bool:
        return self.radial or self.vertical or self.tilt


def apply_rig_constraints(state: BodyState, rig: RigLimits, home):
    """Clamp the state to the test-rig envelope (inelastic stops).

    Returns (state, flags); the input object is returned untouched when no
    limit is active.
    """
    home = np.asarray(home, dtype=float)
    flags = RigClampFlags()

    d = state.p[:2] - home[:2]
    r = math.hypot(d[0], d[1])
    radial = r > rig.radial_limit
    dz = state.p[2] - home[2]
    vertical = abs(dz) > rig.vertical_halfspan
    tilt = abs(state.Phi[0]) > rig.max_tilt or abs(state.Phi[1]) > rig.max_tilt
    if not (radial or vertical or tilt):
        return state, flags

    s = state.copy()
    if radial:
        flags.radial = True
        u = d / r
        s.p[:2] = home[:2] + u * rig.radial_limit
        v_rad = float(s.v[:2] @ u)
        if v_rad > 0.0:
            s.v[:2] -= u * v_rad
    if vertical:
        flags.vertical = True
        s.p[2] = home[2] + math.copysign(rig.vertical_halfspan, dz)
        if s.v[2] * dz > 0.0:
            s.v[2] = 0.0
    if tilt:
        flags.tilt = True
        phi = s.Phi.copy()
        rates = euler_rates_from_omega(phi, s.omega)
        for axis in (0, 1):
            if abs(phi[axis]) > rig.max_tilt:
                side = math.copysign(1.0, phi[axis])
                phi[axis] = side * rig.max_tilt
                if rates[axis] * side > 0.0:
                    rates[axis] = 0.0
        s.Phi = phi
        s.R = euler_to_rot(phi)
        s.omega = euler_rate_matrix(phi) @ rates
    return s, flags


def rms(series, reference: float) -> float:
    """Root-mean-square deviation of a series from a constant reference."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("rms needs a non-empty series")
    return float(np.sqrt(np.mean((series - reference) ** 2)))


@dataclass
class ScenarioLog:
    """Uniformly sampled run telemetry plus per-channel RMS summary."""

    scenario: str
    controller: str
    params_hash: str
    t: np.ndarray
    p: np.ndarray
    Phi: np.ndarray
    omega: np.ndarray
    com: np.ndarray
    T_s: np.ndarray
    M: np.ndarray
    q_lb: np.ndarray
    ref_pz: np.ndarray
    ref_Phi: np.ndarray
    sat_thrust: np.ndarray
    sat_moment: np.ndarray
    clamp_radial: np.ndarray
    clamp_vertical: np.ndarray
    clamp_tilt: np.ndarray
    home: np.ndarray

    def clamp_count(self) -> int:
        return int(self.clamp_radial.sum() + self.clamp_vertical.sum() + self.clamp_tilt.sum())

    def summary(self) -> dict:
        """Six-channel RMS: attitude in degrees, position in meters."""
        err_phi = np.degrees(self.Phi - self.ref_Phi)
        return {
            "theta_deg": rms(err_phi[:, 1], 0.0),
            "phi_deg": rms(err_phi[:, 0], 0.0),
            "psi_deg": rms(err_phi[:, 2], 0.0),
            "px_m": rms(self.p[:, 0], float(self.home[0])),
            "py_m": rms(self.p[:, 1], float(self.home[1])),
            "pz_m": rms(self.p[:, 2] - self.ref_pz, 0.0),
        }

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        buf.write(f"# scenario={self.scenario} controller={self.controller} "
                  f"params_sha256={self.params_hash}\n")
        buf.write(",".join(LOG_COLUMNS) + "\n")
        cols = [
            self.t,
            self.p[:, 0], self.p[:, 1], self.p[:, 2],
            self.Phi[:, 0], self.Phi[:, 1], self.Phi[:, 2],
            self.omega[:, 0], self.omega[:, 1], self.omega[:, 2],
            self.com[:, 0], self.com[:, 1], self.com[:, 2],
            self.T_s,
            self.M[:, 0], self.M[:, 1], self.M[:, 2],
            *[self.q_lb[:, i] for i in range(12)],
            self.ref_pz,
            self.ref_Phi[:, 0], self.ref_Phi[:, 1], self.ref_Phi[:, 2],
            self.sat_thrust, self.sat_moment,
            self.clamp_radial, self.clamp_vertical, self.clamp_tilt,
        ]
        for k in range(self.t.shape[0]):
            buf.write(",".join(repr(float(c[k])) for c in cols) + "\n")
        return buf.getvalue().encode()

    def save_csv(self, path):
        with open(path, "wb") as f:
            f.write(self.to_csv_bytes())


class Simulator:
    """Owns one closed-loop simulation: plant, controller, rig, and cadence.

    The same stepping order drives scripted scenario runs and the live
    teleoperation service, so both produce identical trajectories for
    identical inputs.
    """

    def __init__(self, ps: ParameterSet, controller: str = "proposed",
                 home=(0.0, 0.0, 0.0), torso0: TorsoConfig | None = None,
                 refs: References | None = None, tether: TetherParams | None = None,
                 rig_enabled: bool = True):
        if controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        self.ps = ps
        self.robot = ps.robot
        self.home = np.asarray(home, dtype=float)
        self.controller = controller
        self.state = BodyState.hover(self.home, torso0)
        self.refs = refs.copy() if refs is not None else References(p_z_d=float(self.home[2]))
        self.tether = tether if tether is not None else ps.make_tether(self.home)
        self.rig_enabled = rig_enabled
        self.mass = MassPropertiesCache(ps.robot)
        self.k = 0
        self.command = OuterLoopCommand(T_s_d=0.0, Phi_dot_d=np.zeros(3))
        self.last_inputs = PlantInputs(0.0, np.zeros(3))
        self.last_sat = (False, False)
        self.last_clamp = RigClampFlags()
        self._controller_fn = {"proposed": outer_loop, "baseline": baseline_attitude}

    @property
    def t(self) -> float:
        return self.k * self.ps.sim.physics_dt

    def set_controller(self, controller: str):
        if controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        self.controller = controller

    def control_tick(self):
        summary = self.mass(self.state.torso)
        F_t = tether_force(self.state, self.tether, self.robot.g)
        fn = self._controller_fn[self.controller]
        self.command = fn(self.state, self.refs, self.ps.gains, summary, F_t, self.robot.g)

    def physics_tick(self, torso_cmd: TorsoConfig, hand_cmd=None):
        phi_dot = euler_rates_from_omega(self.state.Phi, self.state.omega)
        M = inner_loop_torque(self.command.Phi_dot_d, phi_dot, self.ps.gains)
        u, sat = PlantInputs(self.command.T_s_d, M).saturated(
            self.robot.thrust_max, self.robot.moment_max)
        self.last_inputs = u
        self.last_sat = sat
        self.state = step(
            self.state, u, torso_cmd, self.ps.sim.physics_dt, self.robot, self.tether,
            mass_fn=self.mass, hand_cmd=hand_cmd,
            torso_tau=self.ps.sim.torso_time_constant,
            hand_tau=self.ps.sim.hand_time_constant,
        )
        if self.rig_enabled:
            self.state, self.last_clamp = apply_rig_constraints(
                self.state, self.ps.rig, self.home)
        else:
            self.last_clamp = RigClampFlags()
        self.k += 1

    def advance(self, n_steps: int, torso_fn, refs_fn=None, recorder=None):
        """Run n physics steps; control and logging follow the fixed divisors."""
        div_c = self.ps.sim.control_divisor
        div_l = self.ps.sim.log_divisor
        if recorder is not None and self.k == 0:
            recorder(self)
        for _ in range(n_steps):
            if self.k % div_c == 0:
                if refs_fn is not None:
                    self.refs = refs_fn(self.t, self.refs)
                self.control_tick()
            self.physics_tick(torso_fn(self.t))
            if recorder is not None and self.k % div_l == 0:
                recorder(self)


class _Recorder:
    def __init__(self, sim: Simulator):
        self.sim = sim
        self.rows = {name: [] for name in (
            "t", "p", "Phi", "omega", "com", "T_s", "M", "q_lb",
            "ref_pz", "ref_Phi", "sat_thrust", "sat_moment",
            "clamp_radial", "clamp_vertical", "clamp_tilt")}

    def __call__(self, sim: Simulator):
        r = self.rows
        r["t"].append(sim.t)
        r["p"].append(sim.state.p.copy())
        r["Phi"].append(sim.state.Phi.copy())
        r["omega"].append(sim.state.omega.copy())
        r["com"].append(sim.mass(sim.state.torso).c.copy())
        r["T_s"].append(sim.last_inputs.T_s)
        r["M"].append(sim.last_inputs.M.copy())
        r["q_lb"].append(sim.state.torso.vector())
        r["ref_pz"].append(sim.refs.p_z_d)
        r["ref_Phi"].append(sim.refs.Phi_d.copy())
        r["sat_thrust"].append(float(sim.last_sat[0]))
        r["sat_moment"].append(float(sim.last_sat[1]))
        r["clamp_radial"].append(float(sim.last_clamp.radial))
        r["clamp_vertical"].append(float(sim.last_clamp.vertical))
        r["clamp_tilt"].append(float(sim.last_clamp.tilt))


def run_scenario(scenario: Scenario, ps: ParameterSet,
                 tether: TetherParams | None = None,
                 rig: RigLimits | None = None) -> ScenarioLog:
    """Closed-loop run of one scenario; returns the full uniform-rate log."""
    if tether is None:
        tether = (ps.make_tether(scenario.home) if scenario.tether_enabled
                  else TetherParams.disabled())
    eff_ps = ps if rig is None else ParameterSet(
        robot=ps.robot, gains=ps.gains, ik=ps.ik, tether=ps.tether,
        rig=rig, sim=ps.sim, source=ps.source)

    torso0 = scripted_motion(scenario.timeline, 0.0)
    ref_times = [t for t, _ in scenario.refs]
    ref_values = [r for _, r in scenario.refs]

    def refs_fn(t, current):
        i = bisect_right(ref_times, t)
        return ref_values[max(0, i - 1)]

    sim = Simulator(
        eff_ps, controller=scenario.controller, home=scenario.home, torso0=torso0,
        refs=ref_values[0], tether=tether, rig_enabled=scenario.rig_enabled)
    rec = _Recorder(sim)
    n_steps = int(round(scenario.duration / eff_ps.sim.physics_dt))
    sim.advance(n_steps, torso_fn=lambda t: scripted_motion(scenario.timeline, t),
                refs_fn=refs_fn, recorder=rec)

    r = rec.rows
    return ScenarioLog(
        scenario=scenario.name,
        controller=scenario.controller,
        params_hash=ps.sha256,
        t=np.array(r["t"]),
        p=np.array(r["p"]),
        Phi=np.array(r["Phi"]),
        omega=np.array(r["omega"]),
        com=np.array(r["com"]),
        T_s=np.array(r["T_s"]),
        M=np.array(r["M"]),
        q_lb=np.array(r["q_lb"]),
        ref_pz=np.array(r["ref_pz"]),
        ref_Phi=np.array(r["ref_Phi"]),
        sat_thrust=np.array(r["sat_thrust"]),
        sat_moment=np.array(r["sat_moment"]),
        clamp_radial=np.array(r["clamp_radial"]),
        clamp_vertical=np.array(r["clamp_vertical"]),
        clamp_tilt=np.array(r["clamp_tilt"]),
        home=scenario.home.copy(),
    )


CHANNELS = ("theta_deg", "phi_deg", "psi_deg", "px_m", "py_m", "pz_m")


@dataclass
class ComparisonReport:
    """Per-channel RMS of two runs of the same scenario plus their ratios."""

    scenario: str
    label_a: str
    label_b: str
    rms_a: dict
    rms_b: dict

    def ratio(self, channel: str) -> float:
        b = self.rms_b[channel]
        return self.rms_a[channel] / b if b != 0.0 else float("inf")

    def as_text(self) -> str:
        lines = [f"scenario: {self.scenario}",
                 f"{'channel':<12}{self.label_a:>16}{self.label_b:>16}{'ratio':>12}"]
        for ch in CHANNELS:
            lines.append(f"{ch:<12}{self.rms_a[ch]:>16.6f}{self.rms_b[ch]:>16.6f}"
                         f"{self.ratio(ch):>12.4f}")
        return "\n".join(lines) + "\n"

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        buf.write(f"channel,rms_{self.label_a},rms_{self.label_b},ratio\n")
        for ch in CHANNELS:
            buf.write(f"{ch},{self.rms_a[ch]!r},{self.rms_b[ch]!r},{self.ratio(ch)!r}\n")
        return buf.getvalue().encode()


def compare_report(log_a: ScenarioLog, log_b: ScenarioLog) -> ComparisonReport:
    """Table of both controllers' channel RMS; inputs must share the scenario shape."""
    if log_a.t.shape != log_b.t.shape or not np.array_equal(log_a.t, log_b.t):
        raise ValueError("logs cover different durations or sampling")
    return ComparisonReport(
        scenario=log_a.scenario,
        label_a=log_a.controller,
        label_b=log_b.controller,
        rms_a=log_a.summary(),
        rms_b=log_b.summary(),
    )


def run_comparison(scenario: Scenario, ps: ParameterSet) -> tuple:
    """Run the scenario under both controllers and build the comparison table."""
    log_p = run_scenario(scenario.with_controller("proposed"), ps)
    log_b = run_scenario(scenario.with_controller("baseline"), ps)
    return compare_report(log_p, log_b), log_p, log_b
