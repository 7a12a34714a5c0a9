"""Live simulation loop behind the teleoperation service.

One background thread owns the simulator; WebSocket sessions talk to it
through two queues only: commands in (thread-safe FIFO), state snapshots out
(per-client bounded asyncio queues, oldest dropped first). Snapshots are
plain dicts built from value copies, safe to hand across threads.
"""

import math
import threading
import time
from queue import Empty, SimpleQueue

import numpy as np

from ..body import TorsoConfig
from ..control import References, arm_ik_step, head_ik_step, motor_targets
from ..geometry import euler_to_rot
from ..kinematics import chain_fk
from ..simulate import Simulator
from ..transmission import TendonConfigMatrix, joints_from_motors
from .schemas import HEAD_ORIENTATION_MAX_HZ, CommandMessage

BROADCAST_HZ = 30.0


def apply_command(msg: CommandMessage, refs: References) -> tuple[References, str | None]:
    """Fold one validated command into the reference set.

    Returns the updated references plus a controller name when the command
    selects one (that switch belongs to the simulation loop, not to refs).
    """
    refs = refs.copy()
    t, v = msg.type, msg.value
    if t == "altitude_delta":
        refs.p_z_d += float(v)
    elif t == "yaw_rate":
        refs.yaw_rate_d = float(v)
    elif t == "ee_target_left":
        refs.x_d_left = np.asarray(v, dtype=float)
    elif t == "ee_target_right":
        refs.x_d_right = np.asarray(v, dtype=float)
    elif t == "head_orientation":
        refs.head_R_d = euler_to_rot(np.asarray(v, dtype=float))
    elif t == "hand_closure_left":
        refs.hand_closure_d = np.array([float(v), refs.hand_closure_d[1]])
    elif t == "hand_closure_right":
        refs.hand_closure_d = np.array([refs.hand_closure_d[0], float(v)])
    elif t == "controller_select":
        return refs, str(v)
    return refs, None


class _Subscriber:
    """Bounded per-client snapshot queue bridged onto the client's event loop."""

    def __init__(self, loop, maxsize: int = 8):
        import asyncio

        self.loop = loop
        self.queue = asyncio.Queue(maxsize=maxsize)

    def push_threadsafe(self, item: dict):
        self.loop.call_soon_threadsafe(self._push, item)

    def _push(self, item: dict):
        if self.queue.full():
            try:
                self.queue.get_nowait()  # drop the oldest frame
            except Exception:
                pass
        self.queue.put_nowait(item)


class SimulationService:
    """Real-time (or as-fast-as-possible) closed-loop sim with teleop hooks."""

    def __init__(self, ps, controller: str = "proposed", home=(0.0, 0.0, 0.0),
                 real_time: bool = True, rig_enabled: bool = True):
        self.ps = ps
        self.real_time = real_time
        self.sim = Simulator(ps, controller=controller, home=home, rig_enabled=rig_enabled)
        self.commands: SimpleQueue = SimpleQueue()
        self._subscribers: list[_Subscriber] = []
        self._sub_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

        self.tendons = TendonConfigMatrix.from_radii(ps.robot.r_m, ps.robot.r_j)
        torso0 = self.sim.state.torso
        self._q_la_d = torso0.q_la.copy()
        self._q_ra_d = torso0.q_ra.copy()
        self._q_h_d = torso0.q_h.copy()
        self._torso_cmd = torso0.copy()
        self._last_head_apply = -math.inf
        self._next_broadcast = 0.0

    # -- lifecycle ---------------------------------------------------------

    def start(self):
        if self._thread is not None:
            raise RuntimeError("service already started")
        self._thread = threading.Thread(target=self._run, name="samadyn-sim", daemon=True)
        self._thread.start()

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    # -- client interface ---------------------------------------------------

    def submit(self, msg: CommandMessage):
        self.commands.put(msg)

    def subscribe(self, loop) -> _Subscriber:
        sub = _Subscriber(loop)
        with self._sub_lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber):
        with self._sub_lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    # -- loop internals ------------------------------------------------------

    def _drain_commands(self):
        while True:
            try:
                msg = self.commands.get_nowait()
            except Empty:
                return
            if msg.type == "head_orientation":
                # safety rate limit on continuous headset streaming
                if self.sim.t - self._last_head_apply < 1.0 / HEAD_ORIENTATION_MAX_HZ:
                    continue
                self._last_head_apply = self.sim.t
            refs, controller = apply_command(msg, self.sim.refs)
            self.sim.refs = refs
            if controller is not None:
                self.sim.set_controller(controller)

    def _refs_fn(self, t, refs: References) -> References:
        """Control-tick hook: commands, yaw-rate integration, arm/head IK."""
        self._drain_commands()
        refs = self.sim.refs
        dt_c = self.ps.sim.control_dt
        if refs.yaw_rate_d != 0.0:
            refs.Phi_d[2] += refs.yaw_rate_d * dt_c

        robot = self.ps.robot
        if refs.x_d_left is not None:
            self._q_la_d = arm_ik_step(robot.chain_left(), self._q_la_d,
                                       refs.x_d_left, self.ps.ik)
        if refs.x_d_right is not None:
            self._q_ra_d = arm_ik_step(robot.chain_right(), self._q_ra_d,
                                       refs.x_d_right, self.ps.ik)
        if refs.head_R_d is not None:
            self._q_h_d = head_ik_step(robot.chain_head(), self._q_h_d,
                                       refs.head_R_d, dt_c, self.ps.ik.head_gain)
        # joint references go through the motor mapping, as on the real drive chain
        q_la_exec = joints_from_motors(self.tendons, motor_targets(self.tendons, self._q_la_d))
        q_ra_exec = joints_from_motors(self.tendons, motor_targets(self.tendons, self._q_ra_d))
        self._torso_cmd = TorsoConfig(q_la_exec, q_ra_exec, self._q_h_d.copy())
        return refs

    def snapshot(self) -> dict:
        """StateMessage payload for the current simulator state."""
        sim = self.sim
        state = sim.state
        robot = self.ps.robot
        ee_l = chain_fk(robot.chain_left(), state.torso.q_la)[-1, :3, 3]
        ee_r = chain_fk(robot.chain_right(), state.torso.q_ra)[-1, :3, 3]
        from ..dynamics import tether_force

        f_t = tether_force(state, sim.tether, robot.g)
        clamp = sim.last_clamp
        return {
            "t": sim.t,
            "p": state.p.tolist(),
            "Phi": state.Phi.tolist(),
            "omega": state.omega.tolist(),
            "q_lb": state.torso.vector().tolist(),
            "com": sim.mass(state.torso).c.tolist(),
            "thrust": sim.last_inputs.T_s,
            "tether": f_t.tolist(),
            "ee_left": ee_l.tolist(),
            "ee_right": ee_r.tolist(),
            "hand_closure": state.hand_closure.tolist(),
            "clamp_flags": [clamp.radial, clamp.vertical, clamp.tilt],
        }

    def _broadcast(self):
        snap = self.snapshot()
        with self._sub_lock:
            subs = list(self._subscribers)
        for sub in subs:
            sub.push_threadsafe(snap)

    def run_steps(self, n_steps: int):
        """Advance the loop n physics steps (used directly by tests)."""
        div_c = self.ps.sim.control_divisor
        for _ in range(n_steps):
            if self.sim.k % div_c == 0:
                self.sim.refs = self._refs_fn(self.sim.t, self.sim.refs)
                self.sim.control_tick()
            self.sim.physics_tick(self._torso_cmd, hand_cmd=self.sim.refs.hand_closure_d)
            while self.sim.t >= self._next_broadcast - 1e-12:
                self._broadcast()
                self._next_broadcast += 1.0 / BROADCAST_HZ

    def _run(self):
        dt = self.ps.sim.physics_dt
        chunk = max(1, int(round(0.01 / dt)))  # pace in 10 ms slices
        t_wall0 = time.perf_counter()
        while not self._stop.is_set():
            self.run_steps(chunk)
            if self.real_time:
                deadline = t_wall0 + self.sim.t
                delay = deadline - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
