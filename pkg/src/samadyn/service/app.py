"""FastAPI application: health, WebSocket teleoperation, and REST wrappers
around the scenario runner. The browser cockpit is served from frontend/dist
when that build exists.
"""

import asyncio
import contextlib
import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from .. import __version__
from ..params import ParameterSet, validate_params_dict
from ..simulate import CHANNELS, Scenario, run_comparison, run_scenario
from .loop import SimulationService
from .schemas import (ALTITUDE_DELTA_MAX, HEAD_ORIENTATION_MAX_HZ, YAW_RATE_MAX,
                      CommandMessage, CompareResponse, CompareRow, HealthResponse,
                      RunResponse, ScenarioRequest, ValidateRequest, ValidateResponse)


def kinematics_asset(ps: ParameterSet) -> dict:
    """Chain geometry and command bounds shared with renderers and clients."""
    robot = ps.robot

    def rows(dh):
        return [dict(a=r.a, alpha=r.alpha, d=r.d, theta_offset=r.theta_offset) for r in dh]

    return {
        "schema": "samadyn-kinematics-v1",
        "dh_arm": rows(robot.dh_arm),
        "dh_head": rows(robot.dh_head),
        "mounts": {
            "left": robot.mount_left.tolist(),
            "right": robot.mount_right.tolist(),
            "head": robot.mount_head.tolist(),
        },
        "tether_attach_height": robot.l,
        "command_limits": {
            "altitude_delta_max": ALTITUDE_DELTA_MAX,
            "yaw_rate_max": YAW_RATE_MAX,
            "hand_closure_min": 0.0,
            "hand_closure_max": 1.0,
            "head_orientation_max_hz": HEAD_ORIENTATION_MAX_HZ,
            "command_rate_max_hz": 60.0,
        },
        "rates": {
            "physics_hz": 1.0 / ps.sim.physics_dt,
            "control_hz": 1.0 / ps.sim.control_dt,
            "broadcast_hz": 30.0,
        },
    }


def create_app(ps: ParameterSet, real_time: bool = True,
               controller: str = "proposed", home=(0.0, 0.0, 0.0)) -> FastAPI:
    service = SimulationService(ps, controller=controller, home=home, real_time=real_time)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        service.start()
        try:
            yield
        finally:
            service.stop()

    app = FastAPI(title="samadyn teleoperation service", version=__version__,
                  lifespan=lifespan)
    app.state.service = service

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/api/kinematics")
    def kinematics():
        return kinematics_asset(ps)

    @app.post("/api/run", response_model=RunResponse)
    def api_run(req: ScenarioRequest):
        scenario = Scenario.from_dict(req.scenario)
        log = run_scenario(scenario, ps)
        return RunResponse(
            scenario=scenario.name,
            controller=scenario.controller,
            params_sha256=ps.sha256,
            rms=log.summary(),
            clamp_events=log.clamp_count(),
            saturation_steps=int(log.sat_thrust.sum() + log.sat_moment.sum()),
        )

    @app.post("/api/compare", response_model=CompareResponse)
    def api_compare(req: ScenarioRequest):
        scenario = Scenario.from_dict(req.scenario)
        report, _, _ = run_comparison(scenario, ps)
        rows = [CompareRow(channel=ch, rms_proposed=report.rms_a[ch],
                           rms_baseline=report.rms_b[ch], ratio=report.ratio(ch))
                for ch in CHANNELS]
        return CompareResponse(scenario=scenario.name, params_sha256=ps.sha256,
                               rows=rows, text=report.as_text())

    @app.post("/api/validate", response_model=ValidateResponse)
    def api_validate(req: ValidateRequest):
        findings = []
        if req.params is not None:
            findings += validate_params_dict(req.params)
        if req.scenario is not None:
            try:
                Scenario.from_dict(req.scenario)
            except (ValueError, KeyError) as e:
                findings.append(f"scenario: {e}")
        return ValidateResponse(findings=findings)

    @app.websocket("/ws")
    async def ws(websocket: WebSocket):
        await websocket.accept()
        sub = service.subscribe(asyncio.get_running_loop())

        async def sender():
            while True:
                snap = await sub.queue.get()
                await websocket.send_text(json.dumps(snap))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    msg = CommandMessage.model_validate_json(text)
                except ValidationError as e:
                    await websocket.send_text(json.dumps({
                        "type": "error",
                        "detail": "; ".join(err["msg"] for err in e.errors()),
                    }))
                    continue
                service.submit(msg)
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            service.unsubscribe(sub)

    dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=dist, html=True), name="cockpit")
    return app
