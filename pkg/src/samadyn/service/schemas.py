"""Wire contract of the teleoperation service and the REST api.

StateMessage and CommandMessage are the WebSocket frame schemas documented in
docs/protocol.md; the cockpit validates against the same bounds client-side.
"""

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

ALTITUDE_DELTA_MAX = 0.05   # m per message
YAW_RATE_MAX = 0.5          # rad/s
HEAD_ORIENTATION_MAX_HZ = 60.0

CommandType = Literal[
    "altitude_delta",
    "yaw_rate",
    "ee_target_left",
    "ee_target_right",
    "head_orientation",
    "hand_closure_left",
    "hand_closure_right",
    "controller_select",
]

_VEC3_TYPES = {"ee_target_left", "ee_target_right", "head_orientation"}
_SCALAR_TYPES = {"altitude_delta", "yaw_rate", "hand_closure_left", "hand_closure_right"}


class StateMessage(BaseModel):
    """One state broadcast frame; exactly these keys, all numbers finite."""

    model_config = ConfigDict(extra="forbid")

    t: float
    p: list[float]
    Phi: list[float]
    omega: list[float]
    q_lb: list[float]
    com: list[float]
    thrust: float
    tether: list[float]
    ee_left: list[float]
    ee_right: list[float]
    hand_closure: list[float]
    clamp_flags: list[bool]

    @model_validator(mode="after")
    def _check_shapes(self):
        lengths = {"p": 3, "Phi": 3, "omega": 3, "q_lb": 12, "com": 3,
                   "tether": 3, "ee_left": 3, "ee_right": 3,
                   "hand_closure": 2, "clamp_flags": 3}
        for name, n in lengths.items():
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have {n} entries")
        for name in ("p", "Phi", "omega", "q_lb", "com", "tether",
                     "ee_left", "ee_right", "hand_closure"):
            if not all(math.isfinite(x) for x in getattr(self, name)):
                raise ValueError(f"{name} contains non-finite values")
        if not (math.isfinite(self.t) and math.isfinite(self.thrust)):
            raise ValueError("t and thrust must be finite")
        return self


class CommandMessage(BaseModel):
    """One operator command; value arity and bounds depend on the type."""

    model_config = ConfigDict(extra="forbid")

    type: CommandType
    value: Union[float, list[float], str]

    @model_validator(mode="after")
    def _check_value(self):
        t, v = self.type, self.value
        if t == "controller_select":
            if v not in ("proposed", "baseline"):
                raise ValueError("controller_select value must be 'proposed' or 'baseline'")
            return self
        if t in _SCALAR_TYPES:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValueError(f"{t} needs a scalar value")
            if not math.isfinite(v):
                raise ValueError(f"{t} value must be finite")
            if t == "altitude_delta" and abs(v) > ALTITUDE_DELTA_MAX:
                raise ValueError(f"altitude_delta limited to +-{ALTITUDE_DELTA_MAX} m per message")
            if t == "yaw_rate" and abs(v) > YAW_RATE_MAX:
                raise ValueError(f"yaw_rate limited to +-{YAW_RATE_MAX} rad/s")
            if t in ("hand_closure_left", "hand_closure_right") and not (0.0 <= v <= 1.0):
                raise ValueError("hand closure must lie in [0, 1]")
            return self
        # vec3 commands; head_orientation carries (roll, pitch, yaw) of the
        # desired head attitude in the body frame (roll is ignored downstream)
        if not (isinstance(v, list) and len(v) == 3
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
            raise ValueError(f"{t} needs a 3-vector value")
        if not all(math.isfinite(x) for x in v):
            raise ValueError(f"{t} value must be finite")
        return self


class ScenarioRequest(BaseModel):
    scenario: dict


class RunResponse(BaseModel):
    scenario: str
    controller: str
    params_sha256: str
    rms: dict[str, float]
    clamp_events: int
    saturation_steps: int


class CompareRow(BaseModel):
    channel: str
    rms_proposed: float
    rms_baseline: float
    ratio: float


class CompareResponse(BaseModel):
    scenario: str
    params_sha256: str
    rows: list[CompareRow]
    text: str


class ValidateRequest(BaseModel):
    params: Optional[dict] = None
    scenario: Optional[dict] = None


class ValidateResponse(BaseModel):
    findings: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
