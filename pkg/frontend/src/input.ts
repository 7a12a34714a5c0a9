/**
 * Operator input mapping, mirroring the ground-station bindings: left
 * stick / W-S drive altitude nudges, right stick / A-D the yaw rate,
 * triggers and sliders the hand closures. The mapping functions are pure so
 * they can be tested without a DOM.
 */
import type { CommandMessage } from "./protocol.js";

export interface KeyState {
  up: boolean;    // W
  down: boolean;  // S
  left: boolean;  // A
  right: boolean; // D
}

export interface InputTuning {
  altitudeStep: number; // m per input tick while held
  yawRate: number;      // rad/s while held
}

export const DEFAULT_TUNING: InputTuning = { altitudeStep: 0.01, yawRate: 0.3 };

/**
 * Commands for one input tick of held keys. Yaw is stateful on the service
 * side (a set rate persists), so a zero-rate command is emitted on release.
 */
export function keysToCommands(
  keys: KeyState,
  yawActiveBefore: boolean,
  tuning: InputTuning = DEFAULT_TUNING,
): { commands: CommandMessage[]; yawActive: boolean } {
  const commands: CommandMessage[] = [];
  if (keys.up !== keys.down) {
    commands.push({
      type: "altitude_delta",
      value: keys.up ? tuning.altitudeStep : -tuning.altitudeStep,
    });
  }
  const yawActive = keys.left !== keys.right;
  if (yawActive) {
    commands.push({ type: "yaw_rate", value: keys.left ? tuning.yawRate : -tuning.yawRate });
  } else if (yawActiveBefore) {
    commands.push({ type: "yaw_rate", value: 0 });
  }
  return { commands, yawActive };
}

export interface GamepadState {
  leftStickY: number;  // -1 (push up) .. 1
  rightStickX: number; // -1 .. 1
  leftTrigger: number; // 0 .. 1
  rightTrigger: number;
}

const DEADZONE = 0.15;

function deadzone(x: number): number {
  return Math.abs(x) < DEADZONE ? 0 : x;
}

/** Commands for one gamepad poll; axes follow the standard gamepad layout. */
export function gamepadToCommands(
  pad: GamepadState,
  yawActiveBefore: boolean,
  tuning: InputTuning = DEFAULT_TUNING,
): { commands: CommandMessage[]; yawActive: boolean } {
  const commands: CommandMessage[] = [];
  const alt = deadzone(-pad.leftStickY);
  if (alt !== 0) {
    commands.push({ type: "altitude_delta", value: alt * tuning.altitudeStep });
  }
  const yaw = deadzone(-pad.rightStickX);
  const yawActive = yaw !== 0;
  if (yawActive) {
    commands.push({ type: "yaw_rate", value: yaw * tuning.yawRate });
  } else if (yawActiveBefore) {
    commands.push({ type: "yaw_rate", value: 0 });
  }
  commands.push({ type: "hand_closure_left", value: pad.leftTrigger });
  commands.push({ type: "hand_closure_right", value: pad.rightTrigger });
  return { commands, yawActive };
}

export function sliderToCommand(side: "left" | "right", value: number): CommandMessage {
  return { type: side === "left" ? "hand_closure_left" : "hand_closure_right", value };
}

export function gizmoToCommand(
  side: "left" | "right",
  pos: [number, number, number],
): CommandMessage {
  return { type: side === "left" ? "ee_target_left" : "ee_target_right", value: pos };
}

/** Camera azimuth/elevation to a head-orientation command (roll stays 0). */
export function viewToHeadCommand(yaw: number, pitch: number): CommandMessage {
  return { type: "head_orientation", value: [0, pitch, yaw] };
}
