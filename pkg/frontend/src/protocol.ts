/**
 * Wire contract of the teleoperation service (see docs/protocol.md) plus
 * client-side clamping. The cockpit never emits a message that the service
 * would reject: every outgoing command is clamped to the shared limits and
 * then validated against the same schema the server enforces.
 */
import { z } from "zod";

export interface CommandLimits {
  altitude_delta_max: number;
  yaw_rate_max: number;
  hand_closure_min: number;
  hand_closure_max: number;
  head_orientation_max_hz: number;
  command_rate_max_hz: number;
}

export const DEFAULT_LIMITS: CommandLimits = {
  altitude_delta_max: 0.05,
  yaw_rate_max: 0.5,
  hand_closure_min: 0,
  hand_closure_max: 1,
  head_orientation_max_hz: 60,
  command_rate_max_hz: 60,
};

const finite = z.number().finite();
const vec3 = z.tuple([finite, finite, finite]);

export const stateMessageSchema = z
  .object({
    t: finite,
    p: z.array(finite).length(3),
    Phi: z.array(finite).length(3),
    omega: z.array(finite).length(3),
    q_lb: z.array(finite).length(12),
    com: z.array(finite).length(3),
    thrust: finite,
    tether: z.array(finite).length(3),
    ee_left: z.array(finite).length(3),
    ee_right: z.array(finite).length(3),
    hand_closure: z.array(finite).length(2),
    clamp_flags: z.array(z.boolean()).length(3),
  })
  .strict();

export type StateMessage = z.infer<typeof stateMessageSchema>;

export const errorMessageSchema = z.object({ type: z.literal("error"), detail: z.string() });

export function commandMessageSchema(limits: CommandLimits) {
  const closure = finite.min(limits.hand_closure_min).max(limits.hand_closure_max);
  return z.discriminatedUnion("type", [
    z.object({
      type: z.literal("altitude_delta"),
      value: finite.min(-limits.altitude_delta_max).max(limits.altitude_delta_max),
    }),
    z.object({
      type: z.literal("yaw_rate"),
      value: finite.min(-limits.yaw_rate_max).max(limits.yaw_rate_max),
    }),
    z.object({ type: z.literal("ee_target_left"), value: vec3 }),
    z.object({ type: z.literal("ee_target_right"), value: vec3 }),
    z.object({ type: z.literal("head_orientation"), value: vec3 }),
    z.object({ type: z.literal("hand_closure_left"), value: closure }),
    z.object({ type: z.literal("hand_closure_right"), value: closure }),
    z.object({
      type: z.literal("controller_select"),
      value: z.union([z.literal("proposed"), z.literal("baseline")]),
    }),
  ]);
}

export type CommandMessage =
  | { type: "altitude_delta" | "yaw_rate" | "hand_closure_left" | "hand_closure_right"; value: number }
  | { type: "ee_target_left" | "ee_target_right" | "head_orientation"; value: [number, number, number] }
  | { type: "controller_select"; value: "proposed" | "baseline" };

const clip = (x: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, x));

/**
 * Clamp a raw command into the shared bounds. Returns null when no valid
 * message can be derived (non-finite numbers, unknown type).
 */
export function clampCommand(
  cmd: CommandMessage,
  limits: CommandLimits = DEFAULT_LIMITS,
): CommandMessage | null {
  switch (cmd.type) {
    case "altitude_delta": {
      if (!Number.isFinite(cmd.value)) return null;
      const m = limits.altitude_delta_max;
      return { type: cmd.type, value: clip(cmd.value, -m, m) };
    }
    case "yaw_rate": {
      if (!Number.isFinite(cmd.value)) return null;
      const m = limits.yaw_rate_max;
      return { type: cmd.type, value: clip(cmd.value, -m, m) };
    }
    case "hand_closure_left":
    case "hand_closure_right": {
      if (!Number.isFinite(cmd.value)) return null;
      return {
        type: cmd.type,
        value: clip(cmd.value, limits.hand_closure_min, limits.hand_closure_max),
      };
    }
    case "ee_target_left":
    case "ee_target_right":
    case "head_orientation": {
      const v = cmd.value;
      if (v.length !== 3 || !v.every((x) => Number.isFinite(x))) return null;
      return { type: cmd.type, value: [v[0], v[1], v[2]] };
    }
    case "controller_select":
      return cmd.value === "proposed" || cmd.value === "baseline" ? cmd : null;
    default:
      return null;
  }
}

export function parseStateMessage(text: string): StateMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  const parsed = stateMessageSchema.safeParse(raw);
  return parsed.success ? parsed.data : null;
}
