// Wire schema for the gateway WebSocket (see docs/protocol.md). Outbound
// builders validate before returning, so the console can never put a
// schema-invalid message on the wire.

import { Vec3 } from "./hand.js";

export const MIN_RESOLUTION = 0.01;
export const MAX_RESOLUTION = 10.0;

export type ControlVerb = "pause" | "resume" | "set_resolution" | "reset_anchor";
const CONTROL_VERBS: ControlVerb[] = ["pause", "resume", "set_resolution", "reset_anchor"];

export interface HandMessage {
  kind: "hand";
  hand: "left" | "right";
  keypoints: number[][];
  confidence: number;
}

export interface ControlMessage {
  kind: "control";
  control: ControlVerb;
  value?: number;
}

export interface StateMessage {
  kind: "state";
  seq: number;
  ts_us: number;
  q: number[];
  ee_pos: Vec3;
  ee_quat: [number, number, number, number];
  gripper_closed: boolean;
  base: Vec3;
  lift: number;
  extension: number;
}

export interface StatsMessage {
  kind: "stats";
  topic: string;
  hz: number;
  p50_ms: number;
  p99_ms: number;
  dropped: number;
  has_latency: boolean;
}

export interface ConfigMessage {
  kind: "config";
  protocol: number;
  robot: string;
  joints: { axis: Vec3; link_translation: Vec3 }[];
  tool_translation: Vec3;
}

export interface ErrorMessage {
  kind: "error";
  reason: string;
}

export type Outbound = HandMessage | ControlMessage;
export type Inbound = StateMessage | StatsMessage | ConfigMessage | ErrorMessage;

export function validateHandMessage(msg: HandMessage): void {
  if (msg.kind !== "hand") throw new Error("kind must be 'hand'");
  if (msg.hand !== "left" && msg.hand !== "right")
    throw new Error("hand must be 'left' or 'right'");
  if (!Array.isArray(msg.keypoints) || msg.keypoints.length !== 21)
    throw new Error("keypoints must have exactly 21 entries");
  for (const kp of msg.keypoints) {
    if (!Array.isArray(kp) || kp.length !== 3)
      throw new Error("each keypoint must be [x, y, z]");
    for (const v of kp)
      if (typeof v !== "number" || !Number.isFinite(v))
        throw new Error("keypoint coordinates must be finite numbers");
  }
  if (!(msg.confidence >= 0 && msg.confidence <= 1))
    throw new Error("confidence must be in [0, 1]");
}

export function validateControlMessage(msg: ControlMessage): void {
  if (msg.kind !== "control") throw new Error("kind must be 'control'");
  if (!CONTROL_VERBS.includes(msg.control))
    throw new Error(`unknown control verb '${msg.control}'`);
  if (msg.control === "set_resolution") {
    if (typeof msg.value !== "number" || !(msg.value > 0 && msg.value <= MAX_RESOLUTION))
      throw new Error(`set_resolution value must be in (0, ${MAX_RESOLUTION}]`);
  }
}

export function handMessage(keypoints: number[][], hand: "left" | "right" = "right",
                            confidence = 1.0): HandMessage {
  const msg: HandMessage = { kind: "hand", hand, keypoints, confidence };
  validateHandMessage(msg);
  return msg;
}

export function controlMessage(verb: ControlVerb, value?: number): ControlMessage {
  const msg: ControlMessage = { kind: "control", control: verb };
  if (verb === "set_resolution") {
    // widgets clamp: a slider at 0 becomes the minimum, never invalid
    const v = value ?? MIN_RESOLUTION;
    msg.value = Math.min(MAX_RESOLUTION, Math.max(MIN_RESOLUTION, v));
  }
  validateControlMessage(msg);
  return msg;
}

export function parseInbound(raw: string): Inbound {
  const msg = JSON.parse(raw);
  if (typeof msg !== "object" || msg === null || typeof msg.kind !== "string")
    throw new Error("inbound message must be an object with a kind");
  switch (msg.kind) {
    case "state":
    case "stats":
    case "config":
    case "error":
      return msg as Inbound;
    default:
      throw new Error(`unknown inbound kind '${msg.kind}'`);
  }
}
