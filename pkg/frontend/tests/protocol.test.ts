// Schema discipline: the console can only emit messages that pass the
// validators, and the validators agree with the gateway's fixtures.

import { describe, expect, it } from "vitest";
import {
  ControlMessage,
  HandMessage,
  controlMessage,
  handMessage,
  parseInbound,
  validateControlMessage,
  validateHandMessage,
} from "../src/protocol.js";
import { posedKeypoints } from "../src/hand.js";
import fixtures from "./fixtures/protocol.json";

describe("protocol fixtures", () => {
  it("accepts every valid fixture", () => {
    for (const msg of fixtures.valid) {
      if (msg.kind === "hand") {
        expect(() => validateHandMessage(msg as HandMessage)).not.toThrow();
      } else {
        expect(() => validateControlMessage(msg as ControlMessage)).not.toThrow();
      }
    }
  });

  it("rejects every invalid fixture", () => {
    for (const msg of fixtures.invalid) {
      const check = () => {
        if (msg.kind === "hand") validateHandMessage(msg as HandMessage);
        else if (msg.kind === "control") validateControlMessage(msg as ControlMessage);
        else throw new Error("unknown kind");
      };
      expect(check, JSON.stringify(msg)).toThrow();
    }
  });
});

describe("builders", () => {
  it("hand messages carry the posed rig", () => {
    const kp = posedKeypoints({
      wrist: [0.1, 0, 0], rotation: null, curls: [0, 0, 0, 0, 0], pinch: null,
    });
    const msg = handMessage(kp);
    expect(msg.kind).toBe("hand");
    expect(msg.keypoints.length).toBe(21);
    expect(() => validateHandMessage(msg)).not.toThrow();
  });

  it("resolution clamps to the minimum instead of going invalid", () => {
    const msg = controlMessage("set_resolution", 0);
    expect(msg.value).toBe(0.01);
    const big = controlMessage("set_resolution", 50);
    expect(big.value).toBe(10.0);
  });

  it("plain verbs carry no value", () => {
    expect(controlMessage("pause")).toEqual({ kind: "control", control: "pause" });
    expect(controlMessage("resume")).toEqual({ kind: "control", control: "resume" });
  });
});

describe("inbound parsing", () => {
  it("accepts the documented outbound kinds", () => {
    for (const kind of ["state", "stats", "config", "error"]) {
      expect(parseInbound(JSON.stringify({ kind }))).toHaveProperty("kind", kind);
    }
  });

  it("rejects unknown kinds and non-objects", () => {
    expect(() => parseInbound('{"kind": "telemetry"}')).toThrow();
    expect(() => parseInbound("42")).toThrow();
    expect(() => parseInbound("not json")).toThrow();
  });
});
