// Scripted operator session against the live pipeline (the secondary
// acceptance): pad drag, pinch, pause, resolution change, panel rate.
//
// Spawns the real Python pipeline with the console source, connects the
// DOM-free session over the actual gateway WebSocket, and drives it the
// way the browser widgets would.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { WebSocket } from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ConsoleSession } from "../src/session.js";
import type { WebSocketLike } from "../src/session.js";
import type { StateMessage } from "../src/protocol.js";

const PORT = 23000 + Math.floor(Math.random() * 2000);

const CONFIG = `
[pipeline]
robot = "arm"
rate_hz = 90.0
kinematic = true
source = "console"
auto_engage = false

[gateway]
host = "127.0.0.1"
port = ${PORT}
update_hz = 30.0
`;

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor(cond: () => boolean, timeoutMs: number,
                       what: string): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (cond()) return;
    await sleep(20);
  }
  throw new Error(`timed out waiting for ${what}`);
}

let pipeline: ChildProcess;
let session: ConsoleSession;
const states: StateMessage[] = [];

async function connectWithRetry(url: string, attempts: number): Promise<ConsoleSession> {
  for (let i = 0; i < attempts; i++) {
    const s = new ConsoleSession({
      url, sendHz: 30,
      wsFactory: (u) => new WebSocket(u) as unknown as WebSocketLike,
    });
    try {
      await s.connect();
      return s;
    } catch {
      await sleep(500);
    }
  }
  throw new Error(`could not reach the gateway at ${url}`);
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "openteach-e2e-"));
  const cfgPath = join(dir, "console.toml");
  writeFileSync(cfgPath, CONFIG);
  pipeline = spawn("python3", ["-m", "openteach.cli", "run",
                               "--config", cfgPath, "--secs", "120"],
                   { stdio: ["ignore", "pipe", "pipe"] });
  pipeline.stderr?.on("data", () => { /* pipeline logs; keep the pipe drained */ });
  pipeline.stdout?.on("data", () => { /* summary JSON at exit */ });

  session = await connectWithRetry(`ws://127.0.0.1:${PORT}`, 30);
  session.onState = (s) => states.push(s);
  await waitFor(() => session.config !== null, 5000, "config hello");
}, 40_000);

afterAll(async () => {
  session?.close();
  pipeline?.kill("SIGTERM");
  await sleep(300);
  pipeline?.kill("SIGKILL");
});

async function steadyEe(settleMs = 600): Promise<[number, number, number]> {
  await sleep(settleMs);
  const s = session.latestState;
  if (!s) throw new Error("no state received yet");
  return [...s.ee_pos] as [number, number, number];
}

describe("scripted console session against the live pipeline", () => {
  let eeHome: [number, number, number];
  let dragDelta1: number;

  it("resumes and receives live state", async () => {
    expect(session.config?.robot).toBe("arm");
    expect(session.config?.joints.length).toBe(7);
    session.sendControl("resume");
    await waitFor(() => states.length > 5, 5000, "state flow");
    eeHome = await steadyEe();
    expect(Number.isFinite(eeHome[0])).toBe(true);
  });

  it("(d) the state panel updates at >= 20 Hz", async () => {
    const before = states.length;
    await sleep(2000);
    const received = states.length - before;
    expect(received).toBeGreaterThanOrEqual(40); // 20 Hz over 2 s
  });

  it("pad drag moves the end effector by the dragged distance", async () => {
    session.rig.wrist[0] = 0.06; // 6 cm pad drag
    const ee = await steadyEe();
    dragDelta1 = Math.hypot(ee[0] - eeHome[0], ee[1] - eeHome[1], ee[2] - eeHome[2]);
    expect(dragDelta1).toBeGreaterThan(0.055);
    expect(dragDelta1).toBeLessThan(0.065);
  });

  it("(a) a held pinch toggles the gripper exactly once", async () => {
    const startIndex = states.length;
    session.rig.pinchHeld = true;
    await sleep(400); // >> 50 ms debounce at 30 Hz frames
    session.rig.pinchHeld = false;
    await sleep(400);
    const seen = states.slice(startIndex);
    let toggles = 0;
    for (let i = 1; i < seen.length; i++)
      if (seen[i].gripper_closed !== seen[i - 1].gripper_closed) toggles += 1;
    expect(toggles).toBe(1);
    expect(session.latestState?.gripper_closed).toBe(true);
  });

  it("(b) post-pause hand motion produces no command change", async () => {
    session.sendControl("pause");
    await sleep(200);
    const eePaused = [...session.latestState!.ee_pos];
    const sentBefore = session.handsSent;
    session.rig.wrist[0] = 0.16; // wander while paused
    session.rig.wrist[1] = 0.08;
    await sleep(600);
    expect(session.handsSent).toBe(sentBefore); // locally paused: no frames
    const ee = session.latestState!.ee_pos;
    const drift = Math.hypot(ee[0] - eePaused[0], ee[1] - eePaused[1],
                             ee[2] - eePaused[2]);
    expect(drift).toBeLessThan(1e-6);
  });

  it("(c) post-resolution deltas halve", async () => {
    session.sendControl("resume"); // re-anchors at the wandered hand pose
    const eeResumed = await steadyEe();
    // resuming must not jump the robot
    const jump = Math.hypot(eeResumed[0] - session.latestState!.ee_pos[0],
                            eeResumed[1] - session.latestState!.ee_pos[1],
                            eeResumed[2] - session.latestState!.ee_pos[2]);
    expect(jump).toBeLessThan(1e-6);

    session.sendControl("set_resolution", 0.5);
    await sleep(300);
    const eeBefore = await steadyEe(300);
    session.rig.wrist[0] += 0.06; // the same 6 cm drag as before
    const eeAfter = await steadyEe();
    const dragDelta2 = Math.hypot(eeAfter[0] - eeBefore[0],
                                  eeAfter[1] - eeBefore[1],
                                  eeAfter[2] - eeBefore[2]);
    expect(Math.abs(dragDelta2 / dragDelta1 - 0.5)).toBeLessThan(0.02);
  });

  it("never emitted a schema-invalid message (no error replies)", () => {
    expect(session.errors).toEqual([]);
  });
}, 30_000);
