// Operator session: owns the input rig state, the WebSocket, and the
// latest robot state and stats. DOM-free so the same code drives the
// browser page and the scripted end-to-end tests.

import { RigPose, Vec3, palmRotation, posedKeypoints } from "./hand.js";
import {
  ConfigMessage,
  ControlVerb,
  StateMessage,
  StatsMessage,
  controlMessage,
  handMessage,
  parseInbound,
} from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export interface SessionOptions {
  url: string;
  sendHz?: number;
  wsFactory?: (url: string) => WebSocketLike;
  now?: () => number; // milliseconds
}

export interface RigState {
  wrist: Vec3;
  yaw: number;
  pitch: number;
  curls: number[];
  pinchHeld: boolean;
}

export const STALE_AFTER_MS = 500;

export class ConsoleSession {
  rig: RigState = {
    wrist: [0, 0, 0],
    yaw: 0,
    pitch: 0,
    curls: [0, 0, 0, 0, 0],
    pinchHeld: false,
  };

  connected = false;
  locallyPaused = true; // the operator resumes explicitly
  resolution = 1.0;
  notice = "";

  config: ConfigMessage | null = null;
  latestState: StateMessage | null = null;
  latestStats: StatsMessage | null = null;
  statesReceived = 0;
  handsSent = 0;
  errors: string[] = [];

  onState: ((s: StateMessage) => void) | null = null;
  onStats: ((s: StatsMessage) => void) | null = null;
  onConfig: ((c: ConfigMessage) => void) | null = null;
  onNotice: ((text: string) => void) | null = null;

  private ws: WebSocketLike | null = null;
  private sender: ReturnType<typeof setInterval> | null = null;
  private lastStateAtMs = -Infinity;
  private readonly sendHz: number;
  private readonly now: () => number;
  private readonly wsFactory: (url: string) => WebSocketLike;
  private readonly url: string;

  constructor(opts: SessionOptions) {
    this.url = opts.url;
    this.sendHz = opts.sendHz ?? 30;
    this.now = opts.now ?? (() => Date.now());
    this.wsFactory =
      opts.wsFactory ?? ((url) => new WebSocket(url) as unknown as WebSocketLike);
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const ws = this.wsFactory(this.url);
      this.ws = ws;
      ws.onopen = () => {
        this.connected = true;
        this.setNotice("connected");
        this.startSender();
        resolve();
      };
      ws.onmessage = (ev) => this.handleMessage(String(ev.data));
      ws.onclose = () => {
        this.connected = false;
        this.stopSender();
        this.setNotice("disconnected");
      };
      ws.onerror = (ev) => {
        if (!this.connected) reject(ev instanceof Error ? ev : new Error("ws error"));
      };
    });
  }

  close(): void {
    this.stopSender();
    if (this.ws) this.ws.close();
    this.ws = null;
    this.connected = false;
  }

  // -- rig -> wire ---------------------------------------------------------

  rigFrame(): RigPose {
    return {
      wrist: [...this.rig.wrist] as Vec3,
      rotation: palmRotation(this.rig.yaw, this.rig.pitch),
      curls: [...this.rig.curls],
      pinch: this.rig.pinchHeld ? "pinky" : null,
    };
  }

  sendHandFrame(): boolean {
    // outbound hand messages only while connected and not locally paused
    if (!this.connected || this.locallyPaused || !this.ws) return false;
    const keypoints = posedKeypoints(this.rigFrame());
    this.ws.send(JSON.stringify(handMessage(keypoints)));
    this.handsSent += 1;
    return true;
  }

  sendControl(verb: ControlVerb, value?: number): boolean {
    if (!this.connected || !this.ws) {
      this.setNotice(`not connected: '${verb}' not sent`);
      return false;
    }
    const msg = controlMessage(verb, value);
    this.ws.send(JSON.stringify(msg));
    if (verb === "pause") this.locallyPaused = true;
    if (verb === "resume") this.locallyPaused = false;
    if (verb === "set_resolution" && msg.value !== undefined)
      this.resolution = msg.value;
    return true;
  }

  // -- inbound ----------------------------------------------------------------

  private handleMessage(raw: string): void {
    let msg;
    try {
      msg = parseInbound(raw);
    } catch (e) {
      this.errors.push(String(e));
      return;
    }
    switch (msg.kind) {
      case "state":
        this.latestState = msg;
        this.statesReceived += 1;
        this.lastStateAtMs = this.now();
        this.onState?.(msg);
        break;
      case "stats":
        this.latestStats = msg;
        this.onStats?.(msg);
        break;
      case "config":
        this.config = msg;
        this.onConfig?.(msg);
        break;
      case "error":
        this.errors.push(msg.reason);
        this.setNotice(`pipeline: ${msg.reason}`);
        break;
    }
  }

  isStale(): boolean {
    return this.connected && this.now() - this.lastStateAtMs > STALE_AFTER_MS;
  }

  // -- internals -----------------------------------------------------------------

  private startSender(): void {
    this.stopSender();
    this.sender = setInterval(() => this.sendHandFrame(), 1000 / this.sendHz);
  }

  private stopSender(): void {
    if (this.sender !== null) {
      clearInterval(this.sender);
      this.sender = null;
    }
  }

  private setNotice(text: string): void {
    this.notice = text;
    this.onNotice?.(text);
  }
}
