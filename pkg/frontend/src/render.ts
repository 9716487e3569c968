// Canvas view of the robot: linkage from joint state via the shared FK
// constants, end-effector marker, gripper glyph, base pose, stats panel,
// and a stale banner when the state feed stops. Renders only what the
// pipeline published; no client-side prediction.

import { RobotConfig, linkagePoints } from "./fk.js";
import { Vec3 } from "./hand.js";
import { StateMessage, StatsMessage } from "./protocol.js";

const SCALE = 150; // pixels per meter
const EE_RADIUS = 6;

export class RobotView {
  private ctx: CanvasRenderingContext2D;

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  // side view: world x right, world z up, y ignored (depth)
  private project(p: Vec3): [number, number] {
    return [
      this.canvas.width / 2 + p[0] * SCALE,
      this.canvas.height - 40 - p[2] * SCALE,
    ];
  }

  draw(config: RobotConfig | null, state: StateMessage | null,
       stats: StatsMessage | null, stale: boolean): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    // ground line
    ctx.strokeStyle = "#888";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(0, canvas.height - 40);
    ctx.lineTo(canvas.width, canvas.height - 40);
    ctx.stroke();

    if (config && state) {
      if (config.joints.length > 0) {
        this.drawLinkage(config, state);
      } else {
        this.drawMarker(state.ee_pos, state.gripper_closed);
      }
      this.drawBase(state);
    }
    this.drawStats(stats);
    if (stale) this.drawStaleBanner();
  }

  private drawLinkage(config: RobotConfig, state: StateMessage): void {
    const { ctx } = this;
    const pts = linkagePoints(config, state.q).map((p) => this.project(p));
    ctx.strokeStyle = "#2266cc";
    ctx.lineWidth = 4;
    ctx.lineCap = "round";
    ctx.beginPath();
    ctx.moveTo(pts[0][0], pts[0][1]);
    for (const [x, y] of pts.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
    ctx.fillStyle = "#444";
    for (const [x, y] of pts.slice(0, -1)) {
      ctx.beginPath();
      ctx.arc(x, y, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
    this.drawMarker(state.ee_pos, state.gripper_closed);
  }

  private drawMarker(ee: Vec3, gripperClosed: boolean): void {
    const { ctx } = this;
    const [x, y] = this.project(ee);
    ctx.strokeStyle = gripperClosed ? "#cc2222" : "#22aa44";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(x, y, EE_RADIUS, 0, 2 * Math.PI);
    ctx.stroke();
    // gripper glyph: closed = bars together, open = apart
    const gap = gripperClosed ? 2 : 7;
    ctx.beginPath();
    ctx.moveTo(x - gap, y - 10);
    ctx.lineTo(x - gap, y - 18);
    ctx.moveTo(x + gap, y - 10);
    ctx.lineTo(x + gap, y - 18);
    ctx.stroke();
  }

  private drawBase(state: StateMessage): void {
    const { ctx } = this;
    ctx.fillStyle = "#333";
    ctx.font = "12px monospace";
    ctx.fillText(
      `base x=${state.base[0].toFixed(3)} lift=${state.lift.toFixed(3)} ` +
      `ext=${state.extension.toFixed(3)} gripper=${state.gripper_closed ? "closed" : "open"}`,
      10, this.canvas.height - 12);
  }

  private drawStats(stats: StatsMessage | null): void {
    const { ctx } = this;
    ctx.fillStyle = "#333";
    ctx.font = "12px monospace";
    if (stats) {
      const lat = stats.has_latency
        ? `p50 ${stats.p50_ms.toFixed(1)} ms / p99 ${stats.p99_ms.toFixed(1)} ms`
        : "no latency data";
      ctx.fillText(`${stats.topic}: ${stats.hz.toFixed(1)} Hz, ${lat}, ` +
                   `dropped ${stats.dropped}`, 10, 18);
    } else {
      ctx.fillText("no stats yet", 10, 18);
    }
  }

  private drawStaleBanner(): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "rgba(200, 40, 40, 0.85)";
    ctx.fillRect(0, 30, canvas.width, 28);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 14px sans-serif";
    ctx.fillText("STALE: no robot state for > 0.5 s", 12, 49);
  }
}
