// Page wiring: widgets -> session rig, session -> renderer.

import { ConsoleSession } from "./session.js";
import { RobotView } from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const urlInput = el<HTMLInputElement>("ws-url");
const connectBtn = el<HTMLButtonElement>("connect");
const pauseBtn = el<HTMLButtonElement>("pause");
const resumeBtn = el<HTMLButtonElement>("resume");
const reanchorBtn = el<HTMLButtonElement>("reanchor");
const resolution = el<HTMLInputElement>("resolution");
const resolutionOut = el<HTMLSpanElement>("resolution-value");
const heightSlider = el<HTMLInputElement>("height");
const yawSlider = el<HTMLInputElement>("yaw");
const pitchSlider = el<HTMLInputElement>("pitch");
const pinchBtn = el<HTMLButtonElement>("pinch");
const pad = el<HTMLCanvasElement>("pad");
const view = el<HTMLCanvasElement>("view");
const statusLine = el<HTMLDivElement>("status");

let session: ConsoleSession | null = null;
const robotView = new RobotView(view);

const curlSliders = ["thumb", "index", "middle", "ring", "pinky"].map((finger) =>
  el<HTMLInputElement>(`curl-${finger}`));

function status(text: string): void {
  statusLine.textContent = text;
}

connectBtn.addEventListener("click", async () => {
  session?.close();
  session = new ConsoleSession({ url: urlInput.value, sendHz: 30 });
  session.onNotice = status;
  try {
    await session.connect();
  } catch {
    status(`could not connect to ${urlInput.value}`);
  }
});

pauseBtn.addEventListener("click", () => session?.sendControl("pause"));
resumeBtn.addEventListener("click", () => session?.sendControl("resume"));
reanchorBtn.addEventListener("click", () => session?.sendControl("reset_anchor"));

resolution.addEventListener("input", () => {
  const v = Number(resolution.value);
  resolutionOut.textContent = v.toFixed(2);
  session?.sendControl("set_resolution", v);
});

// -- pad: drag to move the wrist in the x-y plane ---------------------------
const PAD_RANGE_M = 0.25; // full pad deflection in meters
let dragging = false;

function padToWrist(ev: PointerEvent): void {
  if (!session) return;
  const rect = pad.getBoundingClientRect();
  const nx = (ev.clientX - rect.left) / rect.width - 0.5;
  const ny = (ev.clientY - rect.top) / rect.height - 0.5;
  session.rig.wrist[0] = nx * 2 * PAD_RANGE_M;
  session.rig.wrist[1] = -ny * 2 * PAD_RANGE_M;
  drawPad();
}

pad.addEventListener("pointerdown", (ev) => {
  dragging = true;
  pad.setPointerCapture(ev.pointerId);
  padToWrist(ev);
});
pad.addEventListener("pointermove", (ev) => dragging && padToWrist(ev));
pad.addEventListener("pointerup", () => (dragging = false));

function drawPad(): void {
  const ctx = pad.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, pad.width, pad.height);
  ctx.strokeStyle = "#aaa";
  ctx.strokeRect(0, 0, pad.width, pad.height);
  const wx = session?.rig.wrist[0] ?? 0;
  const wy = session?.rig.wrist[1] ?? 0;
  const x = (wx / (2 * PAD_RANGE_M) + 0.5) * pad.width;
  const y = (0.5 - wy / (2 * PAD_RANGE_M)) * pad.height;
  ctx.fillStyle = "#2266cc";
  ctx.beginPath();
  ctx.arc(x, y, 6, 0, 2 * Math.PI);
  ctx.fill();
}

heightSlider.addEventListener("input", () => {
  if (session) session.rig.wrist[2] = Number(heightSlider.value);
});
yawSlider.addEventListener("input", () => {
  if (session) session.rig.yaw = Number(yawSlider.value);
});
pitchSlider.addEventListener("input", () => {
  if (session) session.rig.pitch = Number(pitchSlider.value);
});
curlSliders.forEach((slider, i) => {
  slider.addEventListener("input", () => {
    if (session) session.rig.curls[i] = Number(slider.value);
  });
});
pinchBtn.addEventListener("pointerdown", () => {
  if (session) session.rig.pinchHeld = true;
});
pinchBtn.addEventListener("pointerup", () => {
  if (session) session.rig.pinchHeld = false;
});
pinchBtn.addEventListener("pointerleave", () => {
  if (session) session.rig.pinchHeld = false;
});

// -- render loop ------------------------------------------------------------
function frame(): void {
  if (session) {
    robotView.draw(session.config, session.latestState, session.latestStats,
                   session.isStale());
  }
  drawPad();
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
