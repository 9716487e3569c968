// Synthetic articulated hand: the same 21-keypoint template the pipeline's
// synthetic source uses, posed by wrist offset, palm orientation, per-finger
// curl and a pinch override. Keypoint layout: 0 = wrist, then four points
// per finger (thumb, index, middle, ring, pinky), knuckle to tip.

export type Vec3 = [number, number, number];
export type Mat3 = number[][]; // row-major 3x3

export const FINGERS = ["thumb", "index", "middle", "ring", "pinky"] as const;
export type Finger = (typeof FINGERS)[number];

const KNUCKLES: Record<Finger, Vec3> = {
  thumb: [0.025, -0.03, 0.0],
  index: [0.095, -0.005, 0.0],
  middle: [0.098, 0.02, 0.0],
  ring: [0.092, 0.045, 0.0],
  pinky: [0.082, 0.068, 0.0],
};

const SEGMENTS: Record<Finger, [number, number, number]> = {
  thumb: [0.045, 0.035, 0.03],
  index: [0.042, 0.028, 0.022],
  middle: [0.046, 0.03, 0.024],
  ring: [0.042, 0.028, 0.022],
  pinky: [0.032, 0.022, 0.018],
};

const PALM_NORMAL: Vec3 = [0.0, 0.0, 1.0];

function norm(v: Vec3): number {
  return Math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

function normalize(v: Vec3): Vec3 {
  const n = norm(v);
  return [v[0] / n, v[1] / n, v[2] / n];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

const DIRECTIONS: Record<Finger, Vec3> = {
  thumb: normalize([0.06, -0.05, 0.0]),
  index: normalize(KNUCKLES.index),
  middle: normalize(KNUCKLES.middle),
  ring: normalize(KNUCKLES.ring),
  pinky: normalize(KNUCKLES.pinky),
};

export function rotAxisAngle(axis: Vec3, angle: number): Mat3 {
  const [x, y, z] = axis;
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  const C = 1.0 - c;
  return [
    [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
    [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
    [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
  ];
}

export function matVec(R: Mat3, v: Vec3): Vec3 {
  return [
    R[0][0] * v[0] + R[0][1] * v[1] + R[0][2] * v[2],
    R[1][0] * v[0] + R[1][1] * v[1] + R[1][2] * v[2],
    R[2][0] * v[0] + R[2][1] * v[1] + R[2][2] * v[2],
  ];
}

export function matMul(A: Mat3, B: Mat3): Mat3 {
  const out: Mat3 = [
    [0, 0, 0],
    [0, 0, 0],
    [0, 0, 0],
  ];
  for (let i = 0; i < 3; i++)
    for (let j = 0; j < 3; j++)
      out[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j] + A[i][2] * B[2][j];
  return out;
}

export function templateKeypoints(): Vec3[] {
  const pts: Vec3[] = Array.from({ length: 21 }, () => [0, 0, 0] as Vec3);
  FINGERS.forEach((finger, f) => {
    let p: Vec3 = [...KNUCKLES[finger]];
    pts[1 + 4 * f] = [...p];
    SEGMENTS[finger].forEach((seg, s) => {
      const d = DIRECTIONS[finger];
      p = [p[0] + seg * d[0], p[1] + seg * d[1], p[2] + seg * d[2]];
      pts[2 + 4 * f + s] = [...p];
    });
  });
  return pts;
}

export interface RigPose {
  wrist: Vec3;             // meters in the headset frame
  rotation: Mat3 | null;   // palm orientation, null = identity
  curls: number[];         // 5 values in [0, 1]
  pinch: "pinky" | "index" | null;
}

// Pose the template: curl c bends each of the three finger joints by
// c * pi/2 toward the palm; pinch snaps the thumb tip next to the chosen
// fingertip; then the rigid wrist transform applies.
export function posedKeypoints(pose: RigPose): Vec3[] {
  const pts = templateKeypoints();
  const curls = pose.curls.map((c) => Math.min(1, Math.max(0, c)));
  FINGERS.forEach((finger, f) => {
    const c = curls[f] ?? 0;
    if (c === 0) return;
    const angle = (c * Math.PI) / 2;
    const axis = normalize(cross(DIRECTIONS[finger], PALM_NORMAL));
    const R = rotAxisAngle(axis, angle);
    const base = 1 + 4 * f;
    for (let joint = 0; joint < 3; joint++) {
      const pivot = pts[base + joint];
      for (let k = base + joint + 1; k < base + 4; k++) {
        const rel: Vec3 = [
          pts[k][0] - pivot[0],
          pts[k][1] - pivot[1],
          pts[k][2] - pivot[2],
        ];
        const r = matVec(R, rel);
        pts[k] = [pivot[0] + r[0], pivot[1] + r[1], pivot[2] + r[2]];
      }
    }
  });
  if (pose.pinch !== null) {
    const targetIndex = 4 + 4 * FINGERS.indexOf(pose.pinch);
    const t = pts[targetIndex];
    pts[4] = [t[0] + 0.004, t[1], t[2]];
  }
  return pts.map((p) => {
    const r = pose.rotation ? matVec(pose.rotation, p) : p;
    return [
      r[0] + pose.wrist[0],
      r[1] + pose.wrist[1],
      r[2] + pose.wrist[2],
    ] as Vec3;
  });
}

// Palm yaw (about z) then pitch (about y), composed like the input rig.
export function palmRotation(yaw: number, pitch: number): Mat3 {
  return matMul(rotAxisAngle([0, 0, 1], yaw), rotAxisAngle([0, 1, 0], pitch));
}
