// Forward kinematics from the gateway's config hello: each joint carries a
// unit rotation axis and the fixed translation applied before it, plus a
// final tool translation. The linkage drawn on screen therefore matches the
// simulator's geometry exactly.

import { Mat3, Vec3, matMul, matVec, rotAxisAngle } from "./hand.js";

export interface JointConfig {
  axis: Vec3;
  link_translation: Vec3;
}

export interface RobotConfig {
  robot: string;
  joints: JointConfig[];
  tool_translation: Vec3;
}

const I3: Mat3 = [
  [1, 0, 0],
  [0, 1, 0],
  [0, 0, 1],
];

function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

// Positions of every joint followed by the end effector, for a given q.
export function linkagePoints(cfg: RobotConfig, q: number[]): Vec3[] {
  let R: Mat3 = I3;
  let p: Vec3 = [0, 0, 0];
  const points: Vec3[] = [];
  cfg.joints.forEach((joint, i) => {
    p = add(p, matVec(R, joint.link_translation));
    points.push(p);
    R = matMul(R, rotAxisAngle(joint.axis, q[i] ?? 0));
  });
  points.push(add(p, matVec(R, cfg.tool_translation)));
  return points;
}

export function eePosition(cfg: RobotConfig, q: number[]): Vec3 {
  const pts = linkagePoints(cfg, q);
  return pts[pts.length - 1];
}
