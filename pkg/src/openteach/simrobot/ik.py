"""Damped least-squares inverse kinematics.

Each iteration solves dq = J^T (J J^T + lambda^2 I)^-1 e where e is the
6-vector twist error (position error stacked on the rotation vector of
R_target R_current^T). Damping keeps steps bounded near singularities.
"""

import numpy as np

from ..errors import NoConvergence
from ..transforms import mat_from_quat, rotvec_from_mat
from .kinematics import fk, jacobian


def ik_dls(model, target_position, target_orientation, seed,
           damping=0.05, tol_pos=1e-6, tol_rot=1e-5, max_iter=300):
    """Solve for joint angles reaching the target pose.

    target_orientation is a (w, x, y, z) quaternion; pass None to solve
    position only. Raises NoConvergence carrying the best iterate when the
    tolerance is not met within max_iter.
    """
    target_position = np.asarray(target_position, dtype=float)
    R_target = None if target_orientation is None else mat_from_quat(target_orientation)
    q = model.clamp(np.asarray(seed, dtype=float).copy())
    rows = 3 if R_target is None else 6

    best_q = q.copy()
    best_err = np.inf
    for _ in range(max_iter):
        T = fk(model, q)
        e_pos = target_position - T[:3, 3]
        pos_err = np.linalg.norm(e_pos)
        if R_target is None:
            e = e_pos
            rot_err = 0.0
        else:
            e_rot = rotvec_from_mat(R_target @ T[:3, :3].T)
            rot_err = np.linalg.norm(e_rot)
            e = np.concatenate([e_pos, e_rot])
        total = pos_err + rot_err
        if total < best_err:
            best_err = total
            best_q = q.copy()
        if pos_err < tol_pos and rot_err < tol_rot:
            return q
        # Error-proportional damping: full damping while far from the
        # target, Newton-like once the error is small, so the last decades
        # to tolerance converge instead of stalling on the damping bias.
        lam2 = (damping * min(1.0, total)) ** 2
        J = jacobian(model, q)[:rows]
        JJt = J @ J.T + lam2 * np.eye(rows)
        dq = J.T @ np.linalg.solve(JJt, e)
        step = np.linalg.norm(dq)
        if step > 0.5:  # rad; keeps near-singular Newton steps sane
            dq *= 0.5 / step
        q = model.clamp(q + dq)

    # Report the positional shortfall of the best iterate.
    residual = float(np.linalg.norm(target_position - fk(model, best_q)[:3, 3]))
    raise NoConvergence(
        f"no convergence after {max_iter} iterations (residual {residual:.3g} m)",
        q=best_q, residual=residual,
    )
