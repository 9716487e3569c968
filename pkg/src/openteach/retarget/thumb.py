"""Thumb retargeting through a single workspace zone.

The human thumb tip, projected onto the palm plane, is mapped into the
robot thumb workspace by the perspective transform (homography) defined by
one 4-corner quad correspondence. Points outside the human quad clamp to
the nearest boundary point first, so the thumb never stagnates out of
bounds. Height above the palm maps linearly between the two height ranges.
A damped least-squares solve then turns the 3D tip target into thumb joint
angles.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import BadBounds, NonFinite
from ..simrobot.kinematics import fk_position, jacobian
from .palm import palm_frame

IK_TOL = 1e-6
IK_MAX_ITER = 200


def _quad_area(quad):
    x = quad[:, 0]
    y = quad[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _is_convex_ccw(quad):
    for i in range(4):
        a, b, c = quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]
        if _cross2(b - a, c - b) <= 0.0:
            return False
    return True


@dataclass(frozen=True)
class ThumbBounds:
    human_quad: np.ndarray    # (4, 2) convex CCW, palm-plane meters
    robot_quad: np.ndarray    # (4, 2) robot thumb workspace plane
    human_height: tuple[float, float]
    robot_height: tuple[float, float]

    def __post_init__(self):
        hq = np.asarray(self.human_quad, dtype=float)
        rq = np.asarray(self.robot_quad, dtype=float)
        for name, quad in (("human_quad", hq), ("robot_quad", rq)):
            if quad.shape != (4, 2):
                raise BadBounds(f"{name} must be (4, 2)")
            if abs(_quad_area(quad)) <= 1e-8 or not _is_convex_ccw(quad):
                raise BadBounds(f"{name} must be convex, counterclockwise, non-degenerate")
        for name, (lo, hi) in (("human_height", self.human_height),
                               ("robot_height", self.robot_height)):
            if not lo < hi:
                raise BadBounds(f"{name} min must be < max")
        object.__setattr__(self, "human_quad", hq)
        object.__setattr__(self, "robot_quad", rq)


def homography_from_quads(src, dst):
    """3x3 perspective transform with H[2,2] = 1 via direct linear solve."""
    A = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        x, y = src[i]
        u, v = dst[i]
        A[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        A[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i] = u
        b[2 * i + 1] = v
    try:
        h = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as e:
        raise BadBounds(f"homography is unsolvable: {e}") from e
    return np.append(h, 1.0).reshape(3, 3)


def apply_homography(H, point):
    v = H @ np.array([point[0], point[1], 1.0])
    if abs(v[2]) < 1e-12:
        raise BadBounds("homography maps point to infinity")
    return v[:2] / v[2]


def point_in_quad(quad, p):
    for i in range(4):
        a, b = quad[i], quad[(i + 1) % 4]
        if _cross2(b - a, p - a) < 0.0:
            return False
    return True


def closest_point_on_quad(quad, p):
    """Euclidean-nearest point on the quad boundary."""
    best = None
    best_d2 = np.inf
    for i in range(4):
        a, b = quad[i], quad[(i + 1) % 4]
        ab = b - a
        t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        c = a + t * ab
        d2 = np.dot(p - c, p - c)
        if d2 < best_d2:
            best_d2 = d2
            best = c
    return best


def thumb_retarget(frame, bounds):
    """3D thumb tip target in the robot hand frame (workspace plane + height)."""
    pf = palm_frame(frame)
    q2d, height = pf.to_palm_2d(frame.tip("thumb"))
    if not point_in_quad(bounds.human_quad, q2d):
        q2d = closest_point_on_quad(bounds.human_quad, q2d)
    H = homography_from_quads(bounds.human_quad, bounds.robot_quad)
    mapped = apply_homography(H, q2d)
    h_lo, h_hi = bounds.human_height
    r_lo, r_hi = bounds.robot_height
    t = (np.clip(height, h_lo, h_hi) - h_lo) / (h_hi - h_lo)
    return np.array([mapped[0], mapped[1], r_lo + t * (r_hi - r_lo)])


@dataclass(frozen=True)
class ThumbIkResult:
    q: np.ndarray
    clamped: bool       # True when the tip target could not be reached
    residual: float     # meters between fk(q) and the requested tip

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))


def thumb_ik(tip, chain, seed=None, damping=0.01,
             tol=IK_TOL, max_iter=IK_MAX_ITER):
    """Position-only DLS for the thumb chain, warm-started from ``seed``.

    A warm seed (the previous solution) normally converges directly; when
    it does not, a few deterministic restarts cover the joint-limit folds
    of the workspace. Out-of-reach targets return the best-effort angles
    with the clamped flag set and the remaining residual.
    """
    tip = np.asarray(tip, dtype=float)
    if not np.all(np.isfinite(tip)):
        raise NonFinite("thumb tip target is not finite")

    if seed is not None:
        result = _dls_position(tip, chain, chain.clamp(np.asarray(seed, dtype=float)),
                               damping, tol, max_iter)
        if not result.clamped:
            return result

    candidates = []
    for q0 in _restart_seeds(tip, chain):
        result = _dls_position(tip, chain, q0, damping, tol, max_iter, patience=15)
        if not result.clamped:
            return result
        candidates.append(result)
    # Nothing converged under the quick budget: polish the best few end
    # points with the full budget before falling back to sampling.
    candidates.sort(key=lambda r: r.residual)
    best = candidates[0]
    for cand in candidates[:3]:
        result = _dls_position(tip, chain, cand.q, damping, tol, max_iter)
        if not result.clamped:
            return result
        if result.residual < best.residual:
            best = result
    # Last resort for targets whose basin is a sliver at a limit corner:
    # deterministically sample the joint box and polish the closest hits,
    # then jitter around the best end point found so far.
    for q0 in _sampled_seeds(tip, chain, n=400, keep=5):
        result = _dls_position(tip, chain, q0, damping, tol, max_iter)
        if not result.clamped:
            return result
        if result.residual < best.residual:
            best = result
    rng = np.random.default_rng(0x5EED)  # fixed: the solver stays deterministic
    for scale in (0.05, 0.1, 0.2, 0.4):
        for _ in range(8):
            q0 = chain.clamp(best.q + rng.normal(0.0, scale, chain.njoints))
            result = _dls_position(tip, chain, q0, damping, tol, max_iter)
            if not result.clamped:
                return result
            if result.residual < best.residual:
                best = result
    return best


def _sampled_seeds(tip, chain, n, keep):
    rng = np.random.default_rng(0x7B)  # fixed: the solver stays deterministic
    samples = rng.uniform(chain.lower, chain.upper, size=(n, chain.njoints))
    errs = [np.linalg.norm(fk_position(chain, q) - tip) for q in samples]
    order = np.argsort(errs)[:keep]
    return [samples[i] for i in order]


def _restart_seeds(tip, chain):
    """Deterministic seed bank covering the workspace folds: the base
    swivel aligned to the target azimuth (both branches, since the flexion
    chain can curl past vertical) crossed with a few flexion patterns."""
    lo, hi = chain.lower, chain.upper
    mid = (lo + hi) / 2.0
    if np.hypot(tip[0], tip[1]) > 1e-9:
        azimuth = float(np.arctan2(tip[1], tip[0]))
    else:
        azimuth = 0.0
    branches = {float(np.clip(a, lo[0], hi[0]))
                for a in (azimuth, azimuth - np.pi, azimuth + np.pi)}
    folds = (mid[1:], lo[1:] * 0.75, hi[1:] * 0.75,
             (lo[1:] + 3 * hi[1:]) / 4.0, (3 * lo[1:] + hi[1:]) / 4.0)
    seeds = []
    for a in sorted(branches):
        for flex in folds:
            s = mid.copy()
            s[0] = a
            s[1:] = flex
            seeds.append(chain.clamp(s))
    seeds.append(mid)
    return seeds


def _dls_position(tip, chain, q0, damping, tol, max_iter, patience=None):
    q = q0.copy()
    best_q = q.copy()
    best_err = np.inf
    since_progress = 0
    for _ in range(max_iter):
        err = tip - fk_position(chain, q)
        norm = np.linalg.norm(err)
        if norm < best_err * (1.0 - 1e-3):
            since_progress = 0
        else:
            since_progress += 1
            if patience is not None and since_progress > patience:
                break  # stuck in a limit fold; caller tries the next start
        if norm < best_err:
            best_err = norm
            best_q = q.copy()
        if norm < tol:
            return ThumbIkResult(q=q, clamped=False, residual=float(norm))
        # damping shrinks with the error so convergence does not stall
        lam2 = (damping * min(1.0, norm / 0.01)) ** 2
        J = jacobian(chain, q)[:3]
        JJt = J @ J.T + lam2 * np.eye(3)
        dq = J.T @ np.linalg.solve(JJt, err)
        step = np.linalg.norm(dq)
        if step > 0.5:
            dq *= 0.5 / step
        q = chain.clamp(q + dq)
    return ThumbIkResult(q=best_q, clamped=True, residual=float(best_err))
