"""Joint-space PD control on unit-inertia double-integrator joints.

The plant is q'' = tau per joint (unit inertia). A constant gravity bias
torque drags each joint; the compensation flag feeds the same torque
forward, which is what removes the steady-state error g/kp.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NonFinite
from ..wire.messages import Timestamp

MAX_DT = 0.01  # the integrator is only trusted at control rates >= 100 Hz


@dataclass(frozen=True)
class PdGains:
    kp: np.ndarray
    kd: np.ndarray
    gravity_bias: np.ndarray
    compensate: bool = True

    def __post_init__(self):
        kp = np.atleast_1d(np.asarray(self.kp, dtype=float))
        kd = np.atleast_1d(np.asarray(self.kd, dtype=float))
        g = np.atleast_1d(np.asarray(self.gravity_bias, dtype=float))
        if np.any(kp <= 0.0):
            raise ValueError("kp must be > 0")
        if np.any(kd < 0.0):
            raise ValueError("kd must be >= 0")
        object.__setattr__(self, "kp", kp)
        object.__setattr__(self, "kd", kd)
        object.__setattr__(self, "gravity_bias", g)

    @classmethod
    def critically_damped(cls, kp, n, gravity_bias=0.0, compensate=True):
        kp = np.full(n, float(kp))
        return cls(kp=kp, kd=2.0 * np.sqrt(kp), gravity_bias=np.full(n, float(gravity_bias)),
                   compensate=compensate)


@dataclass(frozen=True)
class JointState:
    q: np.ndarray
    qd: np.ndarray
    ts: Timestamp

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "qd", np.asarray(self.qd, dtype=float))


def pd_step(js, q_target, gains, dt, limits=None):
    """Advance one control period with semi-implicit Euler.

    tau = kp (q_target - q) - kd qd - g + (g if compensating), then
    qd += tau dt; q += qd dt. Joints pushed into a limit stop there with
    zero velocity.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must be in (0, {MAX_DT}], got {dt}")
    q_target = np.asarray(q_target, dtype=float)
    if not (np.all(np.isfinite(js.q)) and np.all(np.isfinite(js.qd))
            and np.all(np.isfinite(q_target))):
        raise NonFinite("joint state or target is not finite")

    tau = gains.kp * (q_target - js.q) - gains.kd * js.qd - gains.gravity_bias
    if gains.compensate:
        tau = tau + gains.gravity_bias
    qd = js.qd + tau * dt
    q = js.q + qd * dt
    if limits is not None:
        lo, hi = limits
        below = q < lo
        above = q > hi
        q = np.clip(q, lo, hi)
        qd = np.where(below | above, 0.0, qd)
    ts = Timestamp(js.ts.mono_ns + int(round(dt * 1e9)),
                   js.ts.wall_us + int(round(dt * 1e6)))
    return JointState(q=q, qd=qd, ts=ts)
