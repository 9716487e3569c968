"""The desk-scale reach task.

Scripted teleoperation drives the simulated arm from its home pose toward a
fixed goal; each run goes through the full pipeline (scripted hand source,
retargeting, environment, recorder, timestamp alignment) and compiles into
a demonstration. Policies trained on those demonstrations are evaluated
closed-loop from jittered start poses.
"""

import os
import tempfile

import numpy as np

from ..pipeline.config import PipelineConfig, build_bus, build_env
from ..pipeline.loop import TeleopLoop
from ..pipeline.source import PoseSpec
from ..recorder import Recorder, align, load_stream_log
from ..simrobot import ArmEnv, ik_dls


class ReachTask:
    def __init__(self, goal_offset=(0.15, 0.10, -0.08), success_radius=0.01,
                 rate_hz=30.0, approach=0.9, seed=0):
        self.goal_offset = np.asarray(goal_offset, dtype=float)
        self.success_radius = success_radius
        self.rate_hz = rate_hz
        self.approach = approach  # per-tick geometric approach factor
        self.seed = seed
        env = ArmEnv(kinematic=True)
        self.home_q = env.home_q.copy()
        self.home_ee, self.home_quat = env.home_pose()
        self.goal = self.home_ee + self.goal_offset

    def success(self, state):
        return bool(np.linalg.norm(state.ee_position - self.goal)
                    <= self.success_radius)

    def demo_script(self, demo_index, noise=0.002):
        """Wrist path converging geometrically on the goal, with a small
        seeded wiggle so the dataset spans a tube around the nominal path."""
        rng = np.random.default_rng(self.seed * 1000 + demo_index)
        rho = self.approach
        offset = self.goal_offset

        def script(k, t):
            progress = 1.0 - rho ** k
            wiggle = rng.normal(0.0, noise, 3) if k > 0 else np.zeros(3)
            wrist = progress * offset + wiggle
            return PoseSpec(wrist=tuple(wrist))

        return script

    def pipeline_config(self):
        return PipelineConfig.from_dict({
            "pipeline": {"robot": "arm", "rate_hz": self.rate_hz,
                         "kinematic": True, "auto_engage": True},
        })

    def collect_demo(self, demo_index, ticks=90, out_dir=None):
        """One scripted teleop run through the live pipeline; returns the
        aligned demonstration (logs land in out_dir when given)."""
        cfg = self.pipeline_config()
        bus = build_bus(cfg)
        env = build_env(cfg)
        loop = TeleopLoop(bus, env, cfg.loop_config())

        own_dir = out_dir is None
        if own_dir:
            tmp = tempfile.TemporaryDirectory(prefix="openteach_demo_")
            out_dir = tmp.name
        topics = [cfg.topics.state, cfg.topics.command]
        recorder = Recorder(bus, topics, out_dir).start()
        loop.run_lockstep(self.demo_script(demo_index), ticks)
        recorder.stop()

        logs = {t: load_stream_log(os.path.join(out_dir, t.replace("/", "_") + ".ndjson"))
                for t in topics}
        tolerance = 0.5 / self.rate_hz
        # Commands are logged one tick after the state they were issued
        # from; the lookahead offset pairs each state with the command the
        # operator produced while observing it.
        demo = align(logs, cfg.topics.state, tolerance,
                     offsets={cfg.topics.command: -1.0 / self.rate_hz},
                     metadata={"robot": "arm", "task": "reach",
                               "demo_index": demo_index})
        if own_dir:
            tmp.cleanup()
        return demo

    def collect_demos(self, n=20, ticks=90):
        return [self.collect_demo(i, ticks=ticks) for i in range(n)]

    def eval_episodes(self, n=10, spread=0.03):
        """Initial joint vectors: IK solutions for jittered starts around
        the home pose. Deterministic for a given task seed."""
        rng = np.random.default_rng(self.seed + 777)
        env = ArmEnv(kinematic=True)
        episodes = []
        while len(episodes) < n:
            delta = rng.uniform(-spread, spread, 3)
            q0 = ik_dls(env.model, self.home_ee + delta, self.home_quat,
                        seed=self.home_q)
            episodes.append(q0)
        return episodes

    def make_env(self):
        return ArmEnv(kinematic=True)
