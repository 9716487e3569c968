"""Imitation on recorded teleop data, end to end.

Collects 20 scripted reach demonstrations through the full pipeline
(scripted hand, retargeting, simulated arm, recorder, alignment), fits a
linear behavior-cloning policy and a 1-nearest-neighbor policy, and
evaluates both closed-loop from jittered start poses.
"""

import numpy as np

from openteach.imitation import KnnPolicy, ReachTask, bc_fit_linear, evaluate

task = ReachTask()
print(f"reach goal: home ee + {np.round(task.goal_offset, 3)} "
      f"(success within {task.success_radius * 1000:.0f} mm)")

demos = task.collect_demos(n=20, ticks=90)
n_steps = sum(len(d) for d in demos)
print(f"collected {len(demos)} demos, {n_steps} aligned steps")

linear = bc_fit_linear(demos, lam=1e-8)
knn = KnnPolicy.from_demos(demos, k=1)

episodes = task.eval_episodes(10)
for name, policy in (("linear BC", linear), ("1-NN", knn)):
    successes, traces = evaluate(task.make_env(), policy, episodes,
                                 task.success, steps=150, rate_hz=task.rate_hz)
    final = np.mean([np.linalg.norm(t[-1] - task.goal) for t in traces])
    print(f"{name}: {successes}/10 episodes, "
          f"mean final distance {final * 1000:.2f} mm")
