from .knn import KnnPolicy, knn_act
from .linear import LinearPolicy, bc_fit_linear, stack_steps
from .rollout import (
    evaluate,
    load_policy,
    observation_from_state,
    policy_action,
    replay_actions,
    save_policy,
)
from .tasks import ReachTask

__all__ = [
    "KnnPolicy", "knn_act", "LinearPolicy", "bc_fit_linear", "stack_steps",
    "evaluate", "load_policy", "observation_from_state", "policy_action",
    "replay_actions", "save_policy", "ReachTask",
]
