"""Non-parametric nearest-neighbor policy.

Acts by averaging the actions of the k nearest stored observations
(Euclidean distance, ties broken by lower dataset index). With state
observations this is the identity-encoder special case of a lookup-based
base policy.
"""

import numpy as np

from ..errors import EmptyDataset
from .linear import stack_steps


class KnnPolicy:
    def __init__(self, obs, act, k=1):
        self.obs = np.atleast_2d(np.asarray(obs, dtype=float))
        self.act = np.atleast_2d(np.asarray(act, dtype=float))
        if len(self.obs) == 0:
            raise EmptyDataset("k-NN policy needs a non-empty dataset")
        if len(self.obs) != len(self.act):
            raise ValueError("obs and act must have equal length")
        if not 1 <= k <= len(self.obs):
            raise ValueError(f"k must be in [1, {len(self.obs)}]")
        self.k = int(k)

    @property
    def obs_dim(self):
        return self.obs.shape[1]

    @property
    def act_dim(self):
        return self.act.shape[1]

    @classmethod
    def from_demos(cls, demos, k=1):
        obs, act = stack_steps(demos)
        return cls(obs, act, k=k)

    def act_on(self, obs):
        return knn_act(self, obs)


def knn_act(policy, obs):
    """Mean action of the k nearest dataset observations."""
    obs = np.asarray(obs, dtype=float)
    d2 = np.sum((policy.obs - obs) ** 2, axis=1)
    order = np.argsort(d2, kind="stable")[:policy.k]  # stable: low index wins ties
    return policy.act[order].mean(axis=0)
