"""Linear behavior cloning by regularized least squares.

Minimizes sum_t ||a_t - (W o_t + b)||^2 + lam ||W||^2 in closed form via
the normal equations (bias unpenalized). This is the exact minimizer of
the mean-squared-error objective that maximum likelihood under unimodal
isotropic Gaussians reduces to.
"""

import numpy as np

from ..errors import DegenerateData


class LinearPolicy:
    def __init__(self, W, b, ridge=0.0):
        self.W = np.atleast_2d(np.asarray(W, dtype=float))
        self.b = np.atleast_1d(np.asarray(b, dtype=float))
        self.ridge = float(ridge)
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ValueError("policy parameters must be finite")
        if self.W.shape[0] != self.b.shape[0]:
            raise ValueError("W rows must match b length")

    @property
    def obs_dim(self):
        return self.W.shape[1]

    @property
    def act_dim(self):
        return self.W.shape[0]

    def act(self, obs):
        return self.W @ np.asarray(obs, dtype=float) + self.b

    def mse(self, obs, act):
        pred = obs @ self.W.T + self.b
        return float(np.mean(np.sum((act - pred) ** 2, axis=1)))


def stack_steps(demos):
    """Concatenate (obs, act) matrices across one or more demonstrations."""
    if not isinstance(demos, (list, tuple)):
        demos = [demos]
    obs = np.vstack([d.obs for d in demos if len(d) > 0])
    act = np.vstack([d.act for d in demos if len(d) > 0])
    return obs, act


def bc_fit_linear(demos, lam=1e-6):
    """Fit a LinearPolicy on demonstration steps.

    With lam = 0 a rank-deficient design raises DegenerateData (set a
    positive ridge); with lam > 0 the solution is unique.
    """
    if lam < 0.0:
        raise ValueError("ridge must be >= 0")
    obs, act = stack_steps(demos)
    if len(obs) == 0:
        raise DegenerateData("no steps to fit")

    n, od = obs.shape
    X = np.hstack([obs, np.ones((n, 1))])
    G = X.T @ X
    penalty = np.zeros(od + 1)
    penalty[:od] = lam
    G = G + np.diag(penalty)
    rhs = X.T @ act

    if lam == 0.0 and np.linalg.matrix_rank(G) < od + 1:
        raise DegenerateData(
            "design matrix is rank-deficient with ridge 0; set lam > 0")
    params = np.linalg.solve(G, rhs)  # (od + 1, ad)
    W = params[:od].T
    b = params[od]
    return LinearPolicy(W=W, b=b, ridge=lam)
