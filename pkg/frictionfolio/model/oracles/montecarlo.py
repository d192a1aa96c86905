import logging

import numpy as np

from frictionfolio.model.market.simulation import simulate_paths
from frictionfolio.util.common.type import StringRepresentationMixin


log = logging.getLogger(__name__)

STEPS_PER_REBALANCE = 4


class McEstimate(StringRepresentationMixin):
    """Running sums of U(W_T), so that estimates over disjoint path ranges pool exactly."""

    def __init__(self, total, total_sq, n):
        self.total = total
        self.total_sq = total_sq
        self.n = n

    @property
    def mean(self):
        return self.total / self.n

    @property
    def stderr(self):
        if self.n < 2:
            return np.inf
        variance = max(self.total_sq / self.n - self.mean ** 2, 0.0) * self.n / (self.n - 1)
        return float(np.sqrt(variance / self.n))

    def pool(self, other):
        return McEstimate(self.total + other.total, self.total_sq + other.total_sq, self.n + other.n)

    def __iter__(self):
        return iter((self.mean, self.stderr))


def default_steps(p):
    return int(np.ceil(p.T / p.delta_t - 1e-9)) * STEPS_PER_REBALANCE


def mc_policy_value(p, policy, initial, n_paths, seed, utility, n_steps=None, path_offset=0):
    """Mean of U(W_T) over simulated paths under ``policy``; unpacks as ``(estimate, standard error)``."""
    if n_steps is None:
        n_steps = default_steps(p)
    ensemble = simulate_paths(p, policy, n_paths, n_steps, seed, initial, path_offset=path_offset,
                              record_paths=False)
    values = np.asarray(utility.evaluate(ensemble.W[-1]), dtype=float)
    estimate = McEstimate(float(np.sum(values)), float(np.sum(values * values)), len(values))
    log.debug("Monte Carlo value over {} paths: {:.6g} +- {:.2g}".format(n_paths, estimate.mean, estimate.stderr))
    return estimate
