import itertools

import numpy as np

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.util.common.rng import substream

T_INDEX = 4
MONITORING_POINTS = 5

# substream keys
_INTERIOR, _TERMINAL = 0, 1


class CollocationSet(object):
    def __init__(self, interior, terminal):
        # arrays of shape (n, 5) in state coordinate order
        self.interior = interior
        self.terminal = terminal


def _uniform(rng, lower, upper, n):
    return lower + (upper - lower) * rng.uniform(size=(n, len(lower)))


def sample_collocation(domain, n_interior, n_terminal, seed):
    """Uniform draws over the truncated box: interior points with t in [0, T), terminal points with t = T."""
    if n_interior < 1 or n_terminal < 1:
        raise InvalidArgumentError("Collocation counts must be positive, got {} and {}".format(n_interior,
                                                                                             n_terminal))
    lower, upper = domain.bounds()
    interior = _uniform(substream(seed, _INTERIOR), lower, upper, n_interior)
    terminal = _uniform(substream(seed, _TERMINAL), lower, upper, n_terminal)
    terminal[:, T_INDEX] = domain.T
    return CollocationSet(interior, terminal)


def monitoring_grid(domain, points=MONITORING_POINTS):
    """Tensor grid with ``points`` nodes per live coordinate (one node for frozen ones), shape (n, 5)."""
    lower, upper = domain.bounds()
    axes = [np.unique(np.linspace(lo, hi, points)) for lo, hi in zip(lower, upper)]
    return np.array(list(itertools.product(*axes)))
