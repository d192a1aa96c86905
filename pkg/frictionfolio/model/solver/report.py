import numpy as np
import pandas as pd

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.model.market.params import MarketState
from frictionfolio.model.solver.networks import NetworkParams, Domain, value_net, policy_net
from frictionfolio.util.common.type import StringRepresentationMixin


class IterationRecord(StringRepresentationMixin):
    def __init__(self, iteration, loss, relative_change, distance=None, n_excluded=0, evaluation_converged=True,
                 improvement_converged=True):
        self.iteration = iteration
        self.loss = loss
        self.relative_change = relative_change
        # sup-norm distance to a reference value function over the monitoring grid, when one was given
        self.distance = distance
        self.n_excluded = n_excluded
        self.evaluation_converged = evaluation_converged
        self.improvement_converged = improvement_converged

    def to_json_rep(self):
        return dict(self.__dict__)


class SolveReport(StringRepresentationMixin):
    def __init__(self, params, domain, iterations, converged, wall_time, tolerance):
        self.params = params
        self.domain = domain
        self.iterations = iterations
        self.converged = converged
        self.wall_time = wall_time
        self.tolerance = tolerance

    @property
    def n_iterations(self):
        return len(self.iterations)

    @property
    def losses(self):
        return [r.loss for r in self.iterations]

    @property
    def relative_changes(self):
        return [r.relative_change for r in self.iterations]

    @property
    def distances(self):
        return [r.distance for r in self.iterations]

    def trace_frame(self):
        return pd.DataFrame({"iteration": [r.iteration for r in self.iterations],
                             "loss": self.losses,
                             "relative_change": self.relative_changes,
                             "distance": [np.nan if d is None else d for d in self.distances]})

    def value(self, x):
        return value_net(self.params, np.asarray(x, dtype=float))

    def policy(self, x):
        return policy_net(self.params, np.asarray(x, dtype=float))

    def _slice_points(self, base, variable, values):
        if variable not in MarketState.COORDINATES:
            raise InvalidArgumentError("Unknown state coordinate \"{}\"".format(variable))
        values = np.asarray(values, dtype=float)
        state = base.replace(**{variable: values})
        return state.to_array()

    def policy_slice(self, base, variable, values):
        """omega along ``variable`` with every other coordinate fixed at ``base``."""
        return pd.DataFrame({variable: np.asarray(values, dtype=float),
                             "omega": self.policy(self._slice_points(base, variable, values))})

    def value_slice(self, base, variable, values):
        return pd.DataFrame({variable: np.asarray(values, dtype=float),
                             "value": self.value(self._slice_points(base, variable, values))})

    def to_json_rep(self):
        # wall time stays in the run manifest so that serialized reports are reproducible
        return {"params": self.params.to_json_rep(),
                "domain": self.domain.to_yml_rep(),
                "iterations": [r.to_json_rep() for r in self.iterations],
                "converged": self.converged,
                "tolerance": self.tolerance}

    @classmethod
    def from_json_rep(cls, rep):
        return cls(NetworkParams.from_json_rep(rep["params"]), Domain.from_yml_rep(rep["domain"]),
                   [IterationRecord(**r) for r in rep["iterations"]], rep["converged"], None, rep["tolerance"])


def make_policy_function(report):
    """Adapts the learned policy to the ``policy(state)`` form used by path simulation."""
    def policy(state):
        return report.policy(state.to_array())

    return policy
