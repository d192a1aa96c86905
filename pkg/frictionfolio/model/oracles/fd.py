import logging
import time

import numpy as np
import pandas as pd
from scipy.sparse import diags
from scipy.sparse.linalg import spsolve

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import GridSchemeError
from frictionfolio.model.market.dynamics import hjb_coefficients, quadratic_in_omega, greedy_omega, \
    StateDerivatives
from frictionfolio.model.market.params import MarketState
from frictionfolio.util.common.type import StringRepresentationMixin


log = logging.getLogger(__name__)

POLICY_TOLERANCE = 1e-6
MAX_POLICY_ITERATIONS = 50


class GridConfig(StringRepresentationMixin):
    def __init__(self, W_min=0.5, W_max=20.0, n_W=401, n_t=101, upwind=True):
        if not 0 <= W_min < W_max:
            raise InvalidArgumentError("Need 0 <= W_min < W_max, got [{}, {}]".format(W_min, W_max))
        if n_W < 3 or n_t < 2:
            raise InvalidArgumentError("Grid needs at least 3 wealth nodes and 2 time nodes")
        self.W_min = float(W_min)
        self.W_max = float(W_max)
        self.n_W = int(n_W)
        self.n_t = int(n_t)
        self.upwind = upwind

    def refined(self, factor=2):
        return GridConfig(self.W_min, self.W_max, factor * (self.n_W - 1) + 1, factor * (self.n_t - 1) + 1,
                          self.upwind)


class GridSolution(StringRepresentationMixin):
    def __init__(self, W, t, value, policy, metadata):
        self.W = W
        self.t = t
        # arrays of shape (n_t, n_W)
        self.value = value
        self.policy = policy
        self.metadata = metadata

    def interior(self):
        return slice(1, len(self.W) - 1)

    def value_at(self, W, t_index=0):
        return np.interp(W, self.W, self.value[t_index])

    def to_frame(self):
        n_t, n_W = self.value.shape
        return pd.DataFrame({"W": np.tile(self.W, n_t),
                             "t": np.repeat(self.t, n_W),
                             "value": self.value.ravel(),
                             "policy": self.policy.ravel()})


def _operator(drift, diffusion, h, upwind):
    """Lower, main and upper diagonals of the discretised W-generator at interior nodes."""
    if upwind:
        lower = diffusion / h ** 2 + np.maximum(-drift, 0.0) / h
        upper = diffusion / h ** 2 + np.maximum(drift, 0.0) / h
    else:
        lower = diffusion / h ** 2 - drift / (2.0 * h)
        upper = diffusion / h ** 2 + drift / (2.0 * h)
    return lower, -(lower + upper), upper


def _step_matrix(lower, main, upper, dt):
    """I - dt*A with identity rows at both ends."""
    n = len(main) + 2
    d_main = np.ones(n)
    d_lower = np.zeros(n - 1)
    d_upper = np.zeros(n - 1)
    d_main[1:-1] = 1.0 - dt * main
    d_lower[:-1] = -dt * lower
    d_upper[1:] = -dt * upper
    if np.any(d_lower > 0) or np.any(d_upper > 0) or np.any(d_main <= 0):
        raise GridSchemeError("The scheme is not monotone on this grid (positive off-diagonal entries); refine the "
                              "wealth grid or switch upwinding on")
    return diags([d_lower, d_main, d_upper], [-1, 0, 1], format="csc")


def fd_policy_iteration(p, utility, frozen, config=None):
    """Implicit-in-time policy iteration for the wealth-only reduction of the HJB equation with v, theta and L held
    at ``frozen`` (a :class:`MarketState` whose W and t are ignored).

    Each backward step alternates a linear solve with a per-node greedy policy update until the policy moves by less
    than 1e-6. The terminal row is U(W); W = 0 keeps U(0) (every W-coefficient vanishes there) and positive edges
    are Dirichlet at U(W)."""
    if config is None:
        config = GridConfig()
    start = time.time()
    W = np.linspace(config.W_min, config.W_max, config.n_W)
    t = np.linspace(0.0, p.T, config.n_t)
    h = W[1] - W[0]
    dt = t[1] - t[0]
    inner = W[1:-1]
    state = MarketState(inner, np.full_like(inner, frozen.v), np.full_like(inner, frozen.theta),
                        np.full_like(inner, frozen.L))

    value = np.empty((config.n_t, config.n_W))
    policy = np.zeros((config.n_t, config.n_W))
    value[-1] = utility.evaluate(W)
    omega = np.zeros(len(inner))
    total_policy_iterations = 0
    for n in range(config.n_t - 2, -1, -1):
        rhs = value[n + 1]
        q = rhs
        for k in range(MAX_POLICY_ITERATIONS):
            bundle = hjb_coefficients(state, omega, p)
            lower, main, upper = _operator(bundle.w_drift, bundle.w_diffusion, h, config.upwind)
            q = spsolve(_step_matrix(lower, main, upper, dt), rhs)

            derivs = StateDerivatives(Q_W=(q[2:] - q[:-2]) / (2.0 * h),
                                      Q_WW=(q[2:] - 2.0 * q[1:-1] + q[:-2]) / h ** 2)
            _, a1, a2 = quadratic_in_omega(state, derivs, p)
            new_omega = greedy_omega(a1, a2)
            change = np.max(np.abs(new_omega - omega))
            omega = new_omega
            total_policy_iterations += 1
            if change < POLICY_TOLERANCE:
                break
        else:
            log.warning("Policy did not settle within {} iterations at t={:.4f}".format(MAX_POLICY_ITERATIONS, t[n]))
        value[n] = q
        policy[n, 1:-1] = omega
        policy[n, 0] = omega[0]
        policy[n, -1] = omega[-1]
    policy[-1] = policy[-2]

    metadata = {"n_W": config.n_W, "n_t": config.n_t, "upwind": config.upwind,
                "policy_iterations": total_policy_iterations}
    log.debug("Finished finite-difference solve on {}x{} grid in {:.2f}s".format(config.n_W, config.n_t,
                                                                                 time.time() - start))
    return GridSolution(W, t, value, policy, metadata)


class ConvergenceProbe(StringRepresentationMixin):
    def __init__(self, solutions, differences, observed_order):
        self.solutions = solutions
        # sup-norm change at t = 0 between successive refinements, on the coarsest grid's interior nodes
        self.differences = differences
        self.observed_order = observed_order


def fd_convergence_probe(p, utility, frozen, config=None, W_range=None):
    """Solves on ``config`` and two successive 2x refinements and reports the observed convergence order."""
    if config is None:
        config = GridConfig(n_W=101, n_t=26)
    configs = [config, config.refined(), config.refined(4)]
    solutions = [fd_policy_iteration(p, utility, frozen, c) for c in configs]
    nodes = solutions[0].W[1:-1]
    if W_range is not None:
        nodes = nodes[(nodes >= W_range[0]) & (nodes <= W_range[1])]
    values = [s.value_at(nodes) for s in solutions]
    differences = [float(np.max(np.abs(b - a))) for a, b in zip(values[:-1], values[1:])]
    order = float(np.log2(differences[0] / differences[1])) if differences[1] > 0 else np.inf
    return ConvergenceProbe(solutions, differences, order)
