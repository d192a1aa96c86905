import logging
import time

import numpy as np
import pandas as pd

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.model.market.dynamics import correlation_spec, tc_factor, DRIVERS
from frictionfolio.model.market.params import MarketState
from frictionfolio.util.common.rng import BLOCK_SIZE, block_generator, block_ranges


log = logging.getLogger(__name__)

_S, _GAMMA, _V, _THETA, _L = [DRIVERS.index(d) for d in ["S", "gamma", "v", "theta", "L"]]


def constant_policy(omega):
    def policy(state):
        return np.full(np.shape(state.W), float(omega))

    return policy


class PathEnsemble(object):
    def __init__(self, times, W, v, theta, L, omega, seed, path_offset, correlation_projected):
        self.times = times
        # arrays of shape (n_steps + 1, n_paths), or (1, n_paths) when only terminal values were kept
        self.W = W
        self.v = v
        self.theta = theta
        self.L = L
        self.omega = omega
        self.seed = seed
        self.path_offset = path_offset
        self.correlation_projected = correlation_projected

    @property
    def n_paths(self):
        return self.W.shape[1]

    def terminal(self):
        return MarketState(self.W[-1], self.v[-1], self.theta[-1], self.L[-1], self.times[-1])

    def to_frame(self):
        n_rows, n_paths = self.W.shape
        times = self.times if n_rows == len(self.times) else self.times[-1:]
        steps = np.arange(len(self.times))[-n_rows:]
        return pd.DataFrame({
            "path": np.tile(np.arange(self.path_offset, self.path_offset + n_paths), n_rows),
            "step": np.repeat(steps, n_paths),
            "t": np.repeat(times, n_paths),
            "W": self.W.ravel(),
            "v": self.v.ravel(),
            "theta": self.theta.ravel(),
            "L": self.L.ravel(),
        })


def simulate_paths(p, policy, n_paths, n_steps, seed, initial, path_offset=0, record_paths=True,
                   project_correlation=False):
    """Simulates the state and wealth dynamics by full-truncation Euler-Maruyama.

    Paths are generated in blocks of ``BLOCK_SIZE``, block ``b`` drawing all of its increments from the ``b``-th
    child of ``seed``; path ``i`` is therefore the same whichever ``path_offset``/``n_paths`` window contains it.
    Reported v, theta and L are the truncated (nonnegative) values; wealth is absorbed at 0."""
    if n_paths < 1 or n_steps < 1:
        raise InvalidArgumentError("n_paths and n_steps must be positive")
    dt = p.T / n_steps
    if dt > p.delta_t * (1.0 + 1e-12):
        raise InvalidArgumentError("Simulation step T/n_steps = {:.6g} is coarser than the rebalancing step "
                                   "delta_t = {:.6g}".format(dt, p.delta_t))
    initial.validate(p.T)

    start = time.time()
    corr = correlation_spec(p, project=project_correlation)
    sqrt_dt = np.sqrt(dt)
    times = np.linspace(0.0, p.T, n_steps + 1)

    n_rows = n_steps + 1 if record_paths else 1
    out = dict((name, np.empty((n_rows, n_paths))) for name in ["W", "v", "theta", "L", "omega"])

    column = 0
    for block, lo, hi in block_ranges(path_offset, path_offset + n_paths):
        rng = block_generator(seed, block)
        z = rng.standard_normal((n_steps, BLOCK_SIZE, len(DRIVERS)))[:, lo:hi, :]
        db = (z @ corr.factor.T) * sqrt_dt
        m = hi - lo

        W = np.full(m, float(initial.W))
        v = np.full(m, float(initial.v))
        theta = np.full(m, float(initial.theta))
        L = np.full(m, float(initial.L))
        omega = np.zeros(m)
        cols = slice(column, column + m)
        if record_paths:
            _store(out, 0, cols, W, v, theta, L, omega)

        for n in range(n_steps):
            v_pos = np.maximum(v, 0.0)
            theta_pos = np.maximum(theta, 0.0)
            L_pos = np.maximum(L, 0.0)
            state = MarketState(W, v_pos, theta_pos, L_pos, times[n])
            omega = np.clip(np.asarray(policy(state), dtype=float) * np.ones(m), 0.0, 1.0)

            drift = (p.r + (p.mu - p.r) * omega - tc_factor(v_pos, L_pos, p) * (1.0 - omega) * omega) * W
            noise = omega * W * (p.beta * L_pos * db[n, :, _GAMMA] + np.sqrt(v_pos) * db[n, :, _S])
            W_next = np.maximum(W + drift * dt + noise, 0.0)

            v = v + p.kappa * (theta_pos - v_pos) * dt + p.sigma1 * np.sqrt(v_pos) * db[n, :, _V]
            theta = theta + p.lam * (p.eta - theta_pos) * dt + p.sigma2 * np.sqrt(theta_pos) * db[n, :, _THETA]
            L = L + p.alpha * (p.theta_hat_L + p.lambda_TC * p.kappa_TC * L_pos ** p.xi - L) * dt \
                + p.sigma_L * db[n, :, _L]
            W = W_next
            if record_paths:
                _store(out, n + 1, cols, W, np.maximum(v, 0.0), np.maximum(theta, 0.0), np.maximum(L, 0.0), omega)

        if not record_paths:
            _store(out, 0, cols, W, np.maximum(v, 0.0), np.maximum(theta, 0.0), np.maximum(L, 0.0), omega)
        column += m

    log.debug("Finished simulating {} paths x {} steps in {:.2f}s".format(n_paths, n_steps, time.time() - start))
    return PathEnsemble(times, out["W"], out["v"], out["theta"], out["L"], out["omega"], seed, path_offset,
                        corr.projected)


def _store(out, row, cols, W, v, theta, L, omega):
    out["W"][row, cols] = W
    out["v"][row, cols] = v
    out["theta"][row, cols] = theta
    out["L"][row, cols] = L
    out["omega"][row, cols] = omega
