import logging
import time

import numpy as np

from frictionfolio.exceptions.model.exceptions import SolverDivergenceError, NonFiniteValueError
from frictionfolio.model.solver.collocation import sample_collocation, monitoring_grid, MONITORING_POINTS
from frictionfolio.model.solver.networks import NetworkParams, policy_net, value_net, DEFAULT_HIDDEN, INIT_SCALE
from frictionfolio.model.solver.report import SolveReport, IterationRecord
from frictionfolio.model.solver.residual import evaluation_loss, residual_quadratic, active_directions, \
    network_value_function, check_terminal_utility
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.rng import substream
from frictionfolio.util.common.type import StringRepresentationMixin, EqualityMixin
from frictionfolio.util.numerics import tape
from frictionfolio.util.numerics.optimize import minimize, OptimizerConfig


log = logging.getLogger(__name__)

# losses below this level are numerical noise and never count towards divergence
DIVERGENCE_FLOOR = 1e-8

# substream key of the network initialization; collocation uses keys 0 and 1
_INIT = 2


class SolverConfig(EqualityMixin, StringRepresentationMixin):
    def __init__(self, hidden=DEFAULT_HIDDEN, n_interior=4000, n_terminal=1000, max_outer=50, tolerance=1e-4,
                 divergence_patience=3, init_scale=INIT_SCALE, monitoring_points=MONITORING_POINTS, seed=0,
                 evaluation=None, improvement=None):
        self.hidden = int(hidden)
        self.n_interior = int(n_interior)
        self.n_terminal = int(n_terminal)
        self.max_outer = int(max_outer)
        self.tolerance = float(tolerance)
        self.divergence_patience = int(divergence_patience)
        self.init_scale = float(init_scale)
        self.monitoring_points = int(monitoring_points)
        self.seed = int(seed)
        self.evaluation = evaluation if evaluation is not None else OptimizerConfig(max_iter=200)
        self.improvement = improvement if improvement is not None else OptimizerConfig(max_iter=100)

    def replace(self, **overrides):
        rep = self.to_yml_rep()
        rep.update(overrides)
        return SolverConfig.from_yml_rep(rep)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        return cls(hidden=get_from_user_dict(yml_rep, "hidden", int, default.hidden),
                   n_interior=get_from_user_dict(yml_rep, "n_interior", int, default.n_interior),
                   n_terminal=get_from_user_dict(yml_rep, "n_terminal", int, default.n_terminal),
                   max_outer=get_from_user_dict(yml_rep, "max_outer", int, default.max_outer),
                   tolerance=get_from_user_dict(yml_rep, "tolerance", float, default.tolerance),
                   divergence_patience=get_from_user_dict(yml_rep, "divergence_patience", int,
                                                          default.divergence_patience),
                   init_scale=get_from_user_dict(yml_rep, "init_scale", float, default.init_scale),
                   monitoring_points=get_from_user_dict(yml_rep, "monitoring_points", int,
                                                        default.monitoring_points),
                   seed=get_from_user_dict(yml_rep, "seed", int, default.seed),
                   evaluation=OptimizerConfig.from_yml_rep(get_from_user_dict(
                       yml_rep, "evaluation", dict, default.evaluation.to_yml_rep())),
                   improvement=OptimizerConfig.from_yml_rep(get_from_user_dict(
                       yml_rep, "improvement", dict, default.improvement.to_yml_rep())))

    def to_yml_rep(self):
        return {"hidden": self.hidden,
                "n_interior": self.n_interior,
                "n_terminal": self.n_terminal,
                "max_outer": self.max_outer,
                "tolerance": self.tolerance,
                "divergence_patience": self.divergence_patience,
                "init_scale": self.init_scale,
                "monitoring_points": self.monitoring_points,
                "seed": self.seed,
                "evaluation": self.evaluation.to_yml_rep(),
                "improvement": self.improvement.to_yml_rep()}


class StepResult(object):
    def __init__(self, theta, loss, trace, converged, n_excluded=0):
        self.theta = theta
        self.loss = loss
        self.trace = trace
        self.converged = converged
        self.n_excluded = n_excluded


def policy_evaluation_step(params, collocation, p, utility, optimizer=None, active=None):
    """Fits the value network to the fixed policy in ``params`` by minimising the evaluation loss."""
    if optimizer is None:
        optimizer = OptimizerConfig(max_iter=200)
    if active is None:
        active = active_directions(p)
    omega = policy_net(params, collocation.interior)
    excluded = []

    def loss(theta):
        value, n_excluded = evaluation_loss(params, theta, omega, collocation, p, utility, active)
        excluded.append(n_excluded)
        return value

    result = minimize(loss, params.value, optimizer)
    n_excluded = excluded[-1] if excluded else 0
    if n_excluded:
        log.warning("{} collocation point(s) with non-finite residuals excluded".format(n_excluded))
    if result.line_search_failed:
        log.warning("Policy evaluation stopped early: {}".format(result.message))
    return StepResult(result.x, result.fun, result.trace, result.converged, n_excluded)


def policy_improvement_step(value_fn, params, x, p, optimizer=None, active=None):
    """Fits the policy network to maximise the batch mean of the generator applied to ``value_fn``.

    The generator is A0 + A1*omega + A2*omega**2 at every point, so the coefficients are computed once and only the
    policy parameters go on the tape."""
    if optimizer is None:
        optimizer = OptimizerConfig(max_iter=100)
    a0, a1, a2 = residual_quadratic(value_fn, x, p, active)
    finite = np.isfinite(a0) & np.isfinite(a1) & np.isfinite(a2)
    n_excluded = int(np.size(finite) - np.count_nonzero(finite))
    if n_excluded:
        log.warning("{} improvement point(s) with non-finite coefficients excluded".format(n_excluded))
        x, a0, a1, a2 = x[finite], a0[finite], a1[finite], a2[finite]

    def objective(psi):
        omega = policy_net(params, x, psi)
        return -tape.average(a0 + a1 * omega + a2 * (omega * omega))

    result = minimize(objective, params.policy, optimizer)
    if result.line_search_failed:
        log.warning("Policy improvement stopped early: {}".format(result.message))
    return StepResult(result.x, -result.fun, result.trace, result.converged, n_excluded)


def relative_change(q_new, q_old):
    return float(np.max(np.abs(q_new - q_old) / np.maximum(np.abs(q_old), 1.0)))


def _diverging(losses, patience):
    if len(losses) <= patience:
        return False
    recent = losses[-(patience + 1):]
    return all(b > a and b > DIVERGENCE_FLOOR for a, b in zip(recent[:-1], recent[1:]))


def policy_iteration(p, utility, domain, config=None, reference=None, initial=None):
    """Alternates policy evaluation and improvement until the value on the monitoring grid changes by less than
    ``config.tolerance`` (relative, with unit floor) or ``config.max_outer`` iterations have run.

    ``reference`` is an optional hyper-dual-compatible value function whose sup-norm distance to the iterates is
    recorded. Raises :class:`SolverDivergenceError` when the evaluation loss grows ``divergence_patience`` times in
    a row."""
    if config is None:
        config = SolverConfig()
    check_terminal_utility(utility)
    start = time.time()

    active = active_directions(p, domain)
    collocation = sample_collocation(domain, config.n_interior, config.n_terminal, config.seed)
    grid = monitoring_grid(domain, config.monitoring_points)
    reference_values = None if reference is None else np.asarray(reference(grid), dtype=float)
    if initial is None:
        initial = NetworkParams.initial(domain, config.hidden, substream(config.seed, _INIT), config.init_scale)
    params = initial
    q_old = value_net(params, grid)

    log.info("Policy iteration over {} with {} interior and {} terminal points, active directions {}".format(
        utility.VARIANT, config.n_interior, config.n_terminal, active))
    iterations = []
    converged = False
    for k in range(1, config.max_outer + 1):
        evaluation = policy_evaluation_step(params, collocation, p, utility, config.evaluation, active)
        params = params.replace(value=evaluation.theta)
        improvement = policy_improvement_step(network_value_function(params), params, collocation.interior, p,
                                              config.improvement, active)
        params = params.replace(policy=improvement.theta)

        q_new = value_net(params, grid)
        if not np.all(np.isfinite(q_new)):
            raise NonFiniteValueError("Value network is not finite on the monitoring grid after iteration {}"
                                      .format(k))
        change = relative_change(q_new, q_old)
        distance = None if reference_values is None else float(np.max(np.abs(q_new - reference_values)))
        iterations.append(IterationRecord(k, float(evaluation.loss), change, distance, evaluation.n_excluded,
                                          evaluation.converged, improvement.converged))
        log.info("Iteration {}: loss {:.4e}, relative change {:.4e}{}".format(
            k, evaluation.loss, change, "" if distance is None else ", distance {:.4e}".format(distance)))
        q_old = q_new

        if change < config.tolerance:
            converged = True
            break
        if _diverging([r.loss for r in iterations], config.divergence_patience):
            report = SolveReport(params, domain, iterations, False, time.time() - start, config.tolerance)
            raise SolverDivergenceError("Evaluation loss increased in {} consecutive outer iterations".format(
                config.divergence_patience), report)

    report = SolveReport(params, domain, iterations, converged, time.time() - start, config.tolerance)
    if not converged:
        log.warning("Policy iteration stopped after {} iterations without reaching tolerance {}".format(
            config.max_outer, config.tolerance))
    log.info("Finished policy iteration in {:.2f}s".format(report.wall_time))
    return report
