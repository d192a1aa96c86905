import concurrent.futures
import logging
import time

import numpy as np
import pandas as pd

from frictionfolio.exceptions.common.exceptions import FrictionfolioError
from frictionfolio.exceptions.model.exceptions import SolverDivergenceError
from frictionfolio.model.solver.policy_iteration import policy_iteration
from frictionfolio.util.common.type import StringRepresentationMixin


log = logging.getLogger(__name__)

STATE_VARIABLE = "v0"


class SweepOutcome(StringRepresentationMixin):
    def __init__(self, value, report=None, error=None):
        self.value = value
        self.report = report
        self.error = error

    @property
    def ok(self):
        return self.error is None


class SolveTask(object):
    def __init__(self, value, params, utility, domain, config):
        self.value = value
        self.params = params
        self.utility = utility
        self.domain = domain
        self.config = config


def sweep_values(values, baseline):
    """Sorted distinct sweep values, with the baseline added when missing."""
    values = [float(v) for v in values]
    if not any(np.isclose(v, baseline) for v in values):
        log.info("Adding baseline value {:g} to the sweep".format(baseline))
        values.append(float(baseline))
    return sorted(set(values))


def solve_task(task):
    start = time.time()
    try:
        report = policy_iteration(task.params, task.utility, task.domain, task.config)
    except SolverDivergenceError as e:
        return SweepOutcome(task.value, e.report, e.message)
    except FrictionfolioError as e:
        return SweepOutcome(task.value, None, str(e))
    log.info("Finished solve{} in {:.2f}s".format("" if task.value is None else " for {:g}".format(task.value),
                                                  time.time() - start))
    return SweepOutcome(task.value, report)


def run_solves(tasks, jobs=1):
    """Solves every task, in a process pool when ``jobs`` > 1. Outcomes come back in task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [solve_task(task) for task in tasks]

    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
        futures = dict((executor.submit(solve_task, task), i) for i, task in enumerate(tasks))
        for future in concurrent.futures.as_completed(futures):
            results[futures[future]] = future.result()
    return [results[i] for i in sorted(results)]


def sweep_tasks(variable, values, params, utility, domain, config):
    """One solve per value; a sweep over the initial variance needs only the baseline solve, since v is a state
    coordinate of the value function."""
    if variable == STATE_VARIABLE:
        return [SolveTask(None, params, utility, domain, config)]
    return [SolveTask(value, params.replace(**{variable: value}), utility, domain, config) for value in values]


def expand_outcomes(variable, values, outcomes):
    if variable == STATE_VARIABLE:
        shared = outcomes[0]
        return [SweepOutcome(value, shared.report, shared.error) for value in values]
    return outcomes


def _slice_base(state, variable, value):
    if variable == STATE_VARIABLE:
        return state.replace(v=value)
    return state


def slice_frames(variable, outcomes, state, W_grid, t_grid):
    """Returns ``(omega against W at the slice time, omega against t at the slice wealth, summary)``; failed
    solves contribute only a summary row."""
    by_wealth = []
    by_time = []
    summary = []
    for outcome in outcomes:
        row = {variable: outcome.value, "status": "ok" if outcome.ok else "failed",
               "omega_at_slice": np.nan, "iterations": 0, "converged": False}
        if outcome.report is not None:
            row["iterations"] = outcome.report.n_iterations
            row["converged"] = outcome.report.converged
        if outcome.ok:
            base = _slice_base(state, variable, outcome.value)
            frame = outcome.report.policy_slice(base, "W", W_grid)
            frame.insert(0, variable, outcome.value)
            by_wealth.append(frame)
            frame = outcome.report.policy_slice(base, "t", t_grid)
            frame.insert(0, variable, outcome.value)
            by_time.append(frame)
            row["omega_at_slice"] = float(outcome.report.policy(base.to_array()))
        summary.append(row)

    columns = [variable, "status", "omega_at_slice", "iterations", "converged"]
    return (pd.concat(by_wealth, ignore_index=True) if by_wealth else pd.DataFrame(columns=[variable, "W", "omega"]),
            pd.concat(by_time, ignore_index=True) if by_time else pd.DataFrame(columns=[variable, "t", "omega"]),
            pd.DataFrame(summary, columns=columns))


def curve_spread(frame, x):
    """Largest gap between any two sweep curves at a common abscissa."""
    if frame.empty:
        return 0.0
    gaps = frame.groupby(x)["omega"].agg(lambda s: s.max() - s.min())
    return float(gaps.max())
