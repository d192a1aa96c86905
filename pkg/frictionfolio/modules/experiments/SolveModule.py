import json
import logging

import pandas as pd

from frictionfolio.exceptions.model.exceptions import SolverDivergenceError
from frictionfolio.model.oracles.montecarlo import mc_policy_value
from frictionfolio.model.solver.policy_iteration import policy_iteration
from frictionfolio.model.solver.report import make_policy_function
from frictionfolio.modules.common.GenericModule import GenericModule
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.plots import Panel, write_svg
from frictionfolio.util.common.tables import write_table


log = logging.getLogger(__name__)

# standard errors allowed between the learned value and its Monte Carlo estimate, plus an absolute slack
MC_STDERRS = 3.0
MC_ABSOLUTE = 0.01


class SolveModule(GenericModule):
    NAME = "Policy Iteration"
    COMMAND = "solve"

    def __init__(self):
        super(SolveModule, self).__init__()
        self.report = None
        self.mc_check = None

    def run(self, config, jobs=1):
        p = config.model_params()
        try:
            self.report = policy_iteration(p, config.terminal_utility(), config.domain(), config.solver_config())
        except SolverDivergenceError as e:
            self.report = e.report
            self.fail(e.message)
            return
        if not self.report.converged:
            self.note("Policy iteration did not reach tolerance {}".format(self.report.tolerance))

        n_paths = get_from_user_dict(config.section("mc"), "n_paths", int, 0)
        if n_paths > 0:
            self.mc_check = self._mc_check(config, n_paths)

    def _mc_check(self, config, n_paths):
        """Compares the learned value at the initial state with a simulation under the learned policy."""
        initial = config.slice_state().replace(t=0.0)
        estimate = mc_policy_value(config.model_params(), make_policy_function(self.report), initial, n_paths,
                                   config.seed, config.terminal_utility())
        learned = float(self.report.value(initial.to_array()))
        difference = abs(learned - estimate.mean)
        passed = difference < MC_STDERRS * estimate.stderr + MC_ABSOLUTE
        if not passed:
            self.note("Learned value {:.6g} differs from the Monte Carlo estimate {:.6g} +- {:.2g}".format(
                learned, estimate.mean, estimate.stderr))
        return pd.DataFrame([{"n_paths": n_paths, "learned_value": learned, "mc_estimate": estimate.mean,
                              "mc_stderr": estimate.stderr, "difference": difference, "passed": passed}])

    def write_to_run(self, resource_open, config):
        if self.report is None:
            return
        state = config.slice_state()
        W_grid, t_grid = config.slice_grids()

        tables = [("trace", self.report.trace_frame()),
                  ("policy_vs_W", self.report.policy_slice(state, "W", W_grid)),
                  ("policy_vs_t", self.report.policy_slice(state, "t", t_grid)),
                  ("value_vs_W", self.report.value_slice(state, "W", W_grid))]
        if self.mc_check is not None:
            tables.append(("mc_check", self.mc_check))
        for name, frame in tables:
            with resource_open(name, "csv") as f:
                write_table(frame, f, config.hash, config.seed)

        by_wealth = tables[1][1]
        by_time = tables[2][1]
        panels = [Panel("omega vs W (t={:g})".format(state.t), "W", "omega"),
                  Panel("omega vs t (W={:g})".format(state.W), "t", "omega")]
        panels[0].add_series("learned", by_wealth["W"].values, by_wealth["omega"].values)
        panels[1].add_series("learned", by_time["t"].values, by_time["omega"].values)
        with resource_open("policy", "svg") as f:
            write_svg(panels, f)

        with resource_open("report", "json") as f:
            json.dump(self.report.to_json_rep(), f, sort_keys=True)
            f.write("\n")
