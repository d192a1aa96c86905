import logging

from frictionfolio.model.experiments.sweep import sweep_values, sweep_tasks, run_solves, expand_outcomes, \
    slice_frames, curve_spread
from frictionfolio.modules.common.GenericModule import GenericModule
from frictionfolio.util.common.plots import Panel, write_svg
from frictionfolio.util.common.tables import write_table


log = logging.getLogger(__name__)


def sweep_panels(variable, by_wealth, by_time, state):
    """The two-panel policy figure of a sweep, built from the slice tables alone."""
    return [Panel.from_frame(by_wealth, "W", "omega", variable, "omega vs W (t={:g})".format(state.t)),
            Panel.from_frame(by_time, "t", "omega", variable, "omega vs t (W={:g})".format(state.W))]


class SweepModule(GenericModule):
    NAME = "Sensitivity Sweep"
    COMMAND = "sweep"

    def __init__(self):
        super(SweepModule, self).__init__()
        self.variable = None
        self.outcomes = []

    def run(self, config, jobs=1):
        variable, values = config.sweep()
        values = sweep_values(values, config.sweep_baseline(variable))
        self.variable = variable
        log.info("Sweeping {} over {}".format(variable, ", ".join("{:g}".format(v) for v in values)))

        tasks = sweep_tasks(variable, values, config.model_params(), config.terminal_utility(), config.domain(),
                            config.solver_config())
        self.outcomes = expand_outcomes(variable, values, run_solves(tasks, jobs))

        failures = [{"value": o.value, "error": o.error} for o in self.outcomes if not o.ok]
        if failures:
            self.extra["failures"] = failures
            for failure in failures:
                self.fail("Solve for {}={} failed: {}".format(variable, failure["value"], failure["error"]))

    def write_to_run(self, resource_open, config):
        if not self.outcomes:
            return
        state = config.slice_state()
        W_grid, t_grid = config.slice_grids()
        by_wealth, by_time, summary = slice_frames(self.variable, self.outcomes, state, W_grid, t_grid)
        self.extra["spread"] = {"W": curve_spread(by_wealth, "W"), "t": curve_spread(by_time, "t")}

        for name, frame in [("policy_vs_W", by_wealth), ("policy_vs_t", by_time), ("summary", summary)]:
            with resource_open(name, "csv") as f:
                write_table(frame, f, config.hash, config.seed)
        if not by_wealth.empty:
            with resource_open("policy", "svg") as f:
                write_svg(sweep_panels(self.variable, by_wealth, by_time, state), f)
