import logging

from frictionfolio.exceptions.model.exceptions import SolverDivergenceError
from frictionfolio.model.experiments.validation import merton_comparison, comparison_summary
from frictionfolio.model.oracles.merton import merton_model_params, merton_domain, merton_value_function
from frictionfolio.model.solver.policy_iteration import policy_iteration
from frictionfolio.modules.common.GenericModule import GenericModule, EXIT_TOLERANCE
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.plots import Panel, write_svg
from frictionfolio.util.common.tables import write_table


log = logging.getLogger(__name__)


class ValidateMertonModule(GenericModule):
    NAME = "Merton Validation"
    COMMAND = "validate-merton"

    def __init__(self):
        super(ValidateMertonModule, self).__init__()
        self.report = None
        self.comparison = None
        self.summary = None

    def run(self, config, jobs=1):
        spec = config.merton_spec()
        W = get_from_user_dict(config.section("domain"), "W", list, [1.0, 10.0])
        domain = merton_domain(spec, W=W)
        log.info("Merton problem with omega* = {:.4f}".format(spec.omega_star))
        self.extra["distance_norm"] = "sup-norm over the monitoring grid"
        self.extra["omega_star"] = spec.omega_star
        try:
            self.report = policy_iteration(merton_model_params(spec, config.model_params()), spec.utility(), domain,
                                           config.solver_config(), reference=merton_value_function(spec))
        except SolverDivergenceError as e:
            self.report = e.report
            self.fail(e.message)
            return

        self.comparison = merton_comparison(self.report, spec,
                                            get_from_user_dict(config.rep, "comparison_points", int, 11))
        self.summary = comparison_summary(self.comparison,
                                          get_from_user_dict(config.rep, "tolerance", float, 0.02),
                                          get_from_user_dict(config.rep, "value_tolerance", float, 0.01))
        row = self.summary.iloc[0]
        log.info("Max policy error {:.4f}, max relative value error {:.4f}".format(row["max_policy_error"],
                                                                                 row["max_value_rel_error"]))
        if not row["passed"]:
            self.fail("Merton validation failed tolerance checks", EXIT_TOLERANCE)

    def write_to_run(self, resource_open, config):
        if self.report is None:
            return
        with resource_open("trace", "csv") as f:
            write_table(self.report.trace_frame(), f, config.hash, config.seed)
        if self.comparison is None:
            return
        with resource_open("comparison", "csv") as f:
            write_table(self.comparison, f, config.hash, config.seed)
        with resource_open("summary", "csv") as f:
            write_table(self.summary, f, config.hash, config.seed)

        trace = self.report.trace_frame()
        omega = Panel.from_frame(self.comparison, "W", "omega", "t", "Learned omega against omega*")
        first = self.comparison[self.comparison["t"] == self.comparison["t"].min()]
        omega.add_series("omega*", first["W"].values, first["omega_exact"].values)
        distance = Panel("Distance to the closed form", "iteration", "sup-norm distance")
        distance.add_series("distance", trace["iteration"].values, trace["distance"].values)
        with resource_open("validation", "svg") as f:
            write_svg([omega, distance], f)
