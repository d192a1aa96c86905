import numpy as np
from nose.tools import assert_equal, assert_true, assert_false
from numpy.testing import assert_allclose

from frictionfolio.model.experiments.validation import merton_comparison, comparison_summary
from frictionfolio.model.oracles.merton import MertonSpec, merton_closed_form, merton_domain
from frictionfolio.model.solver.networks import NetworkParams
from frictionfolio.model.solver.report import SolveReport


SPEC = MertonSpec()
DOMAIN = merton_domain(SPEC)
REPORT = SolveReport(NetworkParams.initial(DOMAIN, 4, np.random.default_rng(0)), DOMAIN, [], False, 0.0, 1e-4)


def test_comparison_frame():
    frame = merton_comparison(REPORT, SPEC)
    assert_equal(len(frame), 18)
    assert_equal(sorted(set(frame["t"])), [0.0, 0.5])
    assert_allclose(frame["W"].iloc[:9], np.linspace(1.0, 10.0, 11)[1:-1])
    expected, _ = merton_closed_form(SPEC, frame["W"].to_numpy(), frame["t"].to_numpy())
    assert_allclose(frame["value_exact"], expected)
    assert_allclose(frame["omega_exact"], 0.375)
    assert_allclose(frame["omega_error"], np.abs(frame["omega"] - 0.375))
    x = np.array([[frame["W"].iloc[0], 0.16, 0.2, 0.0, 0.0]])
    assert_allclose(frame["value"].iloc[0], REPORT.value(x)[0])


def test_summary():
    frame = merton_comparison(REPORT, SPEC, points=5, times=(0.0,))
    assert_equal(len(frame), 3)
    summary = comparison_summary(frame, 1.0, 1e6)
    assert_true(summary["passed"].iloc[0])
    assert_equal(summary["max_policy_error"].iloc[0], frame["omega_error"].max())
    assert_false(comparison_summary(frame, 0.0, 1e6)["passed"].iloc[0])
