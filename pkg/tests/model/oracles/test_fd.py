import numpy as np
from nose.plugins.attrib import attr
from nose.tools import assert_equal, assert_raises, assert_true
from numpy.testing import assert_allclose

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import GridSchemeError
from frictionfolio.model.market.params import MarketState
from frictionfolio.model.oracles.fd import GridConfig, fd_policy_iteration, fd_convergence_probe
from frictionfolio.model.oracles.merton import MertonSpec, merton_closed_form, merton_model_params


SPEC = MertonSpec()
MERTON = merton_model_params(SPEC)
FROZEN = MarketState(0.0, 0.16, 0.2, 0.0)
UTILITY = SPEC.utility()


def test_grid_config():
    assert_raises(InvalidArgumentError, GridConfig, W_min=5.0, W_max=1.0)
    assert_raises(InvalidArgumentError, GridConfig, n_W=2)
    assert_raises(InvalidArgumentError, GridConfig, n_t=1)
    refined = GridConfig(n_W=11, n_t=6).refined()
    assert_equal((refined.n_W, refined.n_t), (21, 11))


def test_merton_value_and_policy():
    solution = fd_policy_iteration(MERTON, UTILITY, FROZEN, GridConfig(W_min=0.5, W_max=20.0, n_W=201, n_t=51))
    assert_equal(solution.value.shape, (51, 201))
    inside = (solution.W >= 2.0) & (solution.W <= 10.0)
    expected, _ = merton_closed_form(SPEC, solution.W[inside], 0.0)
    assert_allclose(solution.value[0, inside], expected, rtol=1e-3)
    assert_allclose(solution.policy[0, inside], SPEC.omega_star, atol=0.01)
    assert_allclose(solution.value[-1], UTILITY.evaluate(solution.W))
    assert_true(solution.metadata["policy_iterations"] >= 50)
    assert_allclose(solution.value_at(5.0), np.interp(5.0, solution.W, solution.value[0]))


def test_frame_layout():
    solution = fd_policy_iteration(MERTON, UTILITY, FROZEN, GridConfig(W_min=0.5, W_max=20.0, n_W=21, n_t=3))
    frame = solution.to_frame()
    assert_equal(list(frame.columns), ["W", "t", "value", "policy"])
    assert_equal(len(frame), 63)


def test_central_scheme_is_rejected_when_not_monotone():
    assert_raises(GridSchemeError, fd_policy_iteration, MERTON, UTILITY, FROZEN,
                  GridConfig(W_min=0.5, W_max=20.0, n_W=21, n_t=3, upwind=False))


@attr("slow")
def test_refinement_converges():
    probe = fd_convergence_probe(MERTON, UTILITY, FROZEN, GridConfig(W_min=0.5, W_max=20.0, n_W=51, n_t=11),
                                 W_range=(2.0, 10.0))
    assert_equal(len(probe.solutions), 3)
    assert_true(probe.differences[1] < probe.differences[0])
    assert_true(probe.observed_order > 0.5)
