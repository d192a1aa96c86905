import numpy as np
from nose.tools import assert_true, assert_equal, assert_raises, assert_less, assert_false
from numpy.testing import assert_allclose

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import NonFiniteValueError
from frictionfolio.util.numerics import tape as tp
from frictionfolio.util.numerics.optimize import minimize, OptimizerConfig, OptimizerMethod, LineSearch


def rosenbrock(theta):
    x = theta[0]
    y = theta[1]
    return (1.0 - x) ** 2 + 100.0 * (y - x ** 2) ** 2


def rosenbrock_with_gradient(z):
    x, y = z
    value = (1 - x) ** 2 + 100 * (y - x * x) ** 2
    return value, np.array([-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)])


H = np.array([[3.0, 0.5], [0.5, 1.0]])
C = np.array([1.0, -2.0])


def quadratic(z):
    return 0.5 * float(z @ H @ z) - float(C @ z)


def test_lbfgs_solves_rosenbrock():
    result = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iter=2000, gradient_tolerance=1e-8))
    assert_allclose(result.x, [1.0, 1.0], atol=1e-5)
    assert_less(result.fun, 1e-8)
    assert_true(result.trace[-1] <= result.trace[0])


def test_strong_wolfe_bfgs_with_explicit_gradient():
    config = OptimizerConfig(method=OptimizerMethod.BFGS, line_search=LineSearch.STRONG_WOLFE, max_iter=500,
                             gradient_tolerance=1e-8)
    result = minimize(rosenbrock_with_gradient, np.array([-1.2, 1.0]), config, jac=True)
    assert_allclose(result.x, [1.0, 1.0], atol=1e-5)


def test_central_differences():
    result = minimize(quadratic, np.zeros(2), OptimizerConfig(gradient_tolerance=1e-6), jac="central")
    assert_allclose(result.x, np.linalg.solve(H, C), atol=1e-5)
    assert_true(result.converged)


def test_result_unpacks():
    x, fun, trace = minimize(lambda t: tp.total((t - 3.0) ** 2), [0.0, 1.0])
    assert_allclose(x, [3.0, 3.0], atol=1e-6)
    assert_equal(fun, trace[-1])


def test_already_converged_start():
    result = minimize(lambda t: tp.total(t * t), [0.0])
    assert_true(result.converged)
    assert_equal(result.n_iter, 0)


def test_iteration_cap():
    result = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iter=3))
    assert_false(result.converged)
    assert_equal(result.message, "maximum iterations reached")
    assert_equal(len(result.trace), 4)


def test_non_finite_start():
    assert_raises(NonFiniteValueError, minimize, lambda t: tp.total(tp.log(t)), [-1.0])


def test_config():
    assert_raises(InvalidArgumentError, OptimizerConfig, learning_rate=0.0)
    assert_raises(InvalidArgumentError, OptimizerConfig, memory=0)
    assert_raises(InvalidArgumentError, OptimizerConfig, method="newton")
    config = OptimizerConfig.from_yml_rep({"method": "BFGS", "max_iter": 20, "line_search": "strong_wolfe"})
    assert_equal(config.method, OptimizerMethod.BFGS)
    assert_equal(config.line_search, LineSearch.STRONG_WOLFE)
    assert_equal(config.replace(max_iter=5).max_iter, 5)
    assert_equal(OptimizerConfig.from_yml_rep(config.to_yml_rep()), config)
    assert_raises(InvalidArgumentError, minimize, quadratic, np.zeros(2), None, "exact")
