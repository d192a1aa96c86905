import logging

import numpy as np
from scipy.optimize import line_search as wolfe_line_search

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import NonFiniteValueError
from frictionfolio.util.common.helper import get_from_user_dict, get_enum_from_user_dict
from frictionfolio.util.common.type import GenericEnum, StringRepresentationMixin, EqualityMixin
from frictionfolio.util.numerics.tape import Tape, value_and_grad


log = logging.getLogger(__name__)

OptimizerMethod = GenericEnum.create("OptimizerMethod", ["lbfgs", "bfgs"])
LineSearch = GenericEnum.create("LineSearch", ["backtracking-armijo", "strong-wolfe"])

ARMIJO_C1 = 1e-4
ARMIJO_SHRINK = 0.5
ARMIJO_MAX_STEPS = 60
WOLFE_C2 = 0.9
CURVATURE_EPS = 1e-12
CENTRAL_DIFFERENCE_STEP = 1e-6


class OptimizerConfig(EqualityMixin, StringRepresentationMixin):
    def __init__(self, method=OptimizerMethod.LBFGS, learning_rate=0.1, memory=10, max_iter=500,
                 gradient_tolerance=1e-6, line_search=LineSearch.BACKTRACKING_ARMIJO):
        self.method = OptimizerMethod.fromstring(method)
        self.learning_rate = float(learning_rate)
        self.memory = int(memory)
        self.max_iter = int(max_iter)
        self.gradient_tolerance = float(gradient_tolerance)
        self.line_search = LineSearch.fromstring(line_search)
        self.validate()

    def validate(self):
        if not self.learning_rate > 0:
            raise InvalidArgumentError("learning_rate must be positive, got {}".format(self.learning_rate))
        if self.memory < 1:
            raise InvalidArgumentError("memory must be at least 1, got {}".format(self.memory))
        if self.max_iter < 1:
            raise InvalidArgumentError("max_iter must be at least 1, got {}".format(self.max_iter))
        if not self.gradient_tolerance > 0:
            raise InvalidArgumentError("gradient_tolerance must be positive, got {}"
                                       .format(self.gradient_tolerance))

    def replace(self, **overrides):
        rep = self.to_yml_rep()
        rep.update(overrides)
        return OptimizerConfig.from_yml_rep(rep)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        return cls(method=get_enum_from_user_dict(yml_rep, "method", OptimizerMethod, default.method),
                   learning_rate=get_from_user_dict(yml_rep, "learning_rate", float, default.learning_rate),
                   memory=get_from_user_dict(yml_rep, "memory", int, default.memory),
                   max_iter=get_from_user_dict(yml_rep, "max_iter", int, default.max_iter),
                   gradient_tolerance=get_from_user_dict(yml_rep, "gradient_tolerance", float,
                                                         default.gradient_tolerance),
                   line_search=get_enum_from_user_dict(yml_rep, "line_search", LineSearch, default.line_search))

    def to_yml_rep(self):
        return {"method": self.method,
                "learning_rate": self.learning_rate,
                "memory": self.memory,
                "max_iter": self.max_iter,
                "gradient_tolerance": self.gradient_tolerance,
                "line_search": self.line_search}


class OptimizeResult(StringRepresentationMixin):
    def __init__(self, x, fun, grad, trace, n_iter, converged, line_search_failed, message):
        self.x = x
        self.fun = fun
        self.grad = grad
        self.trace = trace
        self.n_iter = n_iter
        self.converged = converged
        self.line_search_failed = line_search_failed
        self.message = message

    def __iter__(self):
        return iter((self.x, self.fun, self.trace))


class _Objective(object):
    """Uniform ``value``/``value_and_grad`` access to an objective whatever its gradient source is."""

    def __init__(self, fun, jac):
        self.fun = fun
        self.jac = jac
        self.n_evals = 0
        self._cache_x = None
        self._cache = None
        if jac is not None and jac is not True and jac != "central":
            raise InvalidArgumentError("jac must be None, True or \"central\", got {!r}".format(jac))

    def value(self, x):
        self.n_evals += 1
        if self.jac is None:
            tape = Tape()
            out = self.fun(tape.variable(x))
            return float(np.asarray(getattr(out, "value", out)))
        if self.jac is True:
            return float(self.fun(x)[0])
        return float(self.fun(x))

    def value_and_grad(self, x):
        if self._cache_x is not None and np.array_equal(x, self._cache_x):
            return self._cache
        self.n_evals += 1
        if self.jac is None:
            try:
                f, g = value_and_grad(self.fun, x)
            except NonFiniteValueError:
                f, g = np.inf, np.full_like(x, np.nan)
        elif self.jac is True:
            f, g = self.fun(x)
            f, g = float(f), np.asarray(g, dtype=float)
        else:
            f = float(self.fun(x))
            g = self._central_gradient(x)
        self._cache_x = np.array(x, copy=True)
        self._cache = (f, g)
        return f, g

    def _central_gradient(self, x):
        g = np.empty_like(x)
        for i in range(x.size):
            h = CENTRAL_DIFFERENCE_STEP * max(1.0, abs(x[i]))
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            g[i] = (float(self.fun(xp)) - float(self.fun(xm))) / (2.0 * h)
        return g


def _is_finite(f):
    return f is not None and np.isfinite(f)


def _armijo(objective, x, f, g, d, step):
    slope = float(g @ d)
    t = step
    for _ in range(ARMIJO_MAX_STEPS):
        x_new = x + t * d
        f_new = objective.value(x_new)
        if _is_finite(f_new) and f_new <= f + ARMIJO_C1 * t * slope:
            f_new, g_new = objective.value_and_grad(x_new)
            if _is_finite(f_new) and np.all(np.isfinite(g_new)):
                return t, f_new, g_new
        t *= ARMIJO_SHRINK
    return None, None, None


def _strong_wolfe(objective, x, f, g, d, step):
    def fval(z):
        return objective.value_and_grad(z)[0]

    def fgrad(z):
        return objective.value_and_grad(z)[1]

    try:
        alpha = wolfe_line_search(fval, fgrad, x, d, gfk=g, old_fval=f, c1=ARMIJO_C1, c2=WOLFE_C2)[0]
    except (ValueError, FloatingPointError):
        alpha = None
    if alpha is not None:
        f_new, g_new = objective.value_and_grad(x + alpha * d)
        if _is_finite(f_new) and f_new <= f and np.all(np.isfinite(g_new)):
            return alpha, f_new, g_new
    log.debug("Strong-Wolfe line search failed, falling back to backtracking")
    return _armijo(objective, x, f, g, d, step)


class _LbfgsMemory(object):
    def __init__(self, size):
        self.size = size
        self.s = []
        self.y = []

    def __len__(self):
        return len(self.s)

    def reset(self):
        self.s = []
        self.y = []

    def update(self, s, y):
        if float(s @ y) <= CURVATURE_EPS * float(np.sqrt((s @ s) * (y @ y))):
            return
        self.s.append(s)
        self.y.append(y)
        if len(self.s) > self.size:
            self.s.pop(0)
            self.y.pop(0)

    def direction(self, g):
        q = g.copy()
        alphas = []
        rhos = [1.0 / float(y @ s) for s, y in zip(self.s, self.y)]
        for s, y, rho in reversed(list(zip(self.s, self.y, rhos))):
            a = rho * float(s @ q)
            alphas.append(a)
            q -= a * y
        if self.s:
            q *= float(self.s[-1] @ self.y[-1]) / float(self.y[-1] @ self.y[-1])
        for (s, y, rho), a in zip(zip(self.s, self.y, rhos), reversed(alphas)):
            b = rho * float(y @ q)
            q += (a - b) * s
        return -q


class _BfgsMemory(object):
    def __init__(self, n):
        self.n = n
        self.h = None
        self.count = 0

    def __len__(self):
        return self.count

    def reset(self):
        self.h = None
        self.count = 0

    def update(self, s, y):
        sy = float(s @ y)
        if sy <= CURVATURE_EPS * float(np.sqrt((s @ s) * (y @ y))):
            return
        if self.h is None:
            self.h = np.eye(self.n) * sy / float(y @ y)
        rho = 1.0 / sy
        v = np.eye(self.n) - rho * np.outer(s, y)
        self.h = v @ self.h @ v.T + rho * np.outer(s, s)
        self.count += 1

    def direction(self, g):
        if self.h is None:
            return -g
        return -(self.h @ g)


def minimize(fun, x0, config=None, jac=None):
    """Minimises a smooth objective with a quasi-Newton method.

    ``jac`` selects the gradient source: ``None`` records ``fun`` on a tape (``fun`` receives a tape variable),
    ``True`` means ``fun`` returns ``(value, gradient)``, and ``"central"`` uses central finite differences. The
    first trial step of a line search is ``config.learning_rate`` until a curvature pair exists, then 1. Returns an
    :class:`OptimizeResult`, which also unpacks as ``(x, fun, trace)``."""
    if config is None:
        config = OptimizerConfig()
    objective = _Objective(fun, jac)
    x = np.array(x0, dtype=float).ravel()
    f, g = objective.value_and_grad(x)
    if not _is_finite(f) or not np.all(np.isfinite(g)):
        raise NonFiniteValueError("Objective is not finite at the starting point (f={})".format(f))

    if config.method == OptimizerMethod.LBFGS:
        memory = _LbfgsMemory(config.memory)
    else:
        memory = _BfgsMemory(x.size)
    search = _strong_wolfe if config.line_search == LineSearch.STRONG_WOLFE else _armijo

    trace = [f]
    converged = False
    failed = False
    message = "maximum iterations reached"
    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        if np.max(np.abs(g)) <= config.gradient_tolerance:
            converged = True
            message = "gradient tolerance reached"
            n_iter -= 1
            break

        d = memory.direction(g)
        if float(g @ d) >= 0:
            memory.reset()
            d = -g
        step = config.learning_rate if len(memory) == 0 else 1.0
        alpha, f_new, g_new = search(objective, x, f, g, d, step)
        if alpha is None and len(memory) > 0:
            log.debug("Line search failed along the quasi-Newton direction, retrying steepest descent")
            memory.reset()
            d = -g
            alpha, f_new, g_new = search(objective, x, f, g, d, config.learning_rate)
        if alpha is None:
            failed = True
            message = "line search failed"
            log.debug("Line search failed at iteration {} (f={:.6e})".format(n_iter, f))
            break

        s = alpha * d
        memory.update(s, g_new - g)
        x = x + s
        f, g = f_new, g_new
        trace.append(f)
        log.debug("Iteration {}: f={:.6e} |g|={:.3e}".format(n_iter, f, float(np.max(np.abs(g)))))
    else:
        if np.max(np.abs(g)) <= config.gradient_tolerance:
            converged = True
            message = "gradient tolerance reached"

    return OptimizeResult(x, f, g, trace, n_iter, converged, failed, message)
