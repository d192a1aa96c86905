import logging

import numpy as np

from frictionfolio.exceptions.model.exceptions import TerminalUtilityError, NonFiniteValueError
from frictionfolio.model.market.dynamics import StateDerivatives, generator, quadratic_in_omega
from frictionfolio.model.market.params import MarketState
from frictionfolio.model.solver.networks import value_net
from frictionfolio.model.utility.utilities import SShapedUtility
from frictionfolio.util.numerics import tape
from frictionfolio.util.numerics.hyperdual import HyperDual


log = logging.getLogger(__name__)

W, V, THETA, L, T = range(5)

FIRST_FIELDS = {W: "Q_W", V: "Q_v", THETA: "Q_theta", L: "Q_L", T: "Q_t"}
SECOND_FIELDS = {(W, W): "Q_WW", (V, V): "Q_vv", (THETA, THETA): "Q_thetatheta", (L, L): "Q_LL",
                 (W, V): "Q_Wv", (W, THETA): "Q_Wtheta", (W, L): "Q_WL", (V, THETA): "Q_vtheta"}


def active_directions(p, domain=None):
    """State coordinates whose derivatives enter the generator: t and W always, each of v, theta and L when its
    dynamics are switched on and its range is not frozen."""
    frozen = domain.frozen() if domain is not None else np.zeros(5, dtype=bool)
    active = [W]
    if (p.kappa != 0 or p.sigma1 != 0) and not frozen[V]:
        active.append(V)
    if (p.lam != 0 or p.sigma2 != 0) and not frozen[THETA]:
        active.append(THETA)
    if (p.alpha != 0 or p.sigma_L != 0) and not frozen[L]:
        active.append(L)
    active.append(T)
    return active


def network_value_function(params, theta=None):
    def value_fn(x):
        return value_net(params, x, theta)

    return value_fn


def state_derivatives(value_fn, x, active):
    """Runs ``value_fn`` on hyper-dual inputs over ``active`` and collects the generator's derivatives. Components
    stay tape variables when the value function's parameters are on a tape."""
    out = value_fn(HyperDual.seed(x, active))
    fields = {}
    for k, i in enumerate(active):
        fields[FIRST_FIELDS[i]] = out.first[k]
    for a, i in enumerate(active):
        for b in range(a, len(active)):
            key = (i, active[b])
            if key in SECOND_FIELDS:
                fields[SECOND_FIELDS[key]] = out.second_component(a, b)
    return out.value, StateDerivatives(**fields)


def states(x):
    return MarketState(x[:, W], x[:, V], x[:, THETA], x[:, L], x[:, T])


def pde_residual(value_fn, omega, x, p, active=None):
    """Generator of the HJB equation applied to ``value_fn`` at the batch ``x`` under ``omega``."""
    if active is None:
        active = active_directions(p)
    _, derivs = state_derivatives(value_fn, x, active)
    return generator(states(x), omega, derivs, p)


def residual_quadratic(value_fn, x, p, active=None):
    """``(A0, A1, A2)`` with residual(omega) = A0 + A1*omega + A2*omega**2 at every point of ``x``."""
    if active is None:
        active = active_directions(p)
    _, derivs = state_derivatives(value_fn, x, active)
    derivs = StateDerivatives(**dict((name, tape.value_of(getattr(derivs, name)))
                                     for name in StateDerivatives.FIELDS))
    return quadratic_in_omega(states(x), derivs, p)


def check_terminal_utility(utility):
    if isinstance(utility, SShapedUtility):
        raise TerminalUtilityError("The terminal condition needs a concave utility; pass concavify(u) instead of the "
                                   "raw S-shaped utility")


def finite_part(residual):
    """Drops non-finite residual entries; returns the kept residuals and the number dropped."""
    finite = np.isfinite(tape.value_of(residual))
    n_excluded = int(np.size(finite) - np.count_nonzero(finite))
    if n_excluded == 0:
        return residual, 0
    if n_excluded == np.size(finite):
        raise NonFiniteValueError("Every PDE residual in the batch is non-finite")
    return residual[finite], n_excluded


def evaluation_loss(params, theta, omega, collocation, p, utility, active=None):
    """Mean squared PDE residual over the interior batch plus mean squared terminal mismatch Q(., T) - U(W).

    ``omega`` holds the (fixed) policy at the interior points; ``theta`` the value parameters, usually a tape
    variable. Returns ``(loss, n_excluded)``."""
    check_terminal_utility(utility)
    value_fn = network_value_function(params, theta)
    residual, n_excluded = finite_part(pde_residual(value_fn, omega, collocation.interior, p, active))
    terminal = value_fn(collocation.terminal) - utility.evaluate(collocation.terminal[:, W])
    loss = tape.average(tape.square(residual)) + tape.average(tape.square(terminal))
    return loss, n_excluded
