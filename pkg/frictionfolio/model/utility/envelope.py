import logging

import numpy as np
from scipy.optimize import bisect

from frictionfolio.exceptions.common.exceptions import DomainViolationError, InvalidArgumentError, ConfigError, \
    InvalidUserDataError
from frictionfolio.exceptions.model.exceptions import TangencyNotFoundError
from frictionfolio.model.utility.utilities import UtilitySpec, SShapedUtility


log = logging.getLogger(__name__)

BRACKET_WIDTH = 10.0
BISECTION_XTOL = 1e-10
NEWTON_POLISH_STEPS = 3


class ConcaveEnvelope(UtilitySpec):
    """Smallest concave majorant of an S-shaped utility on [0, inf).

    Below the tangent point ``W_tp`` it is the line ``intercept + slope*W`` through (0, U(0)); from ``W_tp`` on it is
    the original gain branch."""

    VARIANT = "concave_envelope"

    def __init__(self, s_shaped, W_tp, slope, intercept):
        self.s_shaped = s_shaped
        self.W_tp = float(W_tp)
        self.slope = float(slope)
        self.intercept = float(intercept)

    def _evaluate(self, W):
        return np.where(W >= self.W_tp, self.s_shaped.gain(W), self.intercept + self.slope * W)

    def _marginal(self, W):
        return np.where(W >= self.W_tp, self.s_shaped._marginal(W), self.slope)

    def _second(self, W):
        return np.where(W >= self.W_tp, self.s_shaped._second(W), 0.0)

    def rra(self, W):
        if np.any(np.asarray(W) == self.W_tp):
            raise DomainViolationError("The envelope's second derivative is undefined at the tangent point {}"
                                       .format(self.W_tp))
        return super(ConcaveEnvelope, self).rra(W)

    def parameters(self):
        raise InvalidArgumentError("The concave envelope is derived, not calibrated; calibrate the S-shaped "
                                   "utility instead")

    def to_yml_rep(self):
        return {"variant": self.VARIANT,
                "of": self.s_shaped.to_yml_rep(),
                "W_tp": self.W_tp,
                "slope": self.slope,
                "intercept": self.intercept}

    @classmethod
    def from_yml_rep(cls, yml_rep):
        try:
            of = yml_rep["of"]
        except (KeyError, TypeError):
            raise ConfigError("of", InvalidUserDataError("The concave envelope needs the S-shaped utility it "
                                                         "envelops under \"of\""))
        return concavify(SShapedUtility.from_yml_rep(of))


def tangency_gap(s, W):
    """U(W) - U(0) - U'(W)*W: zero where the line from (0, U(0)) touches the gain branch at W."""
    return s.evaluate(W) - s.evaluate(0.0) - s.marginal(W) * W


def concavify(s):
    if not isinstance(s, SShapedUtility):
        raise InvalidArgumentError("Only S-shaped utilities can be concavified, got {}".format(s.VARIANT))

    def h(W):
        return float(tangency_gap(s, W))

    lo, hi = s.W0, s.W0 + BRACKET_WIDTH
    if np.sign(h(lo)) == np.sign(h(hi)):
        raise TangencyNotFoundError("No tangent point in [{:.4g}, {:.4g}] for {}: the line from (0, U(0)) never "
                                    "touches the gain branch".format(lo, hi, s))
    W_tp = bisect(h, lo, hi, xtol=BISECTION_XTOL)

    # h'(W) = -U''(W)*W; Newton steps take the bisection estimate to machine precision
    for _ in range(NEWTON_POLISH_STEPS):
        dh = -float(s.second_derivative(W_tp)) * W_tp
        if dh == 0:
            break
        step = h(W_tp) / dh
        if abs(step) > BISECTION_XTOL:
            break
        W_tp -= step

    slope = float(s.marginal(W_tp))
    intercept = float(s.evaluate(0.0))
    log.debug("Concave envelope: tangent point {:.6f}, slope {:.6f}, intercept {:.6f}".format(W_tp, slope,
                                                                                            intercept))
    return ConcaveEnvelope(s, W_tp, slope, intercept)
