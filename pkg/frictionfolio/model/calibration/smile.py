import logging

import numpy as np
from scipy.interpolate import make_smoothing_spline

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import SplineFitError, ChainTooSmallError


log = logging.getLogger(__name__)

DEFAULT_SMOOTHING = 0.99
MIN_KNOTS = 5


class Smile(object):
    """Implied volatility as a function of forward delta.

    Inside the fitted delta range it is a cubic smoothing spline; outside it is held constant at the boundary
    values."""

    def __init__(self, spline, delta_min, delta_max, smoothing):
        self.spline = spline
        self.delta_min = delta_min
        self.delta_max = delta_max
        self.smoothing = smoothing

    def __call__(self, delta):
        return self.spline(np.clip(delta, self.delta_min, self.delta_max))


def _merge_duplicates(x, y, w):
    unique, inverse = np.unique(x, return_inverse=True)
    if len(unique) == len(x):
        return x, y, w
    w_sum = np.bincount(inverse, weights=w)
    y_mean = np.bincount(inverse, weights=w * y) / w_sum
    return unique, y_mean, w_sum


def fit_smile(chain, smoothing=DEFAULT_SMOOTHING):
    """Fits the volume-weighted smoothing spline minimising
    ``smoothing * sum(w * (iv - f(delta))**2) + (1 - smoothing) * integral(f''**2)``.

    ``smoothing`` lies in (0, 1]; 1 interpolates and values near 0 approach the weighted least-squares line."""
    if not 0 < smoothing <= 1:
        raise InvalidArgumentError("Smoothing parameter must lie in (0, 1], got {}".format(smoothing))
    order = np.argsort(chain.deltas)
    x = chain.deltas[order]
    y = chain.implied_vols[order]
    w = chain.weights[order]
    x, y, w = _merge_duplicates(x, y, w)
    if len(x) < MIN_KNOTS:
        raise ChainTooSmallError(len(x), MIN_KNOTS, chain.name)

    lam = (1.0 - smoothing) / smoothing
    try:
        spline = make_smoothing_spline(x, y, w=w, lam=lam)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise SplineFitError("Smile fit failed for chain {}: {}".format(chain.name, e))
    if not np.all(np.isfinite(spline(x))):
        raise SplineFitError("Smile fit for chain {} is not finite".format(chain.name))
    return Smile(spline, float(x[0]), float(x[-1]), smoothing)
