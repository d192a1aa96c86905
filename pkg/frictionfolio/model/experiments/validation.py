import numpy as np
import pandas as pd

from frictionfolio.model.market.params import MarketState
from frictionfolio.model.oracles.merton import merton_closed_form

COMPARISON_TIMES = (0.0, 0.5)


def merton_comparison(report, spec, points=11, times=COMPARISON_TIMES):
    """Learned against closed-form value and policy at the interior wealth nodes of an evenly spaced grid, for each
    time in ``times``."""
    lower, upper = report.domain.bounds()
    W = np.linspace(lower[0], upper[0], points)[1:-1]
    frames = []
    for t in times:
        state = MarketState(W, lower[1], lower[2], lower[3], np.full_like(W, t))
        x = state.to_array()
        value_exact, omega_exact = merton_closed_form(spec, W, t)
        value = report.value(x)
        omega = report.policy(x)
        frames.append(pd.DataFrame({"t": np.full_like(W, t),
                                    "W": W,
                                    "value": value,
                                    "value_exact": value_exact,
                                    "value_rel_error": np.abs(value - value_exact) / np.abs(value_exact),
                                    "omega": omega,
                                    "omega_exact": omega_exact,
                                    "omega_error": np.abs(omega - omega_exact)}))
    return pd.concat(frames, ignore_index=True)


def comparison_summary(frame, tolerance, value_tolerance):
    max_policy_error = float(frame["omega_error"].max())
    max_value_error = float(frame["value_rel_error"].max())
    return pd.DataFrame([{"max_policy_error": max_policy_error,
                          "policy_tolerance": tolerance,
                          "max_value_rel_error": max_value_error,
                          "value_tolerance": value_tolerance,
                          "passed": bool(max_policy_error <= tolerance and max_value_error <= value_tolerance)}])
