import logging

import numpy as np
import pandas as pd

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError, ConfigError, InvalidUserDataError
from frictionfolio.model.calibration.chains import OptionChain, black_call, strike_from_delta, CHAIN_COLUMNS, \
    REALIZATION_COLUMNS
from frictionfolio.model.calibration.density import rn_density, subjective_density
from frictionfolio.model.utility.utilities import LinearUtility, utility_from_yml_rep
from frictionfolio.util.common.helper import get_from_user_dict, getitem_with_default
from frictionfolio.util.common.rng import substream
from frictionfolio.util.common.type import StringRepresentationMixin


log = logging.getLogger(__name__)

TRUTH_GRID_SIZE = 2001
TRUTH_DELTA_RANGE = (1e-4, 1.0 - 1e-4)


class SyntheticChainConfig(StringRepresentationMixin):
    """Synthetic option chains priced off a smile quadratic in delta, with realizations drawn from the subjective
    density of ``utility``.

    Every horizon gets its own sequence of non-overlapping chains; each chain is quoted on the expiry of the previous
    one at its realized price."""

    def __init__(self, underlying=100.0, rate=0.02, vol=0.2, skew=0.0, curvature=0.0, horizon_days=(7, 14, 21, 28),
                 n_expiries=60, start="2020-01-06", deltas=None, volume_range=(20000, 200000), utility=None, seed=0):
        self.underlying = float(underlying)
        self.rate = float(rate)
        self.vol = float(vol)
        self.skew = float(skew)
        self.curvature = float(curvature)
        self.horizon_days = [int(d) for d in horizon_days]
        self.n_expiries = int(n_expiries)
        self.start = pd.Timestamp(start)
        self.deltas = np.linspace(0.05, 0.95, 19) if deltas is None else np.asarray(deltas, dtype=float)
        self.volume_range = tuple(int(v) for v in volume_range)
        self.utility = utility if utility is not None else LinearUtility()
        self.seed = int(seed)
        if self.vol <= 0 or np.any(self.smile(np.array([0.0, 1.0])) <= 0):
            raise InvalidArgumentError("Synthetic smile must stay positive on [0, 1]")
        if any(d <= 0 for d in self.horizon_days):
            raise InvalidArgumentError("Horizons must be positive numbers of days")
        if self.n_expiries < 1:
            raise InvalidArgumentError("At least one expiry per horizon is needed")

    def smile(self, delta):
        return self.vol + self.skew * (delta - 0.5) + self.curvature * (delta - 0.5) ** 2

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        utility_rep = get_from_user_dict(yml_rep, "utility", dict, None)
        try:
            return cls(underlying=get_from_user_dict(yml_rep, "underlying", float, default.underlying),
                       rate=get_from_user_dict(yml_rep, "rate", float, default.rate),
                       vol=get_from_user_dict(yml_rep, "vol", float, default.vol),
                       skew=get_from_user_dict(yml_rep, "skew", float, default.skew),
                       curvature=get_from_user_dict(yml_rep, "curvature", float, default.curvature),
                       horizon_days=get_from_user_dict(yml_rep, "horizon_days", list, default.horizon_days),
                       n_expiries=get_from_user_dict(yml_rep, "n_expiries", int, default.n_expiries),
                       start=str(getitem_with_default(yml_rep, "start", "2020-01-06")),
                       utility=None if utility_rep is None else utility_from_yml_rep(utility_rep),
                       seed=get_from_user_dict(yml_rep, "seed", int, default.seed))
        except InvalidArgumentError as e:
            raise ConfigError("synthetic", InvalidUserDataError(str(e)))


def _quote_chain(config, as_of, days, underlying, rng):
    tau = days / 365.0
    forward = underlying * np.exp(config.rate * tau)
    sigma = config.smile(config.deltas)
    strikes = strike_from_delta(config.deltas, forward, sigma, tau)
    prices = black_call(forward, strikes, sigma, tau, config.rate)
    volumes = rng.integers(config.volume_range[0], config.volume_range[1], size=len(strikes))
    expiry = as_of + pd.Timedelta(days=days)
    rows = pd.DataFrame({"as_of": as_of, "expiry": expiry, "underlying": underlying, "rate": config.rate,
                         "strike": strikes, "call_price": prices, "volume": volumes})
    return OptionChain(as_of, expiry, underlying, config.rate, []), rows


def generate_chains(config):
    """Returns ``(chains, realizations)`` frames in the layout read by the calibrate experiment."""
    chain_frames = []
    realized = []
    for h, days in enumerate(config.horizon_days):
        rng = substream(config.seed, h)
        # distinct start offsets keep expiry dates of different horizons apart
        as_of = config.start + pd.Timedelta(days=h)
        underlying = config.underlying
        for _ in range(config.n_expiries):
            chain, rows = _quote_chain(config, as_of, days, underlying, rng)
            q = rn_density(config.smile, chain, TRUTH_GRID_SIZE, TRUTH_DELTA_RANGE)
            p = subjective_density(q, config.utility)
            price = float(p.sample(rng, 1)[0])
            chain_frames.append(rows)
            realized.append((chain.expiry, price))
            as_of, underlying = chain.expiry, price

    realizations = pd.DataFrame(realized, columns=REALIZATION_COLUMNS)
    if realizations["date"].duplicated().any():
        raise InvalidArgumentError("Horizons {} produce colliding expiry dates".format(config.horizon_days))
    chains = pd.concat(chain_frames, ignore_index=True)[CHAIN_COLUMNS]
    log.info("Generated {} synthetic chains over {} horizon(s)".format(len(realized), len(config.horizon_days)))
    return chains, realizations.sort_values("date", ignore_index=True)
