import logging

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.stats import norm

from frictionfolio.exceptions.common.exceptions import InvalidUserDataError, FileAccessError
from frictionfolio.exceptions.model.exceptions import ChainTooSmallError
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import EqualityMixin, StringRepresentationMixin


log = logging.getLogger(__name__)

CHAIN_COLUMNS = ["as_of", "expiry", "underlying", "rate", "strike", "call_price", "volume"]
REALIZATION_COLUMNS = ["date", "price"]
HORIZONS = {1: "1w", 2: "2w", 3: "3w", 4: "4w"}
DAYS_PER_YEAR = 365.0

IV_LOWER = 1e-6
IV_UPPER = 5.0
VIOLATION_TOLERANCE = 1e-12

REASON_LOW_VOLUME = "low-volume"
REASON_MIN_PRICE = "min-price"
REASON_BOUNDS = "arbitrage-bounds"
REASON_HIGH_VOL = "high-vol"
REASON_MONOTONICITY = "monotonicity"
REASON_CONVEXITY = "convexity"


# Black pricing on the forward; all quantities may be arrays

def _d1(F, K, sigma, tau):
    return (np.log(F / K) + 0.5 * sigma ** 2 * tau) / (sigma * np.sqrt(tau))


def black_call(F, K, sigma, tau, r):
    d1 = _d1(F, K, sigma, tau)
    d2 = d1 - sigma * np.sqrt(tau)
    return np.exp(-r * tau) * (F * norm.cdf(d1) - K * norm.cdf(d2))


def forward_delta(F, K, sigma, tau):
    return norm.cdf(_d1(F, K, sigma, tau))


def strike_from_delta(delta, F, sigma, tau):
    return F * np.exp(-sigma * np.sqrt(tau) * norm.ppf(delta) + 0.5 * sigma ** 2 * tau)


def implied_vol(price, F, K, tau, r):
    """Inverts the Black price; returns None if the price lies outside the static no-arbitrage bounds."""
    discount = np.exp(-r * tau)
    lower = discount * max(F - K, 0.0)
    upper = discount * F
    if not lower < price < upper:
        return None
    f = lambda sigma: black_call(F, K, sigma, tau, r) - price
    if f(IV_LOWER) > 0 or f(IV_UPPER) < 0:
        return None
    return brentq(f, IV_LOWER, IV_UPPER, xtol=1e-14, rtol=1e-12)


class FilterConfig(EqualityMixin, StringRepresentationMixin):
    def __init__(self, min_volume=10000, tick=0.0001, max_implied_vol=1.0, min_quotes=5):
        self.min_volume = float(min_volume)
        self.tick = float(tick)
        self.max_implied_vol = float(max_implied_vol)
        self.min_quotes = int(min_quotes)

    @property
    def min_price(self):
        return 2.0 * self.tick

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        return cls(min_volume=get_from_user_dict(yml_rep, "min_volume", float, default.min_volume),
                   tick=get_from_user_dict(yml_rep, "tick", float, default.tick),
                   max_implied_vol=get_from_user_dict(yml_rep, "max_implied_vol", float, default.max_implied_vol),
                   min_quotes=get_from_user_dict(yml_rep, "min_quotes", int, default.min_quotes))

    def to_yml_rep(self):
        return {"min_volume": self.min_volume, "tick": self.tick, "max_implied_vol": self.max_implied_vol,
                "min_quotes": self.min_quotes}


class OptionQuote(StringRepresentationMixin):
    def __init__(self, strike, call_price, volume, implied_vol=None, delta=None, volume_weight=0.0, reason=None):
        self.strike = strike
        self.call_price = call_price
        self.volume = volume
        self.implied_vol = implied_vol
        self.delta = delta
        self.volume_weight = volume_weight
        # None while the quote is retained, otherwise the filter that removed it
        self.reason = reason

    @property
    def retained(self):
        return self.reason is None


class OptionChain(StringRepresentationMixin):
    def __init__(self, as_of, expiry, underlying, rate, quotes):
        self.as_of = pd.Timestamp(as_of)
        self.expiry = pd.Timestamp(expiry)
        self.underlying = float(underlying)
        self.rate = float(rate)
        self.quotes = quotes

    @property
    def name(self):
        return "{:%Y-%m-%d}/{:%Y-%m-%d}".format(self.as_of, self.expiry)

    @property
    def days(self):
        return (self.expiry - self.as_of).days

    @property
    def tau(self):
        return self.days / DAYS_PER_YEAR

    @property
    def forward(self):
        return self.underlying * np.exp(self.rate * self.tau)

    @property
    def horizon(self):
        return HORIZONS.get(int(round(self.days / 7.0)))

    def retained(self):
        return sorted([q for q in self.quotes if q.retained], key=lambda q: q.strike)

    def _array(self, field):
        return np.array([getattr(q, field) for q in self.retained()], dtype=float)

    @property
    def strikes(self):
        return self._array("strike")

    @property
    def implied_vols(self):
        return self._array("implied_vol")

    @property
    def deltas(self):
        return self._array("delta")

    @property
    def weights(self):
        return self._array("volume_weight")

    def filter_counts(self):
        counts = {"retained": 0}
        for q in self.quotes:
            key = "retained" if q.retained else q.reason
            counts[key] = counts.get(key, 0) + 1
        return counts


def _static_violations(quotes):
    """Returns ``(index, magnitude, reason)`` of the worst monotonicity or convexity violation among quotes sorted by
    strike, or None."""
    k = np.array([q.strike for q in quotes])
    c = np.array([q.call_price for q in quotes])
    worst = None
    for i in range(1, len(quotes)):
        excess = c[i] - c[i - 1]
        if excess > VIOLATION_TOLERANCE * max(1.0, c[i - 1]) and (worst is None or excess > worst[1]):
            worst = (i, excess, REASON_MONOTONICITY)
    if worst is not None:
        return worst
    slopes = np.diff(c) / np.diff(k)
    for i in range(1, len(quotes) - 1):
        # slopes must be non-decreasing; attributing the kink to the middle quote
        excess = (slopes[i - 1] - slopes[i]) * (k[i + 1] - k[i - 1])
        if excess > VIOLATION_TOLERANCE * max(1.0, c[i]) and (worst is None or excess > worst[1]):
            worst = (i, excess, REASON_CONVEXITY)
    return worst


def ingest_chain(records, config=None):
    """Builds a cleaned :class:`OptionChain` from the rows of one (as_of, expiry) pair.

    Quotes are dropped for low volume, prices under two ticks, prices outside the static bounds, implied volatility
    over the cap and, one at a time worst first, violations of monotonicity and convexity in strike. Survivors get
    forward deltas and volume weights."""
    if config is None:
        config = FilterConfig()
    records = records.sort_values("strike")
    first = records.iloc[0]
    chain = OptionChain(first["as_of"], first["expiry"], first["underlying"], first["rate"], [])
    if chain.tau <= 0:
        raise InvalidUserDataError("Chain {} expires on or before its as-of date".format(chain.name))
    F, tau, r = chain.forward, chain.tau, chain.rate

    for _, row in records.iterrows():
        q = OptionQuote(float(row["strike"]), float(row["call_price"]), float(row["volume"]))
        if q.volume < config.min_volume:
            q.reason = REASON_LOW_VOLUME
        elif q.call_price < config.min_price:
            q.reason = REASON_MIN_PRICE
        else:
            q.implied_vol = implied_vol(q.call_price, F, q.strike, tau, r)
            if q.implied_vol is None:
                q.reason = REASON_BOUNDS
            elif q.implied_vol > config.max_implied_vol:
                q.reason = REASON_HIGH_VOL
        chain.quotes.append(q)

    while True:
        retained = chain.retained()
        if len(retained) < 3:
            break
        worst = _static_violations(retained)
        if worst is None:
            break
        retained[worst[0]].reason = worst[2]

    retained = chain.retained()
    if len(retained) < config.min_quotes:
        raise ChainTooSmallError(len(retained), config.min_quotes, chain.name)

    total_volume = sum(q.volume for q in retained)
    for q in retained:
        q.delta = float(forward_delta(F, q.strike, q.implied_vol, tau))
        q.volume_weight = q.volume / total_volume
    log.debug("Chain {}: {} of {} quotes retained".format(chain.name, len(retained), len(chain.quotes)))
    return chain


class IngestReport(object):
    def __init__(self):
        self.chains = []
        # (chain name, reason)
        self.rejected = []

    def by_horizon(self):
        buckets = {}
        for chain in self.chains:
            if chain.horizon is not None:
                buckets.setdefault(chain.horizon, []).append(chain)
        return buckets


def ingest_chains(frame, config=None):
    """Splits a multi-expiry quote frame by (as_of, expiry) and ingests every chain, collecting rejections instead of
    raising them."""
    report = IngestReport()
    for (as_of, expiry), records in frame.groupby(["as_of", "expiry"], sort=True):
        try:
            report.chains.append(ingest_chain(records, config))
        except (ChainTooSmallError, InvalidUserDataError) as e:
            log.warning(str(e))
            report.rejected.append(("{:%Y-%m-%d}/{:%Y-%m-%d}".format(as_of, expiry), str(e)))
    return report


def _check_columns(frame, columns, path):
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise InvalidUserDataError("File {} is missing column(s): {}".format(path, ", ".join(missing)))


def read_chain_csv(path):
    try:
        frame = pd.read_csv(path, comment="#")
    except (IOError, OSError) as e:
        raise FileAccessError("Could not read chain file {}: {}".format(path, e))
    _check_columns(frame, CHAIN_COLUMNS, path)
    frame["as_of"] = pd.to_datetime(frame["as_of"])
    frame["expiry"] = pd.to_datetime(frame["expiry"])
    return frame[CHAIN_COLUMNS]


def read_realizations_csv(path):
    try:
        frame = pd.read_csv(path, comment="#")
    except (IOError, OSError) as e:
        raise FileAccessError("Could not read realizations file {}: {}".format(path, e))
    _check_columns(frame, REALIZATION_COLUMNS, path)
    frame["date"] = pd.to_datetime(frame["date"])
    return frame[REALIZATION_COLUMNS]


def realization_lookup(chains_frame, realizations_frame=None):
    """Maps dates to realized underlying prices, from ``realizations.csv`` when given, otherwise from chains quoted
    on a date equal to another chain's expiry."""
    prices = {}
    if realizations_frame is not None:
        for date, price in zip(realizations_frame["date"], realizations_frame["price"]):
            prices[pd.Timestamp(date)] = float(price)
    else:
        for as_of, underlying in zip(chains_frame["as_of"], chains_frame["underlying"]):
            prices.setdefault(pd.Timestamp(as_of), float(underlying))
    return prices
