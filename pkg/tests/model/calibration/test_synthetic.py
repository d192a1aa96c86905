import datetime

import numpy as np
import pandas as pd
from nose.tools import assert_equal, assert_raises, assert_true

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidArgumentError
from frictionfolio.model.calibration.chains import CHAIN_COLUMNS, REALIZATION_COLUMNS
from frictionfolio.model.calibration.synthetic import SyntheticChainConfig, generate_chains
from frictionfolio.model.utility.utilities import PowerUtility


SMALL = SyntheticChainConfig(horizon_days=[7, 14], n_expiries=10, seed=4)


def test_sizes_and_layout():
    chains, realizations = generate_chains(SMALL)
    assert_equal(list(chains.columns), CHAIN_COLUMNS)
    assert_equal(list(realizations.columns), REALIZATION_COLUMNS)
    assert_equal(len(chains), 19 * 20)
    assert_equal(len(realizations), 20)
    assert_true(realizations["date"].is_monotonic_increasing)
    assert_true(np.all(chains["volume"] >= 20000))
    assert_true(np.all(chains["volume"] < 200000))


def test_chains_follow_realized_prices():
    chains, realizations = generate_chains(SMALL)
    prices = dict(zip(realizations["date"], realizations["price"]))
    weekly = chains[chains["expiry"] - chains["as_of"] == pd.Timedelta(days=7)]
    as_of_dates = sorted(pd.Timestamp(d) for d in weekly["as_of"].unique())
    assert_equal(as_of_dates[0], pd.Timestamp("2020-01-06"))
    assert_equal(float(weekly[weekly["as_of"] == as_of_dates[0]]["underlying"].iloc[0]), 100.0)
    for as_of in as_of_dates[1:]:
        assert_equal(float(weekly[weekly["as_of"] == as_of]["underlying"].iloc[0]), prices[as_of])
    biweekly = chains[chains["expiry"] - chains["as_of"] == pd.Timedelta(days=14)]
    assert_equal(biweekly["as_of"].min(), pd.Timestamp("2020-01-07"))


def test_generation_is_deterministic():
    first_chains, first_realizations = generate_chains(SMALL)
    second_chains, second_realizations = generate_chains(SMALL)
    pd.testing.assert_frame_equal(first_chains, second_chains)
    pd.testing.assert_frame_equal(first_realizations, second_realizations)
    _, other = generate_chains(SyntheticChainConfig(horizon_days=[7, 14], n_expiries=10, seed=5))
    assert_true(not np.allclose(other["price"], first_realizations["price"]))


def test_from_yml_rep():
    config = SyntheticChainConfig.from_yml_rep({"vol": 0.3, "horizon_days": [7], "start": datetime.date(2021, 1, 4),
                                                "utility": {"variant": "power", "k": 2.0}, "seed": 9})
    assert_equal(config.vol, 0.3)
    assert_equal(config.horizon_days, [7])
    assert_equal(config.start, pd.Timestamp("2021-01-04"))
    assert_equal(config.utility, PowerUtility(2.0))
    assert_equal(config.seed, 9)
    with assert_raises(ConfigError) as cm:
        SyntheticChainConfig.from_yml_rep({"vol": -0.1})
    assert_equal(cm.exception.field, "synthetic")


def test_invalid_configurations():
    assert_raises(InvalidArgumentError, SyntheticChainConfig, skew=-0.5)
    assert_raises(InvalidArgumentError, SyntheticChainConfig, horizon_days=[0])
    assert_raises(InvalidArgumentError, SyntheticChainConfig, n_expiries=0)
    assert_raises(InvalidArgumentError, generate_chains, SyntheticChainConfig(horizon_days=[1, 2], n_expiries=5))
