import numpy as np
from nose.plugins.attrib import attr
from nose.tools import assert_equal, assert_raises, assert_true, assert_is_none, assert_almost_equal

from frictionfolio.exceptions.common.exceptions import ConfigError
from frictionfolio.exceptions.model.exceptions import BerkowitzInputError, DensityEstimationError
from frictionfolio.model.calibration.calibrate import CalibrationConfig, prepare_pairs, evaluate_utility, \
    calibrate_utility, price_scale
from frictionfolio.model.calibration.chains import ingest_chains, realization_lookup, FilterConfig
from frictionfolio.model.calibration.synthetic import SyntheticChainConfig, generate_chains
from frictionfolio.model.utility.utilities import LinearUtility, PowerUtility, SShapedUtility, starting_utility


# prices drift far from the start over decades of yearly chains
FILTERS = FilterConfig(tick=0.0)
CONFIG = CalibrationConfig(grid_size=801, delta_range=(1e-4, 1.0 - 1e-4), filters=FILTERS)


def synthetic_pairs(utility, n_expiries, seed, config=CONFIG):
    chains, realizations = generate_chains(SyntheticChainConfig(vol=0.7, horizon_days=[365], n_expiries=n_expiries,
                                                                utility=utility, seed=seed))
    report = ingest_chains(chains, config.filters)
    assert_equal(len(report.rejected), 0)
    return prepare_pairs(report.chains, realization_lookup(chains, realizations), config)


def test_config_yml_rep():
    config = CalibrationConfig.from_yml_rep({"smoothing": 0.9, "delta_range": [0.02, 0.98], "n_mc": 200,
                                             "filters": {"min_volume": 500}, "optimizer": {"max_iter": 20}})
    assert_equal(config.smoothing, 0.9)
    assert_equal(config.delta_range, (0.02, 0.98))
    assert_equal(config.n_mc, 200)
    assert_equal(config.filters.min_volume, 500.0)
    assert_equal(config.optimizer.max_iter, 20)
    assert_equal(CalibrationConfig.from_yml_rep(config.to_yml_rep()), config)
    assert_is_none(CalibrationConfig.from_yml_rep({}).n_mc)
    with assert_raises(ConfigError) as cm:
        CalibrationConfig.from_yml_rep({"delta_range": [0.1]})
    assert_equal(cm.exception.field, "delta_range")


def test_pairs_skip_chains_without_realizations():
    chains, realizations = generate_chains(SyntheticChainConfig(horizon_days=[28], n_expiries=4, seed=1))
    report = ingest_chains(chains)
    prices = realization_lookup(chains, realizations.iloc[:2])
    pairs = prepare_pairs(report.chains, prices, CalibrationConfig())
    assert_equal(len(pairs), 2)
    assert_equal(pairs[0].realization, prices[report.chains[0].expiry])


def test_too_few_pairs():
    assert_raises(BerkowitzInputError, calibrate_utility, PowerUtility, [])


def test_risk_neutral_data_prefers_linear_utility():
    pairs = synthetic_pairs(LinearUtility(), 40, 3)
    assert_equal(len(pairs), 40)
    linear, _ = evaluate_utility(LinearUtility(), pairs)
    for k in [1.5, 2.0, 3.0, 4.0, 5.0]:
        power, _ = evaluate_utility(PowerUtility(k), pairs)
        assert_true(linear.lr3 <= power.lr3, k)


def test_linear_family_has_nothing_to_fit():
    pairs = synthetic_pairs(LinearUtility(), 10, 4)
    result = calibrate_utility(LinearUtility, pairs)
    assert_is_none(result.optimizer_result)
    assert_true(result.converged)
    row = result.to_row()
    assert_equal(row["family"], "linear")
    assert_equal(row["n"], 10)


@attr("slow")
def test_power_utility_is_recovered():
    pairs = synthetic_pairs(PowerUtility(2.0), 60, 11)
    result = calibrate_utility(PowerUtility, pairs)
    assert_true(1.5 <= result.utility.k <= 2.5, result.utility.k)
    assert_true(result.to_row()["param_k"] == result.utility.k)


def weekly_pairs():
    chains, realizations = generate_chains(SyntheticChainConfig(horizon_days=[28], n_expiries=10, seed=4))
    report = ingest_chains(chains, FILTERS)
    return prepare_pairs(report.chains, realization_lookup(chains, realizations), CONFIG)


def evaluate_utility_or_inf(utility, pairs):
    try:
        result, _ = evaluate_utility(utility, pairs)
    except DensityEstimationError:
        return np.inf
    return result.lr3


def test_price_scale_is_the_median_forward():
    pairs = weekly_pairs()
    scale = price_scale(pairs)
    assert_true(70.0 < scale < 140.0, scale)
    assert_almost_equal(scale, np.median([pair.density.mean() for pair in pairs]))


def test_s_shaped_start_is_feasible_at_market_prices():
    pairs = weekly_pairs()
    assert_true(not np.isfinite(evaluate_utility_or_inf(starting_utility(SShapedUtility), pairs)))
    start = starting_utility(SShapedUtility, price_scale(pairs))
    assert_true(np.isfinite(evaluate_utility_or_inf(start, pairs)))


@attr("slow")
def test_s_shaped_family_calibrates_at_market_prices():
    pairs = weekly_pairs()
    assert_equal(len(pairs), 10)
    result = calibrate_utility(SShapedUtility, pairs)
    assert_equal(result.family, "s_shaped")
    assert_true(np.isfinite(result.berkowitz.lr3))
    assert_true(0.0 <= result.berkowitz.p3 <= 1.0)
    assert_true(np.all(result.utility.parameters() > 0))
    start, _ = evaluate_utility(starting_utility(SShapedUtility, price_scale(pairs)), pairs)
    assert_true(result.berkowitz.lr3 <= start.lr3 + 1e-9)
