import logging
import os

from nose.tools import assert_equal, assert_true

from frictionfolio.model.calibration.chains import read_chain_csv, read_realizations_csv
from frictionfolio.model.experiments.config import config_hash
from frictionfolio.tools.synthetic_chains import write_synthetic_chains, main
from frictionfolio.util.common.tables import read_provenance
from tests.frictionfolio_test import TemporaryDirectoryTestCase


REP = {"horizon_days": [7], "n_expiries": 3, "seed": 2}


class TestSyntheticChains(TemporaryDirectoryTestCase):
    def setup(self):
        super(TestSyntheticChains, self).setup()
        self.handlers = list(logging.root.handlers)
        self.level = logging.root.level

    def teardown(self):
        logging.root.handlers = self.handlers
        logging.root.setLevel(self.level)
        super(TestSyntheticChains, self).teardown()

    def test_write(self):
        output = os.path.join(self.temporary_directory, "out")
        chains, realizations = write_synthetic_chains(output, REP)
        assert_equal(len(realizations), 3)

        read_chains = read_chain_csv(os.path.join(output, "chains.csv"))
        assert_equal(len(read_chains), len(chains))
        assert_equal(list(read_chains["expiry"]), list(chains["expiry"]))
        read_realizations = read_realizations_csv(os.path.join(output, "realizations.csv"))
        assert_equal(list(read_realizations["date"]), list(realizations["date"]))

        with open(os.path.join(output, "chains.csv")) as f:
            assert_equal(read_provenance(f), {"config_hash": config_hash(REP), "seed": "2"})

    def test_main(self):
        config_path = os.path.join(self.temporary_directory, "synthetic.yml")
        with open(config_path, "w") as f:
            f.write("horizon_days: [7]\nn_expiries: 3\n")
        output = os.path.join(self.temporary_directory, "out")
        assert_equal(main([output, "--config", config_path, "--seed", "2", "--set", "vol=0.3", "--quiet"]), 0)
        assert_true(os.path.isfile(os.path.join(output, "chains.csv")))
        with open(os.path.join(output, "realizations.csv")) as f:
            assert_equal(read_provenance(f)["seed"], "2")

    def test_main_rejects_bad_config(self):
        output = os.path.join(self.temporary_directory, "out")
        assert_equal(main([output, "--set", "vol=-0.1", "--quiet"]), 1)
        assert_true(not os.path.exists(os.path.join(output, "chains.csv")))
