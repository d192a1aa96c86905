import numpy as np
from nose.tools import assert_equal, assert_raises, assert_true
from numpy.testing import assert_array_equal

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.model.solver.collocation import sample_collocation, monitoring_grid
from frictionfolio.model.solver.networks import Domain


DOMAIN = Domain(T=2.0)
FROZEN = Domain(W=(1.0, 10.0), v=(0.16, 0.16), theta=(0.2, 0.2), L=(0.0, 0.0))


def test_sample_shapes_and_bounds():
    points = sample_collocation(DOMAIN, 300, 50, 1)
    assert_equal(points.interior.shape, (300, 5))
    assert_equal(points.terminal.shape, (50, 5))
    assert_true(np.all(DOMAIN.contains(points.interior)))
    assert_true(np.all(points.interior[:, 4] < 2.0))
    assert_array_equal(points.terminal[:, 4], np.full(50, 2.0))


def test_sampling_is_seeded():
    first = sample_collocation(DOMAIN, 100, 10, 3)
    second = sample_collocation(DOMAIN, 100, 10, 3)
    other = sample_collocation(DOMAIN, 100, 10, 4)
    assert_array_equal(first.interior, second.interior)
    assert_array_equal(first.terminal, second.terminal)
    assert_true(not np.allclose(first.interior, other.interior))


def test_frozen_coordinates_stay_fixed():
    points = sample_collocation(FROZEN, 100, 10, 0)
    assert_array_equal(points.interior[:, 1], np.full(100, 0.16))
    assert_array_equal(points.interior[:, 3], np.zeros(100))


def test_monitoring_grid():
    assert_equal(monitoring_grid(DOMAIN).shape, (5 ** 5, 5))
    grid = monitoring_grid(FROZEN, 4)
    assert_equal(grid.shape, (16, 5))
    assert_equal(sorted(set(grid[:, 0])), [1.0, 4.0, 7.0, 10.0])


def test_invalid_counts():
    assert_raises(InvalidArgumentError, sample_collocation, DOMAIN, 0, 10, 0)
    assert_raises(InvalidArgumentError, sample_collocation, DOMAIN, 10, 0, 0)
