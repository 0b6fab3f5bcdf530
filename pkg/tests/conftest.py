import numpy as np
import pytest

from charpoly.models import GAUSSIAN, EnsembleConfig, Potential, QuadratureSpec
from charpoly.utils.orthopoly import build_recurrence

QUARTIC = Potential(coeffs=(0.0, 0.0, 0.0, 1.0))


@pytest.fixture(scope="module")
def q():
    return QuadratureSpec()


@pytest.fixture(scope="module")
def gaussian_cfg():
    return EnsembleConfig(potential=GAUSSIAN, n=8)


@pytest.fixture(scope="module")
def gaussian_table(gaussian_cfg, q):
    return build_recurrence(gaussian_cfg, 24, q)


@pytest.fixture(scope="module")
def quartic_cfg():
    return EnsembleConfig(potential=QUARTIC, n=8)


@pytest.fixture(scope="module")
def quartic_table(quartic_cfg, q):
    return build_recurrence(quartic_cfg, 24, q)


@pytest.fixture(scope="module")
def small_cfg():
    """N = 6 ensemble used against the Monte-Carlo oracle."""
    return EnsembleConfig(potential=GAUSSIAN, n=6)


@pytest.fixture(scope="module")
def small_table(small_cfg, q):
    return build_recurrence(small_cfg, 16, q)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def off_axis(rng):
    """Random points away from the real axis, both half-planes unless sign is given."""

    def draw(count, im_min=0.1, im_max=1.0, sign=None):
        re = rng.uniform(-1.0, 1.0, count)
        im = rng.uniform(im_min, im_max, count)
        if sign is None:
            im = im * rng.choice([-1.0, 1.0], count)
        else:
            im = im * sign
        return [complex(a, b) for a, b in zip(re, im)]

    return draw
