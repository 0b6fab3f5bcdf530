import math

import numpy as np
import pytest

from charpoly.utils.determinants import scaled_det
from charpoly.utils.scaled import (
    ONE,
    ZERO,
    ScaledComplex,
    relative_difference,
    scaled_product,
    scaled_sum,
)


def test_from_complex_round_trip():
    z = -3.5 + 2.25j
    assert ScaledComplex.from_complex(z).to_complex() == pytest.approx(z, rel=1e-15)
    assert ScaledComplex.from_complex(0).is_zero()


def test_arithmetic_far_beyond_double_range():
    big = ScaledComplex.from_complex(2.0, 5000.0)
    small = ScaledComplex.from_complex(0.5, -5000.0)
    product = big * small
    assert product.to_complex() == pytest.approx(1.0)
    assert (big / big).to_complex() == pytest.approx(1.0)
    assert (big**3).log_mag == pytest.approx(3 * (math.log(2.0) + 5000.0))


def test_sum_cancels_in_scaled_form():
    a = ScaledComplex.from_complex(1.0 + 1e-12, 900.0)
    b = ScaledComplex.from_complex(1.0, 900.0)
    difference = a - b
    assert difference.log_mag == pytest.approx(900.0 + math.log(1e-12), abs=1e-3)
    assert scaled_sum([]) is ZERO
    assert scaled_product([]) is ONE


def test_relative_difference():
    a = ScaledComplex.from_complex(1.0, 1000.0)
    b = ScaledComplex.from_complex(1.0 + 1e-9, 1000.0)
    assert relative_difference(a, b) == pytest.approx(1e-9, rel=1e-3)
    assert relative_difference(ZERO, ZERO) == 0.0


def test_zero_handling():
    assert (ZERO * ONE).is_zero()
    assert (ZERO**2).is_zero()
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_scaled_det_matches_numpy(rng):
    matrix = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    entries = [[ScaledComplex.from_complex(v) for v in row] for row in matrix]
    assert scaled_det(entries).to_complex() == pytest.approx(np.linalg.det(matrix), rel=1e-12)


def test_scaled_det_with_huge_row_scales(rng):
    matrix = rng.normal(size=(4, 4))
    scales = [800.0, -700.0, 300.0, 0.0]
    entries = [
        [ScaledComplex.from_complex(v, s) for v in row] for row, s in zip(matrix, scales)
    ]
    det = scaled_det(entries)
    expected = np.linalg.det(matrix)
    assert det.log_mag == pytest.approx(math.log(abs(expected)) + sum(scales), rel=1e-12)
    assert det.phase.real == pytest.approx(math.copysign(1.0, expected))


def test_scaled_det_degenerate_cases():
    assert scaled_det([]) is ONE
    assert scaled_det([[ZERO, ONE], [ZERO, ONE]]).is_zero()
    with pytest.raises(ValueError):
        scaled_det([[ONE, ONE]])
