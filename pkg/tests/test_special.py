import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pbphase.checks import i0_power_series_decimal
from pbphase.special import SERIES_ASYMPTOTIC_SWITCH, i0, i0e, log_i0

# mpmath.besseli(0, x) at 40 digits
MPMATH_I0 = {
    0.0: 1.0,
    1.0: 1.2660658777520083356,
    10.5: 4527.4417146388880052,
    15.0: 339649.37329791387952,
    30.0: 781672297823.97748972,
    60.0: 5.8940770556098011683e24,
}


@pytest.mark.parametrize("x,ref", sorted(MPMATH_I0.items()))
def test_i0_frozen_values(x, ref):
    assert i0(x) == pytest.approx(ref, rel=1e-13)


def test_i0_against_decimal_series_on_grid():
    for x in np.linspace(0.0, 60.0, 241):
        ref = i0_power_series_decimal(float(x))
        assert abs(i0(float(x)) - ref) / ref < 1e-13, x


def test_i0_against_scipy():
    special = pytest.importorskip("scipy.special")
    x = np.linspace(0.0, 60.0, 601)
    np.testing.assert_allclose(i0(x), special.i0(x), rtol=1e-13)
    np.testing.assert_allclose(i0e(x), special.i0e(x), rtol=1e-13)


def test_continuity_at_switch():
    lo = i0e(SERIES_ASYMPTOTIC_SWITCH * (1 - 1e-12))
    hi = i0e(SERIES_ASYMPTOTIC_SWITCH)
    assert abs(lo - hi) / hi < 1e-12


def test_even_and_overflow():
    assert i0(-3.0) == i0(3.0)
    assert i0(800.0) == math.inf
    assert log_i0(800.0) == pytest.approx(800.0 - 0.5 * math.log(2 * math.pi * 800.0), rel=1e-6)


@given(st.floats(min_value=0.0, max_value=700.0))
def test_log_i0_consistent(x):
    assert log_i0(x) == pytest.approx(math.log(i0e(x)) + x, rel=1e-12, abs=1e-15)
