import math

import numpy as np
import pytest

from pbphase.errors import ConvergenceError
from pbphase.quadrature import periodic_grid, periodic_trapezoid, romberg


def test_romberg_polynomial_and_smooth():
    assert romberg(lambda x: x ** 3, 0.0, 2.0).value == pytest.approx(4.0, abs=1e-12)
    r = romberg(np.exp, 0.0, 1.0, abs_tol=1e-12)
    assert r.value == pytest.approx(math.e - 1.0, abs=1e-12)
    assert r.tail_bound <= 1e-12


def test_romberg_reports_failure():
    with pytest.raises(ConvergenceError):
        romberg(lambda x: np.sign(x - 0.1234567), 0.0, 1.0, abs_tol=1e-15, max_level=8)


def test_periodic_trapezoid_exact_for_trig_polynomials():
    x = periodic_grid(16)
    assert periodic_trapezoid(np.cos(3 * x) ** 2) == pytest.approx(math.pi, abs=1e-14)
    assert periodic_trapezoid(np.ones_like(x)) == pytest.approx(2 * math.pi, abs=1e-14)
