import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pbphase.checks import log_n_grid
from pbphase.fluctuations import (
    DELTA_XI_DESIGN_GRID,
    UPPER_BOUND,
    check_uncertainty,
    coherent_lower_bound,
    exp_phase_expectation,
    psi_pb,
    trig_fluct_pb,
    trig_fluct_sg,
    trig_moments,
    variance_phase,
)
from pbphase.phase_core import CoherentSpec, NumberBasisState, build_distribution

PI2 = math.pi ** 2

# psi_pb(n) = e^-n sum n^(k+1/2)/sqrt(k!(k+1)!), 40-digit mpmath
MPMATH_PSI = {
    0.1: 0.30721788246855798,
    1.0: 0.77319265637928599,
    4.0: 0.96103786331510856,
    10.0: 0.98684849393315606,
    50.0: 0.99747751023477514,
}
# below this mean photon number the simplified coherent bound exceeds the
# exact variance at delta_xi = pi
BOUND_CROSSOVER = 0.0106373


@pytest.mark.parametrize("nb", sorted(MPMATH_PSI))
def test_psi_pb_frozen(nb):
    r = psi_pb(nb)
    # truncation tail plus log-gamma rounding (log magnitudes reach ~150 at n_bar=50)
    assert r.value == pytest.approx(MPMATH_PSI[nb], abs=r.tail_bound + 5e-14)
    assert r.tail_bound <= 1e-14


def test_trig_fluct_pb_closed_form_vs_distribution():
    for nb in (0.5, 2.0, 8.0):
        dist = build_distribution(CoherentSpec.from_delta(nb, 0.7))
        assert trig_moments(dist).fluctuation == pytest.approx(trig_fluct_pb(nb), abs=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.0, max_value=40.0), st.floats(min_value=0.0, max_value=6.28))
def test_exp_phase_magnitude_is_delta_xi_independent(nb, d):
    z = exp_phase_expectation(nb, d)
    assert abs(z) == pytest.approx(psi_pb(nb).value, abs=1e-12)
    if nb > 1.0:
        assert math.atan2(z.imag, z.real) % (2 * math.pi) == pytest.approx(d % (2 * math.pi), abs=1e-9)


def test_sg_relation_on_grid():
    for nb in log_n_grid():
        assert trig_fluct_sg(nb) == pytest.approx(trig_fluct_pb(nb) - 0.5 * math.exp(-nb), abs=1e-15)


def test_mixture_closed_forms():
    state = NumberBasisState.diagonal([0.3, 0.5, 0.2])
    r = variance_phase(state)
    assert r.mean == pytest.approx(math.pi, abs=1e-10)
    assert r.variance == pytest.approx(PI2 / 3, abs=1e-10)
    assert trig_fluct_pb(state) == pytest.approx(1.0, abs=1e-10)
    assert trig_fluct_sg(state) == pytest.approx(1.0 - 0.15, abs=1e-10)


def test_vacuum_saturates_lower_bound():
    r = variance_phase(CoherentSpec(0.0))
    assert r.variance == pytest.approx(PI2 / 3, abs=1e-10)
    assert r.lower_bound == pytest.approx(PI2 / 3, abs=1e-15)


def test_large_n_limits():
    assert variance_phase(CoherentSpec.from_delta(100.0, math.pi)).variance == pytest.approx(
        1 / 400, rel=0.2)
    assert variance_phase(CoherentSpec.from_delta(50.0, 0.0)).variance >= 0.9 * PI2


def test_bounds_hold_above_crossover():
    for nb in log_n_grid():
        if nb < 2 * BOUND_CROSSOVER and nb != 0.0:
            continue
        for d in DELTA_XI_DESIGN_GRID:
            r = variance_phase(CoherentSpec.from_delta(nb, d))
            assert coherent_lower_bound(nb) - 1e-9 <= r.variance <= UPPER_BOUND + 1e-9, (nb, d)


def test_simplified_bound_fails_just_above_vacuum():
    # exact variance drops like pi^2/3 - 4 sqrt(n) while the bound only drops linearly
    for nb in (1e-4, 1e-3, 5e-3):
        r = variance_phase(CoherentSpec.from_delta(nb, math.pi))
        assert r.variance < r.lower_bound
        assert not r.satisfies_bounds
        assert r.variance == pytest.approx(PI2 / 3 - 4 * math.sqrt(nb), abs=6 * nb)
    for nb in (0.9 * BOUND_CROSSOVER, 1.1 * BOUND_CROSSOVER):
        r = variance_phase(CoherentSpec.from_delta(nb, math.pi))
        assert (r.variance >= r.lower_bound) == (nb > BOUND_CROSSOVER)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=60.0), st.floats(min_value=0.0, max_value=6.28))
def test_heisenberg_relation(nb, d):
    r = check_uncertainty(CoherentSpec.from_delta(nb, d))
    assert r.heisenberg_margin >= -1e-12
    assert r.judge_margin is None


@pytest.mark.parametrize("nb", [0.0, 1e-3, 0.005, 0.1, 1.0, 4.0, 25.0, 80.0])
def test_judge_relation_at_pi(nb):
    r = check_uncertainty(CoherentSpec.from_delta(nb, math.pi))
    assert r.judge_margin >= -1e-12
    assert r.holds
