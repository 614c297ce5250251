import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pbphase.errors import DimensionTooLargeError
from pbphase.phase_core import (
    CoherentSpec,
    NumberBasisState,
    build_distribution,
    eval_density,
    finite_s_operator_check,
    mean_relative_phase,
    moment,
    reduce_phase,
)
from pbphase.fluctuations import variance_phase
from pbphase.quadrature import romberg

PI2 = math.pi ** 2

# (n_bar, delta_xi) -> (mean, variance) from 40-digit mpmath quadrature of the density;
# all frozen values are regenerated by tests/oracles.py
MPMATH_MOMENTS = {
    (4.0, math.pi): (math.pi, 0.081507463461874558),
    (1.0, 0.5): (1.7588977436887694, 4.3376646279937475),
    (0.25, 2.0): (2.4186425471108948, 1.906211620257544),
    (10.0, 1.0): (1.0000035066576716, 0.026495476987203581),
}

n_bars = st.floats(min_value=0.0, max_value=60.0)
phases = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)


def test_vacuum_is_uniform():
    dist = build_distribution(CoherentSpec(0.0))
    phi = np.linspace(0, 2 * math.pi, 50)
    np.testing.assert_allclose(eval_density(dist, phi), 1 / (2 * math.pi), rtol=0, atol=1e-15)
    assert variance_phase(CoherentSpec(0.0)).variance == pytest.approx(PI2 / 3, abs=1e-12)


@pytest.mark.parametrize("key", sorted(MPMATH_MOMENTS))
@pytest.mark.parametrize("method", ["fourier", "quadrature"])
def test_moments_frozen(key, method):
    mean, var = MPMATH_MOMENTS[key]
    dist = build_distribution(CoherentSpec.from_delta(*key))
    m1 = moment(dist, 1, method).value
    m2 = moment(dist, 2, method).value
    assert m1 == pytest.approx(mean, abs=1e-10)
    assert m2 - m1 * m1 == pytest.approx(var, abs=1e-10)


def test_phase_reference_only_enters_through_difference():
    a = CoherentSpec(3.0, phase_xi=1.0, offset_phi0=0.2)
    b = CoherentSpec.from_delta(3.0, 0.8)
    assert a.delta_xi == pytest.approx(b.delta_xi)
    assert mean_relative_phase(a) == pytest.approx(mean_relative_phase(b), abs=1e-13)
    assert reduce_phase(-0.5) == pytest.approx(2 * math.pi - 0.5)


@settings(max_examples=40, deadline=None)
@given(n_bars, phases)
def test_density_normalized_and_nonnegative(nb, d):
    dist = build_distribution(CoherentSpec.from_delta(nb, d))
    total = romberg(lambda x: eval_density(dist, x), 0.0, 2 * math.pi, abs_tol=1e-12).value
    assert total == pytest.approx(1.0, abs=1e-10)
    assert np.all(eval_density(dist, np.linspace(0, 2 * math.pi, 97)) >= 0.0)


@settings(max_examples=40, deadline=None)
@given(n_bars, phases, st.floats(min_value=0.0, max_value=math.pi))
def test_density_symmetric_about_delta_xi(nb, d, x):
    dist = build_distribution(CoherentSpec.from_delta(nb, d))
    assert eval_density(dist, d + x) == pytest.approx(eval_density(dist, d - x), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(n_bars, phases)
def test_fourier_and_quadrature_agree(nb, d):
    dist = build_distribution(CoherentSpec.from_delta(nb, d))
    for k in (1, 2):
        assert moment(dist, k, "fourier").value == pytest.approx(moment(dist, k, "quadrature").value,
                                                                abs=1e-8)


def test_diagonal_mixture_collapses_to_uniform():
    state = NumberBasisState.diagonal([0.1, 0.6, 0.3])
    dist = build_distribution(state, offset_phi0=2.0)
    assert eval_density(dist, np.array([0.0, 1.0, 4.0])) == pytest.approx([1 / (2 * math.pi)] * 3)
    assert mean_relative_phase(state) == pytest.approx(math.pi, abs=1e-12)


def test_state_validation():
    with pytest.raises(ValueError):
        NumberBasisState.diagonal([0.5, 0.4])
    with pytest.raises(ValueError):
        NumberBasisState.diagonal([1.2, -0.2])
    s = NumberBasisState.diagonal([0.5, 0.5 + 5e-10])
    assert math.fsum(s.probs) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        s.probs[0] = 1.0


def test_general_pure_state_matches_coherent_like():
    probs = CoherentSpec(2.0).to_state().probs
    slope = 1.3
    general = NumberBasisState.pure(probs, lambda n: slope * n)
    coherent = NumberBasisState.coherent_like(probs, slope)
    v1 = variance_phase(general).variance
    v2 = variance_phase(coherent).variance
    assert v1 == pytest.approx(v2, abs=1e-12)


def test_finite_s_small_dimension():
    # s = 1: two basis phases 0 and pi, the vacuum gives weight 1/2 each
    r = finite_s_operator_check(CoherentSpec(0.0), 1)
    assert r.mean == pytest.approx(math.pi / 2)
    assert r.variance == pytest.approx(PI2 / 4)


def test_finite_s_vacuum_tends_to_uniform_value():
    r = finite_s_operator_check(CoherentSpec(0.0), 200)
    # discrete uniform on 2 pi m/201: variance pi^2 (s+1)^2 - 1)/3/(s+1)^2
    assert r.variance == pytest.approx(PI2 * (201 ** 2 - 1) / (3 * 201 ** 2), rel=1e-12)


def test_finite_s_converges_monotonically():
    spec = CoherentSpec.from_delta(4.0, math.pi)
    limit = variance_phase(spec).variance
    errs = [abs(finite_s_operator_check(spec, s).variance - limit) for s in (100, 400, 1600)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_finite_s_guard():
    with pytest.raises(DimensionTooLargeError):
        finite_s_operator_check(CoherentSpec(1.0), 5000)


@settings(max_examples=30, deadline=None)
@given(n_bars, phases)
def test_uniform_variance_deficit(nb, d):
    from pbphase.phase_core import uniform_variance_deficit

    dist = build_distribution(CoherentSpec.from_delta(nb, d))
    m1 = moment(dist, 1).value
    var = moment(dist, 2).value - m1 * m1
    assert uniform_variance_deficit(dist) == pytest.approx(PI2 / 3 - var, abs=1e-12)


def test_uniform_variance_deficit_is_zero_for_vacuum():
    from pbphase.phase_core import uniform_variance_deficit

    assert uniform_variance_deficit(build_distribution(CoherentSpec(0.0))) == 0.0
