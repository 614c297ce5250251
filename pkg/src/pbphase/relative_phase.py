"""Relative-phase fluctuations of two independent coherent beams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, TruncationError
from .fluctuations import psi_pb, variance_phase
from .phase_core import CoherentSpec, PhaseDistribution, build_distribution, eval_density
from .quadrature import periodic_grid
from .series import DEFAULT_POLICY, SeriesValue, TruncationPolicy

PSI_IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class TwoBeamSpec:
    beam1: CoherentSpec
    beam2: CoherentSpec
    equal_distributions: bool = True

    def __post_init__(self):
        if self.equal_distributions and self.beam1.mean_photons != self.beam2.mean_photons:
            raise ValueError("equal_distributions requires both beams to share mean_photons")

    @classmethod
    def equal(cls, n_bar: float, path_offset: float = 0.0) -> "TwoBeamSpec":
        return cls(CoherentSpec(n_bar, 0.0), CoherentSpec(n_bar, path_offset))


def psi_squared_series(n_bar: float, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """``n e**(-2n) [sum_k n**k / (k! sqrt(k+1))]**2`` summed by term recurrence.

    Deliberately avoids log-gamma so it is a second route to
    ``psi_pb(n)**2``. Starts from ``sqrt(n) e**-n`` and therefore needs
    ``n_bar < 700``. ``tail_bound`` bounds the error of the squared value.
    """
    n_bar = float(n_bar)
    if n_bar == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    if not n_bar < 700.0:
        raise ValueError(f"recurrence route underflows for n_bar={n_bar}")
    # u_k = sqrt(n) e^-n n^k / (k! sqrt(k+1))
    u = math.sqrt(n_bar) * math.exp(-n_bar)
    terms = [u]
    k = 0
    while True:
        u *= n_bar / (k + 1.0) * math.sqrt((k + 1.0) / (k + 2.0))
        k += 1
        terms.append(u)
        q = n_bar / (k + 2.0)
        if q < 1.0:
            tail = u * q / (1.0 - q)
            if tail < policy.tail_mass_tol:
                break
        if len(terms) >= policy.hard_max_terms:
            raise TruncationError(f"psi series for n_bar={n_bar} did not converge",
                                  terms_used=len(terms))
    s = math.fsum(terms)
    return SeriesValue(s * s, 2.0 * s * tail + tail * tail, len(terms))


def fluct_sgpd(n_bar: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Susskind-Glogower relative-phase fluctuation ``1 - e**-n - psi**2`` with ``psi = psi_pb**2``.

    The direct ``psi`` series gates the result: ConsistencyError if it and
    ``psi_pb**2`` differ by more than 1e-12. The value itself is formed as
    ``fluct_pbpd(n) - e**-n`` so the two measures share one ``psi`` and
    never cross in floating point.
    """
    psi = psi_squared_series(n_bar, policy).value
    via_pb = psi_pb(n_bar, policy).value ** 2
    if abs(psi - via_pb) > PSI_IDENTITY_TOL:
        raise ConsistencyError(f"psi({n_bar}) = {psi!r} but psi_pb**2 = {via_pb!r}")
    return fluct_pbpd(n_bar, policy) - math.exp(-n_bar)


def fluct_pbpd(n_bar: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Pegg-Barnett relative-phase fluctuation ``1 - psi_pb**4`` (independent of path offsets)."""
    return 1.0 - psi_pb(n_bar, policy).value ** 4


def fluct_pb_doubled(n_bar: float, delta_xi: float,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``2 * dphi**2`` for two independent single-beam phase measurements."""
    return 2.0 * variance_phase(CoherentSpec.from_delta(n_bar, delta_xi), policy).variance


def two_beam_expectation(f, dist1: PhaseDistribution, dist2: PhaseDistribution,
                         points: int = 4096, block: int = 256) -> float:
    """``<f(phi1, phi2)>`` over the product ``P(phi1) P(phi2)`` by 2-D periodic trapezoid.

    ``f`` takes broadcastable arrays. The grid is processed in row blocks
    so ``points**2`` never has to be held at once.
    """
    phi = periodic_grid(points)
    p1 = eval_density(dist1, phi)
    p2 = eval_density(dist2, phi)
    w = (2.0 * math.pi / points) ** 2
    total = 0.0
    for start in range(0, points, block):
        rows = slice(start, start + block)
        vals = f(phi[rows, None], phi[None, :])
        total += float(np.sum(p1[rows, None] * vals * p2[None, :]))
    return w * total


def pbpd_quadrature(spec: TwoBeamSpec | float, points: int = 4096,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Relative-phase fluctuation ``(d cos)**2 + (d sin)**2`` of ``phi1 - phi2`` by 2-D quadrature."""
    if not isinstance(spec, TwoBeamSpec):
        spec = TwoBeamSpec.equal(float(spec))
    d1 = build_distribution(spec.beam1, policy=policy)
    d2 = build_distribution(spec.beam2, policy=policy)

    def ev(f):
        return two_beam_expectation(f, d1, d2, points)

    c = ev(lambda a, b: np.cos(a - b))
    s = ev(lambda a, b: np.sin(a - b))
    c2 = ev(lambda a, b: np.cos(a - b) ** 2)
    s2 = ev(lambda a, b: np.sin(a - b) ** 2)
    return (c2 - c * c) + (s2 - s * s)
