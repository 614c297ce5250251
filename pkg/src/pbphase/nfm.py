r"""Post-selected relative-phase expectations for the eight-port NFM setup.

Two coherent inputs :math:`|\alpha_1\rangle, |\alpha_2\rangle` plus two
vacuum ports; events with equal counts in the paired detectors are
discarded, and expectations are renormalised by

.. math::
    N = 1 - e^{-(|\alpha_1|^2+|\alpha_2|^2)}
        I_0\big(|\alpha_1^2-\alpha_2^2|/2\big)\, I_0\big(|\alpha_1^2+\alpha_2^2|/2\big).

With port 1 in vacuum, :math:`\langle\cos^4(\phi_2-\phi_1)\rangle = 3/8 - T/N`
where :math:`T` contains a single series :math:`A` and a double series
:math:`B`. Their expansion variable is read as :math:`(|\alpha|/4)^2`;
the alternative reading :math:`(|\alpha|^2/4)^2` is kept selectable
because only the first reproduces the closed-form approximation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .errors import ConsistencyWarning, RegimeWarning, TruncationError
from .fluctuations import psi_pb
from .series import DEFAULT_POLICY, SeriesValue, TruncationPolicy
from .special import log_i0

LARGE_PORT2_THRESHOLD = 25.0
# conventional small-|alpha| coefficient; 65536 is what the series expansion gives
SMALL_ALPHA_DENOMINATOR = 65546
SMALL_ALPHA_DENOMINATOR_EXPANSION = 65536
SMALL_ALPHA_LIMIT = 1.0
DEFAULT_ANALYTIC_BAND = 1e-3

READING_QUARTER_ALPHA = "quarter_alpha"          # base (|alpha|/4)**2 = x/16
READING_QUARTER_ALPHA_SQ = "quarter_alpha_sq"    # base (|alpha|**2/4)**2 = x**2/16
_SERIES_REL_TOL = 1e-17


@dataclass(frozen=True)
class NfmInputs:
    alpha1_sq: float
    alpha2_sq: float
    xi1: float = 0.0
    xi2: float = 0.0

    def __post_init__(self):
        for name in ("alpha1_sq", "alpha2_sq"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def alpha1(self) -> complex:
        return math.sqrt(self.alpha1_sq) * cmath.exp(1j * self.xi1)

    @property
    def alpha2(self) -> complex:
        return math.sqrt(self.alpha2_sq) * cmath.exp(1j * self.xi2)


def normalization_n(inputs: NfmInputs) -> float:
    """Post-selection normalisation ``N`` for complex input amplitudes.

    Evaluated as ``-expm1(-S + log I0(a) + log I0(b))`` so it stays
    accurate when ``N`` is tiny (weak inputs) and does not overflow for
    strong ones.
    """
    a1, a2 = inputs.alpha1, inputs.alpha2
    diff = abs(a1 * a1 - a2 * a2) / 2.0
    tot = abs(a1 * a1 + a2 * a2) / 2.0
    s = inputs.alpha1_sq + inputs.alpha2_sq
    return -math.expm1(-s + log_i0(diff) + log_i0(tot))


def normalization_vacuum_port(alpha_sq: float) -> float:
    """``N`` with port 1 in vacuum: ``1 - e**-x I0(x/2)**2``."""
    return normalization_n(NfmInputs(0.0, alpha_sq))


@dataclass(frozen=True)
class CosRatio:
    """``<cos(phi2 - phi1)> / cos(xi2 - xi1)`` with port-2 phase replaced by ``xi2``.

    ``full_product`` keeps port 2 quantum (``psi_pb(n1) psi_pb(n2)``) and
    shows the size of that replacement.
    """

    value: float
    n_bar_port1: float
    n_bar_port2: float
    large_port2_regime: bool
    full_product: float


def mean_cos_ratio(n_bar_port1: float, n_bar_port2: float = 50.0,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> CosRatio:
    """Cosine ratio for a strong port-2 beam; equals ``psi_pb(n_bar_port1)``.

    Warns with RegimeWarning when ``n_bar_port2 < 25``, where neither the
    post-selection nor the port-2 phase spread is negligible.
    """
    ok = n_bar_port2 >= LARGE_PORT2_THRESHOLD
    if not ok:
        warnings.warn(
            f"n_bar_port2={n_bar_port2} < {LARGE_PORT2_THRESHOLD}: replacing phi2 by xi2 "
            "and ignoring post-selection is not justified",
            RegimeWarning, stacklevel=2,
        )
    p1 = psi_pb(n_bar_port1, policy).value
    p2 = psi_pb(n_bar_port2, policy).value
    return CosRatio(p1, n_bar_port1, n_bar_port2, ok, p1 * p2)


def cos2_vacuum_port(n_bar_port2: float = 0.0, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``<cos**2(phi2 - phi1)>`` with port 1 in vacuum.

    The vacuum phase is uniform, so the average is 1/2 whatever port 2
    holds and whatever the normalisation.
    """
    if n_bar_port2 < 0.0:
        raise ValueError("n_bar_port2 must be >= 0")
    return 0.5


def c12_squared_sg(n_bar: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Susskind-Glogower ``<C12**2> = (1 - e**-n)/4`` (vacuum port 1, strong port 2)."""
    if n_bar < 0.0:
        raise ValueError("n_bar must be >= 0")
    return -0.25 * math.expm1(-n_bar)


def _base(alpha_sq: float, reading: str) -> float:
    if reading == READING_QUARTER_ALPHA:
        return alpha_sq / 16.0
    if reading == READING_QUARTER_ALPHA_SQ:
        return alpha_sq * alpha_sq / 16.0
    raise ValueError(f"unknown series reading {reading!r}")


def series_a_term(m5: int, u: float) -> float:
    """Term ``m5`` of ``A`` for base ``u`` (the squared expansion variable)."""
    m = m5
    rad = 6.0 * (2 * m + 3) * (m + 2) ** 3 * (2 * m + 5) * (m + 3) ** 3
    log_mag = (m + 3) * math.log(u) - 2.0 * math.lgamma(m + 2.0) if u > 0 else -math.inf
    return 0.25 * math.exp(log_mag) * (m * m + 2 * m - 2) / math.sqrt(rad)


def series_b_term(m3: int, m5: int, u: float) -> float:
    """Term ``(m3, m5)`` of ``B`` for base ``u``."""
    d = m3 + m5
    num = (d + 4) * (d + 3) - 4 * (m3 + 2) * (m5 + 2)
    den = math.sqrt(6.0 * (2 * d + 5) * (d + 3)) * math.sqrt((2 * d + 7) * (d + 4.0))
    if u <= 0:
        return 0.0
    log_mag = (d + 4) * math.log(u) - 2.0 * (math.lgamma(m3 + 3.0) + math.lgamma(m5 + 3.0))
    return 0.125 * math.exp(log_mag) * num / den


def _log_or_ninf(x):
    return math.log(x) if x > 0 else -math.inf


def series_a(alpha_sq: float, reading: str = READING_QUARTER_ALPHA,
             policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Single series ``A``.

    Majorant: ``|term_m| <= u**(m+3) (m+3)**2 / (4 ((m+1)!)**2)``, whose
    ratio past ``M`` is below ``q = (16/9) u / (M+3)**2``.
    """
    u = _base(alpha_sq, reading)
    if u == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    terms = []
    m = 0
    while True:
        terms.append(series_a_term(m, u))
        q = (16.0 / 9.0) * u / (m + 3.0) ** 2
        if q < 1.0:
            nxt = 0.25 * math.exp((m + 4) * math.log(u) - 2.0 * math.lgamma(m + 3.0)) * (m + 4.0) ** 2
            tail = nxt / (1.0 - q)
            scale = max(abs(t) for t in terms)
            if tail < _SERIES_REL_TOL * scale or tail == 0.0:
                return SeriesValue(math.fsum(terms), tail, len(terms))
        m += 1
        if m >= policy.hard_max_terms:
            raise TruncationError(f"series A did not converge for |alpha|^2={alpha_sq}", terms_used=m)


def _b_majorant(d: int, u: float) -> float:
    # sum over a+b=d+4 of 1/(a! b!)**2 <= (2**(d+4)/(d+4)!)**2, |num| <= 2 (d+4)**2, den >= 1
    return 0.125 * 2.0 * (d + 4.0) ** 2 * math.exp(
        (d + 4) * math.log(4.0 * u) - 2.0 * math.lgamma(d + 5.0))


def series_b(alpha_sq: float, reading: str = READING_QUARTER_ALPHA,
             policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Double series ``B`` summed along anti-diagonals ``m3 + m5 = d``.

    Diagonal ``d`` is majorised by ``(4u)**(d+4) (d+4)**2 / (4 ((d+4)!)**2)``;
    successive majorants shrink by ``4u/(d+4)**2``.
    """
    u = _base(alpha_sq, reading)
    if u == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    diagonals = []
    count = 0
    d = 0
    while True:
        row = [series_b_term(m3, d - m3, u) for m3 in range(d + 1)]
        count += len(row)
        diagonals.append(math.fsum(row))
        q = 4.0 * u / (d + 5.0) ** 2
        if q < 1.0:
            tail = _b_majorant(d + 1, u) / (1.0 - q)
            scale = max(abs(t) for t in diagonals)
            if tail < _SERIES_REL_TOL * scale or tail == 0.0:
                return SeriesValue(math.fsum(diagonals), tail, count)
        d += 1
        if count >= policy.hard_max_terms:
            raise TruncationError(f"series B did not converge for |alpha|^2={alpha_sq}",
                                  terms_used=count)


def cos4_analytic(alpha_sq: float, normalization: float | None = None) -> float:
    """Closed-form approximation ``3/8 + 3/2 e**-x (x**2/12288 + sqrt(15) x**3/4423680) / N``."""
    x = alpha_sq
    if x == 0.0:
        return 0.375
    n = normalization_vacuum_port(x) if normalization is None else normalization
    return 0.375 + 1.5 * math.exp(-x) * (x * x / 12288.0 + math.sqrt(15.0) * x ** 3 / 4423680.0) / n


def cos4_small_alpha(alpha_sq: float, denominator: float = SMALL_ALPHA_DENOMINATOR) -> float:
    """Quadratic small-``|alpha|**2`` approximation.

    ``denominator`` defaults to the conventional 65546; the Taylor expansion of
    the exact expression gives 65536 (:data:`SMALL_ALPHA_DENOMINATOR_EXPANSION`).
    """
    x = alpha_sq
    return 0.375 + x / 8192.0 + (math.sqrt(15.0) / 45.0 - 3.0) * x * x / denominator


@dataclass(frozen=True)
class Cos4Result:
    exact: SeriesValue
    approx_analytic: float
    approx_small_alpha: float | None
    normalization: float
    series_a: SeriesValue
    series_b: SeriesValue
    reading: str

    @property
    def analytic_gap(self) -> float:
        """``exact - approx_analytic``."""
        return float(self.exact.value) - self.approx_analytic


def cos4_vacuum_port(alpha_sq: float, policy: TruncationPolicy = DEFAULT_POLICY,
                     reading: str = READING_QUARTER_ALPHA,
                     band: float = DEFAULT_ANALYTIC_BAND,
                     small_alpha_denominator: float = SMALL_ALPHA_DENOMINATOR) -> Cos4Result:
    """Post-selected ``<cos**4(phi2 - phi1)>`` with vacuum port 1 and ``|alpha|**2 = alpha_sq`` in port 2.

    ``exact = 3/8 - T/N`` with ``T = 3/2 e**-x (-x**2/12288 + A + B)``; at
    ``x = 0`` both ``T`` and ``N`` vanish and the continuous limit 3/8 is
    returned. A ConsistencyWarning is issued when ``|exact - approx_analytic|``
    exceeds ``band``.
    """
    x = float(alpha_sq)
    if not (x >= 0.0 and math.isfinite(x)):
        raise ValueError(f"alpha_sq must be finite and >= 0, got {alpha_sq!r}")
    a = series_a(x, reading, policy)
    b = series_b(x, reading, policy)
    small = cos4_small_alpha(x, small_alpha_denominator) if x <= SMALL_ALPHA_LIMIT else None
    if x == 0.0:
        exact = SeriesValue(0.375, 0.0, 0)
        return Cos4Result(exact, 0.375, small, 0.0, a, b, reading)
    n = normalization_vacuum_port(x)
    pref = 1.5 * math.exp(-x)
    t = pref * (-x * x / 12288.0 + a.value + b.value)
    exact = SeriesValue(0.375 - t / n, pref * (a.tail_bound + b.tail_bound) / n,
                        a.terms_used + b.terms_used)
    analytic = cos4_analytic(x, n)
    if abs(exact.value - analytic) > band:
        warnings.warn(
            f"cos^4 series {exact.value!r} and analytic approximation {analytic!r} differ by "
            f"more than {band:g} at |alpha|^2={x}",
            ConsistencyWarning, stacklevel=2,
        )
    return Cos4Result(exact, analytic, small, n, a, b, reading)
