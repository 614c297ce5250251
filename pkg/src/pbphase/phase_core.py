r"""States in the number basis and their Pegg-Barnett phase distribution.

For a pure state :math:`\sum_n \sqrt{P_n} e^{i\xi(n)}|n\rangle` the
limiting distribution of the relative phase :math:`\hat\phi-\phi_0` on
:math:`[0, 2\pi)` is

.. math::
    P(\phi) = \frac{1}{2\pi}\Big|\sum_n c_n e^{in(\phi-\delta\xi)}\Big|^2 .

Coherent-like states (:math:`\xi(n) = n\xi + \xi_0`) use real
:math:`c_n = \sqrt{P_n}` and :math:`\delta\xi = \xi-\phi_0`; general phase
functions fold :math:`e^{-i\xi(n)}` into :math:`c_n` with
:math:`\delta\xi = -\phi_0`. Diagonal mixtures carry no coherences and
give the uniform density.

Moments come from two independent routes: exact Fourier reduction of
:math:`\int_0^{2\pi}\phi^k P(\phi)\,d\phi` over the autocorrelation
:math:`r_k=\sum_n c_{n+k}\bar c_n`, and Romberg quadrature of the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import DimensionTooLargeError, TruncationError
from .quadrature import romberg
from .series import DEFAULT_POLICY, SeriesValue, TruncationPolicy, poisson_probabilities

TWO_PI = 2.0 * math.pi
PURE = "pure"
DIAGONAL_MIXED = "diagonal-mixed"
_NORM_INPUT_TOL = 1e-9
FINITE_S_MAX = 2000


def reduce_phase(x: float) -> float:
    """Reduce an angle into ``[0, 2*pi)``."""
    r = math.fmod(float(x), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a value just below a multiple of 2*pi can round up to 2*pi
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class CoherentSpec:
    """Coherent state ``|alpha>`` with ``|alpha|**2 = mean_photons`` and ``arg(alpha) = phase_xi``."""

    mean_photons: float
    phase_xi: float = 0.0
    offset_phi0: float = 0.0

    def __post_init__(self):
        if not (self.mean_photons >= 0.0 and math.isfinite(self.mean_photons)):
            raise ValueError(f"mean_photons must be finite and >= 0, got {self.mean_photons!r}")

    @classmethod
    def from_delta(cls, mean_photons: float, delta_xi: float) -> "CoherentSpec":
        return cls(mean_photons, phase_xi=delta_xi, offset_phi0=0.0)

    @property
    def delta_xi(self) -> float:
        return reduce_phase(self.phase_xi - self.offset_phi0)

    def to_state(self, policy: TruncationPolicy = DEFAULT_POLICY) -> "NumberBasisState":
        probs, _ = poisson_probabilities(self.mean_photons, policy)
        return NumberBasisState.coherent_like(probs, self.phase_xi)


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NumberBasisState:
    """A pure superposition or a diagonal mixture of number states.

    Use the constructors :meth:`pure`, :meth:`coherent_like`,
    :meth:`diagonal` and :meth:`coherent` rather than the raw fields.
    Probabilities are checked to sum to one within 1e-9 and then
    renormalised exactly.
    """

    kind: str
    probs: np.ndarray
    phases: np.ndarray | None = None
    phase_slope: float | None = None
    phase_offset: float = 0.0

    def __post_init__(self):
        if self.kind not in (PURE, DIAGONAL_MIXED):
            raise ValueError(f"kind must be {PURE!r} or {DIAGONAL_MIXED!r}, got {self.kind!r}")
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise ValueError("probs must be finite and nonnegative")
        total = math.fsum(p)
        if abs(total - 1.0) > _NORM_INPUT_TOL:
            raise ValueError(f"probs sum to {total!r}, not 1")
        object.__setattr__(self, "probs", _readonly(p / total))
        if self.phases is not None:
            ph = np.asarray(self.phases, dtype=float)
            if ph.shape != p.shape:
                raise ValueError("phases must have the same length as probs")
            object.__setattr__(self, "phases", _readonly(ph))
        if self.kind == PURE and self.phases is None and self.phase_slope is None:
            object.__setattr__(self, "phase_slope", 0.0)

    @classmethod
    def pure(cls, probs, phase_fn=None) -> "NumberBasisState":
        """Pure state with per-level phase ``phase_fn`` (callable of ``n`` or a sequence)."""
        probs = np.asarray(probs, dtype=float)
        if phase_fn is None:
            return cls(PURE, probs, phase_slope=0.0)
        if callable(phase_fn):
            phases = np.array([phase_fn(n) for n in range(probs.size)], dtype=float)
        else:
            phases = np.asarray(phase_fn, dtype=float)
        return cls(PURE, probs, phases=phases)

    @classmethod
    def coherent_like(cls, probs, xi: float, xi0: float = 0.0) -> "NumberBasisState":
        """Pure state with ``xi(n) = n*xi + xi0`` and arbitrary weights."""
        return cls(PURE, probs, phase_slope=float(xi), phase_offset=float(xi0))

    @classmethod
    def diagonal(cls, probs) -> "NumberBasisState":
        return cls(DIAGONAL_MIXED, probs)

    @classmethod
    def coherent(cls, n_bar: float, xi: float = 0.0,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> "NumberBasisState":
        return CoherentSpec(n_bar, xi).to_state(policy)

    @property
    def is_pure(self) -> bool:
        return self.kind == PURE

    @property
    def is_coherent_like(self) -> bool:
        return self.kind == PURE and self.phases is None

    @property
    def mean_photons(self) -> float:
        return math.fsum(np.arange(self.probs.size) * self.probs)

    @property
    def number_variance(self) -> float:
        n = np.arange(self.probs.size)
        m = self.mean_photons
        return math.fsum((n - m) ** 2 * self.probs)

    def phase_values(self) -> np.ndarray:
        """``xi(n)`` for every stored level (zeros for mixtures)."""
        n = np.arange(self.probs.size)
        if self.kind == DIAGONAL_MIXED:
            return np.zeros(n.size)
        if self.phases is not None:
            return np.asarray(self.phases)
        return self.phase_slope * n + self.phase_offset


@dataclass(frozen=True)
class PhaseDistribution:
    r"""Periodic density :math:`P(\phi)` held as number-basis coefficients.

    ``coeffs[n]`` is :math:`c_n`; ``tail_mass`` is the probability mass
    discarded by truncation (before renormalisation).
    """

    coeffs: np.ndarray
    delta_xi: float = 0.0
    tail_mass: float = 0.0
    uniform: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _readonly(np.asarray(self.coeffs, dtype=complex)))
        object.__setattr__(self, "delta_xi", reduce_phase(self.delta_xi))

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1

    @cached_property
    def autocorrelation(self) -> np.ndarray:
        """``r[k] = sum_n c[n+k] conj(c[n])`` for ``k = 0..n_max``."""
        c = self.coeffs
        return np.correlate(c, c, mode="full")[c.size - 1:]

    def shifted_autocorrelation(self) -> np.ndarray:
        """``r[k] * exp(-i k delta_xi)``; the Fourier data of the density."""
        r = self.autocorrelation
        k = np.arange(r.size)
        return r * np.exp(-1j * k * self.delta_xi)

    def __call__(self, phi):
        return eval_density(self, phi)

    def exp_moment(self, j: int = 1) -> complex:
        """``<exp(i j phi)>`` from the Fourier data (exact)."""
        j = int(j)
        if j == 0:
            return 1.0 + 0.0j
        z = self.shifted_autocorrelation()
        if abs(j) >= z.size:
            return 0.0j
        return complex(np.conj(z[j])) if j > 0 else complex(z[-j])


def uniform_distribution() -> PhaseDistribution:
    return PhaseDistribution(np.ones(1), 0.0, 0.0, uniform=True)


def _amplitude_policy(policy: TruncationPolicy) -> TruncationPolicy:
    # density and moments are bilinear in amplitudes, so dropped mass t costs ~sqrt(t);
    # cutting at t < tol**2 keeps that error near tol and still honours the mass contract
    return replace(policy, tail_mass_tol=max(policy.tail_mass_tol ** 2, 1e-300))


def _truncate(probs: np.ndarray, policy: TruncationPolicy):
    """Drop the trailing levels whose total mass is below the tolerance."""
    tails = np.cumsum(probs[::-1])[::-1]  # tails[n] = sum_{m >= n} P_m
    keep = probs.size
    while keep > 1 and tails[keep - 1] < policy.tail_mass_tol:
        keep -= 1
    # tails[keep] is what we dropped
    dropped = float(tails[keep]) if keep < probs.size else 0.0
    if keep > policy.hard_max_terms:
        raise TruncationError(
            f"state needs {keep} levels, more than hard_max_terms={policy.hard_max_terms}",
            terms_used=keep, tail=dropped,
        )
    return keep, dropped


def build_distribution(state, offset_phi0: float | None = None,
                       policy: TruncationPolicy = DEFAULT_POLICY) -> PhaseDistribution:
    """Phase distribution of a :class:`CoherentSpec` or :class:`NumberBasisState`.

    For a :class:`CoherentSpec` the offset phase is taken from that object
    unless ``offset_phi0`` is given. Global phases are dropped. The number
    basis is cut where the discarded probability mass falls below
    ``policy.tail_mass_tol**2``, so the discarded amplitude is below
    ``tail_mass_tol``.
    """
    policy = _amplitude_policy(policy)
    if isinstance(state, CoherentSpec):
        phi0 = state.offset_phi0 if offset_phi0 is None else offset_phi0
        probs, tail = poisson_probabilities(state.mean_photons, policy)
        return PhaseDistribution(np.sqrt(probs), state.phase_xi - phi0, tail)
    if not isinstance(state, NumberBasisState):
        raise TypeError(f"expected CoherentSpec or NumberBasisState, got {type(state).__name__}")
    phi0 = 0.0 if offset_phi0 is None else offset_phi0
    if state.kind == DIAGONAL_MIXED:
        return uniform_distribution()
    keep, dropped = _truncate(np.asarray(state.probs), policy)
    probs = state.probs[:keep] / math.fsum(state.probs[:keep])
    amps = np.sqrt(probs)
    if state.is_coherent_like:
        return PhaseDistribution(amps, state.phase_slope - phi0, dropped)
    phases = state.phase_values()[:keep]
    coeffs = amps * np.exp(-1j * (phases - phases[0]))
    return PhaseDistribution(coeffs, -phi0, dropped)


def eval_density(dist: PhaseDistribution, phi):
    """Evaluate ``P(phi)`` (scalar or array) by Horner summation on the unit circle."""
    phi = np.asarray(phi, dtype=float)
    z = np.exp(1j * (phi - dist.delta_xi))
    amp = np.polyval(dist.coeffs[::-1], z)
    out = (amp.real ** 2 + amp.imag ** 2) / TWO_PI
    return float(out) if out.ndim == 0 else out


def _fourier_moment(dist: PhaseDistribution, k: int) -> float:
    z = dist.shifted_autocorrelation()[1:]
    if z.size == 0:
        return math.pi if k == 1 else 4.0 * math.pi ** 2 / 3.0
    j = np.arange(1, z.size + 1, dtype=float)
    if k == 1:
        # int phi e^{ij phi} = 2pi/(ij)
        return math.pi + 2.0 * math.fsum(z.imag / j)
    # int phi^2 e^{ij phi} = 4pi^2/(ij) + 4pi/j^2
    return 4.0 * math.pi ** 2 / 3.0 + math.fsum(4.0 * math.pi * z.imag / j + 4.0 * z.real / j ** 2)


def uniform_variance_deficit(dist: PhaseDistribution) -> float:
    """``pi**2/3 - dphi**2`` summed directly from the Fourier reduction.

    With ``m1 = pi + a`` and ``m2 = 4 pi**2/3 + b`` the deficit is
    ``a**2 + 2 pi a - b``, which avoids the cancellation in
    ``pi**2/3 - (m2 - m1**2)`` near the uniform distribution and is exactly
    zero for it.
    """
    z = dist.shifted_autocorrelation()[1:]
    if z.size == 0:
        return 0.0
    j = np.arange(1, z.size + 1, dtype=float)
    a = 2.0 * math.fsum(z.imag / j)
    b = math.fsum(4.0 * math.pi * z.imag / j + 4.0 * z.real / j ** 2)
    return a * a + 2.0 * math.pi * a - b


def moment(dist: PhaseDistribution, k: int = 1, method: str = "fourier",
           abs_tol: float = 1e-10) -> SeriesValue:
    """``int_0^{2pi} phi**k P(phi) dphi`` for ``k`` in {1, 2}.

    ``method="fourier"`` sums the exact Fourier reduction; its
    ``tail_bound`` bounds the error from the truncated number basis.
    ``method="quadrature"`` runs Romberg to ``abs_tol``.
    """
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k!r}")
    if method == "fourier":
        t = dist.tail_mass
        bound = TWO_PI ** k * (2.0 * math.sqrt(t) + t)
        return SeriesValue(_fourier_moment(dist, k), bound, dist.coeffs.size)
    if method == "quadrature":
        return romberg(lambda x: x ** k * eval_density(dist, x), 0.0, TWO_PI, abs_tol=abs_tol)
    raise ValueError(f"unknown method {method!r}; use 'fourier' or 'quadrature'")


def mean_relative_phase(state, policy: TruncationPolicy = DEFAULT_POLICY,
                        method: str = "fourier") -> float:
    """``<phi - phi0>`` for a state (a :class:`PhaseDistribution` is accepted as is)."""
    dist = state if isinstance(state, PhaseDistribution) else build_distribution(state, policy=policy)
    return float(moment(dist, 1, method).value)


@dataclass(frozen=True)
class FiniteSResult:
    s: int
    mean: float
    variance: float
    probabilities: np.ndarray


def finite_s_operator_check(state, s: int, offset_phi0: float | None = None,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> FiniteSResult:
    """Phase mean and variance from the explicit ``(s+1)``-dimensional eigenbasis.

    Builds the basis ``|phi_m> = (s+1)**-1/2 sum_n exp(i n phi_m) |n>``
    with ``phi_m = phi0 + 2 pi m/(s+1)``, projects the state truncated to
    ``n <= s``, and takes expectations of ``phi - phi0`` and its square.
    Independent of :func:`build_distribution`; meant for convergence
    studies only.
    """
    s = int(s)
    if s < 0:
        raise ValueError("s must be >= 0")
    if s > FINITE_S_MAX:
        raise DimensionTooLargeError(f"s={s} exceeds the validation limit {FINITE_S_MAX}")
    if isinstance(state, CoherentSpec):
        phi0 = state.offset_phi0 if offset_phi0 is None else offset_phi0
        state = state.to_state(policy)
    else:
        phi0 = 0.0 if offset_phi0 is None else offset_phi0
    dim = s + 1
    probs = np.zeros(dim)
    m = min(dim, state.probs.size)
    probs[:m] = state.probs[:m]
    probs /= math.fsum(probs)
    n = np.arange(dim)
    theta = TWO_PI * n / dim
    # basis[n, m] = <n|phi_m>
    basis = np.exp(1j * np.outer(n, phi0 + theta)) / math.sqrt(dim)
    if state.kind == DIAGONAL_MIXED:
        p = probs @ (np.abs(basis) ** 2)
    else:
        xi = np.zeros(dim)
        xi[:m] = state.phase_values()[:m]
        psi = np.sqrt(probs) * np.exp(1j * xi)
        amp = basis.conj().T @ psi
        p = amp.real ** 2 + amp.imag ** 2
    mean = math.fsum(theta * p)
    second = math.fsum(theta ** 2 * p)
    return FiniteSResult(s, mean, second - mean * mean, p)
