"""Series plumbing: truncation policy, series results, Poisson weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to carry number-basis sums.

    The cutoff ``n_max`` is the smallest index with discarded probability
    mass ``sum_{n > n_max} P_n < tail_mass_tol``.
    """

    tail_mass_tol: float = 1e-14
    hard_max_terms: int = 1_000_000

    def __post_init__(self):
        if not (self.tail_mass_tol > 0.0 and math.isfinite(self.tail_mass_tol)):
            raise ValueError(f"tail_mass_tol must be positive, got {self.tail_mass_tol!r}")
        if self.hard_max_terms < 1:
            raise ValueError(f"hard_max_terms must be >= 1, got {self.hard_max_terms!r}")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class SeriesValue:
    """A summed series or integral.

    ``tail_bound`` is an upper bound on the discarded remainder (or, for
    quadrature, the refinement error estimate).
    """

    value: float | complex
    tail_bound: float
    terms_used: int

    def __float__(self):
        return float(self.value)

    def __complex__(self):
        return complex(self.value)


def poisson_log_weight(n, n_bar: float):
    """``log(exp(-n_bar) n_bar**n / n!)`` for integer ``n`` (scalar or array)."""
    n = np.asarray(n)
    if n_bar == 0.0:
        return np.where(n == 0, 0.0, -np.inf)
    lg = np.vectorize(math.lgamma, otypes=[float])(n + 1.0)
    return -n_bar + n * math.log(n_bar) - lg


def poisson_tail_bound(n_max: int, n_bar: float) -> float:
    """Upper bound on ``sum_{n > n_max} P_n`` for a Poisson distribution.

    Past the mode the term ratio ``n_bar/(n+1)`` is at most
    ``q = n_bar/(n_max + 2)``, so the tail is majorised by the geometric
    series ``P_{n_max+1} / (1 - q)``. Returns ``inf`` when ``q >= 1``.
    """
    if n_bar == 0.0:
        return 0.0
    q = n_bar / (n_max + 2.0)
    if q >= 1.0:
        return math.inf
    return math.exp(float(poisson_log_weight(n_max + 1, n_bar))) / (1.0 - q)


def poisson_probabilities(n_bar: float, policy: TruncationPolicy = DEFAULT_POLICY):
    """Poisson weights ``P_0..P_{n_max}`` with the tail below ``policy.tail_mass_tol``.

    Returns ``(probs, tail_bound)``; ``probs`` is renormalised to sum to one.
    """
    if not (n_bar >= 0.0 and math.isfinite(n_bar)):
        raise ValueError(f"mean photon number must be finite and >= 0, got {n_bar!r}")
    if n_bar == 0.0:
        return np.ones(1), 0.0
    n_max = max(int(math.ceil(n_bar)), 1)
    tail = poisson_tail_bound(n_max, n_bar)
    step = max(8, int(math.sqrt(n_bar)))
    while tail >= policy.tail_mass_tol:
        if n_max + 1 >= policy.hard_max_terms:
            raise TruncationError(
                f"Poisson tail {tail:.3g} still above {policy.tail_mass_tol:.3g} "
                f"at hard_max_terms={policy.hard_max_terms}",
                terms_used=n_max + 1,
                tail=tail,
            )
        n_max = min(n_max + step, policy.hard_max_terms - 1)
        tail = poisson_tail_bound(n_max, n_bar)
    # back off to the smallest cutoff meeting the tolerance
    while n_max > 0 and poisson_tail_bound(n_max - 1, n_bar) < policy.tail_mass_tol:
        n_max -= 1
    probs = np.exp(poisson_log_weight(np.arange(n_max + 1), n_bar))
    return probs / math.fsum(probs), tail
