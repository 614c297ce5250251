r"""Modified Bessel function of the first kind, order zero.

Two regimes are used:

* ``x < 15``: the defining power series :math:`\sum_k (x/2)^{2k}/(k!)^2`.
  All terms are positive, so there is no cancellation.
* ``x >= 15``: the Hankel asymptotic expansion of the exponentially
  scaled function, :math:`e^{-x} I_0(x) \sqrt{2\pi x} \sim
  \sum_k [(2k-1)!!]^2 / (k!\, 8^k x^k)`, truncated at its smallest term.
  At ``x = 15`` the smallest term is about ``1e-14`` relative.

The scaled form :func:`i0e` and :func:`log_i0` let callers build products
like ``exp(-s) * I0(a) * I0(b)`` without overflow.
"""

from __future__ import annotations

import math

import numpy as np

SERIES_ASYMPTOTIC_SWITCH = 15.0


def _series_minus_one(x: float) -> float:
    """``I0(x) - 1`` summed from the power series (no leading 1)."""
    q = 0.25 * x * x
    term = 1.0
    total = 0.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term <= 1e-17 * (1.0 + total):
            return total


def _asymptotic_scaled(x: float) -> float:
    """``exp(-x) * I0(x)`` from the large-argument expansion."""
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term:
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return total / math.sqrt(2.0 * math.pi * x)


def _i0e_scalar(x: float) -> float:
    x = abs(float(x))
    if x < SERIES_ASYMPTOTIC_SWITCH:
        return math.exp(-x) * (1.0 + _series_minus_one(x))
    return _asymptotic_scaled(x)


def _log_i0_scalar(x: float) -> float:
    x = abs(float(x))
    if x < SERIES_ASYMPTOTIC_SWITCH:
        return math.log1p(_series_minus_one(x))
    return x + math.log(_asymptotic_scaled(x))


def i0e(x):
    """Exponentially scaled ``exp(-|x|) * I0(x)``; accepts scalars or arrays."""
    if np.ndim(x) == 0:
        return _i0e_scalar(x)
    return np.vectorize(_i0e_scalar, otypes=[float])(x)


def i0(x):
    """Modified Bessel function ``I0(x)``; accepts scalars or arrays.

    Overflows to ``inf`` past ``x ~ 713`` like any double-precision value.
    """
    if np.ndim(x) == 0:
        ax = abs(float(x))
        if ax < SERIES_ASYMPTOTIC_SWITCH:
            return 1.0 + _series_minus_one(ax)
        return math.exp(ax) * _asymptotic_scaled(ax) if ax < 713.0 else math.inf
    return np.vectorize(i0, otypes=[float])(x)


def log_i0(x):
    """``log(I0(x))``, accurate for small arguments (uses ``log1p``)."""
    if np.ndim(x) == 0:
        return _log_i0_scalar(x)
    return np.vectorize(_log_i0_scalar, otypes=[float])(x)
