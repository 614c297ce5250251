"""Trapezoid-based quadrature used as an independent oracle for the Fourier moments."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError
from .series import SeriesValue


def romberg(f, a: float, b: float, abs_tol: float = 1e-10, min_level: int = 4,
            max_level: int = 22) -> SeriesValue:
    """Composite trapezoid on ``[a, b]`` with Richardson (Romberg) refinement.

    ``f`` must accept a numpy array of abscissae. The panel count doubles
    each level and only the new midpoints are evaluated. Refinement stops
    when two successive diagonal extrapolants differ by less than
    ``abs_tol``; ``tail_bound`` is that difference and ``terms_used`` the
    number of function evaluations.

    Raises ConvergenceError if ``max_level`` is reached first.
    """
    h = b - a
    trap = 0.5 * h * (float(f(np.array([a]))[0]) + float(f(np.array([b]))[0]))
    evals = 2
    rows = [[trap]]
    for level in range(1, max_level + 1):
        panels = 2 ** (level - 1)
        h *= 0.5
        mids = a + h * (2.0 * np.arange(panels) + 1.0)
        trap = 0.5 * trap + h * math.fsum(np.asarray(f(mids), dtype=float))
        evals += panels
        row = [trap]
        factor = 1.0
        for j in range(1, level + 1):
            factor *= 4.0
            row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (factor - 1.0))
        err = abs(row[-1] - rows[-1][-1])
        rows.append(row)
        if level >= min_level and err < abs_tol:
            return SeriesValue(row[-1], err, evals)
    raise ConvergenceError(
        f"Romberg refinement stalled after {max_level} levels "
        f"(last change {err:.3g} > {abs_tol:.3g})",
        levels=max_level, estimate=rows[-1][-1], error=err,
    )


def periodic_trapezoid(values, period: float = 2.0 * math.pi) -> float:
    """Trapezoid rule for samples of a periodic function on a uniform grid.

    ``values`` are samples at ``period * k / M`` for ``k = 0..M-1``; the
    rule is exact for trigonometric polynomials of degree below ``M``.
    """
    values = np.asarray(values)
    return period * values.sum() / values.shape[-1]


def periodic_grid(m: int, period: float = 2.0 * math.pi) -> np.ndarray:
    return period * np.arange(m) / m
