"""Data tables behind each reproduced figure."""

from __future__ import annotations

import math

import numpy as np

from .errors import OverlayMismatchError, UnsupportedFigureError
from .experiment_io import FIGURE_IDS, GBL_ADJUST, ExperimentTable, FigureTable
from .fluctuations import coherent_lower_bound, trig_fluct_pb, variance_phase, UPPER_BOUND, psi_pb
from .nfm import c12_squared_sg, cos2_vacuum_port, cos4_analytic, cos4_small_alpha, cos4_vacuum_port, \
    mean_cos_ratio, normalization_vacuum_port
from .phase_core import CoherentSpec
from .relative_phase import fluct_pb_doubled, fluct_pbpd, fluct_sgpd
from .series import TruncationPolicy

MAX_N_BAR = 200.0
MAX_GRID = 100_000

FIGURE_DEFAULTS = {
    "fig1": {"n_bar": 4.0, "grid": 720},
    "fig2": {"n_bar_max": 20.0, "grid": 201, "delta_xis": (math.pi, math.pi / 2, math.pi / 4, 0.1)},
    "fig3": {"n_bar_max": 20.0, "grid": 201, "delta_xis": (math.pi, math.pi / 2, 0.1)},
    "fig5": {"n_bar_max": 20.0, "grid": 201, "n_bar_port2": 50.0},
    "fig6": {"n_bar_max": 20.0, "grid": 201, "n_bar_port2": 50.0},
    "fig7": {"n_bar_max": 40.0, "grid": 201},
    "fig8": {"n_bar_max": 10.0, "grid": 201},
}

# overlay kinds each figure accepts; fig6 wants single-measurement GBL data
OVERLAY_RULES = {
    "fig1": {},
    "fig2": {},
    "fig3": {"gbl": False},
    "fig5": {"nfm": None},
    "fig6": {"gbl": True, "nfm": None},
    "fig7": {"nfm": None},
    "fig8": {},
}


def _dxi_name(prefix: str, dxi: float) -> str:
    return f"{prefix}_dxi_{dxi:.6g}"


def _resolve(figure_id: str, params: dict | None) -> dict:
    if figure_id not in FIGURE_IDS:
        raise UnsupportedFigureError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    merged = dict(FIGURE_DEFAULTS[figure_id])
    merged["tail_mass_tol"] = TruncationPolicy().tail_mass_tol
    for key, val in (params or {}).items():
        if val is None:
            continue
        if key not in merged:
            raise ValueError(f"{figure_id} does not take parameter {key!r}")
        merged[key] = val
    merged["grid"] = int(merged["grid"])
    if not 2 <= merged["grid"] <= MAX_GRID:
        raise ValueError(f"grid must be in [2, {MAX_GRID}], got {merged['grid']}")
    for key in ("n_bar", "n_bar_max", "n_bar_port2"):
        if key in merged and not 0.0 <= float(merged[key]) <= MAX_N_BAR:
            raise ValueError(f"{key} must be in [0, {MAX_N_BAR}], got {merged[key]}")
    if "delta_xis" in merged:
        merged["delta_xis"] = tuple(float(d) for d in merged["delta_xis"])
    return merged


def _check_overlays(figure_id: str, overlays) -> tuple[ExperimentTable, ...]:
    rules = OVERLAY_RULES[figure_id]
    for ov in overlays:
        kind = ov.kind
        if kind not in rules:
            raise OverlayMismatchError(f"{figure_id} takes no {kind or 'unlabelled'} overlay ({ov.label!r})")
        want_adjusted = rules[kind]
        if want_adjusted is not None and (GBL_ADJUST in ov.adjustments) != want_adjusted:
            state = "adjusted" if want_adjusted else "unadjusted"
            raise OverlayMismatchError(f"{figure_id} needs {state} GBL data, got {ov.label!r}")
    return tuple(overlays)


def _n_grid(p):
    return np.linspace(0.0, float(p["n_bar_max"]), p["grid"])


def emit_figure(figure_id: str, params: dict | None = None, overlays=()) -> FigureTable:
    """Compute the table for ``figure_id``.

    ``params`` overrides :data:`FIGURE_DEFAULTS` (plus ``tail_mass_tol``).
    Overlays are checked against :data:`OVERLAY_RULES` and carried along
    unchanged.
    """
    p = _resolve(figure_id, params)
    overlays = _check_overlays(figure_id, overlays)
    policy = TruncationPolicy(tail_mass_tol=float(p["tail_mass_tol"]))
    cols: dict[str, np.ndarray] = {}

    if figure_id == "fig1":
        dxi = 2.0 * math.pi * np.arange(p["grid"]) / p["grid"]
        reps = [variance_phase(CoherentSpec.from_delta(p["n_bar"], d), policy) for d in dxi]
        cols["delta_xi"] = dxi
        cols["mean"] = [r.mean for r in reps]
        cols["variance"] = [r.variance for r in reps]

    elif figure_id == "fig2":
        nb = _n_grid(p)
        cols["n_bar"] = nb
        for d in p["delta_xis"]:
            cols[_dxi_name("variance", d)] = [
                variance_phase(CoherentSpec.from_delta(n, d), policy).variance for n in nb]
        cols["lower_bound"] = [coherent_lower_bound(n) for n in nb]
        cols["upper_bound"] = np.full(nb.size, UPPER_BOUND)
        cols["fluct_pb"] = [trig_fluct_pb(float(n), policy) for n in nb]

    elif figure_id == "fig3":
        nb = _n_grid(p)
        cols["n_bar"] = nb
        for d in p["delta_xis"]:
            cols[_dxi_name("doubled_variance", d)] = [fluct_pb_doubled(n, d, policy) for n in nb]
        cols["sgpd"] = [fluct_sgpd(n, policy) for n in nb]
        cols["pbpd"] = [fluct_pbpd(n, policy) for n in nb]

    elif figure_id == "fig5":
        nb = _n_grid(p)
        cols["n_bar"] = nb
        cols["cos_ratio"] = [mean_cos_ratio(n, p["n_bar_port2"], policy).value for n in nb]

    elif figure_id == "fig6":
        nb = _n_grid(p)
        n2 = p["n_bar_port2"]
        psi2 = psi_pb(n2, policy).value
        cols["n_bar"] = nb
        # port-2 phase pinned to xi2: only beam 1 fluctuates
        cols["relative_variance"] = [trig_fluct_pb(float(n), policy) for n in nb]
        cols["relative_variance_full"] = [1.0 - (psi_pb(n, policy).value * psi2) ** 2 for n in nb]

    elif figure_id == "fig7":
        nb = _n_grid(p)
        cols["n_bar"] = nb
        cols["cos2"] = [cos2_vacuum_port(n, policy) for n in nb]
        cols["cos4"] = [cos4_vacuum_port(n, policy).exact.value for n in nb]
        cols["c12_squared_sg"] = [c12_squared_sg(n, policy) for n in nb]

    elif figure_id == "fig8":
        nb = _n_grid(p)
        cols["n_bar"] = nb
        cols["cos4"] = [cos4_vacuum_port(n, policy).exact.value for n in nb]
        cols["cos4_analytic"] = [cos4_analytic(n) for n in nb]
        cols["cos4_small_alpha"] = [cos4_small_alpha(n) for n in nb]
        cols["normalization"] = [normalization_vacuum_port(n) for n in nb]

    meta = {k: (list(v) if isinstance(v, tuple) else v) for k, v in p.items()}
    if figure_id == "fig8":
        meta["cos4_small_alpha_valid_up_to"] = 1.0
    return FigureTable(figure_id, cols, meta, overlays)
