"""Command-line interface.

Examples::

    pbphase variance --nbar 4 --delta-xi 3.14159
    pbphase nfm-norm --a1-sq 0 --a2-sq 4
    pbphase figure fig3 --overlay gbl.csv --out fig3.csv
    pbphase figure fig6 --overlay gbl.csv --gbl-adjust --format json
    pbphase check

Exit status: 0 on success, 1 on a computation or data error, 2 on a
usage error. ``PBPHASE_TOL`` overrides the default truncation tolerance;
``--tol`` overrides both.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import experiment_io as eio
from .errors import PBPhaseError
from .figures import FIGURE_DEFAULTS, emit_figure
from .fluctuations import (
    check_uncertainty,
    commutator_expectation,
    trig_fluct_pb,
    trig_fluct_sg,
    variance_phase,
)
from .nfm import NfmInputs, c12_squared_sg, cos2_vacuum_port, cos4_vacuum_port, mean_cos_ratio, \
    normalization_n
from .phase_core import CoherentSpec, build_distribution, eval_density, moment
from .relative_phase import fluct_pbpd, fluct_sgpd
from .series import TruncationPolicy

ENV_TOL = "PBPHASE_TOL"
FIGURE_CHOICES = tuple(FIGURE_DEFAULTS)


class UsageError(Exception):
    pass


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--nbar", type=float, help="mean photon number of the (port-1) coherent state")
    p.add_argument("--delta-xi", type=float, default=math.pi,
                   help="relative phase xi - phi0 in radians (default: pi)")
    p.add_argument("--a1-sq", "--a1", dest="a1_sq", type=float, default=0.0,
                   help="|alpha1|^2 at NFM input port 1 (default: 0, vacuum)")
    p.add_argument("--a2-sq", dest="a2_sq", type=float, help="|alpha2|^2 at NFM input port 2")
    p.add_argument("--xi1", type=float, default=0.0, help="phase of alpha1")
    p.add_argument("--xi2", type=float, default=0.0, help="phase of alpha2")
    p.add_argument("--grid", type=int, help="number of grid points")
    p.add_argument("--tol", type=float, help="tail-mass tolerance for number-basis truncation")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="pbphase",
        description="Pegg-Barnett / Susskind-Glogower phase statistics of coherent states",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    helps = {
        "dist": "tabulate the phase density P(phi)",
        "moments": "first and second phase moments by Fourier reduction and quadrature",
        "variance": "phase variance with its bounds",
        "bounds": "number-phase uncertainty relations and bounds",
        "fluct-pb": "PB cosine/sine fluctuation 1 - psi_pb^2",
        "fluct-sg": "SG cosine/sine fluctuation",
        "sgpd": "SG relative-phase fluctuation of two beams",
        "pbpd": "PB relative-phase fluctuation of two beams",
        "nfm-norm": "NFM post-selection normalisation N",
        "nfm-cos": "<cos(phi2-phi1)>/cos(xi2-xi1) for a strong port 2",
        "nfm-cos2": "<cos^2(phi2-phi1)> with vacuum port 1",
        "nfm-cos4": "<cos^4(phi2-phi1)> with vacuum port 1",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    fig = sub.add_parser("figure", parents=[common], help="emit a figure data table")
    fig.add_argument("figure_id", choices=FIGURE_CHOICES)
    fig.add_argument("--nbar-max", type=float, help="upper end of the n_bar axis")
    fig.add_argument("--delta-xis", help="comma-separated relative phases (fig2, fig3)")
    fig.add_argument("--overlay", action="append", default=[], metavar="PATH",
                     help="experimental overlay CSV (repeatable)")
    fig.add_argument("--gbl-adjust", action="store_true",
                     help="halve GBL overlay values and divide their errors by sqrt(2)")
    sub.add_parser("check", parents=[common], help="run the invariant suite")
    return parser


def _policy(args) -> TruncationPolicy:
    tol = args.tol
    if tol is None and os.environ.get(ENV_TOL):
        try:
            tol = float(os.environ[ENV_TOL])
        except ValueError:
            raise UsageError(f"{ENV_TOL}={os.environ[ENV_TOL]!r} is not a number") from None
    try:
        return TruncationPolicy() if tol is None else TruncationPolicy(tail_mass_tol=tol)
    except ValueError as exc:
        raise UsageError(f"--tol: {exc}") from None


def _need(args, name, flag):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"{flag} is required for {args.command}")
    if val < 0:
        raise UsageError(f"{flag} must be >= 0, got {val}")
    return val


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return format(float(v), ".17g")


def _render_values(command: str, values: dict, fmt: str) -> str:
    if fmt == "json":
        clean = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else (None if v is None else float(v)))
                 for k, v in values.items()}
        return json.dumps({"command": command, "values": clean}, indent=1) + "\n"
    lines = ["quantity,value"] + [f"{k},{_fmt(v)}" for k, v in values.items()]
    return "\n".join(lines) + "\n"


def _coherent(args) -> CoherentSpec:
    return CoherentSpec.from_delta(_need(args, "nbar", "--nbar"), args.delta_xi)


def _scalar_command(args, policy) -> dict:
    cmd = args.command
    if cmd == "moments":
        dist = build_distribution(_coherent(args), policy=policy)
        out = {}
        for method in ("fourier", "quadrature"):
            for k, name in ((1, "mean"), (2, "second_moment")):
                sv = moment(dist, k, method)
                out[f"{name}_{method}"] = sv.value
                out[f"{name}_{method}_error_bound"] = sv.tail_bound
        out["terms_used"] = dist.coeffs.size
        return out
    if cmd == "variance":
        r = variance_phase(_coherent(args), policy)
        return {"variance": r.variance, "mean": r.mean, "lower_bound": r.lower_bound,
                "upper_bound": r.upper_bound, "satisfies_bounds": r.satisfies_bounds}
    if cmd == "bounds":
        spec = _coherent(args)
        u = check_uncertainty(spec, policy)
        r = variance_phase(spec, policy)
        return {"variance": u.variance, "number_variance": u.number_variance,
                "commutator_imag": commutator_expectation(spec, policy).imag,
                "heisenberg_margin": u.heisenberg_margin, "judge_margin": u.judge_margin,
                "lower_bound": r.lower_bound, "upper_bound": r.upper_bound,
                "holds": u.holds, "satisfies_bounds": r.satisfies_bounds}
    if cmd == "fluct-pb":
        return {"fluct_pb": trig_fluct_pb(_need(args, "nbar", "--nbar"), policy)}
    if cmd == "fluct-sg":
        return {"fluct_sg": trig_fluct_sg(_need(args, "nbar", "--nbar"), policy)}
    if cmd == "sgpd":
        return {"sgpd": fluct_sgpd(_need(args, "nbar", "--nbar"), policy)}
    if cmd == "pbpd":
        return {"pbpd": fluct_pbpd(_need(args, "nbar", "--nbar"), policy)}
    if cmd == "nfm-norm":
        a1 = _need(args, "a1_sq", "--a1-sq")
        a2 = _need(args, "a2_sq", "--a2-sq")
        return {"normalization": normalization_n(NfmInputs(a1, a2, args.xi1, args.xi2))}
    if cmd == "nfm-cos":
        n2 = 50.0 if args.a2_sq is None else args.a2_sq
        r = mean_cos_ratio(_need(args, "nbar", "--nbar"), n2, policy)
        return {"cos_ratio": r.value, "n_bar_port2": r.n_bar_port2,
                "large_port2_regime": r.large_port2_regime, "full_product": r.full_product}
    if cmd == "nfm-cos2":
        n2 = args.a2_sq if args.a2_sq is not None else (args.nbar or 0.0)
        return {"cos2": cos2_vacuum_port(n2, policy)}
    if cmd == "nfm-cos4":
        x = args.a2_sq if args.a2_sq is not None else _need(args, "nbar", "--nbar")
        r = cos4_vacuum_port(x, policy)
        return {"cos4": r.exact.value, "cos4_error_bound": r.exact.tail_bound,
                "approx_analytic": r.approx_analytic, "approx_small_alpha": r.approx_small_alpha,
                "normalization": r.normalization, "c12_squared_sg": c12_squared_sg(x, policy)}
    raise UsageError(f"unknown command {cmd!r}")


def _dist_table(args, policy) -> eio.FigureTable:
    spec = _coherent(args)
    dist = build_distribution(spec, policy=policy)
    n = args.grid or 256
    if not 2 <= n <= 100_000:
        raise UsageError("--grid must be in [2, 100000]")
    phi = 2.0 * math.pi * np.arange(n) / n
    meta = {"n_bar": spec.mean_photons, "delta_xi": spec.delta_xi,
            "tail_mass_tol": policy.tail_mass_tol, "n_max": dist.n_max}
    return eio.FigureTable("dist", {"phi": phi, "density": eval_density(dist, phi)}, meta)


def _figure_table(args, policy) -> eio.FigureTable:
    fid = args.figure_id
    defaults = FIGURE_DEFAULTS[fid]
    params = {"grid": args.grid, "tail_mass_tol": policy.tail_mass_tol}
    if "n_bar" in defaults:
        params["n_bar"] = args.nbar
    elif args.nbar is not None:
        raise UsageError(f"--nbar applies to fig1 only; use --nbar-max for {fid}")
    if "n_bar_max" in defaults:
        params["n_bar_max"] = args.nbar_max
    if "n_bar_port2" in defaults:
        params["n_bar_port2"] = args.a2_sq
    if args.delta_xis:
        if "delta_xis" not in defaults:
            raise UsageError(f"--delta-xis does not apply to {fid}")
        try:
            params["delta_xis"] = [float(v) for v in args.delta_xis.split(",")]
        except ValueError:
            raise UsageError(f"--delta-xis: cannot parse {args.delta_xis!r}") from None
    overlays = []
    for path in args.overlay:
        table = eio.load_experiment(path)
        if args.gbl_adjust and table.kind == "gbl":
            table = eio.gbl_adjust(table)
        overlays.append(table)
    try:
        return emit_figure(fid, params, overlays)
    except ValueError as exc:
        if isinstance(exc, PBPhaseError):
            raise
        raise UsageError(str(exc)) from None


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_check(args) -> int:
    from .checks import run_checks

    failed = 0
    lines = []
    for r in run_checks():
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        line = f"{status} {r.name} margin={r.margin:.6g}"
        if r.detail:
            line += f" ({r.detail})"
        lines.append(line)
        print(line, flush=True)
    print(f"{len(lines) - failed}/{len(lines)} invariants hold")
    if args.out:
        _emit("\n".join(lines) + "\n", args.out)
    return 1 if failed else 0


def _diagnostics(exc: Exception) -> str:
    parts = [f"error: {type(exc).__name__}: {exc}"]
    for attr in ("terms_used", "tail", "levels", "estimate", "error"):
        val = getattr(exc, attr, None)
        if val is not None:
            parts.append(f"  {attr} = {val}")
    return "\n".join(parts)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        policy = _policy(args)
        if args.command == "check":
            return _run_check(args)
        if args.command == "figure":
            table = _figure_table(args, policy)
        elif args.command == "dist":
            table = _dist_table(args, policy)
        else:
            values = _scalar_command(args, policy)
            _emit(_render_values(args.command, values, args.format), args.out)
            return 0
        text = eio.figure_to_csv(table) if args.format == "csv" else eio.figure_to_json(table)
        _emit(text, args.out)
        return 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pbphase {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (PBPhaseError, OSError) as exc:
        print(_diagnostics(exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"pbphase {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))
