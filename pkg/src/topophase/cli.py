"""
Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 invalid input or flags, 3 internal
invariant violation. Relative output paths are resolved against
``$TOPOPHASE_OUTDIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .energetics import simulate_running_in, trajectory_is_monotone
from .errors import InvariantError, ValidationError
from .phasespace import build_portrait, occupancy_entropy, to_phase_points
from .pipeline import (
    REPORT_SCHEMA_VERSION,
    AnalysisConfig,
    analysis_report,
    analyze,
    dumps,
    fmt,
    portrait_summary,
    preprocess,
    write_histograms,
    write_points,
)
from .scatter import DEFAULT_BINS, DEFAULT_HALF_ANGLE, scatter_map
from .statistics import gradient, moments
from .surface import detrend, extract_profile, load_heightmap, load_profile, write_profile
from .synthesis import fig6_pair, hurst_to_dimension, load_spectral_model, powerlaw_model, synthesize_profile

OUTDIR_ENV = "TOPOPHASE_OUTDIR"
DEFAULT_SPACING = 1.25


def _out(path) -> Path:
    path = Path(path)
    base = os.environ.get(OUTDIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _emit(text: str, path) -> None:
    if path:
        _out(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _tool() -> dict:
    return {"name": "topophase", "version": __version__}


# ---------------------------------------------------------------------------
# synth


def _recipe_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_argument_group("synthesis recipe")
    g.add_argument("--n", type=int, required=required, help="number of samples")
    g.add_argument("--kmin", type=int, default=None)
    g.add_argument("--kmax", type=int, default=None)
    g.add_argument("--hurst", type=float, default=None)
    g.add_argument("--psd-file", default=None, help="'k, A_k' CSV instead of a power law")
    g.add_argument("--scale", type=float, default=1.0, help="amplitude of the k = 1 power-law term, um")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--length", type=float, default=None, help=f"record length, default (n-1)*{DEFAULT_SPACING} um")


def _model_from_args(args):
    length = args.length if args.length is not None else (args.n - 1) * DEFAULT_SPACING
    if args.psd_file:
        return load_spectral_model(args.psd_file)
    if args.hurst is None or args.kmin is None or args.kmax is None:
        raise ValidationError("synthesis needs --kmin, --kmax and --hurst (or --psd-file)")
    return powerlaw_model(args.kmin, args.kmax, length, args.hurst, args.scale)


def _recipe(args) -> dict:
    keys = ("n", "kmin", "kmax", "hurst", "psd_file", "scale", "length")
    return {"recipe": {k: getattr(args, k) for k in keys}, "seed": args.seed}


def _profile_block(profile) -> dict:
    return {
        "n": profile.n,
        "spacing": profile.spacing,
        "length": profile.length_L,
        "heights": asdict(moments(profile.ordinates)),
        "rms_slope": gradient(profile).rms_slope,
    }


def cmd_synth(args) -> int:
    if args.fig6:
        if args.kmin is None:
            raise ValidationError("--fig6 needs --kmin")
        length = args.length if args.length is not None else (args.n - 1) * DEFAULT_SPACING
        a, b = fig6_pair(args.d, args.kmin, args.n, l=args.l, length=length)
        prefix = str(args.out)
        write_profile(_out(prefix + "a.txt"), a)
        write_profile(_out(prefix + "b.txt"), b)
        report = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "tool": _tool(),
            "input": {"recipe": {"fig6": True, "d": args.d, "l": args.l, "kmin": args.kmin, "n": args.n, "length": length}},
            "profiles": {"a": _profile_block(a), "b": _profile_block(b)},
        }
        _out(prefix + "report.json").write_text(dumps(report), encoding="utf-8")
        return 0

    model = _model_from_args(args)
    profile = synthesize_profile(model, args.n, args.seed)
    out = _out(args.out)
    write_profile(out, profile)
    rms2 = float(np.mean((profile.ordinates - profile.ordinates.mean()) ** 2))
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": _tool(),
        "input": _recipe(args),
        "model": {
            "k_min": model.k_min,
            "k_max": model.k_max,
            "record_length": model.record_length,
            "hurst": model.hurst,
            "fractal_dimension": hurst_to_dimension(model.hurst) if model.hurst is not None else None,
            "variance": model.variance,
        },
        "profile": _profile_block(profile),
        "parseval": {
            "rms_squared": rms2,
            "expected": model.variance,
            "relative_error": abs(rms2 - model.variance) / model.variance if model.variance > 0 else 0.0,
        },
    }
    out.with_suffix(".json").write_text(dumps(report), encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------
# analyze / compare / runin


def _analysis_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("evaluation")
    g.add_argument("--detrend", type=int, choices=(0, 1, 2), default=2, help="F-operator order (0 = none)")
    g.add_argument("--s-cut", type=float, default=2.5, help="S-filter cutoff in um (0 = none)")
    g.add_argument("--l-cut", type=float, default=None, help="L-filter cutoff in um, default record length")
    g.add_argument("--xi", type=float, default=1.0, help="load scale factor")
    g.add_argument("--mass", type=float, default=None, help="topographic mass scale factor")
    g.add_argument("--c", type=float, default=None, help="wave speed; derives the mass from the phase cell")
    g.add_argument("--n-effective", type=int, default=None, help="information-bearing coordinate count")
    g.add_argument("--half-angle", type=float, default=DEFAULT_HALF_ANGLE, help="detector half-angle, degrees")
    g.add_argument("--bins", type=int, default=DEFAULT_BINS, help="angle histogram bins (odd)")
    g.add_argument("--map", action="store_true", help="input is a height-map CSV; analyze one row")
    g.add_argument("--row", type=int, default=None, help="row of the map to analyze (default centre)")
    g.add_argument("--dx", type=float, default=None)
    g.add_argument("--dy", type=float, default=None)


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        detrend=args.detrend,
        s_cut=args.s_cut or None,
        l_cut=args.l_cut,
        xi=args.xi,
        mass=args.mass,
        c=args.c,
        n_effective=args.n_effective,
        half_angle=args.half_angle,
        bins=args.bins,
    )


def _load_input(path, args):
    if args.map:
        m = load_heightmap(path, args.dx, args.dy)
        row = args.row if args.row is not None else m.grid.shape[0] // 2
        return extract_profile(m, row), {"path": str(path), "row": row}
    return load_profile(path), {"path": str(path)}


def cmd_analyze(args) -> int:
    cfg = _config(args)
    raw, descriptor = _load_input(args.input, args)
    result = analyze(preprocess(raw, cfg), cfg)
    if args.emit_points:
        write_points(_out(args.emit_points), result.portrait)
    if args.emit_histograms:
        write_histograms(_out(args.emit_histograms), result.portrait)
    _emit(dumps(analysis_report(result, descriptor, cfg)), args.out)
    return 0


def _delta(a, b):
    if a is None or b is None:
        return None
    return b - a


def cmd_compare(args) -> int:
    cfg = _config(args)
    raw_a, desc_a = _load_input(args.first, args)
    raw_b, desc_b = _load_input(args.second, args)
    if abs(raw_a.spacing - raw_b.spacing) > 1e-9 * raw_a.spacing:
        raise ValidationError(f"incompatible spacings {raw_a.spacing} um and {raw_b.spacing} um")
    a = analyze(preprocess(raw_a, cfg), cfg)
    shared = a.portrait.binning
    b = analyze(preprocess(raw_b, cfg), cfg, binning=shared)
    shared_b = build_portrait(b.portrait.points, b.portrait.n_effective, binning=shared)
    deltas = {
        "sigma": _delta(a.heights.rms, b.heights.rms),
        "skewness": _delta(a.heights.skewness, b.heights.skewness),
        "rms_slope": _delta(a.rms_slope, b.rms_slope),
        "omega": _delta(a.portrait.omega, b.portrait.omega),
        "entropy": _delta(a.portrait.entropy, b.portrait.entropy),
        "occupancy_entropy": _delta(a.occupancy[0], b.occupancy[0]),
        "kinetic": _delta(a.energy.kinetic, b.energy.kinetic),
        "potential": _delta(a.energy.potential, b.energy.potential),
        "hamiltonian": _delta(a.energy.hamiltonian, b.energy.hamiltonian),
        "aq": _delta(a.aq, b.aq),
    }
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": _tool(),
        "config": cfg.echo(),
        "first": analysis_report(a, desc_a, cfg),
        "second": analysis_report(b, desc_b, cfg),
        "deltas": deltas,
        "shared_binning": {
            "first": portrait_summary(a.portrait, a.occupancy),
            "second": portrait_summary(shared_b, b.occupancy),
        },
    }
    _emit(dumps(report), args.out)
    return 0


RUNIN_COLUMNS = (
    "step", "plane", "removed_volume", "shift", "sigma", "skew", "rdq",
    "K", "B", "H", "omega", "S", "S_occ", "occupied_cells", "Aq",
)
RUNIN_CHECKS = ("sigma", "rdq", "omega", "S", "S_occ", "H")  # plus skewness


def cmd_runin(args) -> int:
    cfg = _config(args)
    if not 0 < args.bearing_fraction <= 1:
        raise ValidationError(f"--bearing-fraction must lie in (0, 1], got {args.bearing_fraction}")
    if args.steps < 1:
        raise ValidationError(f"--steps must be >= 1, got {args.steps}")
    if args.input:
        raw, descriptor = _load_input(args.input, args)
    elif args.n is not None:
        raw, descriptor = synthesize_profile(_model_from_args(args), args.n, args.seed), _recipe(args)
    else:
        raise ValidationError("runin needs an input file or a synthesis recipe (--n ...)")
    start = preprocess(raw, cfg)
    rows, reports = [], []
    shared = None
    for st in simulate_running_in(start, args.steps, args.bearing_fraction):
        if args.emit_profiles:
            write_profile(_out(f"{args.emit_profiles}{st.step}.txt"), st.profile)
        res = analyze(st.profile, cfg, binning=shared)
        if shared is None:
            shared = res.portrait.binning
        rows.append({
            "step": st.step, "plane": st.plane, "removed_volume": st.removed_volume, "shift": st.shift,
            "sigma": res.heights.rms, "skew": res.heights.skewness, "rdq": res.rms_slope,
            "K": res.energy.kinetic, "B": res.energy.potential, "H": res.energy.hamiltonian,
            "omega": res.portrait.omega, "S": res.portrait.entropy, "S_occ": res.occupancy[0],
            "occupied_cells": res.occupancy[1], "Aq": res.aq,
        })
        reports.append(analysis_report(res, {**descriptor, "runin_step": st.step}, cfg))
    csv = ",".join(RUNIN_COLUMNS) + "\n"
    csv += "".join(",".join(fmt(r[c]) for c in RUNIN_COLUMNS) + "\n" for r in rows)
    _emit(csv, args.out)
    if args.report:
        _out(args.report).write_text(dumps({"schema_version": REPORT_SCHEMA_VERSION, "steps": reports}), encoding="utf-8")

    held = {c: trajectory_is_monotone([r[c] for r in rows]) for c in RUNIN_CHECKS}
    skews = [r["skew"] for r in rows]
    # a flat input has no skewness at any step
    held["skew"] = all(v is None for v in skews) or (None not in skews and trajectory_is_monotone(skews))
    verdict = "monotonic: " + " ".join(f"{k}={'yes' if v else 'no'}" for k, v in held.items())
    verdict += " -> " + ("PASS" if all(held.values()) else "FAIL") + "\n"
    (sys.stdout if args.out else sys.stderr).write(verdict)
    return 0


# ---------------------------------------------------------------------------
# scatter


def cmd_scatter(args) -> int:
    m = load_heightmap(args.input, args.dx, args.dy)
    if args.detrend:
        m = detrend(m, args.detrend)
    smap = scatter_map(m, args.spot, args.step, args.bins, args.half_angle)
    if args.grid_out:
        lines = [",".join(fmt(v) for v in row) for row in smap.aq_values.tolist()]
        _out(args.grid_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": _tool(),
        "input": {"path": str(args.input)},
        "aqm": smap.aqm,
        "aqs": smap.aqs,
        "aqt": smap.aqt,
        "spot_size": smap.spot_size,
        "step": smap.step,
        "detector_half_angle": smap.detector_half_angle,
        "clipped_fraction": smap.clipped_fraction,
        "n_spots": int(smap.aq_values.size),
        "grid_shape": list(smap.aq_values.shape),
    }
    _emit(dumps(report), args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topophase", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"topophase {__version__} (report schema {REPORT_SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a profile (or the inverted pair with --fig6)")
    _recipe_args(p)
    p.add_argument("--fig6", action="store_true", help="write the sign-inverted zero-phase pair")
    p.add_argument("--d", type=float, default=1.0, help="amplitude of the (kmin-2) mode for --fig6")
    p.add_argument("--l", type=float, default=1.0, help="numerator of the l/k amplitudes for --fig6")
    p.add_argument("--out", required=True, help="profile file (or file prefix with --fig6)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="evaluate one profile")
    p.add_argument("input")
    _analysis_args(p)
    p.add_argument("--emit-points", default=None, help="write the (q, p) cloud as CSV")
    p.add_argument("--emit-histograms", default=None, help="write the marginal histograms as CSV")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("runin", help="simulate plastic running-in and tabulate the trajectory")
    p.add_argument("input", nargs="?", default=None)
    _recipe_args(p, required=False)
    _analysis_args(p)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--bearing-fraction", type=float, default=0.6,
                   help="fraction of samples left below the final cutting plane (1 = untouched)")
    p.add_argument("--out", default=None, help="trajectory CSV (default stdout)")
    p.add_argument("--report", default=None, help="per-step JSON reports")
    p.add_argument("--emit-profiles", default=None, metavar="PREFIX",
                   help="write each step's profile to PREFIX<step>.txt")
    p.set_defaults(func=cmd_runin)

    p = sub.add_parser("compare", help="side-by-side report of two inputs")
    p.add_argument("first")
    p.add_argument("second")
    _analysis_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scatter", help="virtual scatterometer Aq map of a height map")
    p.add_argument("input")
    p.add_argument("--dx", type=float, default=None)
    p.add_argument("--dy", type=float, default=None)
    p.add_argument("--spot", type=float, default=30.0, help="spot size, um")
    p.add_argument("--step", type=float, default=15.0, help="spot step, um")
    p.add_argument("--half-angle", type=float, default=DEFAULT_HALF_ANGLE)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--detrend", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--grid-out", default=None, help="CSV grid of local Aq")
    p.add_argument("--out", default=None, help="JSON statistics (default stdout)")
    p.set_defaults(func=cmd_scatter)
    return parser


def _origin(exc: BaseException) -> str:
    pkg = Path(__file__).parent
    for frame in reversed(traceback.extract_tb(exc.__traceback__)):
        path = Path(frame.filename)
        if path.parent == pkg:
            return path.stem
    return "cli"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error [{_origin(exc)}]: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error [{_origin(exc)}]: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
