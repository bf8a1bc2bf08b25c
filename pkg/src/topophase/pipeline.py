"""
End-to-end evaluation of one profile and the JSON/CSV serialization used by the CLI.

Reports are byte-stable: keys are sorted and every float is rounded to 12
significant digits before encoding.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .energetics import EnergyReport, hamiltonian, mean_frequency, topographic_mass
from .errors import InvariantError, ValidationError
from .phasespace import (
    DEFAULT_RESOLUTION,
    Binning,
    PhasePortrait,
    build_portrait,
    fit_wavefunction,
    occupancy_entropy,
    phase_volume,
    to_phase_points,
)
from .scatter import AQ_K, DEFAULT_BINS, DEFAULT_HALF_ANGLE, angle_distribution, aq
from .statistics import ArcArea, MomentSet, arc_area, gradient, moments, periodogram
from .surface import Profile, detrend, l_filter, s_filter

REPORT_SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class AnalysisConfig:
    detrend: int = 2
    s_cut: Optional[float] = 2.5
    l_cut: Optional[float] = None
    xi: float = 1.0
    mass: Optional[float] = None
    c: Optional[float] = None
    n_effective: Optional[int] = None
    half_angle: float = DEFAULT_HALF_ANGLE
    bins: int = DEFAULT_BINS
    resolution: float = DEFAULT_RESOLUTION

    def echo(self) -> dict:
        d = asdict(self)
        d["scott_epsilon"] = 3.49
        d["aq_k"] = AQ_K
        return d


@dataclass(frozen=True)
class Analysis:
    profile: Profile
    heights: MomentSet
    slope_moments: MomentSet
    rms_slope: float
    arc: ArcArea
    portrait: PhasePortrait
    occupancy: tuple
    energy: EnergyReport
    mass_source: str
    aq: float
    aq_mean_angle: float
    aq_clipped: float
    wavefunction: Optional[dict] = field(default=None)


def preprocess(profile: Profile, cfg: AnalysisConfig) -> Profile:
    """F-operator, then S-filter, then L-filter (each optional except the zero-mean L step)."""
    if cfg.detrend:
        profile = detrend(profile, cfg.detrend)
    if cfg.s_cut:
        profile = s_filter(profile, cfg.s_cut)
    return l_filter(profile, cfg.l_cut if cfg.l_cut else profile.length_L)


def _mass(portrait: PhasePortrait, omega_bar: Optional[float], cfg: AnalysisConfig):
    if cfg.c is not None:
        if omega_bar is None or portrait.degenerate:
            raise ValidationError("topographic mass needs a non-flat profile")
        return topographic_mass(portrait.dq, portrait.dp, omega_bar, cfg.c), "topographic"
    if cfg.mass is not None:
        return cfg.mass, "given"
    return 1.0, "default"


def analyze(profile: Profile, cfg: AnalysisConfig = AnalysisConfig(), binning: Optional[Binning] = None) -> Analysis:
    """Evaluate an already preprocessed (zero-mean) profile.

    ``binning`` fixes the grid used for the occupancy entropy, e.g. to
    compare a surface against a reference; ``Omega`` and ``S`` always use
    the profile's own Scott widths.
    """
    heights = moments(profile.ordinates)
    slopes = gradient(profile)
    portrait = build_portrait(to_phase_points(profile), cfg.n_effective, resolution=cfg.resolution)
    phase_volume(portrait)
    occupancy = occupancy_entropy(portrait, binning)
    spec = periodogram(profile)
    omega_bar = mean_frequency(spec) if np.any(spec.amplitudes > 0) else None
    m, source = _mass(portrait, omega_bar, cfg)
    energy = hamiltonian(profile, m, cfg.xi, omega_bar)
    dist = angle_distribution(profile, cfg.bins, cfg.half_angle)
    try:
        w = asdict(fit_wavefunction(portrait))
    except ValidationError:
        w = None
    return Analysis(
        profile, heights, moments(slopes.values), slopes.rms_slope, arc_area(profile), portrait,
        occupancy, energy, source, aq(dist), dist.mean_angle, dist.clipped_fraction, w,
    )


def portrait_summary(portrait: PhasePortrait, occupancy: tuple, histograms: bool = True) -> dict:
    b = portrait.binning
    out = {
        "n_points": int(portrait.points.shape[0]),
        "n_effective": portrait.n_effective,
        "dq": b.dq,
        "dp": b.dp,
        "n_classes_q": b.n_q,
        "n_classes_p": b.n_p,
        "sigma_q": portrait.sigma_q,
        "sigma_p": portrait.sigma_p,
        "omega": portrait.omega,
        "entropy": portrait.entropy,
        "occupancy_entropy": occupancy[0],
        "occupied_cells": occupancy[1],
        "clamped_points": portrait.clamped,
        "degenerate": portrait.degenerate,
    }
    if histograms:
        out["q_origin"] = b.q0
        out["p_origin"] = b.p0
        out["hist_q"] = portrait.hist_q.tolist()
        out["hist_p"] = portrait.hist_p.tolist()
    return out


def analysis_report(a: Analysis, descriptor: dict, cfg: AnalysisConfig) -> dict:
    p = a.profile
    e = a.energy
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": {"name": "topophase", "version": __version__},
        "input": descriptor,
        "config": cfg.echo(),
        "sampling": {"n": p.n, "spacing": p.spacing, "length": p.length_L},
        "band": {"ls": p.band.ls, "lc": p.band.lc},
        "heights": asdict(a.heights),
        "slopes": {"rms_slope": a.rms_slope, "moments": asdict(a.slope_moments)},
        "arc": {"arc_length": a.arc.value, "nominal": a.arc.nominal, "excess_ratio": a.arc.excess_ratio},
        "phase_space": portrait_summary(a.portrait, a.occupancy),
        "energy": {
            "kinetic": e.kinetic,
            "potential": e.potential,
            "void_energy": e.void_energy,
            "lagrangian": e.lagrangian,
            "hamiltonian": e.hamiltonian,
            "mass": e.mass,
            "mass_source": a.mass_source,
            "xi": e.xi,
            "zeta_max": e.zeta_max,
            "omega_bar": e.omega_bar,
        },
        "scatter": {
            "aq": a.aq,
            "mean_angle": a.aq_mean_angle,
            "clipped_fraction": a.aq_clipped,
            "detector_half_angle": cfg.half_angle,
            "n_bins": cfg.bins,
            "k": AQ_K,
        },
        "wavefunction": a.wavefunction,
    }


# ---------------------------------------------------------------------------
# serialization


def _round(value):
    if isinstance(value, dict):
        return {str(k): _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise InvariantError(f"non-finite value {value!r} in report")
        rounded = float(f"{value:.12g}")
        return 0.0 if rounded == 0 else rounded
    return value


def dumps(report: dict) -> str:
    return json.dumps(_round(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    return "0" if value == 0 else f"{value:.12g}"


def write_points(path, portrait: PhasePortrait) -> None:
    lines = ["# units: q um, p dimensionless", "q,p"]
    lines += [f"{q!r},{p!r}" for q, p in portrait.points.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_points(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("q"):
            continue
        q, p = line.split(",")
        rows.append((float(q), float(p)))
    return np.asarray(rows).reshape(-1, 2)


def write_histograms(path, portrait: PhasePortrait) -> None:
    b = portrait.binning
    lines = ["axis,class,lower,upper,frequency"]
    for axis, edges, hist in (("q", b.q_edges, portrait.hist_q), ("p", b.p_edges, portrait.hist_p)):
        for i, h in enumerate(hist.tolist()):
            lines.append(f"{axis},{i},{fmt(edges[i])},{fmt(edges[i + 1])},{fmt(h)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
