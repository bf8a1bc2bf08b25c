"""
Phase-space portrait of a profile.

Every interior sample contributes one point ``(q, p)``: its height and its
central-difference slope. The cell ``dq x dp`` comes from Scott's rule with
a fixed factor 3.49; the number of classes per axis covers the expected
peak-to-valley range of a Gaussian sample of ``n_effective`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import betaln

from .errors import InvariantError, ValidationError
from .statistics import central_slopes
from .surface import Profile

SCOTT_EPSILON = 3.49
DEFAULT_RESOLUTION = 1e-6
_ZERO_MEAN_RTOL = 1e-6


def to_phase_points(profile: Profile) -> np.ndarray:
    """Return an ``(N-2, 2)`` array of ``(q, p)`` for the interior samples.

    The profile must already be zero-mean (run ``l_filter`` first).
    """
    z = profile.ordinates
    rms = float(np.sqrt(np.mean(z**2)))
    mean = float(np.mean(z))
    if abs(mean) > _ZERO_MEAN_RTOL * rms and abs(mean) > 1e-300:
        raise ValidationError(
            f"to_phase_points: profile mean {mean:.3g} um is not zero; apply l_filter first"
        )
    q = z[1:-1]
    p = central_slopes(z, profile.spacing)
    return np.column_stack([q, p])


def scott_width(sigma: float, n: int, epsilon: float = SCOTT_EPSILON) -> float:
    """Class width ``epsilon * sigma / n^(1/3)``."""
    if sigma < 0 or n < 1:
        raise ValidationError(f"scott_width: need sigma >= 0 and n >= 1, got {sigma}, {n}")
    return epsilon * sigma / n ** (1.0 / 3.0)


def seewig_range(sigma: float, n: int) -> float:
    """Expected peak-to-valley of ``n`` Gaussian samples: ``2 sigma sqrt(2 ln n)``."""
    if sigma < 0 or n < 2:
        raise ValidationError(f"seewig_range: need sigma >= 0 and n >= 2, got {sigma}, {n}")
    return 2.0 * sigma * math.sqrt(2.0 * math.log(n))


def class_count(value_range: float, cw: float) -> int:
    if not cw > 0:
        raise ValidationError(f"class_count: class width must be positive, got {cw}")
    # guard against ceil(1.0000000000000002) for ranges that are exact multiples
    return max(1, math.ceil(value_range / cw * (1 - 1e-12)))


@dataclass(frozen=True)
class Binning:
    """A regular ``n_q x n_p`` grid of cells ``dq x dp`` starting at ``(q0, p0)``."""

    q0: float
    dq: float
    n_q: int
    p0: float
    dp: float
    n_p: int

    @property
    def q_edges(self) -> np.ndarray:
        return self.q0 + self.dq * np.arange(self.n_q + 1)

    @property
    def p_edges(self) -> np.ndarray:
        return self.p0 + self.dp * np.arange(self.n_p + 1)

    def assign(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
        """Class indices per point; out-of-range points land in the edge classes."""
        iq = np.floor((points[:, 0] - self.q0) / self.dq).astype(np.int64)
        ip = np.floor((points[:, 1] - self.p0) / self.dp).astype(np.int64)
        outside = (iq < 0) | (iq >= self.n_q) | (ip < 0) | (ip >= self.n_p)
        return np.clip(iq, 0, self.n_q - 1), np.clip(ip, 0, self.n_p - 1), int(outside.sum())


def _axis_binning(values: np.ndarray, n_effective: int, resolution: float):
    sigma = float(np.std(values))
    center = float(np.mean(values))
    width = scott_width(sigma, n_effective)
    if width <= 0:
        return center - resolution / 2, resolution, 1, sigma
    classes = class_count(seewig_range(sigma, max(n_effective, 2)), width)
    return center - classes * width / 2, width, classes, sigma


def make_binning(points: np.ndarray, n_effective: int, resolution: float = DEFAULT_RESOLUTION) -> Binning:
    q0, dq, nq, _ = _axis_binning(points[:, 0], n_effective, resolution)
    p0, dp, np_, _ = _axis_binning(points[:, 1], n_effective, resolution)
    return Binning(q0, dq, nq, p0, dp, np_)


@dataclass(frozen=True)
class PhasePortrait:
    """Binned ``(q, p)`` ensemble with its phase volume and entropy (k = 1).

    ``n_effective`` is the count of information-bearing coordinates used in
    Scott's rule and in the volume; it defaults to the number of points.
    """

    points: np.ndarray
    binning: Binning
    hist_q: np.ndarray
    hist_p: np.ndarray
    sigma_q: float
    sigma_p: float
    n_effective: int
    omega: float
    entropy: float
    clamped: int
    degenerate: bool

    @property
    def dq(self) -> float:
        return self.binning.dq

    @property
    def dp(self) -> float:
        return self.binning.dp

    @property
    def n_classes_q(self) -> int:
        return self.binning.n_q

    @property
    def n_classes_p(self) -> int:
        return self.binning.n_p


def _omega_double_sum(hist_q, hist_p, dq, dp, n) -> float:
    cells = np.outer(hist_p * dp, hist_q * dq)
    return float(n * cells.sum())


def build_portrait(
    points,
    n_effective: Optional[int] = None,
    *,
    binning: Optional[Binning] = None,
    resolution: float = DEFAULT_RESOLUTION,
) -> PhasePortrait:
    """Bin a point cloud into marginal histograms and evaluate ``Omega`` and ``S``.

    Pass ``binning`` to reuse the grid of another portrait (shared binning
    for before/after comparisons); otherwise the grid is derived from this
    cloud. An axis without spread gets one class of width ``resolution``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
        raise ValidationError("build_portrait: expected an (n, 2) array of (q, p) points")
    n_eff = pts.shape[0] if n_effective is None else int(n_effective)
    if n_eff < 1:
        raise ValidationError(f"build_portrait: n_effective must be >= 1, got {n_eff}")
    if binning is None:
        binning = make_binning(pts, n_eff, resolution)
    iq, ip, clamped = binning.assign(pts)
    total = pts.shape[0]
    hist_q = np.bincount(iq, minlength=binning.n_q) / total
    hist_p = np.bincount(ip, minlength=binning.n_p) / total
    omega = _omega_double_sum(hist_q, hist_p, binning.dq, binning.dp, n_eff)
    sigma_q = float(np.std(pts[:, 0]))
    sigma_p = float(np.std(pts[:, 1]))
    degenerate = bool(np.ptp(pts[:, 0]) == 0 and np.ptp(pts[:, 1]) == 0)
    for arr in (pts, hist_q, hist_p):
        arr.setflags(write=False)
    return PhasePortrait(
        pts, binning, hist_q, hist_p, sigma_q, sigma_p, n_eff, omega, entropy(omega), clamped, degenerate
    )


def phase_volume(portrait: PhasePortrait) -> float:
    """Literal ``N * sum_i sum_j H(p_i) H(q_j) dp dq``.

    With normalized marginals the sum collapses to ``N dp dq``; the result is
    checked against that closed form.
    """
    b = portrait.binning
    omega = _omega_double_sum(portrait.hist_q, portrait.hist_p, b.dq, b.dp, portrait.n_effective)
    closed = portrait.n_effective * b.dq * b.dp
    if abs(omega - closed) > 1e-9 * closed:
        raise InvariantError(f"phase volume {omega!r} disagrees with closed form {closed!r}")
    return omega


def entropy(omega: float, k: float = 1.0) -> float:
    """``S = k ln Omega``."""
    if not omega > 0:
        raise ValidationError(f"entropy: phase volume must be positive, got {omega}")
    return k * math.log(omega)


def occupancy_entropy(portrait: PhasePortrait, binning: Optional[Binning] = None) -> Tuple[float, int]:
    """Shannon entropy of the joint cell occupancy and the number of occupied cells.

    Companion to ``S = ln Omega``, which does not depend on histogram shape.
    """
    b = binning if binning is not None else portrait.binning
    iq, ip, _ = b.assign(portrait.points)
    _, counts = np.unique(iq * b.n_p + ip, return_counts=True)
    prob = counts / counts.sum()
    s_occ = float(-np.sum(prob * np.log(prob)))
    return max(s_occ, 0.0), int(counts.size)


# ---------------------------------------------------------------------------
# joint Beta "wavefunction"


@dataclass(frozen=True)
class BetaWavefunction:
    alpha_p: float
    beta_p: float
    alpha_q: float
    beta_q: float
    support_p: Tuple[float, float] = (0.0, 1.0)
    support_q: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        for name in ("alpha_p", "beta_p", "alpha_q", "beta_q"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"wavefunction: {name} must be positive")
        for name in ("support_p", "support_q"):
            lo, hi = getattr(self, name)
            if not hi > lo:
                raise ValidationError(f"wavefunction: {name} must be a non-degenerate interval")


def fit_beta(values, support: Tuple[float, float]) -> Tuple[float, float]:
    """Method-of-moments Beta shape parameters after rescaling ``support`` to (0, 1)."""
    x = np.asarray(values, dtype=float).ravel()
    lo, hi = support
    if x.size < 10:
        raise ValidationError(f"fit_beta: need at least 10 values, got {x.size}")
    if not hi > lo or x.min() < lo or x.max() > hi:
        raise ValidationError("fit_beta: support must be non-degenerate and cover all values")
    t = (x - lo) / (hi - lo)
    m = float(np.mean(t))
    v = float(np.var(t))
    if v <= 0:
        raise ValidationError("fit_beta: values have no spread")
    if v >= m * (1 - m):
        raise ValidationError(f"fit_beta: variance {v:.3g} too large for a Beta with mean {m:.3g}")
    common = m * (1 - m) / v - 1
    return m * common, (1 - m) * common


def beta_density(x, a: float, b: float, support: Tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Beta(a, b) density rescaled onto ``support`` (divided by the support width)."""
    lo, hi = support
    t = (np.asarray(x, dtype=float) - lo) / (hi - lo)
    if np.any(t < 0) or np.any(t > 1):
        raise ValidationError("beta_density: grid leaves the support")
    if (a < 1 and np.any(t == 0)) or (b < 1 and np.any(t == 1)):
        raise ValidationError("beta_density: grid touches a singular endpoint")
    return t ** (a - 1) * (1 - t) ** (b - 1) * math.exp(-betaln(a, b)) / (hi - lo)


def joint_wavefunction(w: BetaWavefunction, grid_p, grid_q) -> np.ndarray:
    """``psi[i, j] = f_p(grid_p[i]) * f_q(grid_q[j])``."""
    fp = beta_density(grid_p, w.alpha_p, w.beta_p, w.support_p)
    fq = beta_density(grid_q, w.alpha_q, w.beta_q, w.support_q)
    return np.outer(fp, fq)


def fit_wavefunction(portrait: PhasePortrait) -> BetaWavefunction:
    """Fit both marginals of a portrait, using its histogram range widened to the data extremes."""
    b = portrait.binning
    q, p = portrait.points[:, 0], portrait.points[:, 1]
    sq = (min(b.q_edges[0], q.min()), max(b.q_edges[-1], q.max()))
    sp = (min(b.p_edges[0], p.min()), max(b.p_edges[-1], p.max()))
    aq, bq = fit_beta(q, sq)
    ap, bp = fit_beta(p, sp)
    return BetaWavefunction(ap, bp, aq, bq, support_p=sp, support_q=sq)
