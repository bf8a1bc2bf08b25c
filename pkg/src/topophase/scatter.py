"""
Virtual scatterometer based on the mirror-facet model.

Each local slope reflects light at its inclination angle, so the angular
intensity distribution equals the histogram of facet angles seen through a
detector of finite half-angle. ``Aq = 4 k * variance(angle in degrees)``
with ``k = 1.17``; a rectangular distribution filling a +-8 degree detector
then gives Aq close to 100.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .statistics import central_slopes
from .surface import HeightMap, Profile

AQ_K = 1.17
DEFAULT_HALF_ANGLE = 8.0
DEFAULT_BINS = 161


@dataclass(frozen=True)
class AngularDistribution:
    bin_centers: np.ndarray
    intensities: np.ndarray
    detector_half_angle: float
    mean_angle: float
    clipped_fraction: float = 0.0


def _bin_geometry(n_bins: int, half_angle: float):
    if n_bins < 3 or n_bins % 2 == 0:
        raise ValidationError(f"angle distribution: n_bins must be odd and >= 3, got {n_bins}")
    if not half_angle > 0:
        raise ValidationError(f"angle distribution: half-angle must be positive, got {half_angle}")
    width = 2.0 * half_angle / n_bins
    centers = -half_angle + width * (np.arange(n_bins) + 0.5)
    # exact zero for the centre bin
    centers[n_bins // 2] = 0.0
    return width, centers


def _angle_bins(angles: np.ndarray, n_bins: int, half_angle: float):
    width = 2.0 * half_angle / n_bins
    idx = np.floor((angles + half_angle) / width).astype(np.int64)
    clipped = (angles < -half_angle) | (angles > half_angle)
    return np.clip(idx, 0, n_bins - 1), clipped


def distribution_from_counts(counts: np.ndarray, clipped: int, half_angle: float) -> AngularDistribution:
    _, centers = _bin_geometry(counts.size, half_angle)
    total = counts.sum()
    intensities = counts / total
    mean = float(np.sum(intensities * centers))
    return AngularDistribution(centers, intensities, half_angle, mean, clipped / total)


def angles_distribution(angles, n_bins: int = DEFAULT_BINS, detector_half_angle: float = DEFAULT_HALF_ANGLE) -> AngularDistribution:
    """Normalized histogram of facet angles (degrees); angles past the detector edge go to the edge bins."""
    a = np.asarray(angles, dtype=float).ravel()
    if a.size == 0:
        raise ValidationError("angle distribution: no angles")
    _bin_geometry(n_bins, detector_half_angle)
    idx, clipped = _angle_bins(a, n_bins, detector_half_angle)
    counts = np.bincount(idx, minlength=n_bins).astype(float)
    return distribution_from_counts(counts, int(clipped.sum()), detector_half_angle)


def angle_distribution(profile: Profile, n_bins: int = DEFAULT_BINS, detector_half_angle: float = DEFAULT_HALF_ANGLE) -> AngularDistribution:
    slopes = central_slopes(profile.ordinates, profile.spacing)
    return angles_distribution(np.degrees(np.arctan(slopes)), n_bins, detector_half_angle)


def aq(dist: AngularDistribution, k: float = AQ_K) -> float:
    """``4 k sum I_i (phi_i - M)^2`` with angles in degrees."""
    return float(4.0 * k * np.sum(dist.intensities * (dist.bin_centers - dist.mean_angle) ** 2))


@dataclass(frozen=True)
class ScatterMap:
    aq_values: np.ndarray
    spot_size: float
    step: float
    detector_half_angle: float
    clipped_fraction: float

    @property
    def aqm(self) -> float:
        return float(np.mean(self.aq_values))

    @property
    def aqs(self) -> float:
        return float(np.std(self.aq_values))

    @property
    def aqt(self) -> float:
        return float(np.max(self.aq_values) - np.min(self.aq_values))


def scatter_map(
    m: HeightMap,
    spot_size: float = 30.0,
    step: float = 15.0,
    n_bins: int = DEFAULT_BINS,
    detector_half_angle: float = DEFAULT_HALF_ANGLE,
    k: float = AQ_K,
) -> ScatterMap:
    """Local Aq over a sliding square spot.

    Slopes are central differences along x at every interior column of
    every row. A spot of ``spot_size`` µm covers ``round(spot/dx)`` slope
    columns and ``round(spot/dy)`` rows; all slopes inside are pooled into
    one unweighted angle histogram.
    """
    if not step > 0:
        raise ValidationError(f"scatter_map: step must be positive, got {step}")
    if spot_size < 3 * max(m.spacing_x, m.spacing_y):
        raise ValidationError(f"scatter_map: spot {spot_size} um is smaller than 3 sampling intervals")
    g = m.grid
    ny, nx = g.shape
    slopes = (g[:, 2:] - g[:, :-2]) / (2.0 * m.spacing_x)
    wx = int(round(spot_size / m.spacing_x))
    wy = int(round(spot_size / m.spacing_y))
    if wx > slopes.shape[1] or wy > ny:
        fx, fy = m.field_size
        raise ValidationError(f"scatter_map: spot {spot_size} um exceeds the {fx:g} x {fy:g} um field")
    sx = max(1, int(round(step / m.spacing_x)))
    sy = max(1, int(round(step / m.spacing_y)))
    _bin_geometry(n_bins, detector_half_angle)
    idx, clipped = _angle_bins(np.degrees(np.arctan(slopes)), n_bins, detector_half_angle)
    rows = range(0, ny - wy + 1, sy)
    cols = range(0, slopes.shape[1] - wx + 1, sx)
    values = np.empty((len(rows), len(cols)))
    for a, r in enumerate(rows):
        for b, c in enumerate(cols):
            counts = np.bincount(idx[r : r + wy, c : c + wx].ravel(), minlength=n_bins).astype(float)
            dist = distribution_from_counts(counts, 0, detector_half_angle)
            values[a, b] = aq(dist, k)
    values.setflags(write=False)
    return ScatterMap(values, spot_size, step, detector_half_angle, float(clipped.mean()))
