"""Slopes, height moments, arc length / true area, periodogram and plasticity index."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ValidationError
from .surface import HeightMap, Profile
from .synthesis import SpectralModel


@dataclass(frozen=True)
class MomentSet:
    """Population moments of a sample.

    ``kurtosis`` is the raw (Pearson) kurtosis, 3 for a Gaussian. Skewness
    and kurtosis are ``None`` for a sample without spread.
    """

    mean: float
    rms: float
    skewness: Optional[float]
    kurtosis: Optional[float]
    min: float
    max: float


@dataclass(frozen=True)
class SlopeSeries:
    """Central-difference slopes at the interior points of a profile."""

    values: np.ndarray
    spacing: float
    rms_slope: float

    def angles(self) -> np.ndarray:
        """Local inclination in degrees."""
        return np.degrees(np.arctan(self.values))


@dataclass(frozen=True)
class ArcArea:
    """True arc length (profiles, µm) or true area (maps, µm²) against its projected support."""

    value: float
    nominal: float

    @property
    def excess_ratio(self) -> float:
        return self.value / self.nominal


def central_slopes(z: np.ndarray, spacing: float) -> np.ndarray:
    return (z[2:] - z[:-2]) / (2.0 * spacing)


def gradient(profile: Profile) -> SlopeSeries:
    """Slopes ``(z[i+1] - z[i-1]) / 2dr`` for i = 1..N-2; endpoints are dropped."""
    z = profile.ordinates
    if z.size < 3:
        raise ValidationError("gradient: need at least 3 ordinates")
    s = central_slopes(z, profile.spacing)
    s.setflags(write=False)
    return SlopeSeries(s, profile.spacing, float(np.sqrt(np.mean(s**2))))


def moments(values) -> MomentSet:
    x = np.asarray(values, dtype=float).ravel()
    if x.size < 2:
        raise ValidationError("moments: need at least 2 values")
    mean = float(np.mean(x))
    dev = x - mean
    sigma = float(np.sqrt(np.mean(dev**2)))
    scale = float(np.max(np.abs(x)))
    if sigma <= 1e-12 * scale or sigma == 0.0:
        return MomentSet(mean, 0.0, None, None, float(x.min()), float(x.max()))
    # standardize before raising to powers so tiny spreads do not underflow
    u = dev / sigma
    skew = float(np.mean(u**3))
    kurt = float(np.mean(u**4))
    return MomentSet(mean, sigma, skew, kurt, float(x.min()), float(x.max()))


def _quadrature(f: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    # a single interior sample degenerates to the midpoint rule
    if f.shape[axis] == 1:
        return np.take(f, 0, axis=axis) * h
    return np.trapezoid(f, dx=h, axis=axis)


def _support(n_interior: int, h: float) -> float:
    # same rule as the integrand so a flat surface gives a ratio of exactly 1
    return float(_quadrature(np.ones(n_interior), h))


def arc_area(surface: Union[Profile, HeightMap]) -> ArcArea:
    """Quadrature of ``sqrt(1 + |grad z|^2)`` over the interior points.

    The nominal length (area) covers the same interior support, so a flat
    surface has an excess ratio of exactly 1.
    """
    if isinstance(surface, Profile):
        s = gradient(surface).values
        h = surface.spacing
        return ArcArea(float(_quadrature(np.sqrt(1.0 + s**2), h)), _support(s.size, h))
    g = surface.grid
    ny, nx = g.shape
    if ny < 3 or nx < 3:
        raise ValidationError(f"arc_area: a height map needs at least 3x3 points, got {g.shape}")
    hx, hy = surface.spacing_x, surface.spacing_y
    gx = (g[1:-1, 2:] - g[1:-1, :-2]) / (2.0 * hx)
    gy = (g[2:, 1:-1] - g[:-2, 1:-1]) / (2.0 * hy)
    f = np.sqrt(1.0 + gx**2 + gy**2)
    area = _quadrature(_quadrature(f, hx, axis=1), hy, axis=0)
    return ArcArea(float(area), _support(nx - 2, hx) * _support(ny - 2, hy))


def periodogram(profile: Profile) -> SpectralModel:
    """One-sided amplitude spectrum with ``sum A_k^2 / 2 == rms^2``.

    The mean is removed first. Wavenumber ``k`` counts periods over the
    FFT period ``N*dr``, which is stored as the model's record length.
    """
    z = profile.ordinates - np.mean(profile.ordinates)
    n = z.size
    spec = np.fft.rfft(z)[1:]
    amps = 2.0 * np.abs(spec) / n
    if n % 2 == 0:
        amps[-1] = math.sqrt(2.0) * np.abs(spec[-1]) / n
    return SpectralModel(amps, 1, n // 2, n * profile.spacing)


def plasticity_index(e_star: float, hardness: float, sigma: float, beta: float) -> float:
    """Greenwood-Williamson index ``(E'/H) * sqrt(sigma/beta)``.

    ``e_star`` and ``hardness`` share a unit (GPa); ``sigma`` and ``beta``
    (asperity radius) share a length unit.
    """
    for name, value in (("E*", e_star), ("hardness", hardness), ("sigma", sigma), ("beta", beta)):
        if not value > 0:
            raise ValidationError(f"plasticity_index: {name} must be positive, got {value}")
    return (e_star / hardness) * math.sqrt(sigma / beta)
