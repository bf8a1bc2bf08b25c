"""
Sampled surface types, file ingestion and the F/S/L filter chain.

Lengths are micrometres throughout. Filters are ideal spectral truncations
computed with a forward/inverse real FFT, so the record is treated as one
period of a periodic signal: a component is bin-exact only if the record
holds an integer number of its periods. Form removal (``detrend``) is
expected to run before filtering; the filters themselves do not window or
detrend.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import ValidationError

UNIT_NAMES = {"um", "µm", "micrometer", "micrometre", "micron"}

# relative slack used when comparing a bin wavelength against a cutoff
_CUTOFF_RTOL = 1e-9


@dataclass(frozen=True)
class EvaluationBand:
    """Roughness evaluation band: shortest (``ls``) and longest (``lc``) wavelength kept."""

    ls: float
    lc: float

    def __post_init__(self):
        if not (self.ls > 0):
            raise ValidationError(f"band: ls must be positive, got {self.ls}")
        if not (self.lc > self.ls):
            raise ValidationError(f"band: lc ({self.lc}) must exceed ls ({self.ls})")


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValidationError(f"{what}: expected {ndim}-D data, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what}: missing or non-finite values are not accepted")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Profile:
    """A 1-D equally spaced height profile.

    Attributes
    ----------
    ordinates : np.ndarray
        Heights in µm (read-only).
    spacing : float
        Sampling distance δr in µm.
    band : EvaluationBand
        Current evaluation band; defaults to ``(2·δr, N·δr)``, the shortest
        and longest wavelengths the periodic record can carry.
    label : str
        Free text carried into reports.
    """

    ordinates: np.ndarray
    spacing: float
    band: Optional[EvaluationBand] = None
    label: str = ""

    def __post_init__(self):
        z = _frozen_array(self.ordinates, 1, "profile")
        if z.size < 3:
            raise ValidationError(f"profile: need at least 3 ordinates, got {z.size}")
        if not (self.spacing > 0):
            raise ValidationError(f"profile: spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "ordinates", z)
        if self.band is None:
            object.__setattr__(
                self, "band", EvaluationBand(2.0 * self.spacing, z.size * self.spacing)
            )

    @property
    def n(self) -> int:
        return self.ordinates.size

    @property
    def length_L(self) -> float:
        """Record length ``(N-1)·δr``."""
        return (self.n - 1) * self.spacing

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    def with_ordinates(self, ordinates, **changes) -> "Profile":
        return replace(self, ordinates=ordinates, **changes)


@dataclass(frozen=True)
class HeightMap:
    """A 2-D height grid of shape ``(N_y, N_x)`` in µm."""

    grid: np.ndarray
    spacing_x: float
    spacing_y: float
    band: Optional[EvaluationBand] = None
    label: str = ""

    def __post_init__(self):
        g = _frozen_array(self.grid, 2, "height map")
        ny, nx = g.shape
        if nx < 3 or ny < 1:
            raise ValidationError(f"height map: need N_x >= 3 and N_y >= 1, got {g.shape}")
        if not (self.spacing_x > 0 and self.spacing_y > 0):
            raise ValidationError("height map: spacings must be positive")
        object.__setattr__(self, "grid", g)
        if self.band is None:
            ls = 2.0 * max(self.spacing_x, self.spacing_y)
            lc = max(nx * self.spacing_x, ny * self.spacing_y)
            object.__setattr__(self, "band", EvaluationBand(ls, lc))

    @property
    def shape(self) -> tuple:
        return self.grid.shape

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def field_size(self) -> tuple:
        """Measured field ``(N_x·δx, N_y·δy)``, e.g. 256 px at 1.25 µm -> 320 µm."""
        ny, nx = self.grid.shape
        return (nx * self.spacing_x, ny * self.spacing_y)

    def with_grid(self, grid, **changes) -> "HeightMap":
        return replace(self, grid=grid, **changes)


Surface = Union[Profile, HeightMap]


# ---------------------------------------------------------------------------
# ingestion


def _split_row(line: str) -> list:
    return [tok for tok in re.split(r"[,\s;]+", line.strip()) if tok]


def _check_units(line: str, path) -> None:
    m = re.match(r"#\s*units?\s*[:=]\s*(\S+)", line, flags=re.IGNORECASE)
    if m and m.group(1).lower() not in UNIT_NAMES:
        raise ValidationError(f"{path}: unsupported units '{m.group(1)}', expected um")


def load_profile(path, format: Optional[str] = None, label: Optional[str] = None) -> Profile:
    """Read a two-column ``x z`` profile (whitespace or comma separated).

    Lines starting with ``#`` are headers; a ``# units: um`` line is
    checked when present. The abscissae must be strictly increasing and
    equally spaced to 1e-6 relative.
    """
    if format not in (None, "two-column-text", "csv"):
        raise ValidationError(f"unknown profile format '{format}'")
    path = Path(path)
    xs, zs = [], []
    declared = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                _check_units(line.strip(), path)
                m = re.match(r"#\s*spacing\s*=\s*(\S+)", line.strip())
                if m:
                    declared = float(m.group(1))
                continue
            cells = _split_row(line)
            if len(cells) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
            try:
                x, z = float(cells[0]), float(cells[1])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric cell in '{line.strip()}'")
            xs.append(x)
            zs.append(z)
    if len(xs) < 3:
        raise ValidationError(f"{path}: need at least 3 rows, got {len(xs)}")
    x = np.asarray(xs)
    dx = np.diff(x)
    if np.any(dx <= 0):
        raise ValidationError(f"{path}: abscissae must be strictly increasing")
    spacing = (x[-1] - x[0]) / (x.size - 1)
    deviation = float(np.max(np.abs(dx - spacing)) / spacing)
    if deviation > 1e-6:
        raise ValidationError(
            f"{path}: non-uniform spacing, max relative deviation {deviation:.3g}"
        )
    # exact round trip for files written by write_profile
    if declared is not None and abs(declared - spacing) <= 1e-9 * spacing:
        spacing = declared
    return Profile(np.asarray(zs), float(spacing), label=label if label is not None else path.stem)


def write_profile(path, profile: Profile) -> None:
    lines = ["# units: um", f"# spacing={profile.spacing!r}"]
    if profile.label:
        lines.append(f"# label: {profile.label}")
    lines += [f"{x!r} {z!r}" for x, z in zip(profile.x.tolist(), profile.ordinates.tolist())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_SPACING_RE = re.compile(r"\b(dx|dy)\s*=\s*([0-9eE.+-]+)")


def load_heightmap(path, spacing_x: Optional[float] = None, spacing_y: Optional[float] = None) -> HeightMap:
    """Read a rectangular CSV grid. Spacings come from the arguments or a ``# dx=.., dy=..`` header."""
    path = Path(path)
    header = {}
    rows = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                _check_units(line.strip(), path)
                header.update({k: float(v) for k, v in _SPACING_RE.findall(line)})
                continue
            cells = _split_row(line)
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric cell in '{line.strip()}'")
    if not rows:
        raise ValidationError(f"{path}: empty grid")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValidationError(f"{path}: ragged grid, row lengths {sorted(widths)}")
    dx = spacing_x if spacing_x is not None else header.get("dx")
    dy = spacing_y if spacing_y is not None else header.get("dy", dx)
    if dx is None:
        raise ValidationError(f"{path}: no spacing given (pass spacing or a '# dx=..., dy=...' header)")
    return HeightMap(np.asarray(rows), float(dx), float(dy), label=path.stem)


def write_heightmap(path, m: HeightMap) -> None:
    lines = ["# units: um", f"# dx={m.spacing_x!r}, dy={m.spacing_y!r}"]
    lines += [",".join(repr(v) for v in row) for row in m.grid.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# F-operator


def _poly_design(coords: list, order: int) -> np.ndarray:
    """Columns x^a·y^b with a+b <= order (coords normalized to [-1, 1])."""
    if len(coords) == 1:
        (x,) = coords
        return np.stack([x**a for a in range(order + 1)], axis=1)
    x, y = coords
    cols = [x**a * y**b for a in range(order + 1) for b in range(order + 1 - a)]
    return np.stack(cols, axis=1)


def _normalized_axis(n: int) -> np.ndarray:
    if n == 1:
        return np.zeros(1)
    return np.linspace(-1.0, 1.0, n)


def detrend(surface: Surface, order: int = 2) -> Surface:
    """Remove a least-squares polynomial of the given order (1 or 2).

    Height maps are fitted with one bivariate polynomial over the whole field.
    """
    if order not in (1, 2):
        raise ValidationError(f"detrend: order must be 1 or 2, got {order}")
    if isinstance(surface, Profile):
        z = surface.ordinates
        design = _poly_design([_normalized_axis(z.size)], order)
        coef, *_ = np.linalg.lstsq(design, z, rcond=None)
        return surface.with_ordinates(z - design @ coef)
    g = surface.grid
    ny, nx = g.shape
    yy, xx = np.meshgrid(_normalized_axis(ny), _normalized_axis(nx), indexing="ij")
    design = _poly_design([xx.ravel(), yy.ravel()], order)
    coef, *_ = np.linalg.lstsq(design, g.ravel(), rcond=None)
    return surface.with_grid((g.ravel() - design @ coef).reshape(g.shape))


# ---------------------------------------------------------------------------
# ideal S- and L-filters


def _spectral_truncate(surface: Surface, keep) -> np.ndarray:
    """Zero every Fourier component whose spatial frequency fails ``keep(|f|)``."""
    if isinstance(surface, Profile):
        z = surface.ordinates
        spec = np.fft.rfft(z)
        f = np.fft.rfftfreq(z.size, surface.spacing)
        spec[~keep(f)] = 0.0
        return np.fft.irfft(spec, n=z.size)
    g = surface.grid
    ny, nx = g.shape
    spec = np.fft.rfft2(g)
    fy = np.fft.fftfreq(ny, surface.spacing_y)[:, None]
    fx = np.fft.rfftfreq(nx, surface.spacing_x)[None, :]
    f = np.hypot(fx, fy)
    spec[~keep(f)] = 0.0
    return np.fft.irfft2(spec, s=g.shape)


def _min_spacing(surface: Surface) -> float:
    if isinstance(surface, Profile):
        return surface.spacing
    return max(surface.spacing_x, surface.spacing_y)


def _record_length(surface: Surface) -> float:
    if isinstance(surface, Profile):
        return surface.length_L
    ny, nx = surface.grid.shape
    return max((nx - 1) * surface.spacing_x, (ny - 1) * surface.spacing_y)


def _rebuild(surface: Surface, values: np.ndarray, band: EvaluationBand) -> Surface:
    if isinstance(surface, Profile):
        return surface.with_ordinates(values, band=band)
    return surface.with_grid(values, band=band)


def s_filter(surface: Surface, cutoff: float) -> Surface:
    """Ideal low-pass: drop all components with wavelength shorter than ``cutoff`` µm."""
    nyquist = 2.0 * _min_spacing(surface)
    if cutoff < nyquist * (1 - _CUTOFF_RTOL):
        raise ValidationError(f"s_filter: cutoff {cutoff} um is below the Nyquist limit {nyquist} um")
    if cutoff >= surface.band.lc:
        raise ValidationError(
            f"s_filter: cutoff {cutoff} um must stay below the band's lc = {surface.band.lc} um"
        )
    fmax = (1.0 / cutoff) * (1 + _CUTOFF_RTOL)
    values = _spectral_truncate(surface, lambda f: f <= fmax)
    return _rebuild(surface, values, EvaluationBand(cutoff, surface.band.lc))


def l_filter(surface: Surface, cutoff: float) -> Surface:
    """Ideal high-pass: drop the mean and all components with wavelength longer than ``cutoff`` µm."""
    length = _record_length(surface)
    if cutoff > length * (1 + _CUTOFF_RTOL):
        raise ValidationError(f"l_filter: cutoff {cutoff} um exceeds the record length {length} um")
    if cutoff <= surface.band.ls:
        raise ValidationError(
            f"l_filter: cutoff {cutoff} um must exceed the band's ls = {surface.band.ls} um"
        )
    fmin = (1.0 / cutoff) * (1 - _CUTOFF_RTOL)
    values = _spectral_truncate(surface, lambda f: (f >= fmin) & (f > 0))
    return _rebuild(surface, values, EvaluationBand(surface.band.ls, cutoff))


def extract_profile(m: HeightMap, row_index: int) -> Profile:
    ny = m.grid.shape[0]
    if not 0 <= row_index < ny:
        raise ValidationError(f"extract_profile: row {row_index} out of range [0, {ny})")
    label = f"{m.label}[row {row_index}]" if m.label else f"row {row_index}"
    return Profile(m.grid[row_index], m.spacing_x, band=m.band, label=label)
