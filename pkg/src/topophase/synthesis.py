"""
Random-phase Fourier synthesis of rough profiles.

A profile of ``N`` samples is built as

    z_i = sum_k A_k cos(2*pi*k*i/N - theta_k),   k = k_min .. k_max

so that wavenumber ``k`` completes ``k`` periods over the record. The
phases ``theta_k`` are uniform on [-pi, pi) and come from a Philox-4x64
counter-based generator keyed by the seed, with the counter set to ``k``.
Each phase therefore depends only on ``(seed, k)``: changing ``k_min`` or
``k_max`` does not reshuffle the phases of the remaining modes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ValidationError
from .surface import Profile


@dataclass(frozen=True)
class SpectralModel:
    """Amplitude table ``A_k`` (µm) for contiguous wavenumbers ``k_min..k_max``."""

    amplitudes: np.ndarray
    k_min: int
    k_max: int
    record_length: float
    hurst: Optional[float] = None
    embedded_dim: int = 2

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ValidationError(f"spectral model: need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if amps.shape != (self.k_max - self.k_min + 1,):
            raise ValidationError("spectral model: one amplitude per wavenumber k_min..k_max required")
        if not np.all(np.isfinite(amps)) or np.any(amps < 0):
            raise ValidationError("spectral model: amplitudes must be finite and non-negative")
        if not (self.record_length > 0):
            raise ValidationError("spectral model: record length must be positive")
        if self.hurst is not None and not 0 < self.hurst < 1:
            raise ValidationError(f"spectral model: Hurst exponent must lie in (0, 1), got {self.hurst}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def variance(self) -> float:
        """Expected mean-square height ``sum A_k^2 / 2``."""
        return float(np.sum(self.amplitudes**2) / 2.0)

    def amplitude(self, k: int) -> float:
        if self.k_min <= k <= self.k_max:
            return float(self.amplitudes[k - self.k_min])
        return 0.0


def hurst_to_dimension(hurst: float, embedded_dim: int = 2) -> float:
    """Fractal dimension ``D = E - H``."""
    if not 0 < hurst < 1:
        raise ValidationError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    if embedded_dim not in (2, 3):
        raise ValidationError(f"embedded dimension must be 2 or 3, got {embedded_dim}")
    return embedded_dim - hurst


def powerlaw_model(k_min: int, k_max: int, length: float, hurst: float, scale: float = 1.0) -> SpectralModel:
    """Self-affine amplitudes ``A_k = scale * k^-(H + 1/2)``, i.e. profile PSD ~ k^-(1+2H)."""
    if not 0 < hurst < 1:
        raise ValidationError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    if scale < 0:
        raise ValidationError(f"scale must be non-negative, got {scale}")
    if k_min < 1 or k_max < k_min:
        raise ValidationError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    k = np.arange(k_min, k_max + 1, dtype=float)
    return SpectralModel(scale * k ** -(hurst + 0.5), k_min, k_max, length, hurst=hurst)


def phase_table(seed: int, wavenumbers) -> np.ndarray:
    """Uniform phases on [-pi, pi) from Philox(key=seed mod 2^64, counter=k)."""
    key = int(seed) % 2**64
    ks = np.asarray(wavenumbers, dtype=np.int64).reshape(-1)
    if ks.size == 0:
        return np.empty(0)
    lo, hi = int(ks.min()), int(ks.max())
    if hi - lo < 1_000_000:
        # one Philox block (4 words) per counter value: the first word of
        # block k equals Philox(key, counter=k).random_raw()
        words = np.random.Philox(key=key, counter=lo).random_raw(4 * (hi - lo + 1))[::4]
        raw = words[ks - lo]
    else:
        raw = np.array([np.random.Philox(key=key, counter=int(k)).random_raw() for k in ks], dtype=np.uint64)
    return -np.pi + 2.0 * np.pi * ((raw >> np.uint64(11)).astype(float) * 2.0**-53)


def _cosine_series(n_points: int, wavenumbers, amplitudes, phases) -> np.ndarray:
    i = np.arange(n_points)
    k = np.asarray(wavenumbers, dtype=np.int64)
    # reduce k*i modulo N before scaling so the argument stays small and exact
    arg = 2.0 * np.pi * ((i[:, None] * k[None, :]) % n_points) / n_points - phases[None, :]
    return (np.asarray(amplitudes)[None, :] * np.cos(arg)).sum(axis=1)


def synthesize_profile(model: SpectralModel, n_points: int, seed: int, label: Optional[str] = None) -> Profile:
    """Draw one realization of ``model`` with ``n_points`` samples over ``model.record_length``."""
    if n_points < 2 * model.k_max + 1:
        raise ValidationError(
            f"Nyquist violation: k_max = {model.k_max} needs at least {2 * model.k_max + 1} points, got {n_points}"
        )
    phases = phase_table(seed, model.wavenumbers)
    z = _cosine_series(n_points, model.wavenumbers, model.amplitudes, phases)
    spacing = model.record_length / (n_points - 1)
    return Profile(z, spacing, label=label if label is not None else f"synth seed={seed}")


def fig6_pair(d: float, k_min: int, n_points: int, l: float = 1.0, length: Optional[float] = None):
    """Two zero-phase profiles with identical spectra and opposite sign.

    ``a = d cos((k_min-2) x) + sum_{k=k_min}^{k_max} (l/k) cos(k x)`` and
    ``b = -a``, with ``x = 2*pi*i/N`` and ``k_max = (N-1)//2``.
    """
    if k_min < 3:
        raise ValidationError(f"fig6_pair: k_min must be >= 3, got {k_min}")
    k_max = (n_points - 1) // 2
    if k_max < k_min:
        raise ValidationError(f"fig6_pair: n_points = {n_points} too small for k_min = {k_min}")
    ks = np.concatenate([[k_min - 2], np.arange(k_min, k_max + 1)])
    amps = np.concatenate([[d], l / np.arange(k_min, k_max + 1, dtype=float)])
    a = _cosine_series(n_points, ks, amps, np.zeros(ks.size))
    length = float(n_points - 1) if length is None else length
    spacing = length / (n_points - 1)
    return Profile(a, spacing, label="fig6 a"), Profile(-a, spacing, label="fig6 b")


# ---------------------------------------------------------------------------
# "k, A_k" CSV with metadata header


def write_spectral_model(path, model: SpectralModel) -> None:
    meta = f"# L={model.record_length!r}, k_min={model.k_min}, k_max={model.k_max}"
    if model.hurst is not None:
        meta += f", H={model.hurst!r}"
    lines = ["# units: um", meta, "# columns: k,A_k"]
    lines += [f"{k},{a!r}" for k, a in zip(model.wavenumbers.tolist(), model.amplitudes.tolist())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_spectral_model(path) -> SpectralModel:
    path = Path(path)
    meta = {}
    table = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(dict(re.findall(r"\b(L|k_min|k_max|H)\s*=\s*([0-9eE.+-]+)", line)))
            continue
        cells = [c for c in re.split(r"[,\s]+", line) if c]
        try:
            k, a = int(float(cells[0])), float(cells[1])
        except (ValueError, IndexError):
            raise ValidationError(f"{path}:{lineno}: expected 'k, A_k', got '{line}'")
        table[k] = a
    if "L" not in meta:
        raise ValidationError(f"{path}: missing '# L=...' header")
    if not table:
        raise ValidationError(f"{path}: no amplitude rows")
    k_min = int(meta.get("k_min", min(table)))
    k_max = int(meta.get("k_max", max(table)))
    amps = [table.get(k, 0.0) for k in range(k_min, k_max + 1)]
    hurst = float(meta["H"]) if "H" in meta else None
    return SpectralModel(np.asarray(amps), k_min, k_max, float(meta["L"]), hurst=hurst)
