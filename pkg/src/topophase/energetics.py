"""
Topographic energies of a profile and a plastic running-in simulator.

Energies are in consistent derived units (µm based) with the mass ``m`` and
the load ``xi`` as dimensionless scale factors; only ratios and trajectories
are meaningful.

The void-volume potential is evaluated literally as
``B = xi * sum_i (z_i - z_max) * dr``, which is never positive. Its
magnitude ``U = -B`` (void volume times load) is the potential energy that
enters the Lagrangian ``L_T = K - U`` and the Hamiltonian ``H = K + U``, so
that filling voids and flattening slopes both lower ``H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import InvariantError, ValidationError
from .statistics import central_slopes
from .surface import Profile
from .synthesis import SpectralModel

_LEGENDRE_RTOL = 1e-12


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    potential: float
    void_energy: float
    lagrangian: float
    hamiltonian: float
    mass: float
    xi: float
    zeta_max: float
    omega_bar: Optional[float] = None


def kinetic_energy(profile: Profile, m: float = 1.0) -> float:
    """Mean of ``m/2 * slope^2`` over the interior points."""
    if not m > 0:
        raise ValidationError(f"kinetic_energy: mass must be positive, got {m}")
    s = central_slopes(profile.ordinates, profile.spacing)
    return float(np.mean(0.5 * m * s**2))


def _require_zero_mean(z: np.ndarray, what: str) -> None:
    mean = float(np.mean(z))
    rms = float(np.sqrt(np.mean(z**2)))
    if abs(mean) > 1e-6 * rms and abs(mean) > 1e-300:
        raise ValidationError(f"{what}: profile mean {mean:.3g} um is not zero; apply l_filter first")


def void_potential(profile: Profile, xi: float = 1.0):
    """Return ``(B, z_max)`` with ``B = xi * sum (z_i - z_max) * dr`` over all ordinates.

    The sum is exactly rounded, so ``B`` does not depend on the order of
    the ordinates.
    """
    if not xi > 0:
        raise ValidationError(f"void_potential: load xi must be positive, got {xi}")
    z = profile.ordinates
    _require_zero_mean(z, "void_potential")
    z_max = float(z.max())
    b = xi * math.fsum((z - z_max).tolist()) * profile.spacing
    return b, z_max


def lagrangian(profile: Profile, m: float = 1.0, xi: float = 1.0) -> EnergyReport:
    k = kinetic_energy(profile, m)
    b, z_max = void_potential(profile, xi)
    u = -b
    return EnergyReport(k, b, u, k - u, k + u, m, xi, z_max)


def hamiltonian(profile: Profile, m: float = 1.0, xi: float = 1.0, omega_bar: Optional[float] = None) -> EnergyReport:
    """Energy report with ``H`` computed as ``K + U`` and cross-checked as ``<p qdot> - L_T``."""
    rep = lagrangian(profile, m, xi)
    qdot = central_slopes(profile.ordinates, profile.spacing)
    momentum = m * qdot
    legendre = float(np.mean(momentum * qdot)) - rep.lagrangian
    scale = max(abs(rep.hamiltonian), rep.kinetic, rep.void_energy, 1e-300)
    if abs(legendre - rep.hamiltonian) > _LEGENDRE_RTOL * scale:
        raise InvariantError(f"Legendre check failed: K+U = {rep.hamiltonian!r}, <p qdot> - L = {legendre!r}")
    if omega_bar is not None:
        rep = EnergyReport(**{**rep.__dict__, "omega_bar": omega_bar})
    return rep


def oscillator_hamiltonian(points, m: float = 1.0, omega: float = 1.0) -> float:
    """``(1/2m) * (sum p^2 + 2 omega^2 sum q^2)`` over ``(q, p)`` points."""
    if not m > 0:
        raise ValidationError(f"oscillator_hamiltonian: mass must be positive, got {m}")
    if omega < 0:
        raise ValidationError(f"oscillator_hamiltonian: omega must be non-negative, got {omega}")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    q, p = pts[:, 0], pts[:, 1]
    return float((np.sum(p**2) + 2.0 * omega**2 * np.sum(q**2)) / (2.0 * m))


def topographic_mass(dq: float, dp: float, omega_bar: float, c: float) -> float:
    """``m = (dq*dp) * omega_bar / (2 pi c^2)`` with the cell ``dq*dp`` as quantum of action."""
    for name, v in (("dq", dq), ("dp", dp), ("omega_bar", omega_bar), ("c", c)):
        if not v > 0:
            raise ValidationError(f"topographic_mass: {name} must be positive, got {v}")
    return dq * dp * omega_bar / (2.0 * math.pi * c**2)


def mean_frequency(spec: SpectralModel) -> float:
    """Power-weighted mean angular wavenumber ``sum (2 pi k / L) A_k^2 / sum A_k^2`` in rad/µm."""
    power = spec.amplitudes**2
    total = float(power.sum())
    if total <= 0:
        raise ValidationError("mean_frequency: spectrum has no power")
    w = 2.0 * math.pi * spec.wavenumbers / spec.record_length
    return float(np.sum(w * power) / total)


# ---------------------------------------------------------------------------
# running-in


@dataclass(frozen=True)
class RunInStep:
    step: int
    profile: Profile
    plane: float
    removed_volume: float
    shift: float


def simulate_running_in(profile: Profile, steps: int, final_bearing_fraction: float) -> List[RunInStep]:
    """Progressive plastic flattening of the highest asperities.

    At step ``s`` a cutting plane sits at the height below which a fraction
    ``1 - (1 - f) * s / steps`` of the original ordinates lie, ``f`` being
    ``final_bearing_fraction``: ``f = 1`` leaves the profile untouched,
    ``f = 0.6`` flattens the top 40 % of the samples by the last step.
    Ordinates above the plane are clamped onto it; the removed volume
    (µm², per unit width) is reported and every step is re-centred to zero
    mean, the applied shift being recorded. Step 0 is the input.
    """
    if steps < 1:
        raise ValidationError(f"running-in: steps must be >= 1, got {steps}")
    if not 0 < final_bearing_fraction <= 1:
        raise ValidationError(f"running-in: bearing fraction must lie in (0, 1], got {final_bearing_fraction}")
    z0 = profile.ordinates
    n = z0.size
    ordered = np.sort(z0)
    out = [RunInStep(0, profile, float(ordered[-1]), 0.0, 0.0)]
    for s in range(1, steps + 1):
        below = 1.0 - (1.0 - final_bearing_fraction) * s / steps
        idx = min(n - 1, max(0, math.ceil(below * n - 1e-9) - 1))
        plane = float(ordered[idx])
        cut = np.minimum(z0, plane)
        removed = float(np.sum(z0 - cut) * profile.spacing)
        # nothing flattened: keep the input bit-for-bit
        shift = -float(np.mean(cut)) if removed > 0 else 0.0
        label = f"{profile.label} run-in {s}/{steps}".strip()
        out.append(RunInStep(s, profile.with_ordinates(cut + shift, label=label), plane, removed, shift))
    return out


def trajectory_is_monotone(values: Sequence[float], strict: bool = False, rtol: float = 1e-12) -> bool:
    """True when ``values`` never increase (by more than ``rtol`` relative)."""
    for a, b in zip(values, values[1:]):
        slack = rtol * max(abs(a), abs(b))
        if strict and not b < a:
            return False
        if b > a + slack:
            return False
    return True
