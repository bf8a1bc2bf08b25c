import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import cosine_profile, powerlaw_profile
from topophase.energetics import (
    hamiltonian,
    kinetic_energy,
    lagrangian,
    mean_frequency,
    oscillator_hamiltonian,
    simulate_running_in,
    topographic_mass,
    trajectory_is_monotone,
    void_potential,
)
from topophase.errors import ValidationError
from topophase.phasespace import build_portrait, to_phase_points
from topophase.statistics import arc_area, gradient, moments, periodogram
from topophase.surface import Profile
from topophase.synthesis import SpectralModel, fig6_pair


def zero_mean(z):
    z = np.asarray(z, dtype=float)
    return z - z.mean()


# ---------------------------------------------------------------- kinetic


def test_kinetic_flat_and_ramp():
    assert kinetic_energy(Profile(np.zeros(10), 1.0)) == 0.0
    assert kinetic_energy(Profile(np.arange(10.0) * 0.5, 0.5), m=2.0) == 1.0


def test_kinetic_cosine():
    p = cosine_profile(1.0, 10.0, 0.01, periods=10)
    assert kinetic_energy(p) == pytest.approx(0.5 * (math.sqrt(2) * math.pi / 10) ** 2, abs=1e-3)


def test_kinetic_rejects_mass():
    with pytest.raises(ValidationError):
        kinetic_energy(Profile(np.zeros(5), 1.0), m=0.0)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 30, elements=st.floats(-10, 10)), st.floats(-5, 5))
def test_kinetic_quadratic_scaling(z, a):
    k = kinetic_energy(Profile(z, 0.3))
    assert kinetic_energy(Profile(a * z, 0.3)) == pytest.approx(a * a * k, rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------- void potential


def test_void_flat():
    assert void_potential(Profile(np.zeros(8), 1.0)) == (0.0, 0.0)


def test_void_closed_form(rng):
    z = zero_mean(rng.normal(size=257))
    p = Profile(z, 1.25)
    b, z_max = void_potential(p, xi=2.0)
    # oracle: plain left-to-right loop over every ordinate
    total = 0.0
    for v in z.tolist():
        total += v - z_max
    assert b == pytest.approx(2.0 * total * 1.25, rel=1e-12)
    assert b == pytest.approx(-2.0 * z.size * z_max * 1.25, rel=1e-12)
    assert b <= 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(5, 300))
def test_void_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    z = zero_mean(rng.normal(size=n))
    b, _ = void_potential(Profile(z, 0.5))
    assert void_potential(Profile(rng.permutation(z), 0.5))[0] == b


def test_void_rejects_offset():
    with pytest.raises(ValidationError, match="l_filter"):
        void_potential(Profile(np.arange(5.0), 1.0))


# ---------------------------------------------------------------- Lagrangian / Hamiltonian


def test_flat_energies():
    rep = hamiltonian(Profile(np.zeros(9), 1.0))
    assert (rep.kinetic, rep.potential, rep.lagrangian, rep.hamiltonian) == (0.0, 0.0, 0.0, 0.0)


def test_energy_arithmetic(rng):
    rep = lagrangian(Profile(zero_mean(rng.normal(size=64)), 1.0), m=1.5, xi=0.7)
    u = -rep.potential
    assert rep.void_energy == u > 0
    assert rep.lagrangian == pytest.approx(rep.kinetic - u, rel=1e-12)
    assert rep.hamiltonian == pytest.approx(rep.kinetic + u, rel=1e-12)
    assert rep.hamiltonian - rep.lagrangian == pytest.approx(2 * u, rel=1e-12)


def test_fig6_pair_energies():
    a, b = fig6_pair(1.0, 8, 512)
    ea, eb = lagrangian(a), lagrangian(b)
    assert ea.kinetic == eb.kinetic
    assert ea.zeta_max != eb.zeta_max
    assert abs(ea.potential) != abs(eb.potential)
    assert ea.lagrangian != eb.lagrangian


def test_momentum_velocity_identity(rng):
    p = Profile(zero_mean(rng.normal(size=100)), 0.4)
    qdot = gradient(p).values
    assert np.mean(2.0 * qdot * qdot) == pytest.approx(2 * kinetic_energy(p, 2.0), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(0.1, 10))
def test_legendre_consistency(seed, m, xi):
    z = zero_mean(np.random.default_rng(seed).normal(size=128))
    rep = hamiltonian(Profile(z, 1.25), m, xi)
    assert rep.hamiltonian >= rep.kinetic >= 0


def test_run_in_lowers_hamiltonian():
    steps = simulate_running_in(powerlaw_profile(11), 5, 0.6)
    assert hamiltonian(steps[-1].profile).hamiltonian < hamiltonian(steps[0].profile).hamiltonian


# ---------------------------------------------------------------- oscillator ensemble


def test_oscillator_trivial():
    assert oscillator_hamiltonian(np.zeros((5, 2))) == 0.0
    assert oscillator_hamiltonian([[1.0, 0.0]], m=1.0, omega=1.0) == 1.0
    with pytest.raises(ValidationError):
        oscillator_hamiltonian([[1.0, 0.0]], m=0.0)


def test_oscillator_energy_constant_on_cosine():
    lam = 10.0
    k = 2 * math.pi / lam
    pts = to_phase_points(cosine_profile(1.0, lam, 0.01))
    # the factor 2 on the q term balances p^2 only when omega = k / sqrt(2)
    omega = k / math.sqrt(2)
    e = np.array([oscillator_hamiltonian(pt, omega=omega) for pt in pts])
    assert np.max(np.abs(e / e.mean() - 1)) < 1e-3
    literal = np.array([oscillator_hamiltonian(pt, omega=k) for pt in pts])
    assert np.max(np.abs(literal / literal.mean() - 1)) > 0.1


# ---------------------------------------------------------------- mass and frequency


def test_topographic_mass():
    assert topographic_mass(2 * math.pi, 1.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert topographic_mass(0.1, 0.2, 3.0, 2.0) == pytest.approx(topographic_mass(0.1, 0.2, 3.0, 1.0) / 4)
    with pytest.raises(ValidationError):
        topographic_mass(0.1, 0.2, 3.0, 0.0)


def test_topographic_mass_worked_case():
    p = powerlaw_profile(5, scale=1.0)
    z = p.ordinates / np.std(p.ordinates) * 0.38
    p = Profile(z, 1.25)
    port = build_portrait(to_phase_points(p))
    omega_bar = mean_frequency(periodogram(p))
    m = topographic_mass(port.dq, port.dp, omega_bar, c=1.0)
    hand = port.dq * port.dp * omega_bar / (2 * 3.141592653589793 * 1.0 * 1.0)
    assert 0 < m < math.inf
    assert m == pytest.approx(hand, rel=1e-15)


def test_mean_frequency():
    assert mean_frequency(SpectralModel([1.0], 5, 5, 2 * math.pi * 5)) == pytest.approx(1.0, rel=1e-15)
    two = SpectralModel([1.0, 0, 0, 0, 1.0], 3, 7, 50.0)
    assert mean_frequency(two) == pytest.approx(0.5 * (2 * math.pi * 3 / 50 + 2 * math.pi * 7 / 50), rel=1e-14)
    ks = range(8, 129)
    amps = [1.0 / k for k in ks]
    num = sum(2 * math.pi * k / 640.0 * a * a for k, a in zip(ks, amps))
    den = sum(a * a for a in amps)
    assert mean_frequency(SpectralModel(amps, 8, 128, 640.0)) == pytest.approx(num / den, rel=1e-9)
    with pytest.raises(ValidationError):
        mean_frequency(SpectralModel([0.0, 0.0], 1, 2, 1.0))


# ---------------------------------------------------------------- running-in


def test_full_bearing_fraction_is_identity():
    p = powerlaw_profile(2)
    steps = simulate_running_in(p, 4, 1.0)
    assert len(steps) == 5
    for s in steps:
        assert np.array_equal(s.profile.ordinates, p.ordinates)
        assert s.removed_volume == 0.0 and s.shift == 0.0


def test_single_spike_clamped():
    z = np.r_[np.full(9, -1.0), 9.0]
    steps = simulate_running_in(Profile(z, 1.0), 1, 0.9)
    last = steps[-1]
    assert last.plane == -1.0
    np.testing.assert_array_equal(last.profile.ordinates - last.shift, np.full(10, -1.0))
    assert last.removed_volume == 10.0
    assert abs(last.profile.ordinates.mean()) < 1e-15


def test_run_in_trajectory():
    steps = simulate_running_in(powerlaw_profile(17), 5, 0.6)
    profiles = [s.profile for s in steps]
    first = build_portrait(to_phase_points(profiles[0]))
    portraits = [build_portrait(to_phase_points(p)) for p in profiles]
    for series in (
        [moments(p.ordinates).rms for p in profiles],
        [gradient(p).rms_slope for p in profiles],
        [arc_area(p).value for p in profiles],
        [q.omega for q in portraits],
        [q.entropy for q in portraits],
        [hamiltonian(p).hamiltonian for p in profiles],
    ):
        assert trajectory_is_monotone(series)
    skews = [moments(p.ordinates).skewness for p in profiles]
    assert trajectory_is_monotone(skews, strict=True)
    assert skews[-1] < 0
    assert [s.removed_volume for s in steps] == sorted(s.removed_volume for s in steps)
    assert first.omega > portraits[-1].omega


def test_run_in_rejections():
    p = powerlaw_profile(1)
    for steps, f in ((0, 0.5), (3, 0.0), (3, 1.5)):
        with pytest.raises(ValidationError):
            simulate_running_in(p, steps, f)


def test_trajectory_helper():
    assert trajectory_is_monotone([3, 2, 2, 1])
    assert not trajectory_is_monotone([3, 2, 2, 1], strict=True)
    assert not trajectory_is_monotone([1, 2])
