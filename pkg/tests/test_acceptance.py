"""
Acceptance suite: one test per criterion. Each test records a one-line
verdict that the terminal summary prints as PASS/FAIL.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE, cosine_profile
from golden_cases import run_all
from topophase.energetics import hamiltonian, kinetic_energy, simulate_running_in, trajectory_is_monotone
from topophase.phasespace import (
    SCOTT_EPSILON,
    BetaWavefunction,
    build_portrait,
    class_count,
    fit_beta,
    joint_wavefunction,
    occupancy_entropy,
    phase_volume,
    scott_width,
    seewig_range,
    to_phase_points,
)
from topophase.pipeline import AnalysisConfig, analyze, preprocess
from topophase.scatter import AQ_K, angle_distribution, angles_distribution, aq, distribution_from_counts
from topophase.statistics import arc_area, gradient, moments, periodogram
from topophase.surface import HeightMap, Profile, load_heightmap, write_heightmap
from topophase.synthesis import fig6_pair, powerlaw_model, synthesize_profile

GOLDEN = Path(__file__).parent / "golden"


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, detail


def synth(seed, hurst=0.5, n=512, k_min=8, k_max=128, scale=1.0):
    return synthesize_profile(powerlaw_model(k_min, k_max, (n - 1) * 1.25, hurst, scale), n, seed)


def test_criterion_01_binning_reproduction():
    t0 = time.perf_counter()
    cw = scott_width(0.38, 3200)
    rng_ = seewig_range(0.38, 3200)
    classes = class_count(rng_, cw)
    elapsed = time.perf_counter() - t0
    ok = abs(cw - 0.090) <= 0.001 and abs(rng_ / 3.04 - 1) <= 0.015 and abs(classes - 34) <= 1 and elapsed < 0.1
    record("1 binning", ok, f"cw={cw:.5f} um, range={rng_:.4f} um, classes={classes}, {elapsed * 1e3:.2f} ms")


def test_criterion_02_field_arithmetic(tmp_path):
    n = int(round(320 / 1.25))
    write_heightmap(tmp_path / "field.csv", HeightMap(np.zeros((n, n)), 1.25, 1.25))
    m = load_heightmap(tmp_path / "field.csv")
    ok = m.size == 65536 and m.field_size == (320.0, 320.0)
    record("2 field", ok, f"{m.shape[1]} x {m.shape[0]} grid, {m.size} points, field {m.field_size} um")


def test_criterion_03_parseval_suite():
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for hurst in (0.3, 0.5, 0.8):
        model = powerlaw_model(8, 128, 511 * 1.25, hurst)
        expected = math.fsum((a * a / 2 for a in model.amplitudes.tolist()))
        for seed in range(50):
            z = synthesize_profile(model, 512, seed).ordinates
            worst = max(worst, abs(np.mean(z**2) / expected - 1))
            cases += 1
    elapsed = time.perf_counter() - t0
    record("3 parseval", worst <= 1e-6 and elapsed < 1.0,
           f"{cases} syntheses, worst relative error {worst:.2e}, {elapsed:.2f} s")


def test_criterion_04_inverted_pair():
    t0 = time.perf_counter()
    a, b = fig6_pair(1.0, 8, 512)
    exact = np.array_equal(b.ordinates, -a.ordinates)
    psd = float(np.max(np.abs(periodogram(a).amplitudes ** 2 - periodogram(b).amplitudes ** 2)))
    la, lb = arc_area(a).value, arc_area(b).value
    sa, sb = moments(a.ordinates).skewness, moments(b.ordinates).skewness
    ka, kb = kinetic_energy(a), kinetic_energy(b)
    ba, bb = hamiltonian(a).potential, hamiltonian(b).potential
    elapsed = time.perf_counter() - t0
    ok = (
        exact and psd <= 1e-10 and abs(la - lb) <= 1e-12 * la and sa == pytest.approx(-sb, rel=1e-12)
        and ka == kb and ba != bb and elapsed < 1.0
    )
    record("4 inverted pair", ok,
           f"b=-a {exact}, PSD diff {psd:.1e}, skew {sa:.4f}/{sb:.4f}, K {ka:.6g}={kb:.6g}, B {ba:.6g} vs {bb:.6g}")


def test_criterion_05_legendre_identity():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        if seed % 2:
            z = rng.normal(size=int(rng.integers(16, 1024))) * rng.uniform(0.01, 5)
        else:
            z = synth(seed, hurst=rng.uniform(0.1, 0.9)).ordinates
        z = z - z.mean()
        p = Profile(z, float(rng.uniform(0.1, 2.0)))
        m, xi = float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10))
        rep = hamiltonian(p, m, xi)  # raises on an internal mismatch
        qdot = gradient(p).values
        legendre = float(np.mean(m * qdot * qdot)) - rep.lagrangian
        worst = max(worst, abs(legendre - rep.hamiltonian) / abs(rep.hamiltonian))
    record("5 legendre", worst <= 1e-12, f"100 profiles, worst relative gap {worst:.2e}")


def test_criterion_06_running_in_monotonicity():
    t0 = time.perf_counter()
    cfg = AnalysisConfig()
    failures = []
    for seed in range(20):
        hurst = (0.3, 0.5, 0.8)[seed % 3]
        start = preprocess(synth(seed, hurst=hurst), cfg)
        steps = simulate_running_in(start, 5, 0.6)
        first = analyze(steps[0].profile, cfg)
        shared = first.portrait.binning
        runs = [first] + [analyze(s.profile, cfg, binning=shared) for s in steps[1:]]
        own_occ = [occupancy_entropy(r.portrait)[0] for r in runs]
        series = {
            "sigma": [r.heights.rms for r in runs],
            "rdq": [r.rms_slope for r in runs],
            "omega": [r.portrait.omega for r in runs],
            "S": [r.portrait.entropy for r in runs],
            "S_occ": [r.occupancy[0] for r in runs],
            "S_occ_own": own_occ,
            "H": [r.energy.hamiltonian for r in runs],
        }
        bad = [k for k, v in series.items() if not trajectory_is_monotone(v)]
        if not runs[-1].heights.skewness < runs[0].heights.skewness:
            bad.append("skew")
        if bad:
            failures.append((seed, bad))
    elapsed = time.perf_counter() - t0
    record("6 running-in", not failures and elapsed < 5.0,
           f"20 surfaces x 5 steps, failures {failures or 'none'}, {elapsed:.2f} s")


def test_criterion_07_aq_calibration_and_identity():
    uniform = aq(distribution_from_counts(np.ones(161), 0, 8.0))
    # every bin equally filled by evenly spread facet angles
    sampled = aq(angles_distribution(np.linspace(-8, 8, 161 * 200, endpoint=False) + 8 / (161 * 200)))
    worst = 0.0
    for seed in range(20):
        target = 0.005 + 0.0045 * seed  # 0.005 .. 0.0905 rad
        p = synth(seed, hurst=(0.3, 0.5, 0.8)[seed % 3])
        p = Profile(p.ordinates * target / gradient(p).rms_slope, p.spacing)
        rdq = gradient(p).rms_slope
        # a +-30 degree detector keeps the widest of these slope spreads unclipped
        dist = angle_distribution(p, 601, 30.0)
        assert dist.clipped_fraction == 0.0
        worst = max(worst, abs(aq(dist) / (4 * AQ_K * math.degrees(rdq) ** 2) - 1))
    ok = abs(uniform - 100) <= 0.5 and abs(sampled - 100) <= 0.5 and worst <= 0.05
    record("7 aq", ok, f"uniform Aq {uniform:.3f} (sampled {sampled:.3f}), worst identity gap {worst:.2%}")


def _test_profiles():
    out = [synth(seed, hurst=h) for seed in range(10) for h in (0.3, 0.8)]
    out += list(fig6_pair(1.0, 8, 512))
    c = cosine_profile(1.0, 10.0, 0.05, periods=4)
    out.append(Profile(c.ordinates - c.ordinates.mean(), c.spacing))
    out += [s.profile for s in simulate_running_in(synth(3), 5, 0.6)]
    return out


def test_criterion_08_phase_volume_closed_form():
    worst = 0.0
    shrink_ok = True
    profiles = _test_profiles()
    for i, p in enumerate(profiles):
        pts = to_phase_points(p)
        port = build_portrait(pts)
        n = pts.shape[0]
        closed = SCOTT_EPSILON**2 * port.sigma_q * port.sigma_p * n ** (1 / 3)
        worst = max(worst, abs(phase_volume(port) / closed - 1))
        a, b = 0.5 + 0.4 * ((i * 7) % 10) / 10, 0.5 + 0.4 * ((i * 3) % 10) / 10
        shrink_ok &= build_portrait(pts * [a, b]).entropy < port.entropy
    record("8 phase volume", worst <= 1e-9 and shrink_ok,
           f"{len(profiles)} profiles, worst closed-form gap {worst:.1e}, entropy decreased on shrink: {shrink_ok}")


def test_criterion_09_beta_wavefunction():
    shapes = [(1.0, 1.0), (2.0, 2.0), (2.0, 5.0)]
    gp = np.linspace(-0.3, 0.3, 201)
    gq = np.linspace(-1.5, 2.5, 201)
    worst_int = 0.0
    for ap, bp in shapes:
        for aq_, bq in shapes:
            w = BetaWavefunction(ap, bp, aq_, bq, support_p=(-0.3, 0.3), support_q=(-1.5, 2.5))
            psi = joint_wavefunction(w, gp, gq)
            total = np.trapezoid(np.trapezoid(psi, gq, axis=1), gp)
            worst_int = max(worst_int, abs(total - 1))
    rng = np.random.default_rng(2024)
    worst_fit = 0.0
    for a, b in shapes:
        fa, fb = fit_beta(rng.beta(a, b, 100_000), (0.0, 1.0))
        worst_fit = max(worst_fit, abs(fa / a - 1), abs(fb / b - 1))
    record("9 wavefunction", worst_int <= 1e-3 and worst_fit <= 0.05,
           f"9 shape pairs, worst integral gap {worst_int:.1e}; worst fit error {worst_fit:.2%}")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    first = run_all(tmp_path / "run1")
    second = run_all(tmp_path / "run2")
    capsys.readouterr()
    rerun_same = first == second
    golden = {p.name: p.read_bytes() for p in sorted(GOLDEN.iterdir()) if p.is_file()}
    differing = sorted(k for k in golden.keys() | first.keys() if golden.get(k) != first.get(k))
    record("10 determinism", rerun_same and not differing,
           f"{len(first)} output files, reruns identical: {rerun_same}, golden mismatches: {differing or 'none'}")
