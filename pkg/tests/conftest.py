import numpy as np
import pytest

from topophase.surface import Profile
from topophase.synthesis import powerlaw_model, synthesize_profile

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def cosine_profile(amplitude=1.0, wavelength=10.0, spacing=0.01, periods=1, phase=0.0):
    """Cosine sampled over an integer number of periods (FFT-periodic record)."""
    n = int(round(periods * wavelength / spacing))
    x = np.arange(n) * spacing
    return Profile(amplitude * np.cos(2 * np.pi * x / wavelength + phase), spacing)


def powerlaw_profile(seed, hurst=0.5, n=512, k_min=8, k_max=128, scale=1.0, spacing=1.25):
    model = powerlaw_model(k_min, k_max, (n - 1) * spacing, hurst, scale)
    return synthesize_profile(model, n, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
