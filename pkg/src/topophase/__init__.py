"""Phase-space and energy description of rough surface topography."""

__version__ = "0.1.0"

from .errors import InvariantError, TopophaseError, ValidationError
from .surface import (
    EvaluationBand,
    HeightMap,
    Profile,
    detrend,
    extract_profile,
    l_filter,
    load_heightmap,
    load_profile,
    s_filter,
)
from .synthesis import SpectralModel, fig6_pair, hurst_to_dimension, powerlaw_model, synthesize_profile
from .statistics import MomentSet, SlopeSeries, arc_area, gradient, moments, periodogram, plasticity_index
from .phasespace import (
    BetaWavefunction,
    PhasePortrait,
    build_portrait,
    class_count,
    entropy,
    fit_beta,
    joint_wavefunction,
    occupancy_entropy,
    phase_volume,
    scott_width,
    seewig_range,
    to_phase_points,
)
from .energetics import (
    EnergyReport,
    hamiltonian,
    kinetic_energy,
    lagrangian,
    mean_frequency,
    oscillator_hamiltonian,
    simulate_running_in,
    topographic_mass,
    void_potential,
)
from .scatter import AngularDistribution, ScatterMap, angle_distribution, aq, scatter_map
