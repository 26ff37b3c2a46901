"""Laser cooling of a three-level cascade atom driven by two lasers."""
from .bloch import (
    DensityMatrix,
    Generator,
    LaserConfig,
    SingularSteadyStateError,
    build_generator,
    populations,
    steady_state,
)
from .cooling import (
    ConvergenceError,
    CoolingReport,
    capture_range,
    cooling_rate,
    evolve_energy_full,
    evolve_energy_linear,
    heating_rate,
    rate_derivative_at_zero,
    temperature,
)
from .scattering import (
    RatePoint,
    RateProfile,
    absorption_spectrum,
    force_profile,
    rate_profile,
    rate_r1_obe,
    rate_r1_perturbative,
    rate_r2_obe,
)
from .species import DIPOLE, THREE_D, EmissionGeometry, Species, doppler_limit, load_species, natural_units

__version__ = "0.1.0"
