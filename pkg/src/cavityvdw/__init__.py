"""Two correlated atoms in a cavity: Green's tensors, mode couplings,
dressed-state energetics and van der Waals forces, with a deterministic
CLI for tabular sweeps."""

from .config import RunConfig, load_config
from .constants import C, EPS0, HBAR, MU0
from .dressed import (
    DressedSystem,
    Gradient,
    StepControl,
    SuperpositionAngle,
    coupling_angle,
    dressed_coefficients,
    eigenenergies,
    force_eigenstate,
    force_theta,
    grad_rabi,
    hamiltonian_matrix,
    potential_pm,
    potential_theta,
    rabi_frequency,
)
from .errors import ConfigError, DomainError, FitError, QuadratureError
from .greens import (
    ComplexDyad,
    FreeSpaceGreens,
    PlanarCavity,
    PlanarCavityGreens,
    QuadratureControl,
    SpectralFunction,
    free_space_green,
    free_space_im_green_coincident,
    kk_real_from_imag,
    planar_cavity_green,
    planar_resonant_im_gxx,
    planar_scattering_components,
)
from .modecoupling import (
    AtomSpec,
    LorentzianFit,
    ModeModel,
    coupling_strength_sq,
    fit_lorentzian,
    lorentzian_profile,
    mode_norm,
    mode_overlap,
)
from .planarcavity import (
    PlanarScenario,
    RabiBreakdown,
    cavity_mode_width,
    free_decay_rate,
    rabi_contributions,
    resonance_frequency,
    scan_rabi,
)
from .tabular import Table
from .weakfield import (
    NarrowModeGreens,
    ResonantPotentialBreakdown,
    free_space_resonant_potential,
    narrow_mode_real_contraction,
    resonant_potential,
    weak_limit_potentials,
    weak_theta_force,
    weak_theta_potential,
)

__all__ = [
    "AtomSpec",
    "C",
    "ComplexDyad",
    "ConfigError",
    "DomainError",
    "DressedSystem",
    "EPS0",
    "FitError",
    "FreeSpaceGreens",
    "Gradient",
    "HBAR",
    "LorentzianFit",
    "MU0",
    "ModeModel",
    "NarrowModeGreens",
    "PlanarCavity",
    "PlanarCavityGreens",
    "PlanarScenario",
    "QuadratureControl",
    "QuadratureError",
    "RabiBreakdown",
    "ResonantPotentialBreakdown",
    "RunConfig",
    "SpectralFunction",
    "StepControl",
    "SuperpositionAngle",
    "Table",
    "cavity_mode_width",
    "coupling_angle",
    "coupling_strength_sq",
    "dressed_coefficients",
    "eigenenergies",
    "fit_lorentzian",
    "force_eigenstate",
    "force_theta",
    "free_decay_rate",
    "free_space_green",
    "free_space_im_green_coincident",
    "free_space_resonant_potential",
    "grad_rabi",
    "hamiltonian_matrix",
    "kk_real_from_imag",
    "load_config",
    "lorentzian_profile",
    "mode_norm",
    "mode_overlap",
    "narrow_mode_real_contraction",
    "planar_cavity_green",
    "planar_resonant_im_gxx",
    "planar_scattering_components",
    "potential_pm",
    "potential_theta",
    "rabi_contributions",
    "rabi_frequency",
    "resonance_frequency",
    "resonant_potential",
    "scan_rabi",
    "weak_limit_potentials",
    "weak_theta_force",
    "weak_theta_potential",
]
