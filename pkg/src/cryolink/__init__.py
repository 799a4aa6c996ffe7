"""Gaussian-state models of cryogenic and open-air quantum microwave links."""

from .channels import (
    ConvergenceError,
    GradedWaveguide,
    WaveguideProfile,
    WaveguideSegment,
    compose_loss,
    continuous_stage,
    loss_channel,
    planck_occupation,
    waveguide_channel,
    waveguide_continuous,
)
from .gaussian import (
    GaussianState,
    PhysicalityError,
    coherent_state,
    log_negativity,
    mean_photon_number,
    symplectic_eigenvalues,
    thermal_state,
    tmsv_state,
    vacuum_state,
)
from .linkbudget import (
    AtmosphereTable,
    LinkGeometry,
    antenna_gain_db,
    free_space_path_loss_db,
    impedance_reflection,
    link_budget,
    total_link_loss_db,
)
from .protocols import (
    IlluminationScenario,
    TeleportResource,
    qcb_exponent_numeric,
    qi_advantage_db,
    qi_error_exponent,
    teleport_added_noise,
    teleport_fidelity,
)
from .scenario import ConfigError, Report, ScenarioConfig, emit_attenuation_curve, load_config, reproduce_table1, run_scenario

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "GradedWaveguide",
    "WaveguideProfile",
    "WaveguideSegment",
    "compose_loss",
    "continuous_stage",
    "loss_channel",
    "planck_occupation",
    "waveguide_channel",
    "waveguide_continuous",
    "GaussianState",
    "PhysicalityError",
    "coherent_state",
    "log_negativity",
    "mean_photon_number",
    "symplectic_eigenvalues",
    "thermal_state",
    "tmsv_state",
    "vacuum_state",
    "AtmosphereTable",
    "LinkGeometry",
    "antenna_gain_db",
    "free_space_path_loss_db",
    "impedance_reflection",
    "link_budget",
    "total_link_loss_db",
    "IlluminationScenario",
    "TeleportResource",
    "qcb_exponent_numeric",
    "qi_advantage_db",
    "qi_error_exponent",
    "teleport_added_noise",
    "teleport_fidelity",
    "ConfigError",
    "Report",
    "ScenarioConfig",
    "emit_attenuation_curve",
    "load_config",
    "reproduce_table1",
    "run_scenario",
]
