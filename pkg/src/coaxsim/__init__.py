"""Desk-scale simulator and characterization pipeline for a dispersively
coupled transmon-resonator unit cell."""

from .params import (
    CircuitNetwork,
    DeviceParams,
    DerivedParams,
    derived_quantities,
    reference_device,
)
from .circuit import brute_force_spectrum, quantize_circuit
from .dispersive import chi_from_params, g_from_chi, mixed_state_response, steady_state_response
from .dynamics import (
    CavityBlochState,
    IQTrace,
    ReadoutDrive,
    ReadoutPulse,
    extract_population,
    integrate_cavity_bloch,
    lindblad_reference,
    measurement_trace,
)
from .transmon import (
    TransmonLevels,
    diagonalize_transmon,
    invert_spectroscopy,
    perturbative_levels,
    transition_frequencies,
)
from .experiments import ExperimentConfig, synthesize
from .benchmarking import (
    build_clifford_group,
    fit_rb,
    rb_sequence,
    simulate_rb,
    simulate_thermometry,
    temperature_bound,
)
from .characterize import run_characterization

__version__ = "0.1.0"

__all__ = [
    "CircuitNetwork",
    "DeviceParams",
    "DerivedParams",
    "derived_quantities",
    "reference_device",
    "brute_force_spectrum",
    "quantize_circuit",
    "chi_from_params",
    "g_from_chi",
    "mixed_state_response",
    "steady_state_response",
    "CavityBlochState",
    "IQTrace",
    "ReadoutDrive",
    "ReadoutPulse",
    "extract_population",
    "integrate_cavity_bloch",
    "lindblad_reference",
    "measurement_trace",
    "TransmonLevels",
    "diagonalize_transmon",
    "invert_spectroscopy",
    "perturbative_levels",
    "transition_frequencies",
    "ExperimentConfig",
    "synthesize",
    "build_clifford_group",
    "fit_rb",
    "rb_sequence",
    "simulate_rb",
    "simulate_thermometry",
    "temperature_bound",
    "run_characterization",
    "__version__",
]
