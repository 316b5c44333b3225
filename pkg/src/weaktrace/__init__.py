"""Single-photon interference in beam-splitter networks: path amplitudes,
weak values, exact Gaussian pointer readings, and multiplexed weak-trace
spectra with arm-blocking counterfactuals."""

from . import errors
from .netgraph import (
    Arm,
    Modulation,
    Network,
    Node,
    apply_block,
    build_network,
    hadamard,
    set_modulation,
    set_transmission,
    standard_nested_mzi,
)
from .pathsum import (
    Path,
    PathEnsemble,
    arm_input_amplitudes,
    detection_probability,
    enumerate_paths,
    propagate,
    terminal_amplitudes,
)
from .randomnet import random_layered_network, random_unitary_2x2
from .reports import VERSION as __version__
from .scenario import Scenario, build_scenario_network, parse_scenario, scenario_doc
from .spectra import (
    BlockingSuite,
    ModulationPlan,
    NoiseModel,
    SiteModulation,
    SpectralReport,
    default_plan,
    plan_from_network,
    readout_timeseries,
    run_blocking_suite,
    run_spectral_experiment,
    spectrum,
)
from .weakval import (
    PointerModel,
    pointer_profile,
    pointer_shift_exact,
    pointer_shift_weak,
    projector_weak_value,
    relative_amplitudes,
    weak_observable,
    weak_values,
)

__all__ = [
    "errors",
    "Arm",
    "Modulation",
    "Network",
    "Node",
    "apply_block",
    "build_network",
    "hadamard",
    "set_modulation",
    "set_transmission",
    "standard_nested_mzi",
    "Path",
    "PathEnsemble",
    "arm_input_amplitudes",
    "detection_probability",
    "enumerate_paths",
    "propagate",
    "terminal_amplitudes",
    "random_layered_network",
    "random_unitary_2x2",
    "Scenario",
    "build_scenario_network",
    "parse_scenario",
    "scenario_doc",
    "BlockingSuite",
    "ModulationPlan",
    "NoiseModel",
    "SiteModulation",
    "SpectralReport",
    "default_plan",
    "plan_from_network",
    "readout_timeseries",
    "run_blocking_suite",
    "run_spectral_experiment",
    "spectrum",
    "PointerModel",
    "pointer_profile",
    "pointer_shift_exact",
    "pointer_shift_weak",
    "projector_weak_value",
    "relative_amplitudes",
    "weak_observable",
    "weak_values",
    "__version__",
]
