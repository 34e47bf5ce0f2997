"""Bures, Hilbert-Schmidt and trace distances for entangled neutral-meson states."""

from .analysis import (
    CrossoverReport,
    SweepResult,
    difference_curve,
    sensitivity,
    sensitivity_crossover,
    sweep,
    sweep_2d,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DimensionError,
    MesonDistError,
    NumericalError,
    UnphysicalStateError,
)
from .metrics import DistanceKind, all_distances, bures, fidelity, hilbert_schmidt, trace_distance
from .states import (
    DecoherenceParams,
    DensityMatrix,
    RegenerationParams,
    ScenarioKind,
    StateFamily,
    decohered_singlet,
    depolarize,
    make_family,
    mix,
    regenerate,
    regeneration_operator,
    singlet,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "CrossoverReport",
    "DecoherenceParams",
    "DensityMatrix",
    "DimensionError",
    "DistanceKind",
    "MesonDistError",
    "NumericalError",
    "RegenerationParams",
    "ScenarioKind",
    "StateFamily",
    "SweepResult",
    "UnphysicalStateError",
    "all_distances",
    "bures",
    "decohered_singlet",
    "depolarize",
    "difference_curve",
    "fidelity",
    "hilbert_schmidt",
    "make_family",
    "mix",
    "regenerate",
    "regeneration_operator",
    "sensitivity",
    "sensitivity_crossover",
    "singlet",
    "sweep",
    "sweep_2d",
    "trace_distance",
]
