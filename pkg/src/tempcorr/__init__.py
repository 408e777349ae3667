"""Temporal-correlation inequalities for sequential measurements on a
single evolving quantum system: simulation pipeline, closed forms, and an
independent brute-force/RK4 oracle."""

from .evolve import Channel, LindbladSpec, amplitude_damping_channel, apply_channel, rk4_lindblad, unitary_channel
from .ineq import (
    InequalityResult,
    chsh_steering,
    k4_damped,
    lg_sum,
    quadratic_steering,
    s2_damped,
    steering_closed_form_S,
    steering_closed_form_Sprime,
    temporal_chsh,
)
from .quantum import (
    Assemblage,
    DensityMatrix,
    Effect,
    Observable,
    Povm,
    luders_update,
    measure_statistics,
    projective_povm,
    rotated_observable,
    unsharp_povm,
)
from .seqcorr import CorrelationTable, Scenario, correlator, joint_probability

__version__ = "0.1.0"

__all__ = [
    "Assemblage",
    "Channel",
    "CorrelationTable",
    "DensityMatrix",
    "Effect",
    "InequalityResult",
    "LindbladSpec",
    "Observable",
    "Povm",
    "Scenario",
    "amplitude_damping_channel",
    "apply_channel",
    "chsh_steering",
    "correlator",
    "joint_probability",
    "k4_damped",
    "lg_sum",
    "luders_update",
    "measure_statistics",
    "projective_povm",
    "quadratic_steering",
    "rk4_lindblad",
    "rotated_observable",
    "s2_damped",
    "steering_closed_form_S",
    "steering_closed_form_Sprime",
    "temporal_chsh",
    "unitary_channel",
    "unsharp_povm",
    "__version__",
]
