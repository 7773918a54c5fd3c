"""Information bottleneck with a Rényi-entropy cost on the representation."""

__version__ = "0.1.0"

from .bottleneck import Channel, DeterministicMap, InducedSystem, induce, objective, to_channel
from .errors import InfeasibleError, ValidationError
from .frontier import (
    Envelope,
    TradeoffPoint,
    brute_force_envelope,
    brute_force_points,
    enumerate_deterministic,
    evaluate_envelope,
    upper_concave_envelope,
)
from .prob import (
    Distribution,
    JointDistribution,
    kl_divergence,
    mutual_information,
    renyi_entropy,
    shannon_entropy,
)
from .solver import SolverConfig, SolverRun, hard_update, iterate, soft_update, sweep

__all__ = [
    "Channel", "DeterministicMap", "Distribution", "Envelope", "InducedSystem", "InfeasibleError",
    "JointDistribution", "SolverConfig", "SolverRun", "TradeoffPoint", "ValidationError",
    "brute_force_envelope", "brute_force_points", "enumerate_deterministic", "evaluate_envelope",
    "hard_update", "induce", "iterate", "kl_divergence", "mutual_information", "objective",
    "renyi_entropy", "shannon_entropy", "soft_update", "sweep", "to_channel", "upper_concave_envelope",
]
