"""Distributed minimum-power downlink beamforming by consensus ADMM on time-varying channels."""

from .admm import AdmmConfig, AdmmState, AdmmTimeout, LocalSolveError, admm_step, lyapunov, solve_static
from .builders import ZeroChannelError, build_centralized, build_local
from .duality import InfeasibleError, is_feasible, reference_point, solve_uplink_fixed_point
from .harness import ExperimentConfig, TrackResult, eval_sinr_bound, run_ensemble, run_track
from .model import (ChannelSet, QosSpec, Topology, build_consensus_index, compute_local_sinr,
                    compute_sinr)
from .socp import ConeProgram, NonNeg, SecondOrder, SolveStatus, SolverOptions, Zero, solve
from .tracks import TrackConfig, generate_track, sample_initial

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig", "AdmmState", "AdmmTimeout", "ChannelSet", "ConeProgram", "ExperimentConfig",
    "InfeasibleError", "LocalSolveError", "NonNeg", "QosSpec", "SecondOrder", "SolveStatus",
    "SolverOptions", "Topology", "TrackConfig", "TrackResult", "Zero", "ZeroChannelError",
    "admm_step", "build_centralized", "build_consensus_index", "build_local", "compute_local_sinr",
    "compute_sinr", "eval_sinr_bound", "generate_track", "is_feasible", "lyapunov",
    "reference_point", "run_ensemble", "run_track", "sample_initial", "solve", "solve_static",
    "solve_uplink_fixed_point",
]
