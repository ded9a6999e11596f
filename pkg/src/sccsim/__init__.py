"""Joint transmit/receive beamforming simulator for an uplink that fuses
over-the-air computation with multi-stream sensing communication."""

__version__ = "0.1.0"

from .config import SystemConfig
from .errors import (
    ConfigError,
    ContractError,
    DimensionalityError,
    DomainError,
)
from .system import (
    ChannelSet,
    ReceiveBeams,
    Topology,
    TransmitBeams,
    generate_channels,
    initial_transmit_beams,
    place_ues,
)
from .metrics import (
    aircomp_mse,
    constraint_report,
    mmse_receive_beams,
    per_stream_mse,
    rate_mse_identity_gap,
    sensing_sinr,
    weighted_sum_rate,
)
from .subproblems import (
    CemSubproblem,
    WsrSubproblem,
    kkt_residuals,
    recover_rank_one,
    solve_cem_subproblem,
    solve_wsr_subproblem,
)
from .optimizers import (
    ConvergenceTrace,
    OptimizerOptions,
    SolveOutcome,
    min_achievable_mse,
    run_cem,
    run_wsr,
)
from .baselines import BaselineVariant, run_baseline
from .estimators import (
    BaselineBeamformer,
    ComputationErrorMinimizer,
    WeightedSumRateMaximizer,
)
from .harness import ExperimentSpec, run_experiment, summarize
from .csvio import ResultRow, emit_csv, emit_traces, parse_results
from .verify import VerifyReport, verify_suite

__all__ = [
    "__version__",
    "BaselineBeamformer",
    "BaselineVariant",
    "CemSubproblem",
    "ChannelSet",
    "ComputationErrorMinimizer",
    "ConfigError",
    "ContractError",
    "ConvergenceTrace",
    "DimensionalityError",
    "DomainError",
    "ExperimentSpec",
    "OptimizerOptions",
    "ReceiveBeams",
    "ResultRow",
    "SolveOutcome",
    "SystemConfig",
    "Topology",
    "TransmitBeams",
    "VerifyReport",
    "WeightedSumRateMaximizer",
    "WsrSubproblem",
    "aircomp_mse",
    "constraint_report",
    "emit_csv",
    "emit_traces",
    "generate_channels",
    "initial_transmit_beams",
    "kkt_residuals",
    "min_achievable_mse",
    "mmse_receive_beams",
    "parse_results",
    "per_stream_mse",
    "place_ues",
    "rate_mse_identity_gap",
    "recover_rank_one",
    "run_baseline",
    "run_cem",
    "run_experiment",
    "run_wsr",
    "sensing_sinr",
    "solve_cem_subproblem",
    "solve_wsr_subproblem",
    "summarize",
    "verify_suite",
    "weighted_sum_rate",
]
