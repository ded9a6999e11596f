"""Seeded Monte-Carlo experiment execution.

An ExperimentSpec is one algorithm, one base configuration, an optional
one-parameter sweep, and a trial count.  run_experiment expands it to
(sweep point x trial) runs, each on independently generated channels, and
returns one ResultRow per run.  Output is deterministic for a fixed spec:
seeds derive from master_seed alone and timings are zeroed unless requested.
"""

import dataclasses
import math

import numpy as np

from .config import SystemConfig
from .csvio import ResultRow
from .errors import ConfigError
from .metrics import (
    aircomp_mse,
    constraint_report,
    weighted_sum_rate,
    worst_constraint_margin,
)
from .optimizers import OptimizerOptions, run_cem, run_wsr
from .seeds import FADING_STREAM, PLACEMENT_STREAM, substream_seed, trial_seed
from .system import generate_channels, place_ues

ALGORITHMS = ("cem", "wsr", "fixed_mmse", "zfbf", "mfbf", "ufbf")
SWEEP_PARAMS = ("snr_db", "k", "n", "r0", "rho")


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: algorithm, base config, optional sweep, trial count."""

    config: SystemConfig
    algorithm: str = "cem"
    objective_mode: str = "cem"
    sweep_param: str = None
    sweep_values: tuple = ()
    trials: int = 20
    master_seed: int = 0
    output_dir: str = None
    workers: int = 1
    record_timings: bool = False
    options: OptimizerOptions = None

    def __post_init__(self):
        if not isinstance(self.config, SystemConfig):
            raise ConfigError(f"config must be a SystemConfig, got {type(self.config).__name__}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.objective_mode not in ("cem", "wsr"):
            raise ConfigError(f"objective_mode must be cem or wsr, got {self.objective_mode!r}")
        if self.sweep_param is not None:
            if self.sweep_param not in SWEEP_PARAMS:
                raise ConfigError(
                    f"sweep parameter must be one of {SWEEP_PARAMS}, got {self.sweep_param!r}"
                )
            if not len(self.sweep_values):
                raise ConfigError("sweep_values must be non-empty when sweep_param is set")
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise ConfigError(f"trials must be a positive integer, got {self.trials}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ConfigError(f"workers must be a positive integer, got {self.workers}")
        seed = int(self.master_seed)
        if not 0 <= seed < (1 << 64):
            raise ConfigError("master_seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", seed)
        if self.options is not None and not isinstance(self.options, OptimizerOptions):
            raise ConfigError("options must be OptimizerOptions or None")


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    """Raw material behind one ResultRow; keeps the outcome for trace export."""

    scenario_id: str
    trial: int
    seed: int
    config: SystemConfig
    outcome: object
    error: str


def _uniform_or_nan(values):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size and np.all(arr == arr[0]):
        return float(arr[0])
    return math.nan


def _implied_snr_db(config):
    p = _uniform_or_nan(config.power_budget_per_ue)
    if math.isnan(p):
        return math.nan
    return 10.0 * math.log10(p / config.noise_power)


def _format_value(param, value):
    if param in ("k", "n"):
        return str(int(value))
    return repr(float(value))


def scenario_id_for(param, value):
    if param is None:
        return "base"
    return f"{param}={_format_value(param, value)}"


def scenario_config(base, param, value):
    """The base config with one sweep parameter applied."""
    if param is None:
        return base
    if param == "snr_db":
        return base.with_snr_db(value)
    if param == "n":
        return base.replace(n_bs_antennas=int(value))
    if param == "r0":
        return base.replace(rate_thresholds=float(value))
    if param == "rho":
        return base.replace(mse_budget=float(value))
    # K changes the length of the per-UE settings, so those must be uniform
    budget = _uniform_or_nan(base.power_budget_per_ue)
    threshold = _uniform_or_nan(base.rate_thresholds)
    priority = _uniform_or_nan(base.priorities)
    if any(math.isnan(v) for v in (budget, threshold, priority)):
        raise ConfigError("sweeping K requires uniform per-UE budgets, thresholds and priorities")
    return base.replace(
        n_ues=int(value),
        power_budget_per_ue=budget,
        rate_thresholds=threshold,
        priorities=priority,
    )


def _run_algorithm(algorithm, objective_mode, config, ch, options):
    if algorithm == "cem":
        return run_cem(config, ch, options)
    if algorithm == "wsr":
        return run_wsr(config, ch, options)
    from .baselines import BaselineVariant, run_baseline

    return run_baseline(BaselineVariant(algorithm, objective_mode), config, ch, options)


def run_trial(spec, config, scenario_id, trial, seed):
    """One (sweep point, trial) execution; never raises on solver failure."""
    try:
        topology = place_ues(config, substream_seed(seed, PLACEMENT_STREAM))
        ch = generate_channels(config, topology, substream_seed(seed, FADING_STREAM))
        outcome = _run_algorithm(spec.algorithm, spec.objective_mode, config, ch, spec.options)
        return TrialRecord(scenario_id, trial, seed, config, (ch, outcome), None)
    except Exception as exc:  # noqa: BLE001 - failures become status rows
        return TrialRecord(scenario_id, trial, seed, config, None, f"{type(exc).__name__}: {exc}")


def _row_from_record(spec, record):
    config = record.config
    common = dict(
        scenario_id=record.scenario_id,
        algorithm=spec.algorithm,
        seed=record.seed,
        trial=record.trial,
        K=config.n_ues,
        N=config.n_bs_antennas,
        M=config.n_ue_antennas,
        L=config.n_comp_streams,
        J=config.n_sense_streams,
        snr_db=_implied_snr_db(config),
        r0=_uniform_or_nan(config.rate_thresholds),
        rho=config.mse_budget,
    )
    if record.outcome is None:
        return ResultRow(
            iterations=0,
            wall_ms=0.0,
            nmse=math.nan,
            wsr=math.nan,
            min_rate_margin=math.nan,
            power_slack_min=math.nan,
            mse_budget_slack=math.nan,
            status="error",
            **common,
        )
    ch, outcome = record.outcome
    tx, rx = outcome.transmit_beams, outcome.receive_beams
    report = constraint_report(rx, tx, ch, config)
    wall = sum(rec.wall_ms for rec in outcome.trace) if spec.record_timings else 0.0
    return ResultRow(
        iterations=outcome.n_iterations,
        wall_ms=wall,
        nmse=aircomp_mse(rx, tx, ch, config.noise_power) / config.n_ues,
        wsr=weighted_sum_rate(
            rx, tx, ch, config.noise_power, config.priorities, config.interference_model
        ),
        min_rate_margin=report.min_rate_margin,
        power_slack_min=float(report.per_ue_power_slack.min()),
        mse_budget_slack=report.mse_budget_slack,
        status=outcome.status,
        **common,
    )


def _expand(spec):
    """(scenario_id, config, trial, seed) for every run, in output order."""
    points = [(None, None)] if spec.sweep_param is None else [
        (spec.sweep_param, value) for value in spec.sweep_values
    ]
    jobs = []
    for index, (param, value) in enumerate(points):
        sid = scenario_id_for(param, value)
        config = scenario_config(spec.config, param, value)
        scenario_seed = trial_seed(spec.master_seed, index)
        for trial in range(spec.trials):
            jobs.append((sid, config, trial, trial_seed(scenario_seed, trial)))
    return jobs


def run_experiment(spec, return_records=False):
    """Execute every (sweep point x trial) run of the spec.

    Returns the ResultRow list, ordered by (sweep point, trial).  With
    return_records=True also returns the TrialRecords carrying the raw
    outcomes (for trace export and recomputation checks).
    """
    jobs = _expand(spec)
    if spec.workers > 1:
        from joblib import Parallel, delayed

        records = Parallel(n_jobs=spec.workers)(
            delayed(run_trial)(spec, config, sid, trial, seed)
            for sid, config, trial, seed in jobs
        )
        records = list(records)
    else:
        records = [run_trial(spec, config, sid, trial, seed) for sid, config, trial, seed in jobs]
    rows = [_row_from_record(spec, record) for record in records]
    if return_records:
        return rows, records
    return rows


def trace_export_records(spec, records):
    """Adapt TrialRecords to the emit_traces input format."""
    adapted = []
    for record in records:
        outcome = None if record.outcome is None else record.outcome[1]
        if outcome is not None and not spec.record_timings:
            outcome = _zero_wall(outcome)
        config = record.config

        def margin_fn(report, config=config):
            return worst_constraint_margin(report, config)

        adapted.append((record.scenario_id, record.trial, outcome, margin_fn))
    return adapted


def _zero_wall(outcome):
    from .optimizers import ConvergenceTrace, TraceRecord

    cleaned = tuple(
        TraceRecord(rec.iteration, rec.objective, rec.report, 0.0, rec.rank_gap)
        for rec in outcome.trace
    )
    return dataclasses.replace(outcome, trace=ConvergenceTrace(cleaned))


def summarize(rows):
    """Per-scenario aggregation: means and medians over successful trials."""
    order = []
    groups = {}
    for row in rows:
        key = (row.scenario_id, row.algorithm)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        bucket = groups[key]
        ok = [r for r in bucket if r.status != "error"]
        nmse = np.array([r.nmse for r in ok], dtype=float)
        wsr = np.array([r.wsr for r in ok], dtype=float)
        iters = np.array([r.iterations for r in ok], dtype=float)
        wall = np.array([r.wall_ms for r in ok], dtype=float)
        out.append(
            {
                "scenario_id": key[0],
                "algorithm": key[1],
                "trials": len(bucket),
                "failures": len(bucket) - len(ok),
                "nmse_mean": float(nmse.mean()) if len(ok) else math.nan,
                "nmse_median": float(np.median(nmse)) if len(ok) else math.nan,
                "wsr_mean": float(wsr.mean()) if len(ok) else math.nan,
                "wsr_median": float(np.median(wsr)) if len(ok) else math.nan,
                "iterations_mean": float(iters.mean()) if len(ok) else math.nan,
                "wall_ms_mean": float(wall.mean()) if len(ok) else math.nan,
            }
        )
    return out
