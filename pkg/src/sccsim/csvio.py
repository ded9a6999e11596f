"""CSV emission and parsing for experiment artifacts.

Formatting is pinned: UTF-8, header row, '.' decimal separator, floats as
'%.17e' (18 significant digits, exact round-trip), never locale-dependent.
Schemas here are load-bearing for downstream plotting; do not reorder.
"""

import csv
import dataclasses
import math

import numpy as np

from .errors import ContractError

RESULT_COLUMNS = (
    "scenario_id",
    "algorithm",
    "seed",
    "trial",
    "K",
    "N",
    "M",
    "L",
    "J",
    "snr_db",
    "r0",
    "rho",
    "iterations",
    "wall_ms",
    "nmse",
    "wsr",
    "min_rate_margin",
    "power_slack_min",
    "mse_budget_slack",
    "status",
)

_INT_COLUMNS = {"seed", "trial", "K", "N", "M", "L", "J", "iterations"}
_STR_COLUMNS = {"scenario_id", "algorithm", "status"}

TRACE_COLUMNS = ("scenario_id", "trial", "iteration", "objective", "constraint_margin", "wall_ms")

SUMMARY_COLUMNS = (
    "scenario_id",
    "algorithm",
    "trials",
    "failures",
    "nmse_mean",
    "nmse_median",
    "wsr_mean",
    "wsr_median",
    "iterations_mean",
    "wall_ms_mean",
)


@dataclasses.dataclass(frozen=True)
class ResultRow:
    """One algorithm run on one channel realization."""

    scenario_id: str
    algorithm: str
    seed: int
    trial: int
    K: int
    N: int
    M: int
    L: int
    J: int
    snr_db: float
    r0: float
    rho: float
    iterations: int
    wall_ms: float
    nmse: float
    wsr: float
    min_rate_margin: float
    power_slack_min: float
    mse_budget_slack: float
    status: str

    def __post_init__(self):
        if self.status not in ("converged", "max_iterations", "infeasible", "error"):
            raise ContractError(f"unknown status {self.status!r}")
        if not (math.isnan(self.nmse) or self.nmse >= 0):
            raise ContractError(f"nmse must be >= 0, got {self.nmse}")


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17e" % float(value)


def emit_csv(rows, path):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RESULT_COLUMNS)
            for row in rows:
                writer.writerow([_fmt(getattr(row, col)) for col in RESULT_COLUMNS])
    except OSError as exc:
        raise OSError(f"while writing results to {path}: {exc}") from exc


def parse_results(path):
    rows = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != RESULT_COLUMNS:
                raise ContractError(f"unexpected results header in {path}: {header}")
            for record in reader:
                values = {}
                for col, text in zip(RESULT_COLUMNS, record):
                    if col in _STR_COLUMNS:
                        values[col] = text
                    elif col in _INT_COLUMNS:
                        values[col] = int(text)
                    else:
                        values[col] = float(text)
                rows.append(ResultRow(**values))
    except OSError as exc:
        raise OSError(f"while reading results from {path}: {exc}") from exc
    return rows


def emit_traces(records, path):
    """records: iterable of (scenario_id, trial, outcome, constraint_margin_fn).

    Each outcome contributes one line per trace record; failed trials (outcome
    None) contribute nothing.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for scenario_id, trial, outcome, margin_fn in records:
                if outcome is None:
                    continue
                for rec in outcome.trace:
                    writer.writerow(
                        [
                            scenario_id,
                            str(trial),
                            str(rec.iteration),
                            _fmt(rec.objective),
                            _fmt(margin_fn(rec.report)),
                            _fmt(rec.wall_ms),
                        ]
                    )
    except OSError as exc:
        raise OSError(f"while writing traces to {path}: {exc}") from exc


def emit_summary(summary_rows, path):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for row in summary_rows:
                writer.writerow([_fmt(row[col]) for col in SUMMARY_COLUMNS])
    except OSError as exc:
        raise OSError(f"while writing summary to {path}: {exc}") from exc
