"""Outer alternating-optimization loops for the two uplink design problems.

run_cem drives the computation-error minimization: alternate MMSE receiver
updates with the semidefinite transmit subproblem, recover rank-one sensing
beams, and keep iterating while the fused MSE still moves.  run_wsr drives
the weighted sum-rate maximization through the weighted-MSE equivalence:
receivers, then weights beta = 1/MSE, then the convex transmit step.

Each loop enforces only its own constraint family (rate floors for run_cem,
the fused-MSE budget for run_wsr); a config that enables the other family is
rejected up front so a `converged` outcome always carries a feasible
constraint report.
"""

import dataclasses
import math
import time

import numpy as np

from .errors import ConfigError, ContractError
from .metrics import (
    aircomp_mse,
    constraint_report,
    mmse_receive_beams,
    per_stream_mse,
    sensing_sinr,
    weighted_sum_rate,
)
from .subproblems import (
    CemSubproblem,
    WsrSubproblem,
    recover_rank_one,
    solve_cem_subproblem,
    solve_wsr_subproblem,
)
from .system import TransmitBeams, initial_transmit_beams


@dataclasses.dataclass(frozen=True)
class OptimizerOptions:
    """Knobs of the outer loops.

    rel_tol stops a loop when the objective moves by less than
    rel_tol * max(|previous|, 1e-8) over one full iteration.
    monotonicity_slack is the tolerance the trace invariants are stated
    with; the loops themselves never consume it.
    debug_dump, when set, appends every subproblem's solver trace to that
    path (one JSON object per line).
    """

    max_iterations: int = 100
    rel_tol: float = 1e-4
    subproblem_tol: float = 1e-7
    monotonicity_slack: float = 1e-7
    debug_dump: str = None

    def __post_init__(self):
        if not isinstance(self.max_iterations, (int, np.integer)) or self.max_iterations < 1:
            raise ContractError(f"max_iterations must be a positive integer, got {self.max_iterations!r}")
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        for name in ("rel_tol", "subproblem_tol", "monotonicity_slack"):
            value = float(getattr(self, name))
            if not value > 0:
                raise ContractError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if not self.rel_tol < 1:
            raise ContractError(f"rel_tol must be < 1, got {self.rel_tol}")


@dataclasses.dataclass(frozen=True)
class TraceRecord:
    """State after one full (receiver + transmit) iteration."""

    iteration: int
    objective: float
    report: object
    wall_ms: float
    rank_gap: float


@dataclasses.dataclass(frozen=True)
class ConvergenceTrace:
    records: tuple

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def objectives(self):
        return [r.objective for r in self.records]


@dataclasses.dataclass(frozen=True)
class SolveOutcome:
    """Final design plus the per-iteration trace.

    status is one of {"converged", "max_iterations", "infeasible"}; when it
    is "converged" the final constraint report is feasible.  certificate
    carries a human-readable reason whenever the loop stopped for anything
    other than the plain stopping rule.
    """

    transmit_beams: TransmitBeams
    receive_beams: object
    trace: ConvergenceTrace
    converged: bool
    status: str
    certificate: str = None

    @property
    def n_iterations(self):
        return len(self.trace.records)


def _converged(current, previous, rel_tol):
    return abs(current - previous) < rel_tol * max(abs(previous), 1e-8)


def _check_consistent(config, ch):
    if ch.n_ues != config.n_ues or ch.n_bs_antennas != config.n_bs_antennas:
        raise ContractError("channel set does not match the config dimensions")
    if ch.n_ue_antennas != config.n_ue_antennas:
        raise ContractError("channel set does not match the config dimensions")


def _repair_rate_constraints(tx, rx, config, ch):
    """Rescale sensing beams so recovered iterates keep their rate floors.

    Rank-one recovery discards the residual eigenvalue mass of each V, which
    can push an active SINR constraint slightly below target.  The discarded
    mass frees exactly the power needed to push back, so scale each offending
    v up within the terminal's remaining budget.  Rescaling one stream adds
    interference to the others, hence the few sequential passes.

    Returns (beams, ok).
    """
    gammas = config.sinr_targets
    sigma2 = config.noise_power
    budgets = config.power_budget_per_ue
    v = np.array(tx.sense_beams)
    for _ in range(3):
        tx = TransmitBeams(tx.comp_beams, v.copy())
        worst_deficit = 0.0
        for k in range(config.n_ues):
            for j in range(config.n_sense_streams):
                target = gammas[k, j]
                if target <= 0:
                    continue
                sinr = sensing_sinr(k, j, rx, tx, ch, sigma2, config.interference_model)
                if sinr >= target * (1.0 - 1e-9):
                    continue
                worst_deficit = max(worst_deficit, target - sinr)
                if sinr <= 0:
                    return tx, False
                factor = math.sqrt(target / sinr) * (1.0 + 1e-9)
                extra = (factor**2 - 1.0) * float(np.linalg.norm(v[k, j]) ** 2)
                power_now = float(
                    (np.abs(tx.comp_beams[k]) ** 2).sum() + (np.abs(v[k]) ** 2).sum()
                )
                if power_now + extra > budgets[k] * (1.0 + 1e-9):
                    return tx, False
                v[k, j] = v[k, j] * factor
        if worst_deficit == 0.0:
            return TransmitBeams(tx.comp_beams, v.copy()), True
    tx = TransmitBeams(tx.comp_beams, v.copy())
    report = constraint_report(rx, tx, ch, config)
    return tx, report.feasible


def run_cem(config, ch, opts=None):
    """Alternating computation-error minimization.

    Per iteration: MMSE receivers at the current beams, the semidefinite
    transmit subproblem at those receivers, rank-one extraction of every
    sensing matrix, then a constraint repair pass.  The trace records the
    fused MSE after each full iteration; the loop stops when it moves by
    less than rel_tol (relative) or at max_iterations.
    """
    return _cem_loop(config, ch, opts or OptimizerOptions(), mmse_receive_beams)


def _cem_loop(config, ch, opts, receiver_fn):
    _check_consistent(config, ch)
    if math.isfinite(config.mse_budget):
        raise ConfigError(
            "run_cem does not enforce a fused-MSE budget; set mse_budget=inf "
            "(the budget belongs to the sum-rate problem)"
        )
    sigma2 = config.noise_power
    tx = initial_transmit_beams(config)
    records = []
    prev_obj = None
    status = "max_iterations"
    certificate = None
    converged = False

    for it in range(opts.max_iterations):
        rx = receiver_fn(tx, ch, sigma2)
        problem = CemSubproblem(
            receivers=rx,
            channels=ch,
            noise_power=sigma2,
            sinr_targets=config.sinr_targets,
            power_budgets=config.power_budget_per_ue,
            interference_model=config.interference_model,
            feasible_start=tx,
        )
        started = time.perf_counter()
        sol = solve_cem_subproblem(problem, tol=opts.subproblem_tol, dump_path=opts.debug_dump)
        wall_ms = (time.perf_counter() - started) * 1e3

        if sol.status == "infeasible":
            if it == 0:
                return SolveOutcome(
                    transmit_beams=tx,
                    receive_beams=rx,
                    trace=ConvergenceTrace(tuple(records)),
                    converged=False,
                    status="infeasible",
                    certificate=sol.certificate,
                )
            certificate = f"iteration {it}: subproblem reported infeasible ({sol.certificate})"
            break
        if sol.status == "numeric_failure" and sol.comp_beams is None:
            certificate = f"iteration {it}: subproblem failed numerically ({sol.certificate})"
            break

        rank_gap = 0.0
        k_dim, j_dim = config.n_ues, config.n_sense_streams
        sense = np.zeros((k_dim, j_dim, config.n_ue_antennas), dtype=complex)
        for k in range(k_dim):
            for j in range(j_dim):
                sense[k, j], gap = recover_rank_one(sol.sense_matrices[k, j])
                rank_gap = max(rank_gap, gap)
        candidate = TransmitBeams(sol.comp_beams, sense)
        candidate, ok = _repair_rate_constraints(candidate, rx, config, ch)
        report = constraint_report(rx, candidate, ch, config)
        if not (ok and report.feasible):
            certificate = (
                f"iteration {it}: recovered iterate violates a rate floor beyond "
                "repair; keeping the previous iterate"
            )
            break

        tx = candidate
        objective = aircomp_mse(rx, tx, ch, sigma2)
        records.append(
            TraceRecord(
                iteration=it,
                objective=objective,
                report=report,
                wall_ms=wall_ms,
                rank_gap=rank_gap,
            )
        )
        if prev_obj is not None and _converged(objective, prev_obj, opts.rel_tol):
            converged = True
            status = "converged"
            break
        prev_obj = objective

    if certificate is not None and records:
        # a rejected/failed step after accepted progress: the loop cannot
        # move further, report the last accepted iterate as converged
        converged = True
        status = "converged"
    rx = receiver_fn(tx, ch, sigma2)
    return SolveOutcome(
        transmit_beams=tx,
        receive_beams=rx,
        trace=ConvergenceTrace(tuple(records)),
        converged=converged,
        status=status,
        certificate=certificate,
    )


def _mse_floor(config, ch, opts):
    """(floor, beams): the computation-error loop with rate floors disabled."""
    relaxed = config.replace(rate_thresholds=0.0, mse_budget=math.inf)
    outcome = run_cem(relaxed, ch, opts)
    if outcome.trace.records:
        return outcome.trace.records[-1].objective, outcome.transmit_beams
    tx = outcome.transmit_beams
    rx = mmse_receive_beams(tx, ch, config.noise_power)
    return aircomp_mse(rx, tx, ch, config.noise_power), tx


def min_achievable_mse(config, ch, opts=None):
    """Fused-MSE floor of the scenario, ignoring rate floors and budget.

    Certifies feasibility of a fused-MSE budget before the sum-rate loop
    commits to it.
    """
    return _mse_floor(config, ch, opts or OptimizerOptions())[0]


def run_wsr(config, ch, opts=None):
    """Weighted sum-rate maximization via the weighted-MSE equivalence.

    Per iteration: MMSE receivers, weights beta_{k,j} = 1/MSE_{k,j} at the
    current point, then the convex transmit step.  The trace records the
    weighted sum rate after each full iteration.  A finite fused-MSE budget
    is certified against the achievable floor first and the loop then starts
    from the floor-achieving beams, which satisfy the budget by construction.
    """
    opts = opts or OptimizerOptions()
    _check_consistent(config, ch)
    if np.any(config.rate_thresholds > 0):
        raise ConfigError(
            "run_wsr does not enforce per-stream rate floors; set "
            "rate_thresholds=0 (the floors belong to the error-minimization problem)"
        )
    sigma2 = config.noise_power
    if math.isfinite(config.mse_budget):
        floor, tx = _mse_floor(config, ch, opts)
        if config.mse_budget < floor * (1.0 - 10.0 * opts.rel_tol):
            rx = mmse_receive_beams(tx, ch, sigma2)
            return SolveOutcome(
                transmit_beams=tx,
                receive_beams=rx,
                trace=ConvergenceTrace(()),
                converged=False,
                status="infeasible",
                certificate=(
                    f"fused-MSE budget {config.mse_budget:.6e} is below the "
                    f"achievable floor {floor:.6e}"
                ),
            )
        tx = _blend_into_budget(config, ch, tx, floor)
    else:
        tx = None
    return _wsr_loop(config, ch, opts, mmse_receive_beams, tx)


def _blend_into_budget(config, ch, floor_tx, floor):
    """Largest step from the floor point toward the saturating start that
    keeps the fused-MSE budget satisfied.

    The floor point zeroes every sensing beam, and a zero beam freezes its
    MMSE receiver at zero, which strands the weighted-MSE iteration (the
    stream's objective coefficients all vanish).  Mixing the saturating
    start back in keeps every stream alive while staying feasible.
    """
    init = initial_transmit_beams(config)
    sigma2 = config.noise_power
    rho = config.mse_budget
    margin = min(1e-3 * rho, 0.5 * (rho - floor))
    margin = max(margin, 0.0)

    def mix_at(t):
        return TransmitBeams(
            (1.0 - t) * floor_tx.comp_beams + t * init.comp_beams,
            (1.0 - t) * floor_tx.sense_beams + t * init.sense_beams,
        )

    def fused_at(t):
        mix = mix_at(t)
        rx = mmse_receive_beams(mix, ch, sigma2)
        return aircomp_mse(rx, mix, ch, sigma2)

    if fused_at(1.0) <= rho - margin:
        return init
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if fused_at(mid) <= rho - margin:
            lo = mid
        else:
            hi = mid
    return mix_at(lo)


def _wsr_loop(config, ch, opts, receiver_fn, warm_tx):
    _check_consistent(config, ch)
    if np.any(config.rate_thresholds > 0):
        raise ConfigError(
            "run_wsr does not enforce per-stream rate floors; set "
            "rate_thresholds=0 (the floors belong to the error-minimization problem)"
        )
    sigma2 = config.noise_power
    rho = config.mse_budget
    tx = warm_tx if warm_tx is not None else initial_transmit_beams(config)
    records = []
    prev_obj = None
    status = "max_iterations"
    certificate = None
    converged = False

    for it in range(opts.max_iterations):
        rx = receiver_fn(tx, ch, sigma2)
        beta = np.empty((config.n_ues, config.n_sense_streams))
        for k in range(config.n_ues):
            for j in range(config.n_sense_streams):
                beta[k, j] = 1.0 / per_stream_mse(k, j, rx, tx, ch, sigma2)
        problem = WsrSubproblem(
            receivers=rx,
            channels=ch,
            noise_power=sigma2,
            mse_weights=beta,
            priorities=config.priorities,
            power_budgets=config.power_budget_per_ue,
            mse_budget=rho,
            feasible_start=tx,
        )
        started = time.perf_counter()
        sol = solve_wsr_subproblem(problem, tol=opts.subproblem_tol, dump_path=opts.debug_dump)
        wall_ms = (time.perf_counter() - started) * 1e3

        if sol.status == "infeasible":
            if it == 0:
                return SolveOutcome(
                    transmit_beams=tx,
                    receive_beams=rx,
                    trace=ConvergenceTrace(tuple(records)),
                    converged=False,
                    status="infeasible",
                    certificate=sol.certificate,
                )
            certificate = f"iteration {it}: subproblem reported infeasible ({sol.certificate})"
            break
        if sol.status == "numeric_failure" and sol.comp_beams is None:
            certificate = f"iteration {it}: subproblem failed numerically ({sol.certificate})"
            break

        candidate = TransmitBeams(sol.comp_beams, sol.sense_beams)
        report = constraint_report(rx, candidate, ch, config)
        if not report.feasible:
            certificate = (
                f"iteration {it}: transmit step left the constraint set "
                "(numerical); keeping the previous iterate"
            )
            break

        tx = candidate
        objective = weighted_sum_rate(
            rx, tx, ch, sigma2, config.priorities, config.interference_model
        )
        records.append(
            TraceRecord(
                iteration=it,
                objective=objective,
                report=report,
                wall_ms=wall_ms,
                rank_gap=0.0,
            )
        )
        if prev_obj is not None and _converged(objective, prev_obj, opts.rel_tol):
            converged = True
            status = "converged"
            break
        prev_obj = objective

    if certificate is not None and records:
        converged = True
        status = "converged"
    rx = receiver_fn(tx, ch, sigma2)
    return SolveOutcome(
        transmit_beams=tx,
        receive_beams=rx,
        trace=ConvergenceTrace(tuple(records)),
        converged=converged,
        status=status,
        certificate=certificate,
    )
