"""Comparison beamformers: the four reference schemes the designs are judged
against.

The literature names these schemes without pinning their construction; the
realizations below are this package's reproducible definitions, documented so
the comparisons stay auditable.  Only the power budgets are guaranteed by
every variant; rate floors and MSE budgets are whatever the construction
happens to achieve.
"""

import dataclasses
import time

import numpy as np

from .errors import ContractError, DimensionalityError
from .metrics import aircomp_mse, constraint_report, weighted_sum_rate
from .optimizers import (
    ConvergenceTrace,
    OptimizerOptions,
    SolveOutcome,
    TraceRecord,
    _cem_loop,
    _converged,
    _wsr_loop,
)
from .system import ReceiveBeams, TransmitBeams, initial_transmit_beams

KINDS = ("fixed_mmse", "zfbf", "mfbf", "ufbf")
OBJECTIVE_MODES = ("cem", "wsr")


@dataclasses.dataclass(frozen=True)
class BaselineVariant:
    """Which reference scheme to run and which outer objective it reports.

    The single-pass kinds (fixed_mmse, zfbf) ignore objective_mode except
    for the objective recorded in the trace.
    """

    kind: str
    objective_mode: str = "cem"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.objective_mode not in OBJECTIVE_MODES:
            raise ContractError(
                f"objective_mode must be one of {OBJECTIVE_MODES}, got {self.objective_mode!r}"
            )


def _objective(mode, rx, tx, ch, config):
    if mode == "cem":
        return aircomp_mse(rx, tx, ch, config.noise_power)
    return weighted_sum_rate(
        rx, tx, ch, config.noise_power, config.priorities, config.interference_model
    )


def _single_pass(tx, rx, ch, config, mode, wall_ms):
    report = constraint_report(rx, tx, ch, config)
    record = TraceRecord(
        iteration=0,
        objective=_objective(mode, rx, tx, ch, config),
        report=report,
        wall_ms=wall_ms,
        rank_gap=0.0,
    )
    return SolveOutcome(
        transmit_beams=tx,
        receive_beams=rx,
        trace=ConvergenceTrace((record,)),
        converged=True,
        status="converged",
    )


def matched_filter_beams(tx, ch, noise_power):
    """Unit-norm matched filters: Z matches the aggregated computation
    signatures, each u_{k,j} its own sensing signature."""
    agg = np.einsum("knm,kml->nl", ch.matrices, tx.comp_beams)
    z = np.zeros_like(agg)
    for l in range(agg.shape[1]):
        norm = np.linalg.norm(agg[:, l])
        if norm > 0:
            z[:, l] = agg[:, l] / norm
    sig = np.einsum("knm,kjm->kjn", ch.matrices, tx.sense_beams)
    u = np.zeros_like(sig)
    norms = np.linalg.norm(sig, axis=2)
    nz = norms > 0
    u[nz] = sig[nz] / norms[nz][:, None]
    return ReceiveBeams(comp_receiver=z, sense_receivers=u)


def _dominant_directions(ch):
    dirs = np.zeros((ch.n_ues, ch.n_ue_antennas), dtype=complex)
    for k in range(ch.n_ues):
        _, _, vh = np.linalg.svd(ch.matrices[k])
        dirs[k] = vh[0].conj()
    return dirs


def _zfbf(config, ch, mode):
    k_dim, l_dim, j_dim = config.n_ues, config.n_comp_streams, config.n_sense_streams
    n_dim = config.n_bs_antennas
    total = k_dim * (l_dim + j_dim)
    if n_dim < total:
        raise DimensionalityError(
            f"zero-forcing needs n_bs_antennas >= K*(L+J) = {total}, got {n_dim}"
        )
    started = time.perf_counter()
    dirs = _dominant_directions(ch)
    p = config.power_budget_per_ue
    w = np.zeros((k_dim, config.n_ue_antennas, l_dim), dtype=complex)
    w[:, :, 0] = np.sqrt(p / 2.0)[:, None] * dirs
    v = np.sqrt(p / (2.0 * j_dim))[:, None, None] * np.repeat(dirs[:, None, :], j_dim, axis=1)
    tx = TransmitBeams(comp_beams=w, sense_beams=v)

    # stacked effective signatures, comp streams first, then sensing
    cols = []
    for k in range(k_dim):
        for l in range(l_dim):
            cols.append(ch.matrices[k] @ tx.comp_beams[k, :, l])
    for k in range(k_dim):
        for j in range(j_dim):
            cols.append(ch.matrices[k] @ tx.sense_beams[k, j])
    s_mat = np.column_stack(cols)
    bank = np.linalg.pinv(s_mat).conj().T  # bank^H s_mat ~ I on reachable columns
    z = np.zeros((n_dim, l_dim), dtype=complex)
    for l in range(l_dim):
        z[:, l] = bank[:, [k * l_dim + l for k in range(k_dim)]].sum(axis=1)
    u = bank[:, k_dim * l_dim :].T.reshape(k_dim, j_dim, n_dim)
    rx = ReceiveBeams(comp_receiver=z, sense_receivers=u)
    wall_ms = (time.perf_counter() - started) * 1e3
    return _single_pass(tx, rx, ch, config, mode, wall_ms)


def uniform_forcing_beams(rx, ch, config):
    """Equal-effective-gain transmit update.

    Every stream of terminal k points along the dominant right singular
    direction of H_k; per-terminal powers are chosen so the effective gain
    through the current computation receiver is the same for every terminal,
    at the level set by the weakest terminal's budget-capped gain.  Power
    splits mirror the initialization: half for computation streams, half for
    sensing.
    """
    k_dim, l_dim, j_dim = config.n_ues, config.n_comp_streams, config.n_sense_streams
    m_dim = config.n_ue_antennas
    p = config.power_budget_per_ue
    dirs = _dominant_directions(ch)
    z = rx.comp_receiver
    w = np.zeros((k_dim, m_dim, l_dim), dtype=complex)
    for l in range(l_dim):
        eff = np.array([z[:, l].conj() @ ch.matrices[k] @ dirs[k] for k in range(k_dim)])
        gains = np.abs(eff)
        caps = np.sqrt(p / (2.0 * l_dim))
        if np.all(gains > 0):
            level = float(np.min(caps * gains))
            amp = level / gains
            w[:, :, l] = (amp * np.exp(-1j * np.angle(eff)))[:, None] * dirs
    v = np.zeros((k_dim, j_dim, m_dim), dtype=complex)
    for j in range(j_dim):
        z_eff = z[:, j % l_dim]
        eff = np.array([z_eff.conj() @ ch.matrices[k] @ dirs[k] for k in range(k_dim)])
        gains = np.abs(eff)
        caps = np.sqrt(p / (2.0 * j_dim))
        if np.all(gains > 0):
            level = float(np.min(caps * gains))
            amp = level / gains
            v[:, j, :] = (amp * np.exp(-1j * np.angle(eff)))[:, None] * dirs
    return TransmitBeams(comp_beams=w, sense_beams=v)


def _ufbf(config, ch, opts, mode):
    from .metrics import mmse_receive_beams

    tx = initial_transmit_beams(config)
    records = []
    prev = None
    converged = False
    status = "max_iterations"
    rx = mmse_receive_beams(tx, ch, config.noise_power)
    for it in range(opts.max_iterations):
        started = time.perf_counter()
        rx = mmse_receive_beams(tx, ch, config.noise_power)
        tx = uniform_forcing_beams(rx, ch, config)
        wall_ms = (time.perf_counter() - started) * 1e3
        objective = _objective(mode, rx, tx, ch, config)
        records.append(
            TraceRecord(
                iteration=it,
                objective=objective,
                report=constraint_report(rx, tx, ch, config),
                wall_ms=wall_ms,
                rank_gap=0.0,
            )
        )
        if prev is not None and _converged(objective, prev, opts.rel_tol):
            converged = True
            status = "converged"
            break
        prev = objective
    # no receiver refresh here: the returned pair is the one the equal-gain
    # construction was built against
    return SolveOutcome(
        transmit_beams=tx,
        receive_beams=rx,
        trace=ConvergenceTrace(tuple(records)),
        converged=converged,
        status=status,
    )


def run_baseline(variant, config, ch, opts=None):
    """Run one reference scheme and report it as a SolveOutcome.

    fixed_mmse and zfbf are single constructions; mfbf re-runs the chosen
    outer loop with matched-filter receivers; ufbf alternates MMSE receivers
    with the closed-form equal-gain transmit update.
    """
    if not isinstance(variant, BaselineVariant):
        variant = BaselineVariant(*variant) if isinstance(variant, tuple) else BaselineVariant(variant)
    opts = opts or OptimizerOptions()

    if variant.kind == "fixed_mmse":
        from .metrics import mmse_receive_beams

        started = time.perf_counter()
        tx = initial_transmit_beams(config)
        rx = mmse_receive_beams(tx, ch, config.noise_power)
        wall_ms = (time.perf_counter() - started) * 1e3
        return _single_pass(tx, rx, ch, config, variant.objective_mode, wall_ms)
    if variant.kind == "zfbf":
        return _zfbf(config, ch, variant.objective_mode)
    if variant.kind == "mfbf":
        if variant.objective_mode == "cem":
            return _cem_loop(config, ch, opts, matched_filter_beams)
        return _wsr_loop(config, ch, opts, matched_filter_beams, None)
    return _ufbf(config, ch, opts, variant.objective_mode)
