"""Closed-form performance metrics and MMSE receivers for the SCC uplink.

Everything here is a pure function of (receive beams, transmit beams,
channels, noise power).  The sensing-interference index set is selectable:
`all_cross_streams` counts every stream other than the desired one as
interference, `paper_literal` only counts streams that differ in both the
UE index and the stream index.  The rate/MSE identity (1+SINR)*MSE = 1 at
the MMSE receiver holds under `all_cross_streams`, which is the default
throughout the package.
"""

import dataclasses

import numpy as np
from scipy import linalg

from .config import REPORT_RTOL
from .errors import ContractError, DomainError
from .system import ChannelSet, ReceiveBeams, TransmitBeams


def _check_shapes(tx, ch, rx=None):
    k, n, m = ch.matrices.shape
    if tx.comp_beams.shape[0] != k or tx.comp_beams.shape[1] != m:
        raise ContractError(
            f"transmit beams for {tx.comp_beams.shape[0]} UEs with "
            f"{tx.comp_beams.shape[1]} antennas do not match channels {ch.matrices.shape}"
        )
    if tx.sense_beams.shape[0] != k or tx.sense_beams.shape[2] != m:
        raise ContractError("sensing beams do not match the channel set")
    if rx is not None:
        if rx.comp_receiver.shape != (n, tx.comp_beams.shape[2]):
            raise ContractError(
                f"computation receiver shape {rx.comp_receiver.shape} does not "
                f"match N={n}, L={tx.comp_beams.shape[2]}"
            )
        if rx.sense_receivers.shape != (k, tx.sense_beams.shape[1], n):
            raise ContractError("sensing receivers do not match beams/channels")


def effective_comp_channels(tx, ch):
    """Stack of Z-free effective matrices H_k W_k, shape (K, N, L)."""
    return np.einsum("knm,kml->knl", ch.matrices, tx.comp_beams)


def effective_sense_channels(tx, ch):
    """Stack of H_k v_{k,j}, shape (K, J, N)."""
    return np.einsum("knm,kjm->kjn", ch.matrices, tx.sense_beams)


def aircomp_mse(rx, tx, ch, noise_power):
    """Computation distortion of the aggregated function value.

    Sum of the misalignment ||Z^H H_k W_k - I||_F^2 over UEs, the amplified
    noise sigma^2 ||Z||_F^2, and the sensing-stream leakage into the
    computation receiver.
    """
    _check_shapes(tx, ch, rx)
    z = rx.comp_receiver
    l_dim = z.shape[1]
    eye = np.eye(l_dim)
    total = noise_power * float(np.linalg.norm(z) ** 2)
    hw = effective_comp_channels(tx, ch)
    hv = effective_sense_channels(tx, ch)
    for k in range(ch.n_ues):
        total += float(np.linalg.norm(z.conj().T @ hw[k] - eye) ** 2)
        total += float(np.linalg.norm(z.conj().T @ hv[k].T) ** 2)
    return total


def interference_covariance(tx, ch, noise_power):
    """Covariance of the full received signal plus noise.

    Omega = sum_i H_i (W_i W_i^H + sum_m v_im v_im^H) H_i^H + sigma^2 I.
    Every stream contributes, including any desired one; this is the matrix
    the MMSE receivers invert and it is shared by all (k, j).
    """
    _check_shapes(tx, ch)
    n = ch.n_bs_antennas
    omega = noise_power * np.eye(n, dtype=complex)
    hw = effective_comp_channels(tx, ch)
    hv = effective_sense_channels(tx, ch)
    for k in range(ch.n_ues):
        omega += hw[k] @ hw[k].conj().T
        omega += hv[k].T @ hv[k].conj()
    return 0.5 * (omega + omega.conj().T)


def _solve_omega(tx, ch, noise_power, rhs):
    omega = interference_covariance(tx, ch, noise_power)
    factor = linalg.cho_factor(omega)
    return linalg.cho_solve(factor, rhs)


def mmse_computation_receiver(tx, ch, noise_power):
    """MMSE receive matrix Z = Omega^{-1} sum_k H_k W_k, shape (N, L)."""
    if noise_power <= 0:
        raise DomainError("noise power must be positive for the MMSE receiver")
    hw = effective_comp_channels(tx, ch)
    return _solve_omega(tx, ch, noise_power, hw.sum(axis=0))


def mmse_sensing_receiver(k, j, tx, ch, noise_power):
    """MMSE receive vector u_{k,j} = Omega^{-1} H_k v_{k,j}, length N."""
    if noise_power <= 0:
        raise DomainError("noise power must be positive for the MMSE receiver")
    target = ch.matrices[k] @ tx.sense_beams[k, j]
    return _solve_omega(tx, ch, noise_power, target)


def mmse_receive_beams(tx, ch, noise_power):
    """All MMSE receivers from a single factorization of Omega."""
    if noise_power <= 0:
        raise DomainError("noise power must be positive for the MMSE receiver")
    _check_shapes(tx, ch)
    hw = effective_comp_channels(tx, ch)
    hv = effective_sense_channels(tx, ch)
    omega = interference_covariance(tx, ch, noise_power)
    factor = linalg.cho_factor(omega)
    z = linalg.cho_solve(factor, hw.sum(axis=0))
    k_dim, j_dim, n = hv.shape
    flat = linalg.cho_solve(factor, hv.reshape(k_dim * j_dim, n).T)
    u = flat.T.reshape(k_dim, j_dim, n)
    return ReceiveBeams(comp_receiver=z, sense_receivers=u)


def sensing_sinr(k, j, rx, tx, ch, noise_power, model="all_cross_streams"):
    """SINR of sensing stream (k, j) at its receive vector.

    A zero receive vector is a degenerate but legal input and yields 0.
    """
    _check_shapes(tx, ch, rx)
    u = rx.sense_receivers[k, j]
    if not np.any(u):
        return 0.0
    hw = effective_comp_channels(tx, ch)
    hv = effective_sense_channels(tx, ch)
    uh = u.conj()
    gains = np.abs(np.einsum("n,kjn->kj", uh, hv)) ** 2
    numerator = float(gains[k, j])
    comp_interf = float(sum(np.linalg.norm(uh @ hw[i]) ** 2 for i in range(ch.n_ues)))
    if model == "all_cross_streams":
        sense_interf = float(gains.sum()) - numerator
    elif model == "paper_literal":
        mask = np.ones_like(gains, dtype=bool)
        mask[k, :] = False
        mask[:, j] = False
        sense_interf = float(gains[mask].sum())
    else:
        raise DomainError(f"unknown interference model {model!r}")
    denom = comp_interf + sense_interf + noise_power * float(np.linalg.norm(u) ** 2)
    return numerator / denom


def weighted_sum_rate(rx, tx, ch, noise_power, priorities, model="all_cross_streams"):
    """Sum over streams of theta_{k,j} log2(1 + SINR_{k,j})."""
    priorities = np.asarray(priorities, dtype=float)
    j_dim = tx.sense_beams.shape[1]
    if priorities.shape != (ch.n_ues, j_dim):
        raise ContractError(
            f"priorities shape {priorities.shape} does not match ({ch.n_ues}, {j_dim})"
        )
    total = 0.0
    for k in range(ch.n_ues):
        for j in range(j_dim):
            gamma = sensing_sinr(k, j, rx, tx, ch, noise_power, model)
            total += priorities[k, j] * np.log2(1.0 + gamma)
    return float(total)


def per_stream_mse(k, j, rx, tx, ch, noise_power):
    """MSE of the unit-power sensing symbol (k, j) at its receive vector.

    e = u^H Omega u - 2 Re(u^H H_k v_{k,j}) + 1, with the full-sum Omega.
    """
    _check_shapes(tx, ch, rx)
    u = rx.sense_receivers[k, j]
    omega = interference_covariance(tx, ch, noise_power)
    quad = float(np.real(u.conj() @ omega @ u))
    cross = float(np.real(u.conj() @ ch.matrices[k] @ tx.sense_beams[k, j]))
    return quad - 2.0 * cross + 1.0


def rate_mse_identity_gap(k, j, tx, ch, noise_power):
    """Deviation from (1+SINR)*MSE = 1 at the MMSE receiver for stream (k,j).

    Exact in exact arithmetic under the all_cross_streams model; the return
    value measures the numerical gap |.| and should sit at rounding level.
    """
    if not np.any(tx.sense_beams[k, j]):
        raise DomainError("identity gap is undefined for a zero sensing beam")
    rx = mmse_receive_beams(tx, ch, noise_power)
    gamma = sensing_sinr(k, j, rx, tx, ch, noise_power, "all_cross_streams")
    mse = per_stream_mse(k, j, rx, tx, ch, noise_power)
    return abs((1.0 + gamma) * mse - 1.0)


@dataclasses.dataclass(frozen=True)
class ConstraintReport:
    """Slack of every design constraint at a candidate beam pair.

    Slacks are positive when the constraint holds strictly.  `feasible`
    applies a relative tolerance of REPORT_RTOL to each slack, measured
    against max(1, constraint scale).
    """

    per_ue_power_slack: np.ndarray
    min_rate_margin: float
    mse_budget_slack: float
    feasible: bool


def constraint_report(rx, tx, ch, config):
    """Evaluate power, rate and MSE-budget slacks under `config`."""
    _check_shapes(tx, ch, rx)
    used = tx.power_per_ue()
    power_slack = config.power_budget_per_ue - used
    margins = np.empty((config.n_ues, config.n_sense_streams))
    for k in range(config.n_ues):
        for j in range(config.n_sense_streams):
            gamma = sensing_sinr(
                k, j, rx, tx, ch, config.noise_power, config.interference_model
            )
            margins[k, j] = np.log2(1.0 + gamma) - config.rate_thresholds[k, j]
    mse = aircomp_mse(rx, tx, ch, config.noise_power)
    mse_slack = config.mse_budget - mse
    power_ok = bool(
        np.all(power_slack >= -REPORT_RTOL * np.maximum(1.0, config.power_budget_per_ue))
    )
    rate_ok = bool(
        np.all(margins >= -REPORT_RTOL * np.maximum(1.0, config.rate_thresholds))
    )
    if np.isinf(config.mse_budget):
        mse_ok = True
    else:
        mse_ok = mse_slack >= -REPORT_RTOL * max(1.0, config.mse_budget)
    return ConstraintReport(
        per_ue_power_slack=power_slack,
        min_rate_margin=float(margins.min()),
        mse_budget_slack=float(mse_slack),
        feasible=power_ok and rate_ok and mse_ok,
    )


def worst_constraint_margin(report, config):
    """Smallest slack among the constraint families the config enables."""
    parts = [float(report.per_ue_power_slack.min())]
    if np.any(config.rate_thresholds > 0):
        parts.append(report.min_rate_margin)
    if np.isfinite(config.mse_budget):
        parts.append(report.mse_budget_slack)
    return min(parts)
