"""Self-contained property battery behind `scc verify`.

Five properties, each checked against an independent route (closed forms,
brute-force grids, Monte-Carlo simulation) rather than against the code that
produced the value.  The report carries the measured extreme for every
property, not just booleans, so a regression shows up as a number before it
becomes a failure.
"""

import dataclasses

import numpy as np

from .config import SystemConfig
from .metrics import (
    aircomp_mse,
    effective_comp_channels,
    effective_sense_channels,
    mmse_receive_beams,
    rate_mse_identity_gap,
)
from .optimizers import OptimizerOptions, run_cem
from .seeds import FADING_STREAM, NOISE_STREAM, PLACEMENT_STREAM, substream_seed, trial_seed
from .subproblems import (
    CemSubproblem,
    WsrSubproblem,
    solve_cem_subproblem,
    solve_wsr_subproblem,
)
from .system import ChannelSet, ReceiveBeams, TransmitBeams, generate_channels, place_ues


@dataclasses.dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str


@dataclasses.dataclass(frozen=True)
class VerifyReport:
    seed: int
    results: tuple

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def as_text(self):
        lines = [f"property verification (seed {self.seed})", ""]
        for r in self.results:
            flag = "PASS" if r.passed else "FAIL"
            lines.append(f"{flag}  {r.name}: worst={r.worst:.6e} tol={r.tolerance:.1e}")
            lines.append(f"      {r.detail}")
        lines.append("")
        lines.append("RESULT: " + ("all properties hold" if self.passed else "FAILURES PRESENT"))
        return "\n".join(lines) + "\n"


def _random_instance(seed, n=8, k=4, m=2, l=1, j=1):
    config = SystemConfig(
        n_bs_antennas=n, n_ues=k, n_ue_antennas=m,
        n_comp_streams=l, n_sense_streams=j,
        rate_thresholds=0.0, mse_budget=np.inf,
    ).with_snr_db(5.0)
    topology = place_ues(config, substream_seed(seed, PLACEMENT_STREAM))
    ch = generate_channels(config, topology, substream_seed(seed, FADING_STREAM))
    rng = np.random.Generator(np.random.PCG64(substream_seed(seed, NOISE_STREAM)))
    w = rng.standard_normal((k, m, l)) + 1j * rng.standard_normal((k, m, l))
    v = rng.standard_normal((k, j, m)) + 1j * rng.standard_normal((k, j, m))
    # scale into the power budgets
    tx = TransmitBeams(w, v)
    scale = np.sqrt(config.power_budget_per_ue / (2.0 * tx.power_per_ue()))
    tx = TransmitBeams(w * scale[:, None, None], v * scale[:, None, None])
    return config, ch, tx


def _check_identity(seed):
    worst = 0.0
    for shift, dims in enumerate([(8, 4, 2), (6, 3, 1), (5, 2, 2)]):
        n, k, m = dims
        config, ch, tx = _random_instance(trial_seed(seed, shift), n=n, k=k, m=m)
        for kk in range(k):
            worst = max(worst, rate_mse_identity_gap(kk, 0, tx, ch, config.noise_power))
    tol = 1e-8
    return PropertyResult(
        name="rate_mse_identity",
        passed=worst <= tol,
        worst=worst,
        tolerance=tol,
        detail="max |(1+SINR)*MSE - 1| at MMSE receivers over random beam/channel draws",
    )


def _desk_runs(seed):
    outcomes = []
    for shift in range(3):
        config = SystemConfig(
            n_bs_antennas=8, n_ues=4, n_ue_antennas=2,
            rate_thresholds=0.3, mse_budget=np.inf,
        ).with_snr_db(5.0)
        s = trial_seed(seed, shift)
        topology = place_ues(config, substream_seed(s, PLACEMENT_STREAM))
        ch = generate_channels(config, topology, substream_seed(s, FADING_STREAM))
        outcomes.append(run_cem(config, ch, OptimizerOptions(max_iterations=40)))
    return outcomes


def _check_rank_gaps(outcomes):
    worst = 0.0
    for outcome in outcomes:
        for rec in outcome.trace:
            worst = max(worst, rec.rank_gap)
    tol = 1e-5
    return PropertyResult(
        name="rank_one_extraction",
        passed=worst <= tol,
        worst=worst,
        tolerance=tol,
        detail="max relative residual eigenvalue mass of recovered sensing matrices",
    )


def _check_monotone(outcomes, slack=1e-7):
    worst = -np.inf
    for outcome in outcomes:
        objectives = outcome.trace.objectives()
        for a, b in zip(objectives, objectives[1:]):
            worst = max(worst, b - a)
    return PropertyResult(
        name="monotone_descent",
        passed=worst <= slack,
        worst=worst,
        tolerance=slack,
        detail="max per-iteration objective increase across alternating runs",
    )


def simulate_aircomp_mse(rx, tx, ch, noise_power, n_samples, seed, chunk=100_000):
    """Monte-Carlo estimate of the fused-computation MSE.

    Draws unit-power symbols and noise, pushes them through the fixed beams,
    and averages the squared aggregation error.  Independent of the analytic
    formula: only the signal model is shared.
    """
    z = rx.comp_receiver
    l_dim = z.shape[1]
    blocks = []
    hw = effective_comp_channels(tx, ch)
    hv = effective_sense_channels(tx, ch)
    for k in range(ch.n_ues):
        blocks.append(z.conj().T @ hw[k] - np.eye(l_dim))
    for k in range(ch.n_ues):
        blocks.append(z.conj().T @ hv[k].T)
    blocks.append(np.sqrt(noise_power) * z.conj().T)
    mix = np.hstack(blocks)
    dim = mix.shape[1]
    rng = np.random.Generator(np.random.PCG64(seed))
    total = 0.0
    remaining = int(n_samples)
    while remaining > 0:
        batch = min(chunk, remaining)
        x = rng.standard_normal((batch, dim)) + 1j * rng.standard_normal((batch, dim))
        x *= np.sqrt(0.5)
        err = x @ mix.T
        total += float(np.sum(np.abs(err) ** 2))
        remaining -= batch
    return total / float(n_samples)


def _check_mc_mse(seed, corrupt_noise_sign=False, n_samples=1_000_000):
    config, ch, tx = _random_instance(trial_seed(seed, 17))
    rx = mmse_receive_beams(tx, ch, config.noise_power)
    analytic = aircomp_mse(rx, tx, ch, config.noise_power)
    if corrupt_noise_sign:
        # test hook: flips the amplified-noise term so the simulation
        # disagrees; used to prove this property can fail
        z = rx.comp_receiver
        analytic -= 2.0 * config.noise_power * float(np.linalg.norm(z) ** 2)
    simulated = simulate_aircomp_mse(
        rx, tx, ch, config.noise_power, n_samples, substream_seed(seed, NOISE_STREAM)
    )
    worst = abs(simulated - analytic) / abs(analytic)
    tol = 1e-2
    return PropertyResult(
        name="monte_carlo_mse",
        passed=worst <= tol,
        worst=worst,
        tolerance=tol,
        detail=f"relative gap, analytic {analytic:.6e} vs simulated {simulated:.6e} "
        f"({n_samples} draws)",
    )


def _scalar_system():
    config = SystemConfig(
        n_bs_antennas=1, n_ues=1, n_ue_antennas=1,
        noise_power=1.0, power_budget_per_ue=10.0,
        rate_thresholds=1.0, mse_budget=np.inf,
    )
    ch = ChannelSet(
        matrices=np.ones((1, 1, 1), dtype=complex),
        fading_seed=0, topology=None, mode="normalized", gains=np.ones(1),
    )
    rx = ReceiveBeams(np.ones((1, 1), dtype=complex), np.ones((1, 1, 1), dtype=complex))
    return config, ch, rx


def _brute_force_cem_scalar(gamma, sigma2, p_max):
    # f(w) = (w-1)^2 + v2 with v2 at the SINR bound gamma*(sigma2 + w^2)
    w = np.linspace(0.0, np.sqrt(p_max), 400_001)
    v2 = gamma * (sigma2 + w**2)
    ok = w**2 + v2 <= p_max
    f = (w - 1.0) ** 2 + v2
    return float(np.min(f[ok]))


def _brute_force_wsr_scalar(sigma2, p_max):
    # f(v) = (v-1)^2 + sigma2 with w = 0; v free up to the budget
    v = np.linspace(0.0, np.sqrt(p_max), 400_001)
    return float(np.min((v - 1.0) ** 2 + sigma2))


def _check_scalar_oracles():
    config, ch, rx = _scalar_system()
    problem = CemSubproblem(
        receivers=rx,
        channels=ch,
        noise_power=1.0,
        sinr_targets=np.array([[1.0]]),
        power_budgets=np.array([10.0]),
        feasible_start=None,
    )
    sol = solve_cem_subproblem(problem, tol=1e-9)
    brute = _brute_force_cem_scalar(gamma=1.0, sigma2=1.0, p_max=10.0)
    gap_cem = abs(sol.objective - brute)

    wsr_problem = WsrSubproblem(
        receivers=rx,
        channels=ch,
        noise_power=0.01,
        mse_weights=np.array([[1.0]]),
        priorities=np.array([[1.0]]),
        power_budgets=np.array([4.0]),
    )
    wsr_sol = solve_wsr_subproblem(wsr_problem, tol=1e-9)
    brute_wsr = _brute_force_wsr_scalar(sigma2=0.01, p_max=4.0)
    gap_wsr = abs(wsr_sol.objective - brute_wsr)

    worst = max(gap_cem, gap_wsr)
    tol = 1e-4
    return PropertyResult(
        name="scalar_subproblem_oracles",
        passed=worst <= tol,
        worst=worst,
        tolerance=tol,
        detail=f"grid-search gaps: computation {gap_cem:.2e} (opt {brute:.6f}), "
        f"sum-rate {gap_wsr:.2e} (opt {brute_wsr:.6f})",
    )


def verify_suite(seed=0, corrupt_mse_noise=False):
    """Run the full battery and return a VerifyReport.

    corrupt_mse_noise is a test hook that sabotages the analytic MSE inside
    the Monte-Carlo comparison; with it the battery must report a failure.
    """
    seed = int(seed)
    desk = _desk_runs(seed)
    results = (
        _check_identity(seed),
        _check_rank_gaps(desk),
        _check_monotone(desk),
        _check_mc_mse(seed, corrupt_noise_sign=corrupt_mse_noise),
        _check_scalar_oracles(),
    )
    return VerifyReport(seed=seed, results=results)
