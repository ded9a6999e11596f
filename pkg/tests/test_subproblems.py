import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sccsim.errors import ContractError
from sccsim.metrics import mmse_receive_beams
from sccsim.subproblems import (
    CemSubproblem,
    WsrSubproblem,
    embed_vector,
    kkt_residuals,
    lift_matrix,
    recover_rank_one,
    solve_cem_subproblem,
    solve_wsr_subproblem,
    unembed_vector,
    unlift_matrix,
)
from sccsim.system import ReceiveBeams

from conftest import make_config, make_instance, manual_channels, random_feasible_beams


def scalar_receivers():
    return ReceiveBeams(np.ones((1, 1), dtype=complex), np.ones((1, 1, 1), dtype=complex))


def scalar_cem(p_budget, gamma=1.0, noise=1.0):
    ch = manual_channels(np.ones((1, 1, 1)))
    return CemSubproblem(
        scalar_receivers(), ch, noise, np.full((1, 1), gamma), np.array([p_budget])
    )


def scalar_wsr(p_budget, noise=0.01, rho=math.inf):
    ch = manual_channels(np.ones((1, 1, 1)))
    return WsrSubproblem(
        scalar_receivers(),
        ch,
        noise,
        np.ones((1, 1)),
        np.ones((1, 1)),
        np.array([p_budget]),
        mse_budget=rho,
    )


def random_cem(seed, gamma=0.3, p_budget=2.0, noise=1.0):
    cfg = make_config(
        n_bs_antennas=4, n_ues=2, n_ue_antennas=2, n_comp_streams=1, n_sense_streams=1
    )
    _, ch = make_instance(cfg, seed)
    rng = np.random.default_rng(seed + 1000)
    rx = mmse_receive_beams(random_feasible_beams(cfg, rng), ch, noise)
    return CemSubproblem(
        rx, ch, noise, np.full((2, 1), gamma), np.full(2, p_budget)
    )


def random_wsr(seed, p_budget=2.0, noise=1.0, rho=math.inf):
    cfg = make_config(
        n_bs_antennas=4, n_ues=2, n_ue_antennas=2, n_comp_streams=1, n_sense_streams=1
    )
    _, ch = make_instance(cfg, seed)
    rng = np.random.default_rng(seed + 2000)
    rx = mmse_receive_beams(random_feasible_beams(cfg, rng), ch, noise)
    return WsrSubproblem(
        rx, ch, noise, np.ones((2, 1)), np.ones((2, 1)), np.full(2, p_budget), mse_budget=rho
    )


def cem_objective(p, comp, sense):
    z = p.receivers.comp_receiver
    h = p.channels.matrices
    total = 0.0
    eye = np.eye(z.shape[1])
    for k in range(h.shape[0]):
        t = z.conj().T @ h[k]
        total += float(np.linalg.norm(t @ comp[k] - eye) ** 2)
        for j in range(sense.shape[1]):
            total += float(np.real(np.trace(t @ sense[k, j] @ t.conj().T)))
    return total


def cem_feasible(p, comp, sense, slack=1e-9):
    h = p.channels.matrices
    u = p.receivers.sense_receivers
    k_dim, j_dim = p.sinr_targets.shape
    for k in range(k_dim):
        power = float(np.linalg.norm(comp[k]) ** 2)
        for j in range(j_dim):
            power += float(np.real(np.trace(sense[k, j])))
            if np.linalg.eigvalsh(sense[k, j]).min() < -1e-8:
                return False
        if power > p.power_budgets[k] + slack * max(1.0, p.power_budgets[k]):
            return False
    for k in range(k_dim):
        for j in range(j_dim):
            b = np.einsum("n,inm->im", u[k, j].conj(), h)
            denom = p.noise_power * float(np.linalg.norm(u[k, j]) ** 2)
            for i in range(k_dim):
                denom += float(np.linalg.norm(b[i] @ comp[i]) ** 2)
                for m in range(j_dim):
                    if (i, m) != (k, j):
                        denom += float(np.real(b[i] @ sense[i, m] @ b[i].conj()))
            numer = float(np.real(b[k] @ sense[k, j] @ b[k].conj()))
            if numer < p.sinr_targets[k, j] * denom - slack * max(1.0, denom):
                return False
    return True


def wsr_objective(p, comp, sense):
    h = p.channels.matrices
    u = p.receivers.sense_receivers
    k_dim, j_dim = p.mse_weights.shape
    total = 0.0
    for k in range(k_dim):
        for j in range(j_dim):
            b = np.einsum("n,inm->im", u[k, j].conj(), h)
            e = abs(b[k] @ sense[k, j] - 1.0) ** 2
            e += p.noise_power * float(np.linalg.norm(u[k, j]) ** 2)
            for i in range(k_dim):
                e += float(np.linalg.norm(b[i] @ comp[i]) ** 2)
                for m in range(j_dim):
                    if (i, m) != (k, j):
                        e += abs(b[i] @ sense[i, m]) ** 2
            total += p.priorities[k, j] * p.mse_weights[k, j] * float(np.real(e))
    return total


# ---------------------------------------------------------------------------
# complex <-> real mappings


finite_complex = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=1, max_value=5))
def test_lift_round_trip(seed, m):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    herm = (a + a.conj().T) / 2
    assert np.abs(unlift_matrix(lift_matrix(herm)) - herm).max() <= 1e-14
    assert np.abs(unlift_matrix(lift_matrix(a)) - a).max() <= 1e-14


@settings(max_examples=40, deadline=None)
@given(st.lists(finite_complex, min_size=1, max_size=6))
def test_embed_round_trip(vals):
    a = np.array(vals)
    assert np.array_equal(unembed_vector(embed_vector(a)), a)


def test_lift_respects_products(rng):
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    b = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    assert np.allclose(lift_matrix(a) @ lift_matrix(b), lift_matrix(a @ b), atol=1e-12)


# ---------------------------------------------------------------------------
# pinned scalar optima


def test_cem_scalar_interior_power():
    sol = solve_cem_subproblem(scalar_cem(10.0))
    assert sol.status == "optimal"
    assert sol.comp_beams[0, 0, 0] == pytest.approx(0.5, abs=1e-4)
    assert sol.sense_matrices[0, 0, 0, 0].real == pytest.approx(1.25, abs=1e-4)
    assert sol.objective == pytest.approx(1.5, abs=1e-4)
    # the rate constraint binds, the power budget does not
    assert sol.sinr_duals[0, 0] == pytest.approx(1.0, abs=1e-3)
    assert abs(sol.power_duals[0]) <= 1e-3


def test_cem_scalar_power_limited():
    sol = solve_cem_subproblem(scalar_cem(1.0))
    assert sol.status == "optimal"
    assert abs(sol.comp_beams[0, 0, 0]) <= 1e-4
    assert sol.sense_matrices[0, 0, 0, 0].real == pytest.approx(1.0, abs=1e-4)
    assert sol.objective == pytest.approx(2.0, abs=1e-4)


def test_cem_scalar_infeasible():
    sol = solve_cem_subproblem(scalar_cem(0.5))
    assert sol.status == "infeasible"
    assert isinstance(sol.certificate, str) and sol.certificate
    assert math.isnan(sol.objective)


def test_wsr_scalar_unconstrained():
    sol = solve_wsr_subproblem(scalar_wsr(4.0))
    assert sol.status == "optimal"
    assert abs(sol.comp_beams[0, 0, 0]) <= 1e-4
    assert sol.sense_beams[0, 0, 0] == pytest.approx(1.0, abs=1e-4)
    assert sol.objective == pytest.approx(0.01, abs=1e-4)


def test_wsr_zero_budget_infeasible():
    sol = solve_wsr_subproblem(scalar_wsr(4.0, rho=0.0))
    assert sol.status == "infeasible"
    assert "floor" in sol.certificate


def test_wsr_scalar_power_binding():
    p = scalar_wsr(0.25)
    sol = solve_wsr_subproblem(p)
    assert sol.status == "optimal"
    assert sol.sense_beams[0, 0, 0] == pytest.approx(0.5, abs=1e-4)
    used = abs(sol.comp_beams[0, 0, 0]) ** 2 + abs(sol.sense_beams[0, 0, 0]) ** 2
    assert 0.25 - used >= -1e-6 * 0.25
    assert 0.25 - used <= 1e-5 * 0.25 + 1e-7
    assert sol.objective == pytest.approx(0.26, abs=1e-4)
    assert sol.power_duals[0] > 0.1


def test_solve_rejects_bad_tol():
    with pytest.raises(ContractError):
        solve_cem_subproblem(scalar_cem(10.0), tol=0.0)
    with pytest.raises(ContractError):
        solve_wsr_subproblem(scalar_wsr(4.0), tol=1e-2)


# ---------------------------------------------------------------------------
# problem statement validation


def test_cem_validation_errors():
    ch = manual_channels(np.ones((1, 1, 1)))
    rx = scalar_receivers()
    with pytest.raises(ContractError):
        CemSubproblem(rx, ch, 1.0, np.full((2, 1), 1.0), np.array([1.0]))
    with pytest.raises(ContractError):
        CemSubproblem(rx, ch, 1.0, np.full((1, 1), -0.5), np.array([1.0]))
    with pytest.raises(ContractError):
        CemSubproblem(rx, ch, 1.0, np.full((1, 1), 1.0), np.array([1.0]), "both_ways")


def test_wsr_validation_errors():
    ch = manual_channels(np.ones((1, 1, 1)))
    rx = scalar_receivers()
    ones = np.ones((1, 1))
    with pytest.raises(ContractError):
        WsrSubproblem(rx, ch, 1.0, np.zeros((1, 1)), ones, np.array([1.0]))
    with pytest.raises(ContractError):
        WsrSubproblem(rx, ch, 1.0, ones, ones, np.array([1.0]), mse_budget=-1.0)
    with pytest.raises(ContractError):
        WsrSubproblem(rx, ch, 1.0, np.ones((2, 1)), ones, np.array([1.0]))


def test_receiver_shape_mismatch():
    ch = manual_channels(np.ones((2, 1, 1)))
    rx = scalar_receivers()  # built for K=1
    with pytest.raises(ContractError):
        CemSubproblem(rx, ch, 1.0, np.full((2, 1), 1.0), np.full(2, 1.0))


# ---------------------------------------------------------------------------
# rank-one recovery


def test_recover_diagonal():
    v, gap = recover_rank_one(np.diag([2.0, 0.0]).astype(complex))
    assert np.allclose(v, [math.sqrt(2.0), 0.0], atol=1e-12)
    assert gap == 0.0


def test_recover_phase_convention():
    mat = np.array([[1.0, -1j], [1j, 1.0]])
    v, gap = recover_rank_one(mat)
    assert np.allclose(v, [1.0, 1j], atol=1e-12)
    assert gap <= 1e-15


def test_recover_reconstruction(rng):
    for _ in range(20):
        base = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        mat = np.outer(base, base.conj())
        v, gap = recover_rank_one(mat)
        assert gap <= 1e-12
        assert np.linalg.norm(np.outer(v, v.conj()) - mat) <= 1e-8 * np.linalg.norm(mat)


def test_recover_degenerate_zero():
    v, gap = recover_rank_one(np.zeros((3, 3), dtype=complex))
    assert np.all(v == 0) and gap == 0.0


def test_recover_rejects_bad_input():
    with pytest.raises(ContractError):
        recover_rank_one(np.ones((2, 3)))
    with pytest.raises(ContractError):
        recover_rank_one(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ---------------------------------------------------------------------------
# KKT residuals


def test_kkt_scalar_solution_tight():
    p = scalar_cem(10.0)
    sol = solve_cem_subproblem(p, tol=1e-7)
    assert sol.kkt is not None
    assert sol.kkt.worst() <= 1e-7


def test_kkt_flags_non_optimal_point():
    p = scalar_cem(10.0)
    sol = solve_cem_subproblem(p)
    sol.comp_beams = np.full((1, 1, 1), math.sqrt(5.0), dtype=complex)
    sol.sense_matrices = np.full((1, 1, 1, 1), 5.0, dtype=complex)
    res = kkt_residuals(sol, p)
    assert res.stationarity > 0.1


def test_kkt_wsr_solution_tight():
    p = scalar_wsr(0.25)
    sol = solve_wsr_subproblem(p, tol=1e-7)
    assert sol.kkt.worst() <= 1e-7


def test_dual_cone_membership():
    for seed in range(4):
        p = random_cem(seed)
        sol = solve_cem_subproblem(p)
        assert sol.status == "optimal"
        assert np.all(sol.sinr_duals >= -1e-8)
        assert np.all(sol.power_duals >= -1e-8)
        for k in range(2):
            psi = sol.psd_duals[k, 0]
            assert np.linalg.norm(psi - psi.conj().T) <= 1e-8 * max(1.0, np.linalg.norm(psi))
            assert np.linalg.eigvalsh(psi).min() >= -1e-8


# ---------------------------------------------------------------------------
# structural properties on random instances


@pytest.mark.parametrize("seed", range(6))
def test_solutions_are_near_rank_one(seed):
    p = random_cem(seed)
    sol = solve_cem_subproblem(p)
    assert sol.status == "optimal"
    for k in range(2):
        v_mat = sol.sense_matrices[k, 0]
        assert np.linalg.norm(v_mat - v_mat.conj().T) <= 1e-9 * max(1.0, np.linalg.norm(v_mat))
        assert np.linalg.eigvalsh(v_mat).min() >= -1e-8
        _, gap = recover_rank_one(v_mat)
        assert gap <= 1e-5


@pytest.mark.parametrize("seed", range(4))
def test_cem_kkt_random_instances(seed):
    p = random_cem(seed)
    sol = solve_cem_subproblem(p, tol=1e-7)
    assert sol.kkt.worst() <= 1e-6


def test_cem_dominates_feasible_points():
    p = random_cem(0)
    sol = solve_cem_subproblem(p)
    assert sol.status == "optimal"
    # feasible points from tightened instances; the feasible set is convex,
    # so their convex combinations stay feasible
    bases = []
    for gamma_scale, p_scale in [(1.5, 1.0), (2.0, 0.8), (1.2, 0.6)]:
        tight = CemSubproblem(
            p.receivers,
            p.channels,
            p.noise_power,
            p.sinr_targets * gamma_scale,
            p.power_budgets * p_scale,
        )
        alt = solve_cem_subproblem(tight)
        assert alt.status == "optimal"
        bases.append((alt.comp_beams, alt.sense_matrices))
    rng = np.random.default_rng(42)
    for _ in range(10):
        weights = rng.dirichlet(np.ones(len(bases)))
        comp = sum(w * b[0] for w, b in zip(weights, bases))
        sense = sum(w * b[1] for w, b in zip(weights, bases))
        assert cem_feasible(p, comp, sense, slack=1e-6)
        other = cem_objective(p, comp, sense)
        assert sol.objective <= other + 1e-6 * (1.0 + abs(other))


def test_cem_dominates_power_ball_points():
    p = random_cem(1, gamma=0.0)
    sol = solve_cem_subproblem(p)
    assert sol.status == "optimal"
    rng = np.random.default_rng(7)
    for _ in range(10):
        comp = rng.standard_normal((2, 2, 1)) + 1j * rng.standard_normal((2, 2, 1))
        base = rng.standard_normal((2, 1, 2)) + 1j * rng.standard_normal((2, 1, 2))
        sense = np.einsum("kjm,kjn->kjmn", base, base.conj())
        for k in range(2):
            used = np.linalg.norm(comp[k]) ** 2 + np.trace(sense[k, 0]).real
            scale = math.sqrt(p.power_budgets[k] / used) * rng.uniform(0.2, 1.0)
            comp[k] *= scale
            sense[k] *= scale**2
        assert cem_feasible(p, comp, sense)
        other = cem_objective(p, comp, sense)
        assert sol.objective <= other + 1e-6 * (1.0 + abs(other))


def test_wsr_dominates_power_ball_points():
    p = random_wsr(2)
    sol = solve_wsr_subproblem(p)
    assert sol.status == "optimal"
    rng = np.random.default_rng(9)
    for _ in range(10):
        comp = rng.standard_normal((2, 2, 1)) + 1j * rng.standard_normal((2, 2, 1))
        sense = rng.standard_normal((2, 1, 2)) + 1j * rng.standard_normal((2, 1, 2))
        for k in range(2):
            used = np.linalg.norm(comp[k]) ** 2 + np.linalg.norm(sense[k]) ** 2
            scale = math.sqrt(p.power_budgets[k] / used) * rng.uniform(0.2, 1.0)
            comp[k] *= scale
            sense[k] *= scale
        other = wsr_objective(p, comp, sense)
        assert sol.objective <= other + 1e-6 * (1.0 + abs(other))


def test_wsr_objective_matches_weighted_mse_sum():
    p = random_wsr(3)
    sol = solve_wsr_subproblem(p)
    assert sol.objective == pytest.approx(
        wsr_objective(p, sol.comp_beams, sol.sense_beams), rel=1e-8
    )


# ---------------------------------------------------------------------------
# brute-force oracle on scalar reductions


def grid_oracle_cem(a, b, u_abs, gamma, sigma2, p_budget, points=6001):
    best = math.inf
    for r in np.linspace(0.0, math.sqrt(p_budget), points):
        v = gamma * (sigma2 * u_abs**2 + (abs(b) * r) ** 2) / abs(b) ** 2
        if r * r + v > p_budget:
            continue
        f = (abs(a) * r) ** 2 - 2.0 * abs(a) * r + 1.0 + abs(a) ** 2 * v
        best = min(best, f)
    return best


@pytest.mark.parametrize("seed", range(5))
def test_cem_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal() + 1j * rng.standard_normal()
    z = rng.standard_normal() + 1j * rng.standard_normal()
    u = rng.standard_normal() + 1j * rng.standard_normal()
    gamma = rng.uniform(0.2, 1.5)
    sigma2 = rng.uniform(0.5, 2.0)
    p_budget = rng.uniform(2.0, 6.0)

    ch = manual_channels(np.full((1, 1, 1), h))
    rx = ReceiveBeams(np.full((1, 1), z), np.full((1, 1, 1), u))
    prob = CemSubproblem(rx, ch, sigma2, np.full((1, 1), gamma), np.array([p_budget]))
    sol = solve_cem_subproblem(prob)
    oracle = grid_oracle_cem(np.conj(z) * h, np.conj(u) * h, abs(u), gamma, sigma2, p_budget)
    if sol.status == "infeasible":
        assert oracle == math.inf
    else:
        assert math.isfinite(oracle)
        assert sol.objective == pytest.approx(oracle, rel=1e-4, abs=1e-6)


def grid_oracle_wsr(b, u_abs, sigma2, p_budget, points=6001):
    # w = 0 is always optimal for K=1 (it only adds self-interference)
    best = math.inf
    for r in np.linspace(0.0, math.sqrt(p_budget), points):
        e = (abs(b) * r - 1.0) ** 2 + sigma2 * u_abs**2
        best = min(best, e)
    return best


@pytest.mark.parametrize("seed", range(5))
def test_wsr_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed + 50)
    h = rng.standard_normal() + 1j * rng.standard_normal()
    u = rng.standard_normal() + 1j * rng.standard_normal()
    sigma2 = rng.uniform(0.01, 1.0)
    p_budget = rng.uniform(0.1, 4.0)

    ch = manual_channels(np.full((1, 1, 1), h))
    rx = ReceiveBeams(np.ones((1, 1), dtype=complex), np.full((1, 1, 1), u))
    prob = WsrSubproblem(
        rx, ch, sigma2, np.ones((1, 1)), np.ones((1, 1)), np.array([p_budget])
    )
    sol = solve_wsr_subproblem(prob)
    assert sol.status == "optimal"
    oracle = grid_oracle_wsr(np.conj(u) * h, abs(u), sigma2, p_budget)
    assert sol.objective == pytest.approx(oracle, rel=1e-4, abs=1e-6)


# ---------------------------------------------------------------------------
# cross-checks against an independent solver


@pytest.mark.parametrize("seed", range(3))
def test_cem_matches_reference_solver(seed):
    cvxpy = pytest.importorskip("cvxpy")
    p = random_cem(seed)
    sol = solve_cem_subproblem(p)
    assert sol.status == "optimal"

    h = p.channels.matrices
    z = p.receivers.comp_receiver
    u = p.receivers.sense_receivers
    w_vars = [cvxpy.Variable((2, 1), complex=True) for _ in range(2)]
    v_vars = [cvxpy.Variable((2, 2), hermitian=True) for _ in range(2)]
    eye = np.eye(1)
    obj = 0
    cons = []
    for k in range(2):
        t = z.conj().T @ h[k]
        obj += cvxpy.sum_squares(t @ w_vars[k] - eye)
        obj += cvxpy.real(cvxpy.trace(h[k].conj().T @ z @ z.conj().T @ h[k] @ v_vars[k]))
        cons.append(v_vars[k] >> 0)
        cons.append(
            cvxpy.sum_squares(w_vars[k]) + cvxpy.real(cvxpy.trace(v_vars[k]))
            <= p.power_budgets[k]
        )
    for k in range(2):
        b = [h[i].conj().T @ u[k, 0] for i in range(2)]
        interference = p.noise_power * np.linalg.norm(u[k, 0]) ** 2
        expr = interference
        for i in range(2):
            expr = expr + cvxpy.sum_squares(b[i].conj().T @ w_vars[i])
            if i != k:
                expr = expr + cvxpy.real(cvxpy.quad_form(b[i], v_vars[i]))
        cons.append(cvxpy.real(cvxpy.quad_form(b[k], v_vars[k])) >= p.sinr_targets[k, 0] * expr)
    prob = cvxpy.Problem(cvxpy.Minimize(obj), cons)
    prob.solve(solver="CLARABEL")
    assert prob.status == "optimal"
    assert sol.objective == pytest.approx(prob.value, rel=1e-5, abs=1e-6)


@pytest.mark.parametrize("seed", range(3))
def test_wsr_matches_reference_solver(seed):
    cvxpy = pytest.importorskip("cvxpy")
    rho = 3.0 if seed == 0 else math.inf
    p = random_wsr(seed, rho=rho)
    sol = solve_wsr_subproblem(p)
    assert sol.status == "optimal"

    h = p.channels.matrices
    z = p.receivers.comp_receiver
    u = p.receivers.sense_receivers
    w_vars = [cvxpy.Variable((2, 1), complex=True) for _ in range(2)]
    v_vars = [cvxpy.Variable(2, complex=True) for _ in range(2)]
    obj = 0
    cons = []
    for k in range(2):
        b = [h[i].conj().T @ u[k, 0] for i in range(2)]
        e = p.noise_power * np.linalg.norm(u[k, 0]) ** 2
        e = e + cvxpy.square(cvxpy.abs(b[k].conj() @ v_vars[k] - 1.0))
        for i in range(2):
            e = e + cvxpy.sum_squares(b[i].conj().T @ w_vars[i])
            if i != k:
                e = e + cvxpy.square(cvxpy.abs(b[i].conj() @ v_vars[i]))
        obj += p.priorities[k, 0] * p.mse_weights[k, 0] * e
    for k in range(2):
        cons.append(
            cvxpy.sum_squares(w_vars[k]) + cvxpy.sum_squares(v_vars[k]) <= p.power_budgets[k]
        )
    if math.isfinite(rho):
        fused = p.noise_power * np.linalg.norm(z) ** 2
        for k in range(2):
            t = z.conj().T @ h[k]
            fused = fused + cvxpy.sum_squares(t @ w_vars[k] - np.eye(1))
            fused = fused + cvxpy.sum_squares(t @ v_vars[k])
        cons.append(fused <= rho)
    prob = cvxpy.Problem(cvxpy.Minimize(obj), cons)
    prob.solve(solver="CLARABEL")
    assert prob.status == "optimal"
    assert sol.objective == pytest.approx(prob.value, rel=1e-5, abs=1e-6)


# ---------------------------------------------------------------------------
# debug dump and interior progress


def test_dump_records_phases(tmp_path):
    path = tmp_path / "dump.jsonl"
    sol = solve_cem_subproblem(random_cem(0), dump_path=str(path))
    assert sol.status == "optimal"
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert lines
    for row in lines:
        assert {"section", "status", "iterations", "gap", "trace"} <= set(row)
        assert len(row["trace"]) == row["iterations"]


def test_interior_gap_monotone(tmp_path):
    path = tmp_path / "dump.jsonl"
    solve_cem_subproblem(random_cem(1), dump_path=str(path))
    solve_wsr_subproblem(random_wsr(1), dump_path=str(path))
    for row in (json.loads(line) for line in path.read_text().splitlines()):
        gaps = [rec["gap"] for rec in row["trace"]]
        for before, after in zip(gaps, gaps[1:]):
            assert after <= before + 1e-9
