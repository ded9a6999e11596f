"""Convex transmit-beam subproblems solved through the cone solver.

Two problems share one assembly pipeline:

* the computation-error subproblem: quadratic misalignment objective over
  computation beams W_k plus a linear trace term over lifted sensing
  matrices V_{k,j}, under lifted SINR constraints, per-UE power and V >= 0;
* the weighted-MSE subproblem of the sum-rate loop: a single weighted
  quadratic over (W, v) under per-UE power and an optional fused-MSE budget.

Complex data is mapped to real cones: vectors via [Re; Im] stacking,
matrices via the [[Re, -Im], [Im, Re]] embedding (Hermitian PSD iff the
embedding is symmetric PSD), and each convex quadratic q(x) <= a(x) via the
second-order cone || [2(Fx-g); a-1] || <= a+1.

Feasibility is decided by a first phase that minimizes the maximum
constraint violation tau; the main solve runs only when a strictly feasible
point is known (either from the caller or from tau* < 0).
"""

import dataclasses
import json
import math

import numpy as np

from .conic import ConeDims, smat, solve_cone_program, svec
from .errors import ContractError, DomainError
from .system import TransmitBeams

DEFAULT_TOL = 1e-7


# ---------------------------------------------------------------------------
# complex <-> real mappings


def lift_matrix(a):
    """Complex (p, q) matrix -> real (2p, 2q) block embedding."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def unlift_matrix(s):
    """Inverse of lift_matrix, averaging the two redundant copies."""
    p, q = s.shape[0] // 2, s.shape[1] // 2
    re = 0.5 * (s[:p, :q] + s[p:, q:])
    im = 0.5 * (s[p:, :q] - s[:p, q:])
    return re + 1j * im


def embed_vector(a):
    """Complex length-d vector -> real length-2d [Re; Im] stacking."""
    a = np.asarray(a, dtype=complex)
    return np.concatenate([a.real, a.imag])


def unembed_vector(x):
    d = x.size // 2
    return x[:d] + 1j * x[d:]


def _hermitian_basis(m):
    """Real basis of Hermitian m x m matrices: diagonals, then Re/Im uppers."""
    basis = []
    for i in range(m):
        b = np.zeros((m, m), dtype=complex)
        b[i, i] = 1.0
        basis.append(b)
    for i in range(m):
        for j in range(i + 1, m):
            b = np.zeros((m, m), dtype=complex)
            b[i, j] = 1.0
            b[j, i] = 1.0
            basis.append(b)
    for i in range(m):
        for j in range(i + 1, m):
            b = np.zeros((m, m), dtype=complex)
            b[i, j] = 1.0j
            b[j, i] = -1.0j
            basis.append(b)
    return basis


def _hermitian_params(v):
    """Coordinates of Hermitian v in the _hermitian_basis order."""
    m = v.shape[0]
    iu = np.triu_indices(m, k=1)
    return np.concatenate([np.real(np.diag(v)), v[iu].real, v[iu].imag])


# ---------------------------------------------------------------------------
# problem statements


def _check_common(receivers, channels, noise_power, power_budgets):
    k, n, _ = channels.matrices.shape
    z = receivers.comp_receiver
    u = receivers.sense_receivers
    if z.shape[0] != n or u.shape[0] != k or u.shape[2] != n:
        raise ContractError("receivers do not match the channel set")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(u))):
        raise ContractError("receivers must be finite")
    p = np.asarray(power_budgets, dtype=float)
    if p.shape != (k,) or not np.all(p > 0):
        raise ContractError(f"power budgets must be positive with shape ({k},)")
    if not noise_power > 0:
        raise ContractError("noise power must be positive")
    return p


@dataclasses.dataclass(frozen=True, eq=False)
class CemSubproblem:
    """Computation-error subproblem at fixed receivers.

    sinr_targets holds gamma_{k,j} >= 0; a zero entry drops that rate
    constraint.  feasible_start, when given and checking out as feasible
    within solver tolerance, lets the solver skip the feasibility phase.
    """

    receivers: object
    channels: object
    noise_power: float
    sinr_targets: np.ndarray
    power_budgets: np.ndarray
    interference_model: str = "all_cross_streams"
    feasible_start: TransmitBeams = None

    def __post_init__(self):
        p = _check_common(self.receivers, self.channels, self.noise_power, self.power_budgets)
        g = np.asarray(self.sinr_targets, dtype=float)
        j = self.receivers.sense_receivers.shape[1]
        if g.shape != (self.channels.n_ues, j):
            raise ContractError(f"sinr_targets must have shape ({self.channels.n_ues}, {j})")
        if not np.all(np.isfinite(g)) or np.any(g < 0):
            raise ContractError("sinr targets must be finite and >= 0")
        if self.interference_model not in ("all_cross_streams", "paper_literal"):
            raise ContractError(f"unknown interference model {self.interference_model!r}")
        object.__setattr__(self, "sinr_targets", g)
        object.__setattr__(self, "power_budgets", p)
        object.__setattr__(self, "noise_power", float(self.noise_power))


@dataclasses.dataclass(frozen=True, eq=False)
class WsrSubproblem:
    """Weighted-MSE transmit subproblem of the sum-rate loop."""

    receivers: object
    channels: object
    noise_power: float
    mse_weights: np.ndarray
    priorities: np.ndarray
    power_budgets: np.ndarray
    mse_budget: float = math.inf
    feasible_start: TransmitBeams = None

    def __post_init__(self):
        p = _check_common(self.receivers, self.channels, self.noise_power, self.power_budgets)
        j = self.receivers.sense_receivers.shape[1]
        shape = (self.channels.n_ues, j)
        beta = np.asarray(self.mse_weights, dtype=float)
        theta = np.asarray(self.priorities, dtype=float)
        if beta.shape != shape or theta.shape != shape:
            raise ContractError(f"weights and priorities must have shape {shape}")
        if not (np.all(beta > 0) and np.all(theta > 0)):
            raise ContractError("weights and priorities must be positive")
        if not self.mse_budget >= 0:
            raise ContractError("mse_budget must be >= 0 (inf disables it)")
        object.__setattr__(self, "mse_weights", beta)
        object.__setattr__(self, "priorities", theta)
        object.__setattr__(self, "power_budgets", p)
        object.__setattr__(self, "noise_power", float(self.noise_power))


@dataclasses.dataclass(frozen=True)
class KktResiduals:
    """Stationarity / complementarity / feasibility / dual-sign residuals."""

    stationarity: float
    complementarity: float
    primal_violation: float
    dual_violation: float

    def worst(self):
        return max(
            self.stationarity,
            self.complementarity,
            self.primal_violation,
            self.dual_violation,
        )


@dataclasses.dataclass(eq=False)
class SubproblemSolution:
    comp_beams: np.ndarray
    sense_matrices: np.ndarray
    sense_beams: np.ndarray
    sinr_duals: np.ndarray
    power_duals: np.ndarray
    psd_duals: np.ndarray
    mse_dual: float
    objective: float
    status: str
    kkt: object
    solver_iterations: int
    solver_gap: float
    certificate: str = None


# ---------------------------------------------------------------------------
# assembly


class _QuadBlock:
    """One constraint/objective piece ||F x - g||^2 <= d_row . x + d_const."""

    def __init__(self, name, f, g, d_row, d_const, relax):
        self.name = name
        self.f = f
        self.g = g
        self.d_row = d_row
        self.d_const = d_const
        self.relax = relax  # participates in the feasibility phase

    def violation(self, x):
        resid = self.f @ x - self.g
        return float(resid @ resid) - (float(self.d_row @ x) + self.d_const)


class _Model:
    """Assembled core data shared by the feasibility and main solves."""

    def __init__(self, n_core):
        self.n_core = n_core
        self.quads = []  # _QuadBlock, objective block excluded
        self.objective_quad = None  # (F, g) with epigraph variable
        self.c_lin = np.zeros(n_core)
        self.psd = []  # (name, columns (n_core -> svec rows), order)
        self.constant = 0.0

    def max_violation(self, x):
        worst = -np.inf
        for q in self.quads:
            worst = max(worst, q.violation(x))
        for _, cols, order, params in self.psd:
            v = smat(cols_value(cols, x), order)
            worst = max(worst, -float(np.linalg.eigvalsh(v)[0]))
        return worst


def cols_value(cols, x):
    return cols @ x


def _soc_block(f, g, d_row, d_const, aux, n):
    """Rows for || [2(Fx-g); a-1] || <= a+1 with a = d_row.x + d_const + aux_t."""
    rows = f.shape[0]
    g_mat = np.zeros((rows + 2, n))
    h = np.zeros(rows + 2)
    g_mat[0, 0] = -aux
    g_mat[0, 1:] = -d_row
    h[0] = d_const + 1.0
    g_mat[1:-1, 1:] = -2.0 * f
    h[1 : rows + 1] = -2.0 * g
    g_mat[-1, 0] = -aux
    g_mat[-1, 1:] = -d_row
    h[-1] = d_const - 1.0
    return g_mat, h


def _build_cem_model(p):
    ch = p.channels
    k_dim, n_dim, m_dim = ch.matrices.shape
    z = p.receivers.comp_receiver
    u = p.receivers.sense_receivers
    l_dim = z.shape[1]
    j_dim = u.shape[1]
    sigma2 = p.noise_power

    basis = _hermitian_basis(m_dim)
    n_w = 2 * m_dim * l_dim
    n_v = m_dim * m_dim
    n_core = k_dim * n_w + k_dim * j_dim * n_v

    def w_cols(k):
        return slice(k * n_w, (k + 1) * n_w)

    def v_cols(k, j):
        start = k_dim * n_w + (k * j_dim + j) * n_v
        return slice(start, start + n_v)

    model = _Model(n_core)
    model.w_cols = w_cols
    model.v_cols = v_cols
    model.dims = (k_dim, n_dim, m_dim, l_dim, j_dim)

    t_eff = np.einsum("ln,knm->klm", z.conj().T, ch.matrices)  # Z^H H_k
    b_eff = np.einsum("kjn,inm->kjim", u.conj(), ch.matrices)  # rows u_kj^H H_i

    # objective: sum_k ||Z^H H_k W_k - I||_F^2  +  sum_kj tr(A_k V_kj)
    f_rows = []
    g_rows = []
    for k in range(k_dim):
        lifted = lift_matrix(t_eff[k])
        for l in range(l_dim):
            block = np.zeros((2 * l_dim, n_core))
            block[:, w_cols(k)][:, 2 * m_dim * l : 2 * m_dim * (l + 1)] = lifted
            f_rows.append(block)
            target = np.zeros(l_dim, dtype=complex)
            target[l] = 1.0
            g_rows.append(embed_vector(target))
        a_k = t_eff[k].conj().T @ t_eff[k]
        coeffs = np.array([np.real(np.trace(a_k @ b)) for b in basis])
        for j in range(j_dim):
            model.c_lin[v_cols(k, j)] += coeffs
    model.objective_quad = (np.vstack(f_rows), np.concatenate(g_rows))

    # lifted SINR constraints, one per stream with a positive target
    trace_coeffs = np.array([np.real(np.trace(b)) for b in basis])
    for k in range(k_dim):
        for j in range(j_dim):
            gamma = p.sinr_targets[k, j]
            if gamma <= 0:
                continue
            b_vecs = b_eff[k, j]  # (K, M) rows H_i^H u_kj as conjugates
            if not np.any(np.abs(b_vecs)):
                raise _DegenerateReceiver(k, j)
            f = np.zeros((2 * k_dim * l_dim, n_core))
            for i in range(k_dim):
                lifted = lift_matrix(b_vecs[i][None, :])
                for l in range(l_dim):
                    rows = slice(2 * (i * l_dim + l), 2 * (i * l_dim + l) + 2)
                    f[rows, w_cols(i)][:, 2 * m_dim * l : 2 * m_dim * (l + 1)] = lifted
            d_row = np.zeros(n_core)
            for i in range(k_dim):
                # rows are u^H H_i, so row @ bs @ row^H is the Hermitian
                # form (H_i^H u)^H bs (H_i^H u)
                b = b_vecs[i]
                quad = np.array([np.real(b @ bs @ b.conj()) for bs in basis])
                for m in range(j_dim):
                    if (i, m) == (k, j):
                        d_row[v_cols(k, j)] += quad / gamma
                    elif _interferes(i, m, k, j, p.interference_model):
                        d_row[v_cols(i, m)] -= quad
            d_const = -sigma2 * float(np.linalg.norm(u[k, j]) ** 2)
            model.quads.append(
                _QuadBlock(("sinr", k, j), f, np.zeros(f.shape[0]), d_row, d_const, True)
            )

    # per-UE power
    for k in range(k_dim):
        f = np.zeros((n_w, n_core))
        f[:, w_cols(k)] = np.eye(n_w)
        d_row = np.zeros(n_core)
        for j in range(j_dim):
            d_row[v_cols(k, j)] -= trace_coeffs
        model.quads.append(
            _QuadBlock(("power", k), f, np.zeros(n_w), d_row, float(p.power_budgets[k]), True)
        )

    # V_kj >= 0 as lifted real PSD blocks
    lifted_basis = np.stack([svec(lift_matrix(b)) for b in basis])  # (n_v, q)
    for k in range(k_dim):
        for j in range(j_dim):
            cols = np.zeros((lifted_basis.shape[1], n_core))
            cols[:, v_cols(k, j)] = lifted_basis.T
            model.psd.append((("psd", k, j), cols, 2 * m_dim, v_cols(k, j)))
    return model


def _interferes(i, m, k, j, model):
    if model == "all_cross_streams":
        return (i, m) != (k, j)
    return i != k and m != j


def _build_wsr_model(p):
    ch = p.channels
    k_dim, n_dim, m_dim = ch.matrices.shape
    z = p.receivers.comp_receiver
    u = p.receivers.sense_receivers
    l_dim = z.shape[1]
    j_dim = u.shape[1]
    sigma2 = p.noise_power

    n_w = 2 * m_dim * l_dim
    n_v = 2 * m_dim
    n_core = k_dim * n_w + k_dim * j_dim * n_v

    def w_cols(k):
        return slice(k * n_w, (k + 1) * n_w)

    def v_cols(k, j):
        start = k_dim * n_w + (k * j_dim + j) * n_v
        return slice(start, start + n_v)

    model = _Model(n_core)
    model.w_cols = w_cols
    model.v_cols = v_cols
    model.dims = (k_dim, n_dim, m_dim, l_dim, j_dim)

    t_eff = np.einsum("ln,knm->klm", z.conj().T, ch.matrices)
    b_eff = np.einsum("kjn,inm->kjim", u.conj(), ch.matrices)

    # objective sum_kj theta*beta*MSE_kj: one stacked weighted quadratic
    f_rows = []
    constant = 0.0
    for k in range(k_dim):
        for j in range(j_dim):
            w = math.sqrt(p.priorities[k, j] * p.mse_weights[k, j])
            block = np.zeros((2 * k_dim * (l_dim + j_dim), n_core))
            r = 0
            for i in range(k_dim):
                lifted = lift_matrix(b_eff[k, j, i][None, :])
                for l in range(l_dim):
                    block[r : r + 2, w_cols(i)][:, 2 * m_dim * l : 2 * m_dim * (l + 1)] = lifted
                    r += 2
                for m in range(j_dim):
                    block[r : r + 2, v_cols(i, m)] = lifted
                    r += 2
            f_rows.append(w * block)
            # -2 theta beta Re(u^H H_k v_kj) is linear in v
            coeff = p.priorities[k, j] * p.mse_weights[k, j]
            model.c_lin[v_cols(k, j)] -= 2.0 * coeff * embed_vector(b_eff[k, j, k].conj())
            constant += coeff * (sigma2 * float(np.linalg.norm(u[k, j]) ** 2) + 1.0)
    model.objective_quad = (np.vstack(f_rows), np.zeros(sum(b.shape[0] for b in f_rows)))
    model.constant = constant

    for k in range(k_dim):
        f = np.zeros((n_w + j_dim * n_v, n_core))
        f[:n_w, w_cols(k)] = np.eye(n_w)
        for j in range(j_dim):
            f[n_w + j * n_v : n_w + (j + 1) * n_v, v_cols(k, j)] = np.eye(n_v)
        model.quads.append(
            _QuadBlock(
                ("power", k), f, np.zeros(f.shape[0]), np.zeros(n_core), float(p.power_budgets[k]), True
            )
        )

    if math.isfinite(p.mse_budget):
        floor = sigma2 * float(np.linalg.norm(z) ** 2)
        f_rows = []
        g_rows = []
        for k in range(k_dim):
            lifted = lift_matrix(t_eff[k])
            for l in range(l_dim):
                block = np.zeros((2 * l_dim, n_core))
                block[:, w_cols(k)][:, 2 * m_dim * l : 2 * m_dim * (l + 1)] = lifted
                f_rows.append(block)
                target = np.zeros(l_dim, dtype=complex)
                target[l] = 1.0
                g_rows.append(embed_vector(target))
            for j in range(j_dim):
                block = np.zeros((2 * l_dim, n_core))
                block[:, v_cols(k, j)] = lifted
                f_rows.append(block)
                g_rows.append(np.zeros(2 * l_dim))
        model.quads.append(
            _QuadBlock(
                ("mse_budget",),
                np.vstack(f_rows),
                np.concatenate(g_rows),
                np.zeros(n_core),
                p.mse_budget - floor,
                True,
            )
        )
    return model


class _DegenerateReceiver(Exception):
    def __init__(self, k, j):
        super().__init__(f"zero effective receiver for stream ({k}, {j})")
        self.stream = (k, j)


# ---------------------------------------------------------------------------
# conic solves over an assembled model


def _assemble(model, phase1):
    n = 1 + model.n_core
    g_parts = []
    h_parts = []
    soc_dims = []
    block_rows = {}
    offset = 0
    if not phase1:
        f, g = model.objective_quad
        g_mat, h = _soc_block(f, g, np.zeros(model.n_core), 0.0, 1.0, n)
        g_parts.append(g_mat)
        h_parts.append(h)
        soc_dims.append(h.size)
        block_rows[("objective",)] = slice(offset, offset + h.size)
        offset += h.size
    for q in model.quads:
        aux = 1.0 if (phase1 and q.relax) else 0.0
        g_mat, h = _soc_block(q.f, q.g, q.d_row, q.d_const, aux, n)
        g_parts.append(g_mat)
        h_parts.append(h)
        soc_dims.append(h.size)
        block_rows[q.name] = slice(offset, offset + h.size)
        offset += h.size
    psd_orders = []
    for name, cols, order, _ in model.psd:
        rows = cols.shape[0]
        g_mat = np.zeros((rows, n))
        g_mat[:, 1:] = -cols
        if phase1:
            g_mat[:, 0] = -svec(np.eye(order))
        g_parts.append(g_mat)
        h_parts.append(np.zeros(rows))
        psd_orders.append(order)
        block_rows[name] = slice(offset, offset + rows)
        offset += rows
    g_all = np.vstack(g_parts)
    h_all = np.concatenate(h_parts)
    dims = ConeDims(nonneg=0, soc=tuple(soc_dims), psd=tuple(psd_orders))
    if phase1:
        c = np.zeros(n)
        c[0] = 1.0
    else:
        c = np.concatenate([[1.0], model.c_lin])
    return c, g_all, h_all, dims, block_rows


def _certifies_feasibility(model, x_core, tol):
    """Does x_core witness that the feasibility phase would succeed?

    The phase declares infeasibility when tau* > tol, so any point whose
    worst violation stays within tol settles the outcome.  Boundary points
    qualify: rank-one recovered iterates sit exactly on the PSD cone and
    optimal iterates leave power constraints active.
    """
    for q in model.quads:
        if q.violation(x_core) > tol:
            return False
    for _, cols, order, _ in model.psd:
        eigs = np.linalg.eigvalsh(smat(cols @ x_core, order))
        if eigs[0] < -tol:
            return False
    return True


def _run_phases(model, tol, x_start, dump):
    """Feasibility phase (unless x_start certifies it), then the main solve.

    Returns (solution, status, block_rows, certificate_message).
    """
    need_phase1 = x_start is None or not _certifies_feasibility(model, x_start, max(tol, 1e-9))
    if need_phase1:
        c, g_mat, h, dims, rows = _assemble(model, phase1=True)
        first = solve_cone_program(
            c,
            g_mat,
            h,
            dims,
            tol=max(tol, 1e-9),
            max_iterations=100,
            objective_cutoff=-max(tol, 1e-9),
        )
        _dump(dump, "feasibility_phase", first)
        tau = first.primal_objective
        if first.status == "numeric_failure":
            return None, "numeric_failure", None, "feasibility phase failed numerically"
        if first.status != "cutoff" and tau > tol:
            worst = _worst_block(model, first.x[1:])
            return (
                None,
                "infeasible",
                None,
                f"minimal max constraint violation {tau:.3e} exceeds tol; worst: {worst}",
            )
    c, g_mat, h, dims, rows = _assemble(model, phase1=False)
    sol = solve_cone_program(c, g_mat, h, dims, tol=tol, max_iterations=100)
    _dump(dump, "main_phase", sol)
    return sol, sol.status, rows, None


def _worst_block(model, x_core):
    worst_name, worst_val = None, -np.inf
    for q in model.quads:
        v = q.violation(x_core)
        if v > worst_val:
            worst_name, worst_val = q.name, v
    for name, cols, order, _ in model.psd:
        v = -float(np.linalg.eigvalsh(smat(cols @ x_core, order))[0])
        if v > worst_val:
            worst_name, worst_val = name, v
    return "/".join(str(part) for part in worst_name)


def _soc_dual_scalar(z, rows):
    blk = z[rows]
    return float(blk[0] + blk[-1])


def _dump(path, section, sol):
    if path is None:
        return
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "section": section,
                    "status": sol.status,
                    "iterations": sol.iterations,
                    "gap": sol.gap,
                    "primal_residual": sol.primal_residual,
                    "dual_residual": sol.dual_residual,
                    "trace": sol.trace,
                }
            )
            + "\n"
        )


def _start_vector_cem(p, model):
    if p.feasible_start is None:
        return None
    k_dim, _, m_dim, l_dim, j_dim = model.dims
    x = np.zeros(model.n_core)
    for k in range(k_dim):
        w = p.feasible_start.comp_beams[k]
        x[model.w_cols(k)] = np.concatenate([embed_vector(w[:, l]) for l in range(l_dim)])
        for j in range(j_dim):
            v = p.feasible_start.sense_beams[k, j]
            x[model.v_cols(k, j)] = _hermitian_params(np.outer(v, v.conj()))
    return x


def _start_vector_wsr(p, model):
    if p.feasible_start is None:
        return None
    k_dim, _, m_dim, l_dim, j_dim = model.dims
    x = np.zeros(model.n_core)
    for k in range(k_dim):
        w = p.feasible_start.comp_beams[k]
        x[model.w_cols(k)] = np.concatenate([embed_vector(w[:, l]) for l in range(l_dim)])
        for j in range(j_dim):
            x[model.v_cols(k, j)] = embed_vector(p.feasible_start.sense_beams[k, j])
    return x


def solve_cem_subproblem(p, tol=DEFAULT_TOL, dump_path=None):
    """Minimize the misalignment-plus-leakage objective at fixed receivers.

    Returns a SubproblemSolution; on `infeasible` the certificate names the
    least-satisfiable constraint.  Duals are normalized by the epigraph
    multiplier so they match the plain (non-epigraph) KKT system.
    """
    if not 0 < tol <= 1e-3:
        raise ContractError(f"tol must be in (0, 1e-3], got {tol}")
    try:
        model = _build_cem_model(p)
    except _DegenerateReceiver as exc:
        return _empty_solution("infeasible", str(exc))
    k_dim, _, m_dim, l_dim, j_dim = model.dims
    sol, status, rows, cert = _run_phases(model, tol, _start_vector_cem(p, model), dump_path)
    if sol is None:
        return _empty_solution(status, cert)

    x = sol.x[1:]
    comp = np.empty((k_dim, m_dim, l_dim), dtype=complex)
    for k in range(k_dim):
        blk = x[model.w_cols(k)]
        for l in range(l_dim):
            comp[k, :, l] = unembed_vector(blk[2 * m_dim * l : 2 * m_dim * (l + 1)])
    # V from the cone-side slack: PSD by construction, unlike h - Gx at
    # finite residual
    sense_m = np.empty((k_dim, j_dim, m_dim, m_dim), dtype=complex)
    psd_duals = np.empty_like(sense_m)
    for name, cols, order, vcols in model.psd:
        _, k, j = name
        s_blk = smat(sol.s[rows[name]], order)
        z_blk = smat(sol.z[rows[name]], order)
        sense_m[k, j] = _structured_hermitian(s_blk)
        psd_duals[k, j] = 2.0 * _structured_hermitian(z_blk)

    eta = _soc_dual_scalar(sol.z, rows[("objective",)])
    eta = eta if abs(eta) > 1e-12 else 1.0
    sinr_duals = np.zeros((k_dim, j_dim))
    power_duals = np.zeros(k_dim)
    for q in model.quads:
        lam = _soc_dual_scalar(sol.z, rows[q.name]) / eta
        if q.name[0] == "sinr":
            sinr_duals[q.name[1], q.name[2]] = lam
        else:
            power_duals[q.name[1]] = lam
    psd_duals /= eta

    f, g = model.objective_quad
    resid = f @ x - g
    objective = float(resid @ resid) + float(model.c_lin @ x)
    result = SubproblemSolution(
        comp_beams=comp,
        sense_matrices=sense_m,
        sense_beams=None,
        sinr_duals=sinr_duals,
        power_duals=power_duals,
        psd_duals=psd_duals,
        mse_dual=0.0,
        objective=objective,
        status=status,
        kkt=None,
        solver_iterations=sol.iterations,
        solver_gap=sol.gap,
    )
    if status == "optimal":
        result.kkt = kkt_residuals(result, p)
        polished = _polish_cem(result, p)
        if polished is not None:
            result = polished
    return result


def solve_wsr_subproblem(p, tol=DEFAULT_TOL, dump_path=None):
    """Minimize the weighted per-stream MSE sum at fixed receivers.

    The reported objective includes the receiver-only constants (noise terms
    and the +1 per stream) so it equals the weighted sum of true MSEs.
    """
    if not 0 < tol <= 1e-3:
        raise ContractError(f"tol must be in (0, 1e-3], got {tol}")
    if math.isfinite(p.mse_budget):
        floor = p.noise_power * float(np.linalg.norm(p.receivers.comp_receiver) ** 2)
        if p.mse_budget < floor:
            return _empty_solution(
                "infeasible",
                f"fused-MSE budget {p.mse_budget:.3e} is below the receiver noise floor {floor:.3e}",
            )
    model = _build_wsr_model(p)
    k_dim, _, m_dim, l_dim, j_dim = model.dims
    sol, status, rows, cert = _run_phases(model, tol, _start_vector_wsr(p, model), dump_path)
    if sol is None:
        return _empty_solution(status, cert)

    x = sol.x[1:]
    comp = np.empty((k_dim, m_dim, l_dim), dtype=complex)
    sense = np.empty((k_dim, j_dim, m_dim), dtype=complex)
    for k in range(k_dim):
        blk = x[model.w_cols(k)]
        for l in range(l_dim):
            comp[k, :, l] = unembed_vector(blk[2 * m_dim * l : 2 * m_dim * (l + 1)])
        for j in range(j_dim):
            sense[k, j] = unembed_vector(x[model.v_cols(k, j)])

    eta = _soc_dual_scalar(sol.z, rows[("objective",)])
    eta = eta if abs(eta) > 1e-12 else 1.0
    power_duals = np.zeros(k_dim)
    mse_dual = 0.0
    for q in model.quads:
        lam = _soc_dual_scalar(sol.z, rows[q.name]) / eta
        if q.name[0] == "power":
            power_duals[q.name[1]] = lam
        else:
            mse_dual = lam

    f, g = model.objective_quad
    resid = f @ x - g
    objective = float(resid @ resid) + float(model.c_lin @ x) + model.constant
    result = SubproblemSolution(
        comp_beams=comp,
        sense_matrices=None,
        sense_beams=sense,
        sinr_duals=None,
        power_duals=power_duals,
        psd_duals=None,
        mse_dual=mse_dual,
        objective=objective,
        status=status,
        kkt=None,
        solver_iterations=sol.iterations,
        solver_gap=sol.gap,
    )
    if status == "optimal":
        result.kkt = kkt_residuals(result, p)
        polished = _polish_wsr(result, p)
        if polished is not None:
            result = polished
    return result


def _structured_hermitian(s_blk):
    """Project a real symmetric 2m x 2m block to its Hermitian m x m form."""
    p = s_blk.shape[0] // 2
    rot = np.zeros_like(s_blk)
    rot[:p, :p] = s_blk[p:, p:]
    rot[p:, p:] = s_blk[:p, :p]
    rot[:p, p:] = -s_blk[p:, :p]
    rot[p:, :p] = -s_blk[:p, p:]
    avg = 0.5 * (s_blk + rot)
    herm = unlift_matrix(avg)
    return 0.5 * (herm + herm.conj().T)


def _empty_solution(status, certificate):
    return SubproblemSolution(
        comp_beams=None,
        sense_matrices=None,
        sense_beams=None,
        sinr_duals=None,
        power_duals=None,
        psd_duals=None,
        mse_dual=0.0,
        objective=math.nan,
        status=status,
        kkt=None,
        solver_iterations=0,
        solver_gap=math.nan,
        certificate=certificate,
    )


def recover_rank_one(v, tol=1e-5):
    """Dominant-eigenpair beam from a (near) rank-one Hermitian PSD matrix.

    Returns (beam, rank_gap) with rank_gap the ratio of the second to the
    largest eigenvalue.  The beam's first component of magnitude > 1e-9 is
    rotated to the positive real axis so recovery is deterministic.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {v.shape}")
    herm_err = float(np.linalg.norm(v - v.conj().T))
    if herm_err > 1e-6 * max(1.0, float(np.linalg.norm(v))):
        raise ContractError("matrix is not Hermitian to tolerance")
    w = 0.5 * (v + v.conj().T)
    eigvals, eigvecs = np.linalg.eigh(w)
    lead = float(eigvals[-1])
    if lead <= 1e-14 * max(1.0, float(np.abs(eigvals).max(initial=0.0))):
        return np.zeros(v.shape[0], dtype=complex), 0.0
    second = float(eigvals[-2]) if eigvals.size > 1 else 0.0
    rank_gap = max(second, 0.0) / lead
    vec = eigvecs[:, -1]
    for comp in vec:
        if abs(comp) > 1e-9:
            vec = vec * (comp.conj() / abs(comp))
            break
    return math.sqrt(lead) * vec, rank_gap


def kkt_residuals(sol, p):
    """First-order optimality residuals of a solved subproblem.

    Evaluates the full stationarity system in the complex domain, including
    the cross-stream multiplier couplings, using the extracted duals.
    """
    if isinstance(p, CemSubproblem):
        return _kkt_cem(sol, p)
    if isinstance(p, WsrSubproblem):
        return _kkt_wsr(sol, p)
    raise ContractError(f"unsupported subproblem type {type(p).__name__}")


def _effective(p):
    z = p.receivers.comp_receiver
    u = p.receivers.sense_receivers
    t_eff = np.einsum("ln,knm->klm", z.conj().T, p.channels.matrices)
    b_eff = np.einsum("kjn,inm->kjim", u.conj(), p.channels.matrices)
    return t_eff, b_eff


def _kkt_cem(sol, p):
    k_dim, j_dim = p.sinr_targets.shape
    m_dim = p.channels.n_ue_antennas
    l_dim = p.receivers.comp_receiver.shape[1]
    t_eff, b_eff = _effective(p)
    u = p.receivers.sense_receivers
    lam = sol.sinr_duals
    mu = sol.power_duals
    w = sol.comp_beams
    v = sol.sense_matrices

    stationarity = 0.0
    for k in range(k_dim):
        grad = t_eff[k].conj().T @ (t_eff[k] @ w[k] - np.eye(l_dim))
        for i in range(k_dim):
            for m in range(j_dim):
                if lam[i, m] == 0.0:
                    continue
                b = b_eff[i, m, k].conj()  # H_k^H u_im
                grad += lam[i, m] * np.outer(b, b.conj()) @ w[k]
        grad += mu[k] * w[k]
        stationarity = max(stationarity, float(np.linalg.norm(grad)))
    for k in range(k_dim):
        a_k = t_eff[k].conj().T @ t_eff[k]
        for j in range(j_dim):
            grad = a_k + mu[k] * np.eye(m_dim) - sol.psd_duals[k, j]
            if p.sinr_targets[k, j] > 0:
                b = b_eff[k, j, k].conj()
                grad -= lam[k, j] / p.sinr_targets[k, j] * np.outer(b, b.conj())
            for i in range(k_dim):
                for m in range(j_dim):
                    if p.sinr_targets[i, m] <= 0 or not _interferes(
                        k, j, i, m, p.interference_model
                    ):
                        continue
                    b = b_eff[i, m, k].conj()
                    grad += lam[i, m] * np.outer(b, b.conj())
            stationarity = max(stationarity, float(np.linalg.norm(grad)))

    comp_slack = 0.0
    primal = 0.0
    for k in range(k_dim):
        used = float(np.linalg.norm(w[k]) ** 2) + float(
            sum(np.real(np.trace(v[k, j])) for j in range(j_dim))
        )
        slack = float(p.power_budgets[k]) - used
        primal = max(primal, -slack)
        comp_slack = max(comp_slack, abs(mu[k] * slack))
    for k in range(k_dim):
        for j in range(j_dim):
            comp_slack = max(comp_slack, float(np.linalg.norm(sol.psd_duals[k, j] @ v[k, j])))
            primal = max(primal, -float(np.linalg.eigvalsh(0.5 * (v[k, j] + v[k, j].conj().T))[0]))
            if p.sinr_targets[k, j] <= 0:
                continue
            lhs = 0.0
            rhs = p.noise_power * float(np.linalg.norm(u[k, j]) ** 2)
            for i in range(k_dim):
                rhs += float(np.linalg.norm(b_eff[k, j, i] @ w[i]) ** 2)
            for i in range(k_dim):
                for m in range(j_dim):
                    b = b_eff[k, j, i]
                    term = float(np.real(b @ v[i, m] @ b.conj()))
                    if (i, m) == (k, j):
                        lhs = term / p.sinr_targets[k, j]
                    elif _interferes(i, m, k, j, p.interference_model):
                        rhs += term
            slack = lhs - rhs
            primal = max(primal, -slack)
            comp_slack = max(comp_slack, abs(lam[k, j] * slack))

    dual = max(0.0, float(-lam.min()), float(-mu.min()))
    for k in range(k_dim):
        for j in range(j_dim):
            dual = max(dual, -float(np.linalg.eigvalsh(sol.psd_duals[k, j])[0]))
    return KktResiduals(stationarity, comp_slack, primal, dual)


def _kkt_wsr(sol, p):
    k_dim, j_dim = p.mse_weights.shape
    l_dim = p.receivers.comp_receiver.shape[1]
    t_eff, b_eff = _effective(p)
    mu = sol.power_duals
    nu = sol.mse_dual
    w = sol.comp_beams
    v = sol.sense_beams
    coeff = p.priorities * p.mse_weights

    stationarity = 0.0
    for k in range(k_dim):
        grad_w = mu[k] * w[k]
        if math.isfinite(p.mse_budget):
            grad_w = grad_w + nu * (t_eff[k].conj().T @ (t_eff[k] @ w[k] - np.eye(l_dim)))
        for i in range(k_dim):
            for m in range(j_dim):
                b = b_eff[i, m, k].conj()
                grad_w = grad_w + coeff[i, m] * np.outer(b, b.conj()) @ w[k]
        stationarity = max(stationarity, float(np.linalg.norm(grad_w)))
        for j in range(j_dim):
            grad_v = mu[k] * v[k, j]
            if math.isfinite(p.mse_budget):
                grad_v = grad_v + nu * (t_eff[k].conj().T @ (t_eff[k] @ v[k, j]))
            for i in range(k_dim):
                for m in range(j_dim):
                    b = b_eff[i, m, k].conj()
                    grad_v = grad_v + coeff[i, m] * b * (b.conj() @ v[k, j])
            grad_v = grad_v - coeff[k, j] * b_eff[k, j, k].conj()
            stationarity = max(stationarity, float(np.linalg.norm(grad_v)))

    comp_slack = 0.0
    primal = 0.0
    for k in range(k_dim):
        used = float(np.linalg.norm(w[k]) ** 2) + float(np.linalg.norm(v[k]) ** 2)
        slack = float(p.power_budgets[k]) - used
        primal = max(primal, -slack)
        comp_slack = max(comp_slack, abs(mu[k] * slack))
    if math.isfinite(p.mse_budget):
        z = p.receivers.comp_receiver
        mse = p.noise_power * float(np.linalg.norm(z) ** 2)
        for k in range(k_dim):
            mse += float(np.linalg.norm(t_eff[k] @ w[k] - np.eye(l_dim)) ** 2)
            for j in range(j_dim):
                mse += float(np.linalg.norm(t_eff[k] @ v[k, j]) ** 2)
        slack = p.mse_budget - mse
        primal = max(primal, -slack)
        comp_slack = max(comp_slack, abs(nu * slack))
    dual = max(0.0, float(-mu.min()), -nu)
    return KktResiduals(stationarity, comp_slack, primal, dual)


# ---------------------------------------------------------------------------
# active-set Newton polish
#
# The epigraph reformulation leaves the returned point O(sqrt(gap)) away from
# the true minimizer along the flat directions of the quadratic, which shows
# up as a stationarity residual far above the cone-program tolerance.  A few
# Gauss-Newton steps on the active-set KKT system close that gap.  The
# polished point is adopted only when it strictly improves the worst KKT
# residual, so a misidentified active set can never degrade a solution.


def _fd_jacobian(f, x, r0):
    jac = np.empty((r0.size, x.size))
    for i in range(x.size):
        eps = 1e-7 * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += eps
        jac[:, i] = (f(xp) - r0) / eps
    return jac


def _gauss_newton(f, x0, target=1e-11, max_steps=20, refreshes=2):
    """Damped Gauss-Newton with a chord Jacobian (refreshed on stall)."""
    x = np.asarray(x0, dtype=float).copy()
    r = f(x)
    norm = float(np.linalg.norm(r))
    best_x, best_norm = x, norm
    jac = None
    for _ in range(max_steps):
        if best_norm <= target:
            break
        if jac is None:
            jac = _fd_jacobian(f, x, r)
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        improved = False
        for scale in (1.0, 0.5, 0.25, 0.0625):
            cand = x + scale * step
            rc = f(cand)
            nc = float(np.linalg.norm(rc))
            if nc < best_norm:
                x, r, best_x, best_norm = cand, rc, cand, nc
                improved = True
                break
        if not improved:
            if refreshes > 0:
                refreshes -= 1
                jac = None
                continue
            break
    return best_x


def _active_indices(duals, threshold=1e-5):
    scale = max(1.0, float(np.max(duals, initial=0.0)))
    return [tuple(np.atleast_1d(idx)) for idx in np.argwhere(duals > threshold * scale)]


def _polish_cem(result, p):
    k_dim, j_dim = p.sinr_targets.shape
    m_dim = p.channels.n_ue_antennas
    l_dim = p.receivers.comp_receiver.shape[1]
    t_eff, b_eff = _effective(p)
    gamma = p.sinr_targets
    streams = [(k, j) for k in range(k_dim) for j in range(j_dim) if gamma[k, j] > 0]

    v0 = np.zeros((k_dim, j_dim, m_dim), dtype=complex)
    for k, j in streams:
        vec, _ = recover_rank_one(result.sense_matrices[k, j], tol=1.0)
        if np.linalg.norm(vec) <= 1e-9:
            return None
        v0[k, j] = vec
    act_sinr = _active_indices(result.sinr_duals)
    act_sinr = [s for s in act_sinr if gamma[s] > 0]
    act_pow = [k for (k,) in _active_indices(result.power_duals)]

    # precomputed tensors: outer_arr[i, m, k] = (H_k^H u_im)(H_k^H u_im)^H
    outer_arr = np.einsum("imka,imkb->imkab", b_eff.conj(), b_eff)
    a_all = np.einsum("kla,klb->kab", t_eff.conj(), t_eff)
    mask = np.zeros((k_dim, j_dim, k_dim, j_dim))
    for k in range(k_dim):
        for j in range(j_dim):
            for i in range(k_dim):
                for m in range(j_dim):
                    if gamma[i, m] > 0 and _interferes(k, j, i, m, p.interference_model):
                        mask[k, j, i, m] = 1.0
    ks = np.arange(k_dim)[:, None]
    js = np.arange(j_dim)[None, :]
    own_outer = outer_arr[ks, js, ks]
    noise_terms = p.noise_power * np.einsum(
        "kjn,kjn->kj", p.receivers.sense_receivers.conj(), p.receivers.sense_receivers
    ).real
    eye_l = np.eye(l_dim)
    eye_m = np.eye(m_dim)

    n_w = 2 * k_dim * m_dim * l_dim

    def unpack(x):
        half = n_w // 2
        w = (x[:half] + 1j * x[half:n_w]).reshape(k_dim, m_dim, l_dim)
        ofs = n_w
        v = np.zeros((k_dim, j_dim, m_dim), dtype=complex)
        for s in streams:
            v[s] = x[ofs : ofs + m_dim] + 1j * x[ofs + m_dim : ofs + 2 * m_dim]
            ofs += 2 * m_dim
        lam = np.zeros((k_dim, j_dim))
        for s in act_sinr:
            lam[s] = x[ofs]
            ofs += 1
        mu = np.zeros(k_dim)
        for k in act_pow:
            mu[k] = x[ofs]
            ofs += 1
        return w, v, lam, mu

    def residual(x):
        w, v, lam, mu = unpack(x)
        parts = []
        # transmit-beam stationarity
        mis = t_eff @ w - eye_l[None]
        grad_w = np.einsum("kla,klm->kam", t_eff.conj(), mis)
        s_mats = np.einsum("im,imkab->kab", lam, outer_arr)
        grad_w += s_mats @ w + mu[:, None, None] * w
        parts += [grad_w.real.ravel(), grad_w.imag.ravel()]
        # psd-face stationarity: Psi v = 0 per lifted stream, plus a phase
        # gauge pinning the factor against its start
        psi = a_all[:, None] + mu[:, None, None, None] * eye_m
        psi = psi + np.einsum("im,kjim,imkab->kjab", lam, mask, outer_arr)
        lam_over_gamma = np.divide(lam, gamma, out=np.zeros_like(lam), where=gamma > 0)
        psi = psi - lam_over_gamma[..., None, None] * own_outer
        psi_v = np.einsum("kjab,kjb->kja", psi, v)
        for s in streams:
            parts += [psi_v[s].real, psi_v[s].imag]
            parts.append([float(np.imag(v0[s].conj() @ v[s]))])
        # active constraints hold with equality
        if act_sinr:
            cross = np.einsum("kjia,ita->kjit", b_eff, v)
            cross_sq = np.abs(cross) ** 2
            comp_sq = np.abs(np.einsum("kjia,ial->kjil", b_eff, w)) ** 2
            rhs = noise_terms + comp_sq.sum(axis=(2, 3))
            rhs += np.einsum("imkj,kjim->kj", mask.transpose(2, 3, 0, 1), cross_sq)
            own = cross_sq[ks, js, ks, js]
            for s in act_sinr:
                parts.append([own[s] / gamma[s] - rhs[s]])
        for k in act_pow:
            used = float(np.linalg.norm(w[k]) ** 2) + float(np.linalg.norm(v[k]) ** 2)
            parts.append([float(p.power_budgets[k]) - used])
        return np.concatenate([np.asarray(blk, dtype=float) for blk in parts])

    x0 = np.concatenate(
        [result.comp_beams.real.ravel(), result.comp_beams.imag.ravel()]
        + [np.concatenate([v0[s].real, v0[s].imag]) for s in streams]
        + [np.array([result.sinr_duals[s]]) for s in act_sinr]
        + [np.array([result.power_duals[k]]) for k in act_pow]
    )
    w, v, lam, mu = unpack(_gauss_newton(residual, x0))

    sense = np.einsum("kja,kjb->kjab", v, v.conj())
    psi = a_all[:, None] + mu[:, None, None, None] * eye_m
    psi = psi + np.einsum("im,kjim,imkab->kjab", lam, mask, outer_arr)
    lam_over_gamma = np.divide(lam, gamma, out=np.zeros_like(lam), where=gamma > 0)
    psi = psi - lam_over_gamma[..., None, None] * own_outer
    psi = 0.5 * (psi + np.conj(np.swapaxes(psi, -1, -2)))

    mis = t_eff @ w - eye_l[None]
    leak = np.einsum("kla,kjab,klb->", t_eff, sense, t_eff.conj())
    objective = float(np.linalg.norm(mis) ** 2) + float(np.real(leak))
    candidate = SubproblemSolution(
        comp_beams=w,
        sense_matrices=sense,
        sense_beams=None,
        sinr_duals=lam,
        power_duals=mu,
        psd_duals=psi,
        mse_dual=0.0,
        objective=objective,
        status=result.status,
        kkt=None,
        solver_iterations=result.solver_iterations,
        solver_gap=result.solver_gap,
    )
    candidate.kkt = kkt_residuals(candidate, p)
    if candidate.kkt.worst() < result.kkt.worst():
        return candidate
    return None


def _polish_wsr(result, p):
    k_dim, j_dim = p.mse_weights.shape
    m_dim = p.channels.n_ue_antennas
    l_dim = p.receivers.comp_receiver.shape[1]
    t_eff, b_eff = _effective(p)
    coeff = p.priorities * p.mse_weights
    budgeted = math.isfinite(p.mse_budget)

    act_pow = [k for (k,) in _active_indices(result.power_duals)]
    nu_active = budgeted and result.mse_dual > 1e-5 * max(1.0, result.mse_dual)

    outer_arr = np.einsum("imka,imkb->imkab", b_eff.conj(), b_eff)
    c_mats = np.einsum("im,imkab->kab", coeff, outer_arr)
    a_all = np.einsum("kla,klb->kab", t_eff.conj(), t_eff)
    own_b = b_eff[np.arange(k_dim)[:, None], np.arange(j_dim)[None, :], np.arange(k_dim)[:, None]]
    eye_l = np.eye(l_dim)
    z_norm = p.noise_power * float(np.linalg.norm(p.receivers.comp_receiver) ** 2)

    n_w = 2 * k_dim * m_dim * l_dim
    n_v = 2 * k_dim * j_dim * m_dim

    def unpack(x):
        half = n_w // 2
        w = (x[:half] + 1j * x[half:n_w]).reshape(k_dim, m_dim, l_dim)
        half = n_v // 2
        v = (x[n_w : n_w + half] + 1j * x[n_w + half : n_w + n_v]).reshape(
            k_dim, j_dim, m_dim
        )
        ofs = n_w + n_v
        mu = np.zeros(k_dim)
        for k in act_pow:
            mu[k] = x[ofs]
            ofs += 1
        nu = x[ofs] if nu_active else 0.0
        return w, v, mu, nu

    def residual(x):
        w, v, mu, nu = unpack(x)
        parts = []
        mis = t_eff @ w - eye_l[None]
        grad_w = c_mats @ w + mu[:, None, None] * w
        if budgeted:
            grad_w += nu * np.einsum("kla,klm->kam", t_eff.conj(), mis)
        parts += [grad_w.real.ravel(), grad_w.imag.ravel()]
        grad_v = np.einsum("kab,kjb->kja", c_mats, v) + mu[:, None, None] * v
        if budgeted:
            grad_v += nu * np.einsum("kab,kjb->kja", a_all, v)
        grad_v -= coeff[..., None] * own_b.conj()
        parts += [grad_v.real.ravel(), grad_v.imag.ravel()]
        for k in act_pow:
            used = float(np.linalg.norm(w[k]) ** 2) + float(np.linalg.norm(v[k]) ** 2)
            parts.append([float(p.power_budgets[k]) - used])
        if nu_active:
            fused = z_norm + float(np.linalg.norm(mis) ** 2)
            fused += float(np.linalg.norm(np.einsum("kla,kja->kjl", t_eff, v)) ** 2)
            parts.append([p.mse_budget - fused])
        return np.concatenate([np.asarray(blk, dtype=float) for blk in parts])

    x0 = np.concatenate(
        [
            result.comp_beams.real.ravel(),
            result.comp_beams.imag.ravel(),
            result.sense_beams.real.ravel(),
            result.sense_beams.imag.ravel(),
        ]
        + [np.array([result.power_duals[k]]) for k in act_pow]
        + ([np.array([result.mse_dual])] if nu_active else [])
    )
    w, v, mu, nu = unpack(_gauss_newton(residual, x0))

    mis = t_eff @ w - eye_l[None]
    cross = np.einsum("kjia,ita->kjit", b_eff, v)
    cross_sq = np.abs(cross) ** 2
    comp_sq = np.abs(np.einsum("kjia,ial->kjil", b_eff, w)) ** 2
    ks = np.arange(k_dim)[:, None]
    js = np.arange(j_dim)[None, :]
    own = cross[ks, js, ks, js]
    errs = np.abs(own - 1.0) ** 2 + comp_sq.sum(axis=(2, 3))
    errs += cross_sq.sum(axis=(2, 3)) - cross_sq[ks, js, ks, js]
    errs += p.noise_power * np.einsum(
        "kjn,kjn->kj", p.receivers.sense_receivers.conj(), p.receivers.sense_receivers
    ).real
    objective = float(np.sum(coeff * errs))

    candidate = SubproblemSolution(
        comp_beams=w,
        sense_matrices=None,
        sense_beams=v,
        sinr_duals=None,
        power_duals=mu,
        psd_duals=None,
        mse_dual=nu,
        objective=objective,
        status=result.status,
        kkt=None,
        solver_iterations=result.solver_iterations,
        solver_gap=result.solver_gap,
    )
    candidate.kkt = kkt_residuals(candidate, p)
    if candidate.kkt.worst() < result.kkt.worst():
        return candidate
    return None
