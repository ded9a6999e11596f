"""Primal-dual interior-point solver for cone programs.

Solves  minimize    c'x
        subject to  G x + s = h,   s in K

where K is a product of a nonnegative orthant, second-order cones and
(svec-vectorized) positive semidefinite cones.  The dual variable z lives in
the same cone.  The method is a Nesterov-Todd scaled Mehrotra
predictor-corrector; all linear algebra is dense, which is the right trade
at the block sizes this package produces (tens of variables, a few hundred
constraint rows).

Cone layout of s (and z): [nonneg | soc blocks in order | psd blocks in
order], with each PSD block of order p stored as svec of length p(p+1)/2
(off-diagonal entries scaled by sqrt(2) so that <svec(A), svec(B)> = tr(AB)).
"""

import dataclasses

import numpy as np

_SQRT2 = np.sqrt(2.0)
_STEP_FRACTION = 0.99


@dataclasses.dataclass(frozen=True)
class ConeDims:
    """Sizes of the cone blocks in declaration order."""

    nonneg: int = 0
    soc: tuple = ()
    psd: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "soc", tuple(int(d) for d in self.soc))
        object.__setattr__(self, "psd", tuple(int(p) for p in self.psd))
        if self.nonneg < 0 or any(d < 2 for d in self.soc) or any(p < 1 for p in self.psd):
            raise ValueError(f"invalid cone dimensions: {self}")

    @property
    def total(self):
        return self.nonneg + sum(self.soc) + sum(p * (p + 1) // 2 for p in self.psd)

    @property
    def degree(self):
        # barrier degree: 1 per linear entry, 1 per SOC block, p per PSD block
        return self.nonneg + len(self.soc) + sum(self.psd)


@dataclasses.dataclass(eq=False)
class ConicSolution:
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    status: str
    iterations: int
    gap: float
    rel_gap: float
    primal_residual: float
    dual_residual: float
    primal_objective: float
    dual_objective: float
    trace: list


def svec_index(order):
    """Row/column indices of the upper triangle in svec order."""
    return np.triu_indices(order)


def svec_scale(order):
    rows, cols = svec_index(order)
    return np.where(rows == cols, 1.0, _SQRT2)


def svec(mats):
    """Vectorize symmetric matrices (..., p, p) -> (..., p(p+1)/2)."""
    p = mats.shape[-1]
    rows, cols = svec_index(p)
    return mats[..., rows, cols] * svec_scale(p)


def smat(vecs, order):
    """Inverse of svec: (..., p(p+1)/2) -> (..., p, p) symmetric."""
    rows, cols = svec_index(order)
    vals = vecs / svec_scale(order)
    out = np.zeros(vecs.shape[:-1] + (order, order), dtype=float)
    out[..., rows, cols] = vals
    out[..., cols, rows] = vals
    return out


class _Cone:
    """Precomputed block layout: grouped indices for vectorized cone ops."""

    def __init__(self, dims):
        self.dims = dims
        self.m = dims.total
        offset = dims.nonneg
        self.lin = slice(0, dims.nonneg)
        soc_groups = {}
        for d in dims.soc:
            soc_groups.setdefault(d, []).append(np.arange(offset, offset + d))
            offset += d
        self.soc_groups = [(d, np.array(rows)) for d, rows in soc_groups.items()]
        psd_groups = {}
        for p in dims.psd:
            q = p * (p + 1) // 2
            psd_groups.setdefault(p, []).append(np.arange(offset, offset + q))
            offset += q
        self.psd_groups = [(p, np.array(rows)) for p, rows in psd_groups.items()]
        # svec basis tensor per order, used to build scaling matrices
        self._basis = {}
        for p, _ in self.psd_groups:
            q = p * (p + 1) // 2
            self._basis[p] = smat(np.eye(q), p)

    def identity(self):
        e = np.zeros(self.m)
        e[self.lin] = 1.0
        for d, rows in self.soc_groups:
            e[rows[:, 0]] = 1.0
        for p, rows in self.psd_groups:
            eye = svec(np.eye(p))
            e[rows] = eye
        return e

    def min_eig(self, v):
        """Smallest cone-eigenvalue across all blocks (interior iff > 0)."""
        worst = np.inf
        if self.dims.nonneg:
            worst = min(worst, float(v[self.lin].min()))
        for d, rows in self.soc_groups:
            blk = v[rows]
            worst = min(worst, float((blk[:, 0] - np.linalg.norm(blk[:, 1:], axis=1)).min()))
        for p, rows in self.psd_groups:
            mats = smat(v[rows], p)
            worst = min(worst, float(np.linalg.eigvalsh(mats)[:, 0].min()))
        return worst

    def max_step(self, v, dv):
        """Largest alpha with v + alpha*dv still in the cone (inf if always)."""
        best = np.inf
        if self.dims.nonneg:
            neg = dv[self.lin] < 0
            if np.any(neg):
                best = min(best, float((-v[self.lin][neg] / dv[self.lin][neg]).min()))
        for d, rows in self.soc_groups:
            s, ds = v[rows], dv[rows]
            a = ds[:, 0] ** 2 - np.einsum("bi,bi->b", ds[:, 1:], ds[:, 1:])
            b = 2.0 * (s[:, 0] * ds[:, 0] - np.einsum("bi,bi->b", s[:, 1:], ds[:, 1:]))
            c = np.maximum(s[:, 0] ** 2 - np.einsum("bi,bi->b", s[:, 1:], s[:, 1:]), 0.0)
            best = min(best, _smallest_positive_root(a, b, c))
        for p, rows in self.psd_groups:
            s_m = smat(v[rows], p)
            d_m = smat(dv[rows], p)
            chol = np.linalg.cholesky(s_m)
            t = np.linalg.solve(chol, d_m)
            t = np.linalg.solve(chol, t.transpose(0, 2, 1))
            t = 0.5 * (t + t.transpose(0, 2, 1))
            lam_min = float(np.linalg.eigvalsh(t)[:, 0].min())
            if lam_min < 0:
                best = min(best, -1.0 / lam_min)
        return best

    def jprod(self, a, b):
        """Jordan product a o b blockwise."""
        out = np.empty(self.m)
        out[self.lin] = a[self.lin] * b[self.lin]
        for d, rows in self.soc_groups:
            x, y = a[rows], b[rows]
            out[rows[:, 0]] = np.einsum("bi,bi->b", x, y)
            out[rows[:, 1:].reshape(-1)] = (
                x[:, :1] * y[:, 1:] + y[:, :1] * x[:, 1:]
            ).reshape(-1)
        for p, rows in self.psd_groups:
            x_m = smat(a[rows], p)
            y_m = smat(b[rows], p)
            out[rows] = svec(0.5 * (x_m @ y_m + y_m @ x_m))
        return out

    def jdiv(self, b, lam):
        """Solve lam o q = b for q (lam an interior point)."""
        out = np.empty(self.m)
        out[self.lin] = b[self.lin] / lam[self.lin]
        for d, rows in self.soc_groups:
            lb, bb = lam[rows], b[rows]
            det = lb[:, 0] ** 2 - np.einsum("bi,bi->b", lb[:, 1:], lb[:, 1:])
            q0 = (lb[:, 0] * bb[:, 0] - np.einsum("bi,bi->b", lb[:, 1:], bb[:, 1:])) / det
            qbar = (bb[:, 1:] - q0[:, None] * lb[:, 1:]) / lb[:, :1]
            out[rows[:, 0]] = q0
            out[rows[:, 1:].reshape(-1)] = qbar.reshape(-1)
        for p, rows in self.psd_groups:
            lam_m = smat(lam[rows], p)
            b_m = smat(b[rows], p)
            # lam is diagonal in the NT-scaled frame where this is called
            diag = np.diagonal(lam_m, axis1=1, axis2=2)
            denom = 0.5 * (diag[:, :, None] + diag[:, None, :])
            out[rows] = svec(b_m / denom)
        return out


def _smallest_positive_root(a, b, c):
    """Vectorized smallest positive root of a t^2 + b t + c = 0 (c >= 0)."""
    best = np.inf
    quad = np.abs(a) > 1e-14
    lin = ~quad & (b < -1e-14)
    if np.any(lin):
        best = min(best, float((-c[lin] / b[lin]).min()))
    if np.any(quad):
        aa, bb, cc = a[quad], b[quad], c[quad]
        disc = bb * bb - 4.0 * aa * cc
        ok = disc >= 0
        if np.any(ok):
            sq = np.sqrt(disc[ok])
            r1 = (-bb[ok] - sq) / (2.0 * aa[ok])
            r2 = (-bb[ok] + sq) / (2.0 * aa[ok])
            roots = np.concatenate([r1, r2])
            roots = roots[roots > 1e-14]
            if roots.size:
                best = min(best, float(roots.min()))
    return best


class _Scaling:
    """Nesterov-Todd scaling W with lam = W^{-T} s = W z."""

    def __init__(self, cone, s, z):
        self.cone = cone
        self.lin_w = np.sqrt(s[cone.lin] / z[cone.lin]) if cone.dims.nonneg else None
        self.soc = []
        for d, rows in cone.soc_groups:
            sb, zb = s[rows], z[rows]
            s_j = sb[:, 0] ** 2 - np.einsum("bi,bi->b", sb[:, 1:], sb[:, 1:])
            z_j = zb[:, 0] ** 2 - np.einsum("bi,bi->b", zb[:, 1:], zb[:, 1:])
            if np.any(s_j <= 0) or np.any(z_j <= 0):
                raise FloatingPointError("iterate left the second-order cone")
            beta = (s_j / z_j) ** 0.25
            s_t = sb / np.sqrt(s_j)[:, None]
            z_t = zb / np.sqrt(z_j)[:, None]
            gamma = np.sqrt((1.0 + np.einsum("bi,bi->b", s_t, z_t)) / 2.0)
            jz = z_t.copy()
            jz[:, 1:] *= -1.0
            wbar = (s_t + jz) / (2.0 * gamma[:, None])
            # half-angle vector: W = beta (2vv' - J) represents the
            # quadratic form of the scaling point wbar
            v = wbar.copy()
            v[:, 0] += 1.0
            v /= np.sqrt(2.0 * v[:, :1])
            jmat = np.diag(np.r_[1.0, -np.ones(d - 1)])
            w_mat = 2.0 * np.einsum("bi,bj->bij", v, v) - jmat
            w_mat *= beta[:, None, None]
            jv = v.copy()
            jv[:, 1:] *= -1.0
            winv = 2.0 * np.einsum("bi,bj->bij", jv, jv) - jmat
            winv /= beta[:, None, None]
            self.soc.append((rows, w_mat, winv))
        self.psd = []
        for p, rows in cone.psd_groups:
            s_m = smat(s[rows], p)
            z_m = smat(z[rows], p)
            l_s = np.linalg.cholesky(s_m)
            l_z = np.linalg.cholesky(z_m)
            a = l_z.transpose(0, 2, 1) @ l_s
            u, sig, vt = np.linalg.svd(a)
            inv_sq = 1.0 / np.sqrt(sig)
            r = l_s @ vt.transpose(0, 2, 1) * inv_sq[:, None, :]
            r_inv = (inv_sq[:, :, None] * u.transpose(0, 2, 1)) @ l_z.transpose(0, 2, 1)
            basis = cone._basis[p]
            # columns: svec(R' E_r R) and svec(R^{-1} E_r R^{-T})
            w_cols = svec(np.einsum("bji,qjk,bkl->bqil", r, basis, r))
            winvt_cols = svec(np.einsum("bij,qjk,blk->bqil", r_inv, basis, r_inv))
            w_mat = w_cols.transpose(0, 2, 1)
            winvt = winvt_cols.transpose(0, 2, 1)
            self.psd.append((rows, w_mat, winvt, sig))

    def lam(self, z):
        return self.apply_w(z)

    def apply_w(self, v):
        out = np.empty(self.cone.m)
        if self.lin_w is not None:
            out[self.cone.lin] = self.lin_w * v[self.cone.lin]
        for rows, w_mat, _ in self.soc:
            out[rows.reshape(-1)] = np.einsum("bij,bj->bi", w_mat, v[rows]).reshape(-1)
        for rows, w_mat, _, _ in self.psd:
            out[rows.reshape(-1)] = np.einsum("bij,bj->bi", w_mat, v[rows]).reshape(-1)
        return out

    def apply_winv_t(self, v):
        out = np.empty(self.cone.m)
        if self.lin_w is not None:
            out[self.cone.lin] = v[self.cone.lin] / self.lin_w
        for rows, _, winv in self.soc:
            # SOC scaling is symmetric, so W^{-T} = W^{-1}
            out[rows.reshape(-1)] = np.einsum("bij,bj->bi", winv, v[rows]).reshape(-1)
        for rows, _, winvt, _ in self.psd:
            out[rows.reshape(-1)] = np.einsum("bij,bj->bi", winvt, v[rows]).reshape(-1)
        return out

    def apply_winv(self, v):
        out = np.empty(self.cone.m)
        if self.lin_w is not None:
            out[self.cone.lin] = v[self.cone.lin] / self.lin_w
        for rows, _, winv in self.soc:
            out[rows.reshape(-1)] = np.einsum("bij,bj->bi", winv, v[rows]).reshape(-1)
        for rows, _, winvt, _ in self.psd:
            # W^{-1} = (W^{-T})^T blockwise
            out[rows.reshape(-1)] = np.einsum("bji,bj->bi", winvt, v[rows]).reshape(-1)
        return out

    def scale_rows(self, g):
        """Return W^{-T} G, transforming row blocks of G."""
        out = np.empty_like(g)
        if self.lin_w is not None:
            out[self.cone.lin] = g[self.cone.lin] / self.lin_w[:, None]
        for rows, _, winv in self.soc:
            out[rows.reshape(-1)] = np.einsum("bij,bjn->bin", winv, g[rows]).reshape(-1, g.shape[1])
        for rows, _, winvt, _ in self.psd:
            out[rows.reshape(-1)] = np.einsum("bij,bjn->bin", winvt, g[rows]).reshape(-1, g.shape[1])
        return out

    def scaled_lambda(self, s):
        """lam = W^{-T} s (diagonal svec for PSD blocks by construction)."""
        out = self.apply_winv_t(s)
        for rows, _, _, sig in self.psd:
            lam_m = sig[:, :, None] * np.eye(sig.shape[1])
            out[rows] = svec(lam_m)
        return out


def _initial_point(c, g, h, cone):
    """Cold start: least-squares primal/dual shifted into the cone interior."""
    x, *_ = np.linalg.lstsq(g, h, rcond=None)
    s = h - g @ x
    margin = cone.min_eig(s)
    if margin < 0:
        s = s + (1.0 - margin) * cone.identity()
    elif margin < 1e-8:
        s = s + cone.identity()
    z, *_ = np.linalg.lstsq(g.T, -c, rcond=None)
    margin = cone.min_eig(z)
    if margin < 0:
        z = z + (1.0 - margin) * cone.identity()
    elif margin < 1e-8:
        z = z + cone.identity()
    return x, s, z


def solve_cone_program(
    c, g, h, dims, tol=1e-7, max_iterations=100, record_trace=True, objective_cutoff=None
):
    """Run the interior-point iteration; see module docstring for the form.

    objective_cutoff, when given, stops the solve early ("cutoff" status) as
    soon as a primal-feasible iterate drives the objective below the cutoff.
    Feasibility phases use it: the sign of the optimum is all they need.
    """
    c = np.asarray(c, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    cone = _Cone(dims)
    if g.shape != (cone.m, c.size):
        raise ValueError(f"G must be ({cone.m}, {c.size}), got {g.shape}")
    n = c.size
    trace = []
    x, s, z = _initial_point(c, g, h, cone)
    h_scale = max(1.0, float(np.linalg.norm(h)))
    c_scale = max(1.0, float(np.linalg.norm(c)))
    degree = dims.degree
    status = "max_iterations"
    gap = float(s @ z)
    iteration = 0

    for iteration in range(1, max_iterations + 1):
        rx = c + g.T @ z
        rz = g @ x + s - h
        gap = float(s @ z)
        pobj = float(c @ x)
        dobj = -float(h @ z)
        pres = float(np.linalg.norm(rz)) / h_scale
        dres = float(np.linalg.norm(rx)) / c_scale
        rel_gap = gap / max(1.0, abs(pobj), abs(dobj))
        if record_trace:
            trace.append(
                {
                    "iteration": iteration - 1,
                    "pobj": pobj,
                    "dobj": dobj,
                    "gap": gap,
                    "pres": pres,
                    "dres": dres,
                }
            )
        if pres <= tol and dres <= tol and rel_gap <= tol:
            status = "optimal"
            break
        if objective_cutoff is not None and pres <= tol and pobj <= objective_cutoff:
            status = "cutoff"
            break

        try:
            scaling = _Scaling(cone, s, z)
            lam = scaling.scaled_lambda(s)
            g_tilde = scaling.scale_rows(g)
            m_mat = g_tilde.T @ g_tilde
            chol, lower = _chol_with_bump(m_mat)
        except (np.linalg.LinAlgError, FloatingPointError):
            status = "numeric_failure"
            break

        mu = gap / degree

        def newton(d_vec):
            rhs = -rx - g_tilde.T @ (d_vec + scaling.apply_winv_t(rz))
            dx = _chol_solve(chol, lower, rhs)
            dz = scaling.apply_winv(scaling.apply_winv_t(g @ dx + rz) + d_vec)
            ds = -rz - g @ dx
            return dx, ds, dz

        # predictor
        dx_a, ds_a, dz_a = newton(-lam)
        alpha_a = min(
            1.0, cone.max_step(s, ds_a), cone.max_step(z, dz_a)
        )
        gap_a = float((s + alpha_a * ds_a) @ (z + alpha_a * dz_a))
        sigma = min(1.0, max(0.0, gap_a / gap)) ** 3

        # with infeasible iterates the gap can resist decrease; cap the
        # centering weight so the combined direction still points downhill
        # whenever the affine direction does
        eta = cone.jprod(scaling.apply_winv_t(ds_a), scaling.apply_w(dz_a))
        affine_slope = -gap - float(eta @ cone.identity())
        if affine_slope < 0 and mu > 0:
            sigma = min(sigma, max(0.0, 0.9 * (-affine_slope) / gap))

        # corrector
        rhs_s = -cone.jprod(lam, lam) - eta + sigma * mu * cone.identity()
        d_vec = cone.jdiv(rhs_s, lam)
        dx, ds, dz = newton(d_vec)

        alpha = min(1.0, _STEP_FRACTION * min(cone.max_step(s, ds), cone.max_step(z, dz)))
        if affine_slope < 0:
            # descent is attainable, shrink past any quadratic overshoot
            for _ in range(40):
                new_gap = float((s + alpha * ds) @ (z + alpha * dz))
                if new_gap <= gap * (1.0 + 1e-12) + 1e-16 or alpha < 1e-13:
                    break
                alpha *= 0.5
        x = x + alpha * dx
        s = s + alpha * ds
        z = z + alpha * dz

    rx = c + g.T @ z
    rz = g @ x + s - h
    gap = float(s @ z)
    pobj = float(c @ x)
    dobj = -float(h @ z)
    pres = float(np.linalg.norm(rz)) / h_scale
    dres = float(np.linalg.norm(rx)) / c_scale
    rel_gap = gap / max(1.0, abs(pobj), abs(dobj))
    if status != "numeric_failure" and pres <= tol and dres <= tol and rel_gap <= tol:
        status = "optimal"
    return ConicSolution(
        x=x,
        s=s,
        z=z,
        status=status,
        iterations=iteration,
        gap=gap,
        rel_gap=rel_gap,
        primal_residual=pres,
        dual_residual=dres,
        primal_objective=pobj,
        dual_objective=dobj,
        trace=trace,
    )


def _chol_with_bump(m_mat):
    try:
        return np.linalg.cholesky(m_mat), True
    except np.linalg.LinAlgError:
        bump = 1e-12 * max(1.0, float(np.trace(m_mat)) / m_mat.shape[0])
        return np.linalg.cholesky(m_mat + bump * np.eye(m_mat.shape[0])), True


def _chol_solve(chol, lower, rhs):
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, y)
