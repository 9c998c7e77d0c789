"""Variation-of-parameters solver for u' - Au = f, u(0) = x, on a TimeGrid.

Panels carry Gauss-Legendre nodes; on each panel the forcing is replaced by
its polynomial interpolant at those nodes and the convolution with e^{tA}
is integrated exactly through phi functions. For polynomial forcing and
A = 0 this reduces to the classical panel Gauss-Legendre rule; for stiff
spectra it keeps boundary layers accurate, which the surjectivity-identity
checks need.

The solver doubles as the black-box K_A interface of the resolvent
reconstruction: it exposes solutions and solution functionals (weighted
integrals, endpoint values) but never hands out the matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    EmptyProbeSet,
    HypothesisViolation,
    NotANode,
    QuadratureUnderResolved,
)
from .phi import phi_matrices, phi_scalar
from .timegrid import GridFunction, TimeGrid, e0_norm_J, e1_norm_J, gauss_legendre_01
from .util import map_indexed

# panel width * profile rate above which panels are split, keeping the
# polynomial interpolation error of the forcing profile near 1e-11
_RATE_BUDGET = 0.6


@lru_cache(maxsize=16)
def _lagrange_monomial(q):
    """C[m, p]: coefficient of sigma^p in the m-th Lagrange basis polynomial
    on the Gauss-Legendre nodes of [0, 1]."""
    xi, _ = gauss_legendre_01(q)
    C = np.zeros((q, q))
    for m in range(q):
        poly = np.array([1.0])
        denom = 1.0
        for i in range(q):
            if i != m:
                poly = np.polynomial.polynomial.polymul(poly, np.array([-xi[i], 1.0]))
                denom *= xi[m] - xi[i]
        C[m, : len(poly)] = poly / denom
    return C


class CauchySolver:
    """Exponential-integrator IVP solver bound to one operator and grid."""

    def __init__(self, op, grid):
        self.op = op
        self.grid = grid
        self._dense_tables = {}

    @property
    def dim(self):
        return self.op.dim

    @property
    def T(self):
        return self.grid.T

    def with_grid(self, grid):
        return CauchySolver(self.op, grid)

    def refined_for(self, rate):
        """Solver on a panel-split grid fine enough for a profile with the
        given exponential/oscillation rate."""
        width = float(np.max(np.diff(self.grid.edges)))
        factor = int(np.ceil(rate * width / _RATE_BUDGET))
        if factor <= 1:
            return self
        return self.with_grid(self.grid.refined(factor))

    def operator_norm(self, B):
        # norm-tag plumbing only; does not reveal the operator
        return self.op.operator_norm(B)

    def norm0(self, x):
        return self.op.norm0(x)

    # -- eigen-coordinate path ------------------------------------------------

    def _eigen_coeffs(self, a, profile, want_integral):
        """Coefficient arrays for the separable problem
        v' = diag(a) v + profile(t) * y:
        v(t) = alpha(t).x0 + beta(t).y (elementwise), and when requested the
        running integral w(T) = int_0^T v dt = wa.x0 + wb.y."""
        grid = self.grid
        q = grid.nodes_per_panel
        xi, _ = gauss_legendre_01(q)
        C = _lagrange_monomial(q)
        pf = np.array([math.factorial(p) for p in range(q)], dtype=float)
        rs = np.append(xi, 1.0)
        n = len(grid.nodes)
        dim = a.shape[0]

        alpha = np.exp(np.multiply.outer(grid.nodes, a))
        beta = np.zeros((n, dim), dtype=complex)
        wa = np.zeros(dim, dtype=complex)
        wb = np.zeros(dim, dtype=complex)
        kmax = q + 1

        rp = rs[None, :] ** (np.arange(1, q + 1)[:, None])   # r^{p+1}, (q, q+1)
        for k in range(grid.panels):
            e = grid.edges[k]
            h = grid.edges[k + 1] - grid.edges[k]
            Z = np.multiply.outer(h * rs, a)                 # (q+1, dim)
            P = phi_scalar(kmax, Z)                          # (kmax+1, q+1, dim)
            d = C.T @ profile(e + h * xi)                    # (q,)
            F = np.zeros((q + 1, dim), dtype=complex)
            for p in range(q):
                F += (d[p] * pf[p]) * rp[p][:, None] * P[p + 1]
            F *= h
            i_edge = grid.node_index_of_edge(k)
            b_edge = beta[i_edge]
            out = P[0] * b_edge[None, :] + F
            for j in range(q):
                beta[grid.node_index_of_gl(k, j)] = out[j]
            beta[grid.node_index_of_edge(k + 1)] = out[q]
            if want_integral:
                phi1 = P[1, q]
                G = np.zeros(dim, dtype=complex)
                for p in range(q):
                    G += (d[p] * pf[p]) * P[p + 2, q]
                wa = wa + h * phi1 * alpha[i_edge]
                wb = wb + h * phi1 * b_edge + h * h * G
        return alpha, beta, wa, wb

    def _eigen_general(self, a, Qinv, forcing, x0h):
        """Node values (eigen coordinates) for a non-separable forcing."""
        grid = self.grid
        q = grid.nodes_per_panel
        xi, _ = gauss_legendre_01(q)
        C = _lagrange_monomial(q)
        pf = np.array([math.factorial(p) for p in range(q)], dtype=float)
        rs = np.append(xi, 1.0)
        n = len(grid.nodes)
        dim = a.shape[0]
        vhat = np.zeros((n, dim), dtype=complex)
        vhat[0] = x0h
        rp = rs[None, :] ** (np.arange(1, q + 1)[:, None])
        for k in range(grid.panels):
            e = grid.edges[k]
            h = grid.edges[k + 1] - grid.edges[k]
            Z = np.multiply.outer(h * rs, a)
            P = phi_scalar(q + 1, Z)
            fhat = np.array([Qinv @ forcing.eval(e + h * x) for x in xi])
            Dp = C.T @ fhat                                   # (q, dim)
            F = np.zeros((q + 1, dim), dtype=complex)
            for p in range(q):
                F += pf[p] * rp[p][:, None] * P[p + 1] * Dp[p][None, :]
            F *= h
            v_edge = vhat[grid.node_index_of_edge(k)]
            out = P[0] * v_edge[None, :] + F
            for j in range(q):
                vhat[grid.node_index_of_gl(k, j)] = out[j]
            vhat[grid.node_index_of_edge(k + 1)] = out[q]
        return vhat

    # -- dense path -------------------------------------------------------------

    def _dense_tables_for(self, shift, h):
        key = (complex(shift), float(h))
        tab = self._dense_tables.get(key)
        if tab is not None:
            return tab
        q = self.grid.nodes_per_panel
        xi, _ = gauss_legendre_01(q)
        C = _lagrange_monomial(q)
        rs = np.append(xi, 1.0)
        B = self.op.matrix - shift * np.eye(self.dim)
        props, W = [], []
        G = None
        for j, r in enumerate(rs):
            PHI = phi_matrices((h * r) * B, q + 1)
            props.append(PHI[0])
            Wj = []
            for m in range(q):
                acc = np.zeros_like(B)
                for p in range(q):
                    acc += C[m, p] * math.factorial(p) * r ** (p + 1) * PHI[p + 1]
                Wj.append(h * acc)
            W.append(Wj)
            if j == q:
                G = []
                for m in range(q):
                    acc = np.zeros_like(B)
                    for p in range(q):
                        acc += C[m, p] * math.factorial(p) * PHI[p + 2]
                    G.append(h * h * acc)
                phi1_full = h * PHI[1]
        tab = (props, W, G, phi1_full)
        self._dense_tables[key] = tab
        return tab

    def _dense_run(self, shift, forcing_vals, x0, want_integral):
        """forcing_vals(k) -> (q, dim[, cols]) samples on panel k."""
        grid = self.grid
        q = grid.nodes_per_panel
        n = len(grid.nodes)
        x0 = np.asarray(x0, dtype=complex)
        shape = (n,) + x0.shape
        vals = np.zeros(shape, dtype=complex)
        vals[0] = x0
        w = np.zeros_like(x0)
        for k in range(grid.panels):
            h = grid.edges[k + 1] - grid.edges[k]
            props, W, G, phi1_full = self._dense_tables_for(shift, h)
            fv = forcing_vals(k)
            i_edge = grid.node_index_of_edge(k)
            v_edge = vals[i_edge]
            for j in range(q + 1):
                out = props[j] @ v_edge
                for m in range(q):
                    out += W[j][m] @ fv[m]
                if j < q:
                    vals[grid.node_index_of_gl(k, j)] = out
                else:
                    vals[grid.node_index_of_edge(k + 1)] = out
            if want_integral:
                w = w + phi1_full @ v_edge
                for m in range(q):
                    w = w + G[m] @ fv[m]
        return vals, w

    # -- public solves ----------------------------------------------------------

    def solve(self, forcing, x0=None, auto_refine=True):
        """GridFunction solution of u' - Au = f, u(0) = x0, with derivative
        samples filled from u' = Au + f. Steep forcing profiles trigger a
        panel split; the returned GridFunction carries the grid in use."""
        if auto_refine and forcing.rate:
            solver = self.refined_for(forcing.rate)
            if solver is not self:
                return solver.solve(forcing, x0, auto_refine=False)
        grid = self.grid
        if x0 is None:
            x0 = np.zeros(self.dim, dtype=complex)
        x0 = np.asarray(x0, dtype=complex)
        diag = self.op.diagonalization
        if diag is not None:
            Q, lam, Qinv = diag
            if forcing.separable:
                alpha, beta, _, _ = self._eigen_coeffs(lam, forcing.profile, False)
                vhat = alpha * (Qinv @ x0)[None, :] + beta * (Qinv @ forcing.y)[None, :]
            else:
                vhat = self._eigen_general(lam, Qinv, forcing, Qinv @ x0)
            values = vhat @ Q.T
        else:
            xi, _ = gauss_legendre_01(grid.nodes_per_panel)

            def forcing_vals(k):
                e = grid.edges[k]
                h = grid.edges[k + 1] - grid.edges[k]
                return np.array([forcing.eval(e + h * x) for x in xi])

            values, _ = self._dense_run(0.0, forcing_vals, x0, False)
        values[0] = x0
        fvals = np.array([forcing.eval(t) for t in grid.nodes])
        derivative = values @ self.op.matrix.T + fvals
        return GridFunction(grid, values, derivative)

    def solve_ka(self, forcing, auto_refine=True):
        """K_A f: the zero-initial-data solution."""
        return self.solve(forcing, None, auto_refine=auto_refine)

    def exp_functionals(self, mu, auto_refine=True):
        """For the forcing f(t) = e^{-conj(mu) t} (columnwise identity),
        return (W, UT) with W = int_0^T e^{-mu t} u(t) dt and UT = u(T),
        both as dim x dim matrices (u(., x) depends linearly on x).

        Internally solves the tilted system v = e^{-mu t} u, whose forcing
        profile e^{-2 Re mu t} is smooth, so oscillation in mu never meets
        the interpolation."""
        mu = complex(mu)
        if auto_refine:
            solver = self.refined_for(2.0 * mu.real)
            if solver is not self:
                return solver.exp_functionals(mu, auto_refine=False)
        grid = self.grid
        profile = lambda t: np.exp(-2.0 * mu.real * np.asarray(t))
        diag = self.op.diagonalization
        if diag is not None:
            Q, lam, Qinv = diag
            a = lam - mu
            _, beta, _, wb = self._eigen_coeffs(a, profile, True)
            W = (Q * wb[None, :]) @ Qinv
            UT = np.exp(mu * grid.T) * (Q * beta[-1][None, :]) @ Qinv
            return W, UT
        xi, _ = gauss_legendre_01(grid.nodes_per_panel)
        I = np.eye(self.dim, dtype=complex)

        def forcing_vals(k):
            e = grid.edges[k]
            h = grid.edges[k + 1] - grid.edges[k]
            return np.array([np.exp(-2.0 * mu.real * (e + h * x)) * I for x in xi])

        vals, w = self._dense_run(mu, forcing_vals, np.zeros((self.dim, self.dim), complex), True)
        return w, np.exp(mu * grid.T) * vals[-1]


def solve_ivp(op, f, x, grid, verify=False):
    """u(t) = e^{tA}x + int_0^t e^{(t-tau)A} f(tau) dtau on the grid.

    With verify=True the solve is repeated on a panel-doubled grid and
    QuadratureUnderResolved is raised if any shared node value moves by more
    than 1e-9 relative."""
    solver = CauchySolver(op, grid)
    u = solver.solve(f, x)
    if verify:
        fine = CauchySolver(op, u.grid.refined(2)).solve(f, x, auto_refine=False)
        # the shared nodes of the two grids are the coarse panel edges
        coarse_idx = [u.grid.node_index_of_edge(k) for k in range(u.grid.panels + 1)]
        fine_idx = [fine.grid.node_index_of_edge(2 * k) for k in range(u.grid.panels + 1)]
        scale = 1.0 + float(np.max(np.abs(u.values)))
        drift = np.max(np.abs(fine.values[fine_idx] - u.values[coarse_idx])) / scale
        if drift > 1e-9:
            raise QuadratureUnderResolved(
                f"panel doubling moved node values by {drift:.3e} relative")
    return u


def solution_operator_KA(op, f, grid, report_ratio=False):
    """K_A f = (d/dt - A, trace)^{-1}(f, 0).

    With report_ratio=True also returns ||K_A f||_E1(J) / ||f||_E0(J), the
    per-probe contribution to the solver continuity constant c2_hat."""
    u = CauchySolver(op, grid).solve_ka(f)
    if not report_ratio:
        return u
    fgf = GridFunction(u.grid, np.array([f.eval(t) for t in u.grid.nodes]))
    nf = e0_norm_J(op, fgf)
    return u, (e1_norm_J(op, u) / nf if nf > 0 else 0.0)


@dataclass
class MaxRegEstimate:
    """Probe-based lower estimate of the maximal-regularity constant."""

    M_hat: float
    c2_hat: float
    probe_count: int
    grid: TimeGrid
    ratios: list


def estimate_M(op, grid, probes):
    """Lower estimate of M: max over probes of
    ||u||_{E1(J)} / (||f||_{E0(J)} + ||x||_1) with u = solve_ivp(op, f, x).

    Also accumulates c2_hat = max ||K_A f||_{E1(J)} / ||f||_{E0(J)} over the
    zero-initial-value probes (the solver continuity constant).
    """
    if not probes:
        raise EmptyProbeSet("estimate_M needs at least one probe")
    solver = CauchySolver(op, grid)

    def run(probe):
        f, x = probe
        u = solver.solve(f, x)
        fgf = GridFunction(u.grid, np.array([f.eval(t) for t in u.grid.nodes]))
        nf = e0_norm_J(op, fgf)
        nx1 = op.norm1(x)
        denom = nf + nx1
        if denom == 0:
            raise EmptyProbeSet("degenerate probe: ||f||_E0 + ||x||_1 = 0")
        ratio = e1_norm_J(op, u) / denom
        c2 = e1_norm_J(op, u) / nf if (nf > 0 and nx1 == 0) else 0.0
        return ratio, c2

    results = map_indexed(run, list(probes))
    ratios = [r for r, _ in results]
    c2s = [c for _, c in results]
    return MaxRegEstimate(M_hat=float(max(ratios)), c2_hat=float(max(c2s, default=0.0)),
                          probe_count=len(probes), grid=grid, ratios=ratios)


# -- residuals and the gluing falsifier ---------------------------------------


def ode_residuals(op, u, forcing=None):
    """||u'(t) - Au(t) - f(t)||_0 per node. Uses the stored derivative
    samples when present, otherwise second-order finite differences on the
    (nonuniform) node set."""
    if u.derivative_values is not None:
        du = u.derivative_values
    else:
        du = np.gradient(u.values, u.grid.nodes, axis=0)
    res = du - u.values @ op.matrix.T
    if forcing is not None:
        res = res - np.array([forcing.eval(t) for t in u.grid.nodes])
    return np.array([op.norm0(r) for r in res])


@dataclass
class GlueReport:
    t1: float
    precondition_residual: float
    initial_norm: float
    w_t1_norm: float
    max_residual: float


def glue_check(op, u_tilde, t1, grid_ext):
    """Falsifier for the uniqueness argument: glue w := u_tilde on [0, t1]
    with v(t - t1) := e^{(t-t1)A} u_tilde(t1) on [t1, T_ext] and report the
    homogeneous-equation residual of w together with ||w(t1)||_0.

    u_tilde must claim to solve u' = Au with u(0) = 0; a nonzero initial
    value is rejected (HypothesisViolation), a residual violation on
    [0, t1] is reported, not raised.
    """
    grid = u_tilde.grid
    k1 = grid.edge_index(t1)
    if k1 is None or not 0.0 < t1 < grid.T:
        raise NotANode(f"t1={t1} must be an interior panel edge")
    if grid_ext.edge_index(t1) is None:
        raise NotANode(f"t1={t1} must be a panel edge of the extended grid")
    prefix = grid_ext.nodes[grid_ext.nodes <= t1 + 1e-14 * (1 + grid.T)]
    n_pre = len(prefix)
    if not np.allclose(prefix, grid.nodes[:n_pre], rtol=0, atol=1e-12 * (1 + grid.T)):
        raise NotANode("extended grid must refine u_tilde's grid up to t1")

    scale = 1.0 + float(np.max(np.abs(u_tilde.values)))
    x0_norm = op.norm0(u_tilde.values[0])
    if x0_norm > 1e-9 * scale:
        raise HypothesisViolation(f"u_tilde(0) has norm {x0_norm:.3e}, expected 0")

    res_pre = ode_residuals(op, u_tilde)
    k1_node = grid.node_index_of_edge(k1)
    precondition_residual = float(np.max(res_pre[: k1_node + 1]))

    x1 = u_tilde.values[k1_node]
    w_vals = np.empty((len(grid_ext.nodes), op.dim), dtype=complex)
    w_vals[:n_pre] = u_tilde.values[:n_pre]
    for i, t in enumerate(grid_ext.nodes[n_pre:], start=n_pre):
        w_vals[i] = op.semigroup_apply_oracle(t - t1, x1)
    w = GridFunction(grid_ext, w_vals)
    max_residual = float(np.max(ode_residuals(op, w)))
    return GlueReport(t1=float(t1),
                      precondition_residual=precondition_residual,
                      initial_norm=float(x0_norm),
                      w_t1_norm=float(op.norm0(x1)),
                      max_residual=max_residual)
