"""Weighted-in-time norms, trace-space upper bounds, and the diagonal
interpolation scale.

The weight is t^{1-sigma} with sigma in (0, 1]; sigma = 1 reproduces the
unweighted norms exactly (the weight array is identically 1, so every
reduction is bit-for-bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cauchy import CauchySolver, estimate_M
from .errors import ConfigError, MissingDerivative, NotDiagonal
from .forcing import ExpForcing
from .theorem import (
    halfplane_scan,
    maxreg_inequality_check,
    omega1_weighted,
    time_weights,
)


@dataclass(frozen=True)
class WeightParams:
    sigma: float = 1.0
    theta: float = 0.5
    p: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.sigma <= 1.0:
            raise ConfigError(f"sigma={self.sigma} outside (0, 1]")
        if not 0.0 < self.theta < 1.0:
            raise ConfigError(f"theta={self.theta} outside (0, 1)")
        if not 1.0 < self.p < np.inf:
            raise ConfigError(f"p={self.p} outside (1, inf)")


@dataclass
class WeightedNorm:
    value: float
    zero_limit: float          # extrapolated lim_{t->0+} t^{1-sigma}||u(t)||
    membership_ok: bool        # little-o condition plausible on the samples


def _node_norms(op, u):
    return np.array([op.norm0(row) for row in u.values])


def _extrapolate_to_zero(ts, ws):
    """Quadratic (Neville) extrapolation of the three smallest samples to
    t = 0; a diagnostic, not a certificate."""
    t1, t2, t3 = ts
    w = list(ws)
    for j in (1, 2):
        for i in range(3 - j):
            w[i] = w[i] + (w[i + 1] - w[i]) * (0.0 - ts[i]) / (ts[i + j] - ts[i])
    return w[0]


def weighted_norm(op, u, sigma):
    """sup over grid nodes t > 0 of t^{1-sigma} ||u(t)||_0, plus the
    little-o membership diagnostic at t = 0+.

    sigma = 1 gives the plain sup norm over all nodes (weight 1 everywhere).
    """
    grid = u.grid
    norms = _node_norms(op, u)
    w = time_weights(grid, sigma)
    value = float(np.max(w * norms))
    pos = np.nonzero(grid.nodes > 0)[0][:3]
    if len(pos) < 3 or sigma == 1.0:
        zero_limit = 0.0
    else:
        zero_limit = float(_extrapolate_to_zero(grid.nodes[pos],
                                                (w * norms)[pos]))
    membership_ok = abs(zero_limit) <= 0.1 * max(value, 1e-300)
    return WeightedNorm(value=value, zero_limit=zero_limit,
                        membership_ok=membership_ok)


@dataclass
class WeightedMaxregCheck:
    lhs: float
    rhs: float
    passed: bool
    endpoint_value: float
    endpoint_bound: float | None
    endpoint_ok: bool | None


def weighted_maxreg_check(op, grid, sigma, mu, x, M_hat, c2_hat=None):
    """Weighted a-priori inequality plus the endpoint estimate
    T^{1-sigma} ||u_mu(T)||_0 <= c2_hat T^{1-sigma} ||x||_0, where
    u_mu solves the zero-initial-data problem with forcing e^{-mu t}x."""
    lhs, rhs, passed = maxreg_inequality_check(op, grid, mu, x, M_hat, sigma)
    mu = complex(mu)
    x = op.check_vector(x)
    solver = CauchySolver(op, grid)
    u = solver.solve_ka(ExpForcing(mu, x))
    T = grid.T
    endpoint_value = float(T ** (1.0 - sigma) * op.norm0(u.values[-1]))
    endpoint_bound = None
    endpoint_ok = None
    if c2_hat is not None:
        endpoint_bound = float(c2_hat * T ** (1.0 - sigma) * op.norm0(x))
        endpoint_ok = bool(endpoint_value <= endpoint_bound * (1 + 1e-6))
    return WeightedMaxregCheck(lhs=lhs, rhs=rhs, passed=passed,
                               endpoint_value=endpoint_value,
                               endpoint_bound=endpoint_bound,
                               endpoint_ok=endpoint_ok)


def trace_norm_upper(op, x, grid, sigma=1.0):
    """Weighted E1(J)-norm of t -> e^{tA}x: an upper bound for the trace
    norm inf{||u||_{E1(J)} : u(0) = x}, since the semigroup orbit is one
    admissible extension (the true infimum is not computed)."""
    x = op.check_vector(x)
    if op.norm0(x) == 0:
        raise ConfigError("trace norm upper bound requires x != 0")
    w = time_weights(grid, sigma)
    best = 0.0
    for t, wt in zip(grid.nodes, w):
        if wt == 0.0:
            continue
        u = op.semigroup_apply_oracle(t, x)
        au = op.matrix @ u
        best = max(best, wt * (2.0 * op.norm0(au) + op.norm0(u)))
    return float(best)


def interp_norm_diag(op, x, theta):
    """sup_k (1+|lam_k|)^theta |x_k| — the spectral representative of the
    theta-interpolation norm between E0 and the graph norm, exact only in
    the diagonal case."""
    if op.structure != "diagonal":
        raise NotDiagonal(f"structure={op.structure!r}")
    x = op.check_vector(x)
    lam = np.diag(op.matrix)
    return float(np.max((1.0 + np.abs(lam)) ** theta * np.abs(x)))


@dataclass
class DPGScale:
    """Diagonal interpolation scale: coordinate weights for the E_theta and
    E_{1+theta} norms.  A diagonal matrix commutes with the weights, so the
    operator itself is unchanged; only the norms (and hence probe data)
    transform."""

    theta: float
    weights: np.ndarray         # (1+|lam_k|)^theta
    graph_weights: np.ndarray   # (1+|lam_k|)^{1+theta}

    def scale_vector(self, x):
        return self.weights * np.asarray(x, dtype=complex)

    def norm_theta(self, x):
        return float(np.max(np.abs(self.scale_vector(x))))

    def norm_one_plus_theta(self, x):
        return float(np.max(self.graph_weights * np.abs(np.asarray(x))))


def dpg_scale(op, theta):
    if op.structure != "diagonal":
        raise NotDiagonal(f"structure={op.structure!r}")
    lam = np.diag(op.matrix)
    w = (1.0 + np.abs(lam)) ** theta
    return DPGScale(theta=float(theta), weights=w,
                    graph_weights=w * (1.0 + np.abs(lam))), op


def lp_norms(op, u, p):
    """(int ||u||_0^p)^{1/p} and (int (||u'||_0 + ||u||_1)^p)^{1/p} by the
    panel quadrature of the grid."""
    if u.derivative_values is None:
        raise MissingDerivative("lp e1-norm needs derivative samples")
    grid = u.grid
    n0 = _node_norms(op, u)
    e0_lp = float(grid.integrate_samples(n0**p) ** (1.0 / p))
    du = np.array([op.norm0(row) for row in u.derivative_values])
    au = np.array([op.norm0(row) for row in u.values @ op.matrix.T])
    e1_lp = float(grid.integrate_samples((du + n0 + au) ** p) ** (1.0 / p))
    return e0_lp, e1_lp


def _scale_probe(probe, w):
    from .forcing import PolyForcing, ZeroForcing
    f, x = probe
    xs = w * np.asarray(x, dtype=complex)
    if isinstance(f, ExpForcing):
        return ExpForcing(f.mu, w * f.y), xs
    if isinstance(f, PolyForcing):
        return PolyForcing(f.coeffs, w * f.y), xs
    if isinstance(f, ZeroForcing):
        return f, xs
    raise ConfigError("theta sweep supports separable probes only")


@dataclass
class ThetaSweepRow:
    theta: float
    M_hat: float
    omega1: float
    N: float


def theta_sweep(op, grid, thetas, probes, mu_grid=None, sigma=1.0):
    """M_hat along the diagonal interpolation scale.

    The diagonal operator commutes with the coordinate weights, so the sweep
    rescales the probe data (forcings and initial values) and re-estimates M
    in the weighted coordinates; N is theta-independent for the same reason
    and computed once.
    """
    if op.structure != "diagonal":
        raise NotDiagonal(f"structure={op.structure!r}")
    if mu_grid is None:
        mu_grid = [complex(r, i)
                   for r in np.logspace(np.log10(0.5), 2, 3)
                   for i in (-4.0, 0.0, 4.0)]
    N = halfplane_scan(op, 0.0, mu_grid).bound_constant
    rows = []
    for theta in thetas:
        scale, _ = dpg_scale(op, theta)
        scaled = [_scale_probe(pr, scale.weights) for pr in probes]
        est = estimate_M(op, grid, scaled)
        rows.append(ThetaSweepRow(theta=float(theta), M_hat=est.M_hat,
                                  omega1=omega1_weighted(est.M_hat, grid.T, sigma),
                                  N=float(N)))
    return rows
