"""Closed-form and sampled forcing terms f(t) for the inhomogeneous problem.

Separable forcings f(t) = profile(t) * y keep the solver fast (one scalar
profile shared by all coordinates); sampled forcings are interpolated
panel-wise at the quadrature nodes.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ConfigError


class Forcing:
    """Base class. ``rate`` is a bound on the profile's exponential/oscillation
    rate, used to pick the panel resolution."""

    separable = False
    rate = 0.0

    def eval(self, t):
        """Vector value f(t); t scalar."""
        raise NotImplementedError


class ZeroForcing(Forcing):
    separable = True

    def __init__(self, dim):
        self.dim = dim
        self.y = np.zeros(dim, dtype=complex)

    def profile(self, t):
        return np.zeros_like(np.asarray(t, dtype=complex))

    def eval(self, t):
        return np.zeros(self.dim, dtype=complex)

    def describe(self):
        return "zero"


class ExpForcing(Forcing):
    """f(t) = e^{-mu t} y (the proof's probe family f_mu)."""

    separable = True

    def __init__(self, mu, y):
        self.mu = complex(mu)
        self.y = np.asarray(y, dtype=complex)
        self.dim = self.y.shape[0]

    @property
    def rate(self):
        return abs(self.mu)

    def profile(self, t):
        return np.exp(-self.mu * np.asarray(t, dtype=complex))

    def eval(self, t):
        return np.exp(-self.mu * t) * self.y

    def describe(self):
        return f"exp mu={self.mu}"


class PolyForcing(Forcing):
    """f(t) = (c_0 + c_1 t + ... ) y."""

    separable = True

    def __init__(self, coeffs, y):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.y = np.asarray(y, dtype=complex)
        self.dim = self.y.shape[0]

    def profile(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=complex),
                                                self.coeffs)

    def eval(self, t):
        return complex(np.polynomial.polynomial.polyval(t, self.coeffs)) * self.y

    def describe(self):
        return f"poly deg={len(self.coeffs) - 1}"


class CallableForcing(Forcing):
    """General vector-valued forcing given as a callable t -> C^dim."""

    def __init__(self, fn, dim, rate=0.0):
        self.fn = fn
        self.dim = dim
        self.rate = float(rate)

    def eval(self, t):
        return np.asarray(self.fn(t), dtype=complex)

    def describe(self):
        return "callable"


class SampledForcing(Forcing):
    """Forcing given by samples on a TimeGrid; evaluated anywhere by
    polynomial interpolation on the enclosing panel's quadrature nodes."""

    def __init__(self, gridfunction):
        self.gf = gridfunction
        self.dim = gridfunction.dim

    def eval(self, t):
        grid = self.gf.grid
        k = int(np.searchsorted(grid.edges, t, side="right") - 1)
        k = min(max(k, 0), grid.panels - 1)
        ts = grid.gl_times[k]
        idx = grid.gl_node_indices[k]
        vals = self.gf.values[idx]
        # Lagrange interpolation on the panel's Gauss-Legendre nodes
        out = np.zeros(self.dim, dtype=complex)
        for m in range(len(ts)):
            L = 1.0
            for i in range(len(ts)):
                if i != m:
                    L *= (t - ts[i]) / (ts[m] - ts[i])
            out += L * vals[m]
        return out

    def describe(self):
        return "sampled"


# -- probe description files -------------------------------------------------


def _parse_complex(tok):
    try:
        return complex(tok.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {tok!r}") from None


def _parse_vector(text):
    toks = [t for t in re.split(r"[,;]+", text.strip()) if t]
    return np.array([_parse_complex(t) for t in toks])


def parse_probe_line(line, dim):
    """One probe per line: ``exp mu=<complex> y=<vec>`` | ``poly
    coeffs=<list> [y=<vec>]`` | ``ic x=<vec>``. Returns (forcing, x)."""
    parts = line.split()
    kind, args = parts[0], dict(p.split("=", 1) for p in parts[1:] if "=" in p)
    ones = np.ones(dim, dtype=complex)
    if kind == "exp":
        y = _parse_vector(args["y"]) if "y" in args else ones
        f = ExpForcing(_parse_complex(args["mu"]), y)
        x = _parse_vector(args["x"]) if "x" in args else np.zeros(dim, complex)
    elif kind == "poly":
        y = _parse_vector(args["y"]) if "y" in args else ones
        f = PolyForcing(_parse_vector(args["coeffs"]), y)
        x = _parse_vector(args["x"]) if "x" in args else np.zeros(dim, complex)
    elif kind == "ic":
        f = ZeroForcing(dim)
        x = _parse_vector(args["x"])
    else:
        raise ConfigError(f"unknown probe kind {kind!r}")
    if f.separable and f.y.shape[0] != dim:
        raise ConfigError(f"probe vector length {f.y.shape[0]} != dim {dim}")
    if x.shape[0] != dim:
        raise ConfigError(f"initial value length {x.shape[0]} != dim {dim}")
    return f, x


def load_probes(path, dim):
    probes = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                probes.append(parse_probe_line(line, dim))
    return probes


def default_probes(op, seed=0, n_exp=6, n_poly=2, n_ic=4):
    """Probe family for the maximal-regularity estimator: exponential probes
    over a log-spaced rate grid with random directions, low-order polynomial
    probes, and initial values aligned with eigenvectors plus random ones."""
    rng = np.random.default_rng(seed)
    dim = op.dim
    probes = []
    mus = np.logspace(-1, 1.5, n_exp)
    for mu in mus:
        y = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        probes.append((ExpForcing(mu, y / np.linalg.norm(y)),
                       np.zeros(dim, complex)))
    for k in range(n_poly):
        coeffs = np.zeros(k + 2)
        coeffs[-1] = 1.0
        y = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        probes.append((PolyForcing(coeffs, y / np.linalg.norm(y)),
                       np.zeros(dim, complex)))
    diag = op.diagonalization
    eigvecs = None if diag is None else diag[0]
    for k in range(n_ic):
        if eigvecs is not None and k < min(2, dim):
            x = eigvecs[:, k].astype(complex)
        else:
            x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            x = x / np.linalg.norm(x)
        probes.append((ZeroForcing(dim), x))
    return probes
