"""Finite-dimensional operator pairs (E0, E1), resolvents, spectra, semigroups.

The ambient space E0 is C^dim with either the euclidean or the sup norm;
E1 is the same space with the graph norm ||x||_1 = ||x||_0 + ||Ax||_0, so
the embedding constant c1 equals 1 exactly.
"""

from __future__ import annotations

import re
from functools import cached_property
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ConfigError,
    DimensionMismatch,
    EigenFailure,
    SingularResolvent,
)

E0_NORMS = ("euclidean", "sup")
STRUCTURES = ("dense", "diagonal", "tridiagonal")


class OperatorPair:
    """A closed operator A on C^dim together with the E0 and graph norms.

    Immutable after construction; all derived data (spectrum, factorizations)
    is cached lazily and never mutated afterwards.
    """

    def __init__(self, matrix, e0_norm="euclidean", structure="dense"):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got {matrix.shape}")
        if e0_norm not in E0_NORMS:
            raise ConfigError(f"unknown e0_norm {e0_norm!r}")
        if structure not in STRUCTURES:
            raise ConfigError(f"unknown structure {structure!r}")
        if structure == "diagonal" and np.any(matrix != np.diag(np.diag(matrix))):
            raise ConfigError("structure=diagonal requires exactly zero off-diagonal entries")
        if structure == "tridiagonal":
            off = np.triu(matrix, 2) + np.tril(matrix, -2)
            if np.any(off != 0):
                raise ConfigError("structure=tridiagonal requires a tridiagonal matrix")
        matrix.setflags(write=False)
        self.matrix = matrix
        self.e0_norm = e0_norm
        self.structure = structure

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __repr__(self):
        return (f"OperatorPair(dim={self.dim}, structure={self.structure!r}, "
                f"e0_norm={self.e0_norm!r})")

    # -- norms -------------------------------------------------------------

    def norm0(self, x):
        """E0 norm of a vector (euclidean or sup)."""
        x = np.asarray(x)
        if self.e0_norm == "euclidean":
            return float(np.linalg.norm(x))
        return float(np.max(np.abs(x))) if x.size else 0.0

    def norm0_cols(self, X):
        """E0 norm of each column of a (dim, k) array."""
        X = np.asarray(X)
        if self.e0_norm == "euclidean":
            return np.linalg.norm(X, axis=0)
        return np.max(np.abs(X), axis=0)

    def norm1(self, x):
        """Graph norm ||x||_1 = ||x||_0 + ||Ax||_0."""
        return self.norm0(x) + self.norm0(self.matrix @ x)

    def operator_norm(self, B):
        """E0 operator norm of a matrix B acting on E0."""
        B = np.asarray(B)
        if self.e0_norm == "euclidean":
            return float(np.linalg.norm(B, 2))
        return float(np.max(np.sum(np.abs(B), axis=1)))

    @cached_property
    def matrix_norm(self):
        return self.operator_norm(self.matrix)

    # -- spectrum ----------------------------------------------------------

    @cached_property
    def eigenvalues(self):
        A = self.matrix
        if self.structure == "diagonal":
            return np.diag(A).copy()
        if self.structure == "tridiagonal" and np.allclose(A, A.conj().T, rtol=0, atol=0):
            d = np.real(np.diag(A))
            e = np.real(np.diag(A, 1))
            return scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True).astype(complex)
        try:
            return np.linalg.eigvals(A)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
            raise EigenFailure(str(exc)) from None

    @property
    def spectral_bound(self):
        return float(np.max(self.eigenvalues.real))

    def spectral_distance(self, mu):
        return float(np.min(np.abs(complex(mu) - self.eigenvalues)))

    @property
    def singular_tol(self):
        # scale-invariant guard against near-singular resolvent solves
        return 1e-12 * (1.0 + self.matrix_norm)

    # -- resolvent ---------------------------------------------------------

    def check_vector(self, y):
        y = np.asarray(y, dtype=complex)
        if y.shape[0] != self.dim:
            raise DimensionMismatch(f"vector of length {y.shape[0]} for dim {self.dim}")
        return y

    def resolvent_solve(self, mu, y):
        """Solve (mu - A)x = y."""
        mu = complex(mu)
        y = self.check_vector(y)
        if self.spectral_distance(mu) <= self.singular_tol:
            raise SingularResolvent(f"mu={mu} within tolerance of the spectrum")
        if self.structure == "diagonal":
            diag = np.diag(self.matrix)
            return (y.T / (mu - diag)).T
        return np.linalg.solve(mu * np.eye(self.dim) - self.matrix, y)

    def resolvent_norm(self, mu):
        """E0 operator norm of (mu - A)^-1."""
        mu = complex(mu)
        if self.spectral_distance(mu) <= self.singular_tol:
            raise SingularResolvent(f"mu={mu} within tolerance of the spectrum")
        if self.structure == "diagonal":
            # normal operator: both norms reduce to 1/dist(mu, sigma(A))
            return 1.0 / self.spectral_distance(mu)
        R = mu * np.eye(self.dim) - self.matrix
        if self.e0_norm == "euclidean":
            smin = np.linalg.svd(R, compute_uv=False)[-1]
            return float(1.0 / smin)
        return self.operator_norm(np.linalg.inv(R))

    # -- semigroup oracle ----------------------------------------------------

    def semigroup_apply_oracle(self, t, x):
        """e^{tA}x by scaling-and-squaring (dense) or eigenvalue exponentials
        (diagonal). t = 0 returns x unchanged."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        x = self.check_vector(x)
        if t == 0:
            return x.copy()
        if self.structure == "diagonal":
            return (np.exp(t * np.diag(self.matrix)) * x.T).T
        return scipy.linalg.expm(t * self.matrix) @ x

    # -- evolution backend for the Cauchy solver ------------------------------

    @cached_property
    def diagonalization(self):
        """(Q, lam, Qinv) with A = Q diag(lam) Qinv when this is numerically
        trustworthy, else None (defective / badly conditioned eigenbasis)."""
        A = self.matrix
        if self.structure == "diagonal":
            I = np.eye(self.dim)
            return I, np.diag(A).copy(), I
        if np.allclose(A, A.conj().T, rtol=0, atol=1e-14 * (1 + self.matrix_norm)):
            lam, Q = np.linalg.eigh(A)
            return Q, lam.astype(complex), Q.conj().T
        lam, Q = np.linalg.eig(A)
        cond = np.linalg.cond(Q)
        if not np.isfinite(cond) or cond > 1e6:
            return None
        Qinv = np.linalg.inv(Q)
        if np.linalg.norm(Q @ np.diag(lam) @ Qinv - A) > 1e-12 * (1 + self.matrix_norm):
            return None
        return Q, lam, Qinv


@dataclass
class SpectralReport:
    """Spectrum, resolvent-set scan, spectral bound and half-plane constants."""

    eigenvalues: np.ndarray
    spectral_bound: float
    scan: list = field(default_factory=list)  # (mu, resolvent_norm) pairs
    bound_constant: float | None = None       # N with ||R(mu)|| <= N/(1+|mu|)
    half_plane_offset: float | None = None    # omega
    e0_norm: str = "euclidean"
    diagnostics: dict = field(default_factory=dict)


def resolvent_solve(op, mu, y):
    return op.resolvent_solve(mu, y)


def resolvent_norm(op, mu):
    return op.resolvent_norm(mu)


def spectrum_and_bound(op):
    """SpectralReport with eigenvalues and spectral bound only."""
    ev = op.eigenvalues
    return SpectralReport(eigenvalues=ev, spectral_bound=float(np.max(ev.real)),
                          e0_norm=op.e0_norm)


def semigroup_apply_oracle(op, t, x):
    return op.semigroup_apply_oracle(t, x)


# -- canned operator constructors ------------------------------------------


def diagonal_operator(entries, e0_norm="euclidean"):
    return OperatorPair(np.diag(np.asarray(entries, dtype=complex)),
                        e0_norm=e0_norm, structure="diagonal")


def laplacian_1d(n, e0_norm="euclidean"):
    """1D Dirichlet Laplacian on n interior points of (0,1), mesh h = 1/(n+1)."""
    h = 1.0 / (n + 1)
    A = (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
         + np.diag(np.ones(n - 1), -1)) / h**2
    return OperatorPair(A, e0_norm=e0_norm, structure="tridiagonal")


def jordan_block(lam, size, e0_norm="euclidean"):
    A = np.diag(np.full(size, complex(lam))) + np.diag(np.ones(size - 1), 1)
    return OperatorPair(A, e0_norm=e0_norm, structure="dense")


def random_normal_operator(dim, seed, bound=-0.5, spread=8.0, e0_norm="euclidean"):
    """Random normal operator with spectrum in {Re < bound}, unitarily mixed."""
    rng = np.random.default_rng(seed)
    lam = (bound - spread * rng.random(dim)) + 1j * spread * (2 * rng.random(dim) - 1)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, _ = np.linalg.qr(G)
    return OperatorPair(Q @ np.diag(lam) @ Q.conj().T, e0_norm=e0_norm, structure="dense")


# -- operator description files ---------------------------------------------


def _parse_complex(tok):
    try:
        return complex(tok.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {tok!r}") from None


def _parse_vector(text):
    toks = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    return np.array([_parse_complex(t) for t in toks])


def parse_operator_text(text):
    """Parse an operator description (key = value lines) into an OperatorPair.

    Recognized keys: dim, structure, e0_norm, matrix (generator spec), row
    (repeatable, inline matrix rows). Generators: ``laplacian1d n=<int>``,
    ``diag <list>``, ``jordan lambda=<complex> size=<int>``.
    """
    kv = {}
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "row":
            rows.append(_parse_vector(val))
        else:
            kv[key] = val

    e0_norm = kv.get("e0_norm", "euclidean")
    structure = kv.get("structure")

    gen = kv.get("matrix")
    if gen is not None and rows:
        raise ConfigError("give either 'matrix = <generator>' or 'row =' lines, not both")
    if gen is not None:
        parts = gen.split()
        name, args = parts[0], dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        if name == "laplacian1d":
            op = laplacian_1d(int(args["n"]), e0_norm=e0_norm)
        elif name == "diag":
            entries = _parse_vector(gen[len("diag"):])
            op = diagonal_operator(entries, e0_norm=e0_norm)
        elif name == "jordan":
            op = jordan_block(_parse_complex(args["lambda"]), int(args["size"]),
                              e0_norm=e0_norm)
        elif name == "random-normal":
            op = random_normal_operator(int(args["dim"]), int(args.get("seed", 0)),
                                        e0_norm=e0_norm)
        else:
            raise ConfigError(f"unknown matrix generator {name!r}")
    elif rows:
        try:
            A = np.vstack(rows)
        except ValueError:
            raise ConfigError("inline rows have inconsistent lengths") from None
        op = OperatorPair(A, e0_norm=e0_norm, structure=structure or "dense")
    else:
        raise ConfigError("no matrix specified")

    if structure is not None and op.structure != structure:
        op = OperatorPair(op.matrix, e0_norm=e0_norm, structure=structure)
    if "dim" in kv and int(kv["dim"]) != op.dim:
        raise ConfigError(f"declared dim {kv['dim']} != actual dim {op.dim}")
    return op


def load_operator(path):
    with open(path) as fh:
        return parse_operator_text(fh.read())
