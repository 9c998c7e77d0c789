"""Exponential-integrator phi functions.

phi_0(z) = e^z and phi_{k+1}(z) = (phi_k(z) - 1/k!) / z, equivalently
phi_k(z) = int_0^1 e^{z(1-s)} s^{k-1}/(k-1)! ds. These make quadrature of
int_0^t e^{(t-s)A} p(s) ds exact in A for polynomial p, which is what keeps
stiff spectral components accurate.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

_SERIES_RADIUS = 1.2
_SERIES_TERMS = 30


def phi_scalar(kmax, z):
    """phi_k(z) for k = 0..kmax, elementwise over the array z.

    Returns an array of shape (kmax+1,) + z.shape. Uses the Taylor series
    near zero (the upward recurrence cancels there) and the recurrence away
    from zero.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty((kmax + 1,) + z.shape, dtype=complex)
    out[0] = np.exp(z)

    small = np.abs(z) < _SERIES_RADIUS
    z_small = np.where(small, z, 0.0)
    for k in range(1, kmax + 1):
        # Taylor branch: sum_i z^i / (i+k)!
        acc = np.zeros_like(z_small)
        zp = np.ones_like(z_small)
        for i in range(_SERIES_TERMS):
            acc = acc + zp / math.factorial(i + k)
            zp = zp * z_small
        out[k] = acc

    z_big = np.where(small, 1.0, z)
    prev = out[0]
    for k in range(1, kmax + 1):
        cur = (prev - 1.0 / math.factorial(k - 1)) / z_big
        out[k] = np.where(small, out[k], cur)
        prev = out[k]
    return out


def phi_matrices(B, kmax):
    """[e^B, phi_1(B), ..., phi_kmax(B)] via one augmented matrix exponential.

    exp of the block matrix [[B, I, 0, ...], [0, 0, I, ...], ...] carries
    phi_k(B) in its top block row.
    """
    B = np.asarray(B, dtype=complex)
    d = B.shape[0]
    n = d * (kmax + 1)
    M = np.zeros((n, n), dtype=complex)
    M[:d, :d] = B
    for k in range(kmax):
        M[k * d:(k + 1) * d, (k + 1) * d:(k + 2) * d] = np.eye(d)
    E = scipy.linalg.expm(M)
    return [E[:d, k * d:(k + 1) * d] for k in range(kmax + 1)]
