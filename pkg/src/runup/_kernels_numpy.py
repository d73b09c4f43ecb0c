"""Vectorised numpy versions of the kernels in ``_kernels_numba``.

Same algorithms and regime boundaries, written over arrays: a fixed number
of series/asymptotic terms per regime and a shared starting order for the
backward recurrence.
"""
import math

import numpy as np

SERIES_MAX_X = 2.0
ASYMPTOTIC_MIN_X = 25.0
_CHUNK = 1 << 20


def _jv_series(nu, x):
    half = 0.5 * x
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.exp(nu * np.log(half) - math.lgamma(nu + 1.0))
    term = np.where(x > 0.0, term, 1.0 if nu == 0.0 else 0.0)
    total = term.copy()
    q = -half * half
    for k in range(1, 30):
        term = term * q / (k * (k + nu))
        total += term
    return total


def _jv_miller(nu, x):
    n_top = int(x.max() + 10.0 * x.max() ** (1.0 / 3.0) + 30.0)
    n_top += n_top % 2
    k = n_top // 2
    w = math.exp(math.lgamma(nu + k) - math.lgamma(nu + 1.0) - math.lgamma(k + 1.0))
    f_next = np.zeros_like(x)
    f = np.full_like(x, 1e-280)
    norm = np.zeros_like(x)
    for n in range(n_top, 0, -1):
        if n % 2 == 0:
            norm += (nu + 2.0 * k) * w * f
            if k > 1:
                w *= k / (nu + k - 1.0)
            k -= 1
        f_prev = 2.0 * (nu + n) / x * f - f_next
        f_next = f
        f = f_prev
        big = np.abs(f) > 1e250
        if big.any():
            f = np.where(big, f * 1e-250, f)
            f_next = np.where(big, f_next * 1e-250, f_next)
            norm = np.where(big, norm * 1e-250, norm)
    norm += f
    scale = np.exp(nu * np.log(0.5 * x) - math.lgamma(nu + 1.0))
    return f * scale / norm


def _jv_asymptotic(nu, x):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for j in range(1, 26):
        term = term * (mu - (2.0 * j - 1.0) ** 2) / (j * 8.0 * x)
        sign = -1.0 if (j // 2) % 2 else 1.0
        if j % 2:
            q += sign * term
        else:
            p += sign * term
    chi = x - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def jv_array(nu, x):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    small = flat <= SERIES_MAX_X
    large = flat >= ASYMPTOTIC_MIN_X + nu * nu
    mid = ~(small | large)
    if small.any():
        out[small] = _jv_series(nu, flat[small])
    if large.any():
        out[large] = _jv_asymptotic(nu, flat[large])
    if mid.any():
        out[mid] = _jv_miller(nu, flat[mid])
    return out.reshape(x.shape)


def bessel_matrix(nu, rows, cols):
    """J_nu(2 rows_i cols_j) as a dense matrix."""
    return jv_array(nu, 2.0 * np.outer(rows, cols))


def hankel_moments(k, lam, weights, values, nu, power):
    """sum_j weights_j values_j lam_j^power J_nu(2 k lam_j) for each k."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lw = np.where(lam > 0.0, weights * values * lam**power, 0.0)
    keep = lw != 0.0
    lam, lw = lam[keep], lw[keep]
    out = np.zeros(k.size)
    if lam.size == 0:
        return out
    rows = max(1, _CHUNK // lam.size)
    for start in range(0, k.size, rows):
        block = bessel_matrix(nu, k[start:start + rows], lam)
        out[start:start + rows] = block @ lw
    return out

