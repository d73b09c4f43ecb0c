"""Compiled inner loops.

Every function here has a twin with the same signature in
``_kernels_numpy``; ``runup._backend`` picks one of the two at import time.
Loops parallelise over independent outputs only, so each output is a fixed
sequential sum and results do not depend on the thread count.
"""
import math

import numpy as np
from numba import njit, prange

SERIES_MAX_X = 2.0
ASYMPTOTIC_MIN_X = 25.0


@njit(cache=True)
def _jv_series(nu, x):
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0)) if x > 0.0 else (1.0 if nu == 0.0 else 0.0)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total) or k > 200:
            break
    return total


@njit(cache=True)
def _jv_miller(nu, x):
    # backward recurrence on J_{nu+n}, normalised by
    # (x/2)^nu / Gamma(nu+1) = J_nu + sum_{k>=1} (nu+2k) w_k J_{nu+2k},
    # w_k = Gamma(nu+k) / (Gamma(nu+1) k!)
    n_top = int(x + 10.0 * x ** (1.0 / 3.0) + 30.0)
    if n_top % 2 == 1:
        n_top += 1
    k = n_top // 2
    w = math.exp(math.lgamma(nu + k) - math.lgamma(nu + 1.0) - math.lgamma(k + 1.0))
    f_next = 0.0
    f = 1e-280
    norm = 0.0
    for n in range(n_top, 0, -1):
        if n % 2 == 0:
            norm += (nu + 2.0 * k) * w * f
            w *= (k + 0.0) / (nu + k - 1.0) if k > 1 else 1.0
            k -= 1
        f_prev = 2.0 * (nu + n) / x * f - f_next
        f_next = f
        f = f_prev
        if abs(f) > 1e250:
            f *= 1e-250
            f_next *= 1e-250
            norm *= 1e-250
    norm += f
    scale = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))
    return f * scale / norm


@njit(cache=True)
def _jv_asymptotic(nu, x):
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    j = 1
    while j < 60:
        term *= (mu - (2.0 * j - 1.0) ** 2) / (j * 8.0 * x)
        if j % 2 == 1:
            q += term if (j // 2) % 2 == 0 else -term
        else:
            p += -term if (j // 2) % 2 == 1 else term
        if abs(term) < 1e-17:
            break
        j += 1
    chi = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


@njit(cache=True)
def jv_scalar(nu, x):
    if x <= SERIES_MAX_X:
        return _jv_series(nu, x)
    if x >= ASYMPTOTIC_MIN_X + nu * nu:
        return _jv_asymptotic(nu, x)
    return _jv_miller(nu, x)


@njit(cache=True, parallel=True)
def jv_array(nu, x):
    flat = x.ravel()
    out = np.empty(flat.size)
    for i in prange(flat.size):
        out[i] = jv_scalar(nu, flat[i])
    return out.reshape(x.shape)


@njit(cache=True, parallel=True)
def hankel_moments(k, lam, weights, values, nu, power):
    """sum_j weights_j values_j lam_j^power J_nu(2 k lam_j) for each k."""
    n_k = k.size
    n_l = lam.size
    lw = np.empty(n_l)
    for j in range(n_l):
        lw[j] = weights[j] * values[j] * lam[j] ** power if lam[j] > 0.0 else 0.0
    out = np.empty(n_k)
    for i in prange(n_k):
        acc = 0.0
        two_k = 2.0 * k[i]
        for j in range(n_l):
            if lw[j] != 0.0:
                acc += lw[j] * jv_scalar(nu, two_k * lam[j])
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def bessel_matrix(nu, rows, cols):
    """J_nu(2 rows_i cols_j) as a dense matrix."""
    out = np.empty((rows.size, cols.size))
    for i in prange(rows.size):
        for j in range(cols.size):
            out[i, j] = jv_scalar(nu, 2.0 * rows[i] * cols[j])
    return out
