"""Special functions and the integral transforms behind the hodograph solver.

Conventions used throughout: ``nu = 1/m``; the pressure-like variable is
expanded in ``J_nu``, the velocity in ``J_{nu+1}``; ``lam = sqrt(sigma)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline
from scipy.special import roots_jacobi

from runup._backend import kernels
from runup.core import BayGeometry, DomainRangeError, Grid1D, InvalidParameterError, as_grid

PANEL_ORDER = 16
SCHEMES = ("gauss-legendre", "trapezoid")


class TruncationWarning(UserWarning):
    """Sampled data do not decay before the end of the integration grid."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Discretisation of the k-integrals and of the inner lambda/xi integrals.

    ``k_max=None`` selects the truncation adaptively: the smallest k beyond
    which all spectral moments stay below ``k_threshold`` times their peak,
    capped at ``k_cap``.
    """

    k_max: Optional[float] = None
    n_k: int = 2048
    n_inner: int = 1024
    n_abel: int = 96
    scheme: str = "gauss-legendre"
    k_cap: float = 200.0
    k_threshold: float = 1e-10

    def __post_init__(self):
        if self.k_max is not None and not (math.isfinite(self.k_max) and self.k_max > 0):
            raise InvalidParameterError("k_max must be positive")
        if not (self.k_cap > 0):
            raise InvalidParameterError("k_cap must be positive")
        for name in ("n_k", "n_inner", "n_abel"):
            if int(getattr(self, name)) < 16:
                raise InvalidParameterError(f"{name} must be at least 16")
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"scheme must be one of {SCHEMES}")


@dataclass(frozen=True)
class SpectralMoments:
    """Inner integrals of the Fourier-Bessel representation at the k-nodes.

    ``a[i] = int psi_proj(s) s^(nu/2) J_nu(2 k_i sqrt s) ds`` and
    ``b[i] = int phi_proj(s) s^(nu/2+1/2) J_{nu+1}(2 k_i sqrt s) ds``;
    ``weights`` are the k-quadrature weights on ``k``.
    """

    k: Grid1D
    weights: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def k_max(self) -> float:
        return float(self.k.nodes[-1])


def gamma(x):
    """Euler Gamma function (stdlib implementation)."""
    return math.gamma(x)


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for real nu >= 0, x >= 0."""
    xa = np.asarray(x, dtype=float)
    if nu < 0:
        raise InvalidParameterError("order must be non-negative")
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise DomainRangeError("bessel_j is defined here for finite x >= 0 only")
    out = kernels.jv_array(float(nu), np.ascontiguousarray(xa.reshape(-1)))
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


@lru_cache(maxsize=32)
def _gl_reference(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_gauss_legendre(a, b, n, order=PANEL_ORDER):
    """Nodes and weights of an ``order``-point Gauss-Legendre rule on ceil(n/order) panels."""
    panels = max(1, -(-int(n) // order))
    x, w = _gl_reference(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def trapezoid_weights(nodes):
    nodes = np.asarray(nodes, dtype=float)
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def _quadrature(nodes, values, n, scheme):
    """Quadrature nodes, weights and interpolated values for samples on ``nodes``."""
    if scheme == "trapezoid":
        return nodes, trapezoid_weights(nodes), values
    qn, qw = composite_gauss_legendre(nodes[0], nodes[-1], n)
    return qn, qw, CubicSpline(nodes, values)(qn)


def _check_decay(values, what):
    peak = np.max(np.abs(values)) if values.size else 0.0
    if peak > 0 and abs(values[-1]) > 1e-12 * peak:
        warnings.warn(f"{what} has not decayed at the end of its grid "
                      f"(|f_end|/|f|_max = {abs(values[-1]) / peak:.2e})", TruncationWarning, stacklevel=3)


def hankel_moment(f, lam, nu, power, k, cfg: QuadratureConfig = QuadratureConfig()):
    """Truncated quadrature of ``int_0^inf f(lam) lam^power J_nu(2 k lam) dlam``.

    ``f`` is sampled on the grid ``lam``; it is assumed to vanish beyond the
    last node (a :class:`TruncationWarning` is issued otherwise). ``k`` may
    be a scalar or an array.
    """
    lam = as_grid(lam, "lambda").nodes
    f = np.asarray(f, dtype=float)
    _check_decay(f, "integrand")
    qn, qw, qv = _quadrature(lam, f, cfg.n_inner, cfg.scheme)
    kk = np.atleast_1d(np.asarray(k, dtype=float))
    out = kernels.hankel_moments(np.ascontiguousarray(kk), qn, qw, qv, float(nu), float(power))
    return float(out[0]) if np.ndim(k) == 0 else out


def _lambda_samples(sigma, values, n, scheme):
    """Quadrature in lam = sqrt(sigma) for data sampled on sigma."""
    lam = np.sqrt(sigma)
    if scheme == "trapezoid":
        return lam, trapezoid_weights(lam), np.asarray(values, dtype=float)
    qn, qw = composite_gauss_legendre(0.0, lam[-1], n)
    spline = make_interp_spline(lam, values, k=5 if lam.size > 5 else 1)
    # data starting away from the shore: nothing to integrate below lam[0]
    inside = qn >= lam[0]
    vals = np.zeros_like(qn)
    vals[inside] = spline(qn[inside])
    return qn, qw, vals


def _envelope(m, window):
    """Sliding maximum of |m| / max|m| (removes the zeros of the oscillation)."""
    r = np.abs(m) / np.max(np.abs(m))
    pad = np.concatenate([r, np.zeros(window - 1)])
    return np.lib.stride_tricks.sliding_window_view(pad, window).max(axis=1)


def _cutoff(probe, m, threshold, window):
    """Smallest k past which the moment is below ``threshold`` or lost in its own noise floor."""
    if not np.any(m):
        return 0.0
    env = _envelope(m, window)
    floor = float(np.median(env[env.size // 2:]))
    if floor > threshold:
        # plateau: beyond the first drop to ~the floor the moments are noise
        below = np.nonzero(env <= 3.0 * floor)[0]
        return float(probe[below[0]]) if below.size else float(probe[-1])
    above = np.nonzero(env > threshold)[0]
    return float(probe[above[-1]]) if above.size else 0.0


def _adaptive_k_max(lam_q, w_q, psi_v, phi_v, nu, cfg):
    if cfg.k_max is not None:
        return float(cfg.k_max)
    probe = np.linspace(0.0, cfg.k_cap, 801)[1:]
    step = probe[1] - probe[0]
    a = kernels.hankel_moments(probe, lam_q, w_q, psi_v, nu, nu + 1.0)
    b = kernels.hankel_moments(probe, lam_q, w_q, phi_v, nu + 1.0, nu + 2.0)
    # window ~ one oscillation period of the moments in k
    window = max(2, int(math.ceil(math.pi / max(lam_q[-1], 1e-12) / step)))
    cut = max(_cutoff(probe, a, cfg.k_threshold, window), _cutoff(probe, b, cfg.k_threshold, window))
    if cut == 0.0:
        return float(probe[0] * 4)
    return float(min(cfg.k_cap, cut + 2 * step))


def spectral_moments(sigma, psi, phi, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig()) -> SpectralMoments:
    """Moments of projected data (psi, phi) sampled on ``sigma`` (sigma >= 0)."""
    sigma = np.asarray(sigma, dtype=float)
    nu = bay.nu
    lam_q, w_q, psi_v = _lambda_samples(sigma, psi, cfg.n_inner, cfg.scheme)
    _, _, phi_v = _lambda_samples(sigma, phi, cfg.n_inner, cfg.scheme)
    _check_decay(np.asarray(psi, dtype=float), "psi_proj")
    _check_decay(np.asarray(phi, dtype=float), "phi_proj")
    k_max = _adaptive_k_max(lam_q, w_q, psi_v, phi_v, nu, cfg)
    if cfg.scheme == "trapezoid":
        k = np.linspace(0.0, k_max, cfg.n_k)
        kw = trapezoid_weights(k)
    else:
        k, kw = composite_gauss_legendre(0.0, k_max, cfg.n_k)
    # the s-integrals equal twice the lambda-integrals (ds = 2 lam dlam)
    a = 2.0 * kernels.hankel_moments(k, lam_q, w_q, psi_v, nu, nu + 1.0)
    b = 2.0 * kernels.hankel_moments(k, lam_q, w_q, phi_v, nu + 1.0, nu + 2.0)
    return SpectralMoments(Grid1D(k, "k"), kw, a, b)


def _abel_constants(kind, nu):
    if kind == "psi":
        return nu - 0.5, 2.0 * math.gamma(1.0 + nu) / (math.sqrt(math.pi) * math.gamma(nu + 0.5))
    if kind == "phi":
        return nu + 0.5, 2.0 * math.gamma(2.0 + nu) / (math.sqrt(math.pi) * math.gamma(nu + 1.5))
    raise InvalidParameterError("kind must be 'psi' or 'phi'")


@lru_cache(maxsize=64)
def _jacobi_unit(n, alpha):
    """Nodes/weights for int_0^1 (1-u)^alpha g(u) du."""
    x, w = roots_jacobi(n, alpha, 0.0)
    return 0.5 * (1.0 + x), w * 2.0 ** (-alpha - 1.0)


def abel_recover(kind, xi, F, lam, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig()):
    """Projected initial data at ``lam`` from an even shoreline trace.

    ``F`` holds ``Psi(xi) = psi_even(0, q xi)`` (``kind='psi'``) or
    ``Phi(xi) = phi_even(0, q xi)`` (``kind='phi'``) sampled on ``xi``,
    which must start at 0 and reach ``max(lam)/pi``.

    psi: 2 sqrt(pi) G(1+1/m) / (lam G(1/m+1/2)) int_0^{lam/pi} (1-(pi xi/lam)^2)^(1/m-1/2) Psi dxi
    phi: 2 sqrt(pi) G(2+1/m) / (lam^(2+2/m) G(3/2+1/m)) int_0^{lam/pi} (lam^2-pi^2 xi^2)^(1/m+1/2) Phi dxi

    After ``xi = lam u / pi`` both become ``C int_0^1 (1-u^2)^e F(lam u/pi) du``,
    evaluated with Gauss-Jacobi nodes so the endpoint singularity (e < 0
    for m > 2) is integrated exactly.
    """
    xi = as_grid(xi, "xi").nodes
    F = np.asarray(F, dtype=float)
    if F.shape != xi.shape:
        raise InvalidParameterError("F must be sampled on xi")
    if xi[0] != 0.0:
        raise DomainRangeError("the xi grid must start at 0")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0):
        raise DomainRangeError("lam must be non-negative")
    if lam_arr.size and lam_arr.max() / math.pi > xi[-1] * (1.0 + 1e-12):
        raise DomainRangeError(
            f"lam/pi = {lam_arr.max() / math.pi:.6g} exceeds the sampled xi range {xi[-1]:.6g}; "
            "extend the shoreline trace")
    expo, const = _abel_constants(kind, bay.nu)
    u, w = _jacobi_unit(int(cfg.n_abel), float(expo))
    spline = CubicSpline(xi, F, bc_type=((1, 0.0), "not-a-knot"))
    g = w * (1.0 + u) ** expo
    pts = np.clip(np.outer(lam_arr, u) / math.pi, 0.0, xi[-1])
    out = const * (spline(pts) @ g)
    return float(out[0]) if np.ndim(lam) == 0 else out


__all__ = [
    "QuadratureConfig", "SpectralMoments", "TruncationWarning", "gamma", "bessel_j",
    "composite_gauss_legendre", "trapezoid_weights", "hankel_moment", "spectral_moments", "abel_recover",
]
