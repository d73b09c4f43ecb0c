"""Fourier-Bessel solution of the linear hodograph system.

With nu = 1/m and omega = sqrt(m/(m+1)),

    psi(s, tau) = 2 s^(-nu/2) int k {a(k) cos(w k tau) - w b(k) sin(w k tau)} J_nu(2k sqrt s) dk
    phi(s, tau) = (2/w) s^(-nu/2-1/2) int k {a(k) sin(w k tau) + w b(k) cos(w k tau)} J_{nu+1}(2k sqrt s) dk

where a, b are the moments in :class:`runup.transforms.SpectralMoments`.
The moments do not depend on tau, so they are computed once and every
evaluation afterwards is a cos/sin synthesis.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from runup._backend import kernels
from runup.cgt import (
    BREAKING_THRESHOLD, HodographIC, ShorelineTrace, physical_to_hodograph_ic, runup_from_shoreline,
)
from runup.core import BayGeometry, BreakingError, DomainRangeError, Grid1D, InvalidParameterError, PhysicalIC, ShorelineSeries, as_grid
from runup.projection import project_ic
from runup.transforms import QuadratureConfig, SpectralMoments, TruncationWarning, spectral_moments

DEFAULT_N_TAU = 512
DEFAULT_N_SIGMA = 512
NOISE_FLOOR_REL = 1e-6


class SpectralSolution:
    """Solution of the hodograph IVP with data on tau = 0, evaluable anywhere."""

    def __init__(self, moments: SpectralMoments, bay: BayGeometry, sigma_max: Optional[float] = None):
        self.moments = moments
        self.bay = bay
        self.sigma_max = sigma_max
        k = moments.k.nodes
        self._k = k
        self._wk = moments.weights * k
        nu = bay.nu
        self._psi_shore = 2.0 / math.gamma(1.0 + nu) * moments.weights * k ** (1.0 + nu)
        self._phi_shore = 2.0 / (bay.omega * math.gamma(2.0 + nu)) * moments.weights * k ** (2.0 + nu)

    @classmethod
    def from_ic(cls, ic: HodographIC, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig()):
        if ic.kind != "projected-on-tau0":
            raise InvalidParameterError("the spectral solver needs data projected onto tau = 0")
        return cls(spectral_moments(ic.sigma.nodes, ic.psi, ic.phi, bay, cfg), bay, float(ic.sigma.nodes[-1]))

    def _phases(self, tau):
        arg = self.bay.omega * np.outer(self._k, tau)
        return np.cos(arg), np.sin(arg)

    # shoreline traces

    def shoreline_psi(self, tau):
        c, s = self._phases(np.atleast_1d(tau))
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        return (self._psi_shore * a) @ c - (self._psi_shore * w * b) @ s

    def shoreline_phi(self, tau):
        c, s = self._phases(np.atleast_1d(tau))
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        return (self._phi_shore * a) @ s + (self._phi_shore * w * b) @ c

    def shoreline_dpsi_dtau(self, tau):
        """Term-by-term tau derivative of the psi shoreline series."""
        c, s = self._phases(np.atleast_1d(tau))
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        g = self._psi_shore * w * self._k
        return -(g * a) @ s - (g * w * b) @ c

    def shoreline_dphi_dtau(self, tau):
        c, s = self._phases(np.atleast_1d(tau))
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        g = self._phi_shore * w * self._k
        return (g * a) @ c - (g * w * b) @ s

    def tau_extent(self) -> float:
        """Half-width of a tau window outside which the shoreline traces have decayed."""
        return shoreline_tau_range(self, self.sigma_max if self.sigma_max else 1.0)

    def trace(self, tau) -> ShorelineTrace:
        tau = as_grid(tau, "tau")
        return ShorelineTrace(tau, self.shoreline_psi(tau.nodes), self.shoreline_phi(tau.nodes))

    # interior

    def _bessel(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        if np.any(sigma <= 0):
            raise DomainRangeError("sigma must be > 0 inside the field; use the shoreline series at sigma = 0")
        r = np.sqrt(sigma)
        nu = self.bay.nu
        j0 = kernels.bessel_matrix(nu, r, self._k)
        j1 = kernels.bessel_matrix(nu + 1.0, r, self._k)
        return sigma, j0, j1

    def field(self, sigma, tau):
        """psi, phi on the tensor grid sigma x tau (arrays of shape (n_sigma, n_tau))."""
        sigma, j0, j1 = self._bessel(sigma)
        c, s = self._phases(np.asarray(tau, dtype=float))
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        nu = self.bay.nu
        wa, wb = self._wk * a, self._wk * b
        psi = (j0 * wa) @ c - (j0 * (w * wb)) @ s
        phi = (j1 * wa) @ s + (j1 * (w * wb)) @ c
        psi *= (2.0 * sigma ** (-0.5 * nu))[:, None]
        phi *= ((2.0 / w) * sigma ** (-0.5 * nu - 0.5))[:, None]
        return psi, phi

    def values_at(self, sigma, tau):
        """psi, phi at the point pairs (sigma_i, tau_i); sigma_i = 0 uses the shoreline limit."""
        sigma = np.asarray(sigma, dtype=float)
        tau = np.asarray(tau, dtype=float)
        if np.any(sigma < 0):
            raise DomainRangeError("sigma must be non-negative")
        psi = np.empty_like(sigma)
        phi = np.empty_like(sigma)
        shore = sigma == 0
        if shore.any():
            psi[shore] = self.shoreline_psi(tau[shore])
            phi[shore] = self.shoreline_phi(tau[shore])
        inner = ~shore
        if inner.any():
            s_in, j0, j1 = self._bessel(sigma[inner])
            arg = self.bay.omega * np.outer(tau[inner], self._k)
            c, s = np.cos(arg), np.sin(arg)
            a, b, w = self.moments.a, self.moments.b, self.bay.omega
            nu = self.bay.nu
            wa, wb = self._wk * a, self._wk * b
            psi[inner] = np.sum(j0 * (wa * c - w * wb * s), axis=1) * 2.0 * s_in ** (-0.5 * nu)
            phi[inner] = np.sum(j1 * (wa * s + w * wb * c), axis=1) * (2.0 / w) * s_in ** (-0.5 * nu - 0.5)
        return psi, phi

    def rows_at(self, sigma, tau_rows):
        """psi, phi at sigma_i for each row tau_rows[i, :]."""
        sigma, j0, j1 = self._bessel(sigma)
        tau_rows = np.asarray(tau_rows, dtype=float)
        a, b, w = self.moments.a, self.moments.b, self.bay.omega
        nu = self.bay.nu
        wa, wb = self._wk * a, self._wk * b
        psi = np.empty_like(tau_rows)
        phi = np.empty_like(tau_rows)
        for i in range(sigma.size):
            arg = w * np.outer(self._k, tau_rows[i])
            c, s = np.cos(arg), np.sin(arg)
            psi[i] = (j0[i] * wa) @ c - (j0[i] * w * wb) @ s
            phi[i] = (j1[i] * wa) @ s + (j1[i] * w * wb) @ c
        psi *= (2.0 * sigma ** (-0.5 * nu))[:, None]
        phi *= ((2.0 / w) * sigma ** (-0.5 * nu - 0.5))[:, None]
        return psi, phi


@dataclass(frozen=True)
class HodographField:
    """psi(sigma, tau) and phi(sigma, tau) on a rectangular grid."""

    sigma: Grid1D
    tau: Grid1D
    psi: np.ndarray
    phi: np.ndarray
    solution: Optional[SpectralSolution] = None

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_grid(self.sigma, "sigma"))
        object.__setattr__(self, "tau", as_grid(self.tau, "tau"))
        shape = (len(self.sigma), len(self.tau))
        if np.shape(self.psi) != shape or np.shape(self.phi) != shape:
            raise InvalidParameterError("field arrays must have shape (n_sigma, n_tau)")

    def values_at(self, sigma, tau):
        """psi, phi at (sigma_i, tau_i); exact if the spectral solution is attached."""
        if self.solution is not None:
            return self.solution.values_at(sigma, tau)
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != self.sigma.nodes.shape or not np.allclose(sigma, self.sigma.nodes):
            raise InvalidParameterError("without a spectral solution, points must lie on the sigma grid")
        psi = np.array([np.interp(t, self.tau.nodes, row) for t, row in zip(tau, self.psi)])
        phi = np.array([np.interp(t, self.tau.nodes, row) for t, row in zip(tau, self.phi)])
        return psi, phi


def solve_fields(ic: HodographIC, sigma_grid, tau_grid, bay: BayGeometry,
                 cfg: QuadratureConfig = QuadratureConfig(), solution: Optional[SpectralSolution] = None) -> HodographField:
    sigma = as_grid(sigma_grid, "sigma")
    tau = as_grid(tau_grid, "tau")
    sol = solution if solution is not None else SpectralSolution.from_ic(ic, bay, cfg)
    psi, phi = sol.field(sigma.nodes, tau.nodes)
    return HodographField(sigma, tau, psi, phi, sol)


def default_sigma_grid(ic: HodographIC, n: int = DEFAULT_N_SIGMA, margin: float = 0.2, rel: float = 1e-8) -> Grid1D:
    """n nodes over the support of the data widened by ``margin`` of its length.

    sigma = 0 is never a node: when the widened interval reaches the shore
    the grid starts one step away from it.
    """
    s = ic.sigma.nodes
    v = np.maximum(np.abs(ic.psi), np.abs(ic.phi))
    if not v.any():
        return Grid1D(np.linspace(s[-1] / n, s[-1], n), "sigma")
    live = s[v > rel * v.max()]
    pad = margin * max(live[-1] - live[0], s[1] - s[0])
    top = live[-1] + pad
    lo = live[0] - pad
    return Grid1D(np.linspace(lo if lo > 0 else top / n, top, int(n)), "sigma")


def default_tau_grid(sol: SpectralSolution, n: int = DEFAULT_N_TAU) -> Grid1D:
    half = sol.tau_extent()
    return Grid1D(np.linspace(-half, half, int(n)), "tau")


def shoreline_psi_series(ic: HodographIC, tau_grid, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig()):
    """psi(0, tau) from the sigma -> 0 limit of the spectral solution."""
    tau = as_grid(tau_grid, "tau")
    return SpectralSolution.from_ic(ic, bay, cfg).shoreline_psi(tau.nodes)


def shoreline_phi_series(ic: HodographIC, tau_grid, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig()):
    tau = as_grid(tau_grid, "tau")
    return SpectralSolution.from_ic(ic, bay, cfg).shoreline_phi(tau.nodes)


def shoreline_tau_range(sol: SpectralSolution, sigma_max, rel=1e-10, max_grow=8, floor_rel=NOISE_FLOOR_REL):
    """Symmetric tau half-range on which psi(0, tau) has decayed to ``rel`` of its peak at both ends.

    The search starts at 1.25 times the travel time from ``sigma_max`` to
    the shore. It also stops when the ends sit on a flat residual level
    below ``floor_rel`` (quadrature noise that does not decay with tau).
    """
    half = 1.25 * 2.0 * math.sqrt(max(sigma_max, 1e-12)) / sol.bay.omega
    for _ in range(max_grow):
        probe = np.linspace(-half, half, 2049)
        v = np.abs(sol.shoreline_psi(probe))
        peak = v.max()
        ends = max(v[0], v[-1])
        if peak == 0.0 or ends <= rel * peak:
            return half
        outer = v[np.abs(probe) >= 0.8 * half]
        if ends <= floor_rel * peak and ends <= 10.0 * np.median(outer):
            return half
        half *= 1.5
    warnings.warn("psi(0, tau) has not decayed at the end of the tau range", TruncationWarning, stacklevel=2)
    return half


def shoreline_jacobian(sol: SpectralSolution, tau_half, n=None):
    """dt/dtau = 1 + dphi(0, tau)/dtau on a fine grid; returns (tau, values).

    Along the shoreline tau = t + R'(t), so dt/dtau = 1 / (1 + R''(t)) and
    the run-up stays single-valued only while this stays positive.
    """
    n = int(n) if n is not None else 4 * DEFAULT_N_TAU + 1
    tau = np.linspace(-tau_half, tau_half, n)
    return tau, 1.0 + sol.shoreline_dphi_dtau(tau)


@dataclass(frozen=True)
class ForwardResult:
    runup: ShorelineSeries
    trace: ShorelineTrace
    projected: HodographIC
    solution: SpectralSolution
    min_dt_dtau: float = 1.0
    max_dt_dtau: float = 1.0

    @property
    def breaking_margin(self) -> float:
        """min_t (1 + R''(t)); at most 1, non-positive once the wave breaks."""
        if self.min_dt_dtau <= 0:
            return -math.inf
        return 1.0 / self.max_dt_dtau


def forward_solution(ic: PhysicalIC, n_proj: int, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig(),
                     n_tau: int = DEFAULT_N_TAU, tau_half: Optional[float] = None, n_sigma: Optional[int] = None,
                     threshold: float = BREAKING_THRESHOLD) -> ForwardResult:
    """Physical initial data -> run-up, keeping the intermediate stages.

    Raises :class:`BreakingError` when t(tau) along the shoreline stops
    increasing, i.e. when 1 + R''(t) would have to pass through zero.
    """
    on_gamma, _ = physical_to_hodograph_ic(ic, n_sigma)
    projected = project_ic(on_gamma, n_proj, bay)
    sol = SpectralSolution.from_ic(projected, bay, cfg)
    if tau_half is None:
        tau_half = shoreline_tau_range(sol, projected.sigma.nodes[-1])
    tj, jac = shoreline_jacobian(sol, tau_half, 8 * int(n_tau) + 1)
    if jac.min() <= threshold:
        bad = tj[jac <= threshold]
        raise BreakingError(f"dt/dtau = {jac.min():.3g} at the shoreline: the run-up folds over "
                            f"(1 + R'' <= 0) for tau in [{bad[0]:.6g}, {bad[-1]:.6g}]",
                            interval=(float(bad[0]), float(bad[-1])))
    tau = Grid1D(np.linspace(-tau_half, tau_half, int(n_tau)), "tau")
    trace = sol.trace(tau)
    return ForwardResult(runup_from_shoreline(trace), trace, projected, sol, float(jac.min()), float(jac.max()))


def forward_runup(ic: PhysicalIC, n_proj: int, bay: BayGeometry, cfg: QuadratureConfig = QuadratureConfig(),
                  n_tau: int = DEFAULT_N_TAU) -> ShorelineSeries:
    """Run-up R(t) produced by the initial displacement and velocity ``ic``."""
    return forward_solution(ic, n_proj, bay, cfg, n_tau).runup


__all__ = [
    "SpectralSolution", "HodographField", "ForwardResult", "solve_fields", "shoreline_psi_series",
    "shoreline_phi_series", "shoreline_tau_range", "shoreline_jacobian", "forward_solution", "forward_runup",
    "default_sigma_grid", "default_tau_grid",
]
