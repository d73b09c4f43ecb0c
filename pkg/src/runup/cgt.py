"""Carrier-Greenspan hodograph transform.

Maps between the physical variables (x, t, eta, u) and the hodograph
variables (sigma, tau, psi, phi):

    sigma = x + eta,  tau = t - u,  phi = u,  psi = eta + u^2 / 2.

At the shoreline sigma = 0 this reduces to relations between the run-up
R(t) and the traces psi(0, tau), phi(0, tau).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import make_interp_spline

from runup.core import (
    BreakingError, ConvergenceError, Grid1D, InvalidParameterError, PhysicalIC, ShorelineSeries, as_grid, _frozen,
)

BREAKING_THRESHOLD = 1e-8
ROOT_TOL = 1e-13
KINDS = ("phys-on-gamma", "projected-on-tau0")


@dataclass(frozen=True)
class HodographIC:
    """Initial data in the hodograph plane.

    ``kind='phys-on-gamma'``: values on the curve tau = gamma(sigma);
    ``kind='projected-on-tau0'``: values on the line tau = 0.
    """

    sigma: Grid1D
    psi: np.ndarray
    phi: np.ndarray
    kind: str = "projected-on-tau0"

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_grid(self.sigma, "sigma"))
        psi, phi = _frozen(self.psi), _frozen(self.phi)
        if psi.shape != (len(self.sigma),) or phi.shape != psi.shape:
            raise InvalidParameterError("psi and phi must match the sigma grid")
        if self.sigma.nodes[0] < 0:
            raise InvalidParameterError("sigma nodes must be non-negative")
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind must be one of {KINDS}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)

    def scaled(self, factor) -> "HodographIC":
        return HodographIC(self.sigma, factor * self.psi, factor * self.phi, self.kind)

    def __add__(self, other: "HodographIC") -> "HodographIC":
        if other.kind != self.kind or not np.array_equal(other.sigma.nodes, self.sigma.nodes):
            raise InvalidParameterError("can only add data of the same kind on the same grid")
        return HodographIC(self.sigma, self.psi + other.psi, self.phi + other.phi, self.kind)


@dataclass(frozen=True)
class ShorelineTrace:
    tau: Grid1D
    psi0: np.ndarray
    phi0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau", as_grid(self.tau, "tau"))
        psi0, phi0 = _frozen(self.psi0), _frozen(self.phi0)
        if psi0.shape != (len(self.tau),) or phi0.shape != psi0.shape:
            raise InvalidParameterError("trace arrays must match the tau grid")
        if not (np.all(np.isfinite(psi0)) and np.all(np.isfinite(phi0))):
            raise InvalidParameterError("trace contains non-finite values")
        object.__setattr__(self, "psi0", psi0)
        object.__setattr__(self, "phi0", phi0)


@dataclass(frozen=True)
class GammaCurve:
    """The curve tau = gamma(sigma) carrying the physical initial data."""

    sigma: Grid1D
    tau_of_sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_grid(self.sigma, "sigma"))
        g = _frozen(self.tau_of_sigma)
        if g.shape != (len(self.sigma),):
            raise InvalidParameterError("gamma must match the sigma grid")
        object.__setattr__(self, "tau_of_sigma", g)


@dataclass(frozen=True)
class BreakingReport:
    min_jacobian: float
    t_at_min: float
    breaking: bool
    intervals: tuple = ()
    threshold: float = BREAKING_THRESHOLD

    @property
    def margin(self) -> float:
        return self.min_jacobian


def _resample(src, values, dst):
    # quintic spline rather than a monotone cubic: no kinks, so the spectral
    # moments of the result keep decaying, and O(h^6) error on smooth data
    spline = make_interp_spline(src, values, k=5 if src.size > 5 else 1)
    out = spline(dst)
    out[(dst < src[0]) | (dst > src[-1])] = 0.0
    return out


def _require_increasing(a, what, label):
    d = np.diff(a)
    if np.any(d <= 0):
        i = int(np.argmax(d <= 0))
        raise BreakingError(f"{what} is not monotone near {label} index {i} "
                            f"(value {a[i]:.6g}); the hodograph map is not invertible there",
                            interval=(float(a[max(i - 1, 0)]), float(a[min(i + 1, a.size - 1)])))


def physical_to_hodograph_ic(ic: PhysicalIC, n_sigma: Optional[int] = None):
    """Physical initial data -> (HodographIC on gamma, GammaCurve), on a uniform sigma grid."""
    x = ic.x.nodes
    sigma = x + ic.eta0
    if np.any(np.diff(sigma) <= 0):
        i = int(np.argmax(np.diff(sigma) <= 0))
        raise BreakingError(f"x -> x + eta0 is not increasing near x = {x[i]:.6g}: "
                            "the wave is already breaking at t = 0", interval=(float(x[i]), float(x[i + 1])))
    psi = ic.eta0 + 0.5 * ic.u0**2
    phi = ic.u0.copy()
    n = len(x) if n_sigma is None else int(n_sigma)
    grid = np.linspace(max(sigma[0], 0.0), sigma[-1], n)
    grid[0], grid[-1] = max(sigma[0], 0.0), sigma[-1]
    psi_u = _resample(sigma, psi, grid)
    phi_u = _resample(sigma, phi, grid)
    sg = Grid1D(grid, "sigma")
    return HodographIC(sg, psi_u, phi_u, "phys-on-gamma"), GammaCurve(sg, -phi_u)


def _slope_bound(fit) -> float:
    return float(fit.max_abs_derivative(1))


def solve_time_for_tau(fit, tau, tol=ROOT_TOL, max_iter=200):
    """Solve ``tau = t + R'(t)`` for t, node by node.

    Safeguarded Newton: starts at t = tau inside the bracket
    [tau - M, tau + M] with M >= sup|R'|, falls back to bisection whenever
    a step leaves the bracket.
    """
    tau = np.asarray(tau, dtype=float)
    M = _slope_bound(fit) * (1 + 1e-12) + 1e-300
    lo, hi = tau - M, tau + M
    t = tau.copy()
    for _ in range(max_iter):
        g = t + fit.derivative(t, 1) - tau
        dg = 1.0 + fit.derivative(t, 2)
        lo = np.where(g < 0, t, lo)
        hi = np.where(g > 0, t, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = g / dg
        t_new = t - step
        bad = ~np.isfinite(t_new) | (t_new <= lo) | (t_new >= hi) | (dg <= 0)
        t_new = np.where(bad, 0.5 * (lo + hi), t_new)
        delta = np.abs(t_new - t)
        t = t_new
        if np.all((delta <= tol * np.maximum(1.0, np.abs(t))) | (g == 0)):
            return t
    raise ConvergenceError("root finding for t(tau) did not converge")


def breaking_check(R, t_range=None, threshold=BREAKING_THRESHOLD, n=None) -> BreakingReport:
    """Minimum of dtau/dt = 1 + R''(t) over the sampled range.

    ``R`` is a :class:`ShorelineSeries` carrying an analytic fit, or the fit
    itself. Values at or below ``threshold`` flag breaking.
    """
    fit = R.fit if isinstance(R, ShorelineSeries) else R
    if fit is None:
        raise InvalidParameterError("breaking_check needs an analytic fit of R(t)")
    if t_range is None:
        if isinstance(R, ShorelineSeries):
            t_range = (R.t.nodes[0], R.t.nodes[-1])
        else:
            t_range = fit.support()
    t0, t1 = float(t_range[0]), float(t_range[1])
    step = fit.resolution() / 20.0
    count = int(min(max((t1 - t0) / step, 2000), 2_000_000)) if n is None else int(n)
    t = np.linspace(t0, t1, count)
    jac = 1.0 + fit.derivative(t, 2)
    i = int(np.argmin(jac))
    bad = jac <= threshold
    intervals = []
    if bad.any():
        edges = np.flatnonzero(np.diff(np.concatenate([[0], bad.astype(int), [0]])))
        for s, e in zip(edges[::2], edges[1::2]):
            intervals.append((float(t[s]), float(t[e - 1])))
    return BreakingReport(float(jac[i]), float(t[i]), bool(bad.any()), tuple(intervals), threshold)


def shoreline_from_runup(R, tau_grid, threshold=BREAKING_THRESHOLD) -> ShorelineTrace:
    """psi(0, tau), phi(0, tau) from an analytic run-up fit.

    For every tau node, t solves tau = t + R'(t); then
    psi0 = R + R'^2 / 2 and phi0 = -R'. Derivatives come from the fit.
    """
    fit = R.fit if isinstance(R, ShorelineSeries) else R
    if fit is None:
        raise InvalidParameterError("shoreline_from_runup needs an analytic fit of R(t)")
    tau = as_grid(tau_grid, "tau")
    M = _slope_bound(fit)
    report = breaking_check(fit, (tau.nodes[0] - M, tau.nodes[-1] + M), threshold)
    if report.breaking:
        raise BreakingError(f"1 + R''(t) <= {threshold:g} on t in {report.intervals[0]}: the wave breaks",
                            interval=report.intervals[0])
    t = solve_time_for_tau(fit, tau.nodes)
    d1 = fit.derivative(t, 1)
    return ShorelineTrace(tau, fit(t) + 0.5 * d1**2, -d1)


def runup_parametric(trace: ShorelineTrace):
    """(t, R) at the trace nodes: t = tau + phi0, R = psi0 - phi0^2 / 2."""
    t = trace.tau.nodes + trace.phi0
    R = trace.psi0 - 0.5 * trace.phi0**2
    return t, R


def runup_from_shoreline(trace: ShorelineTrace, t_grid=None) -> ShorelineSeries:
    """Run-up R(t) from shoreline traces, resampled onto a uniform t grid."""
    t, R = runup_parametric(trace)
    _require_increasing(t, "t(tau) = tau + phi(0, tau)", "tau")
    if t_grid is None:
        grid = np.linspace(t[0], t[-1], t.size)
        grid[0], grid[-1] = t[0], t[-1]
    else:
        grid = as_grid(t_grid, "t").nodes
        if grid[0] < t[0] or grid[-1] > t[-1]:
            raise InvalidParameterError("requested t grid extends beyond the trace")
    return ShorelineSeries(Grid1D(grid, "t"), _resample(t, R, grid))


def inverse_cgt_on_gamma(field, gamma: GammaCurve, n_x: Optional[int] = None) -> PhysicalIC:
    """Physical initial data from the hodograph solution on tau = gamma(sigma).

    ``field`` must provide ``values_at(sigma, tau) -> (psi, phi)``.
    """
    sigma = gamma.sigma.nodes
    psi, phi = field.values_at(sigma, gamma.tau_of_sigma)
    u0 = phi
    eta0 = psi - 0.5 * phi**2
    x = sigma - eta0
    _require_increasing(x, "x(sigma) = sigma - psi + phi^2/2", "sigma")
    n = x.size if n_x is None else int(n_x)
    grid = np.linspace(x[0], x[-1], n)
    grid[0], grid[-1] = x[0], x[-1]
    return PhysicalIC(Grid1D(grid, "x"), _resample(x, eta0, grid), _resample(x, u0, grid))


__all__ = [
    "HodographIC", "ShorelineTrace", "GammaCurve", "BreakingReport",
    "physical_to_hodograph_ic", "shoreline_from_runup", "runup_from_shoreline", "runup_parametric",
    "inverse_cgt_on_gamma", "breaking_check", "solve_time_for_tau",
]
