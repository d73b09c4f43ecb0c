"""Domain types, bay geometry and unit conversion.

Everything inside the library works in dimensionless units; the scaling in
:func:`dimensionalize` / :func:`nondimensionalize` is only applied at I/O.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from runup.inverse import GaussianSum

GRID_LABELS = ("x", "t", "sigma", "tau", "lambda", "xi", "k")


class RunupError(Exception):
    """Base class for library errors."""


class InvalidParameterError(RunupError, ValueError):
    pass


class BreakingError(RunupError):
    """The hodograph map lost invertibility (the wave breaks)."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class DomainRangeError(RunupError, ValueError):
    """A requested point lies outside the sampled or admissible range."""


class ConvergenceError(RunupError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BayGeometry:
    """Power-shaped bay ``z = -x + |y|^m``."""

    m: float
    omega: float
    q: float

    @property
    def nu(self) -> float:
        """Bessel order 1/m of the pressure-like variable."""
        return 1.0 / self.m


def make_bay(m: float = 2.0) -> BayGeometry:
    m = float(m)
    if not math.isfinite(m) or m <= 0.0:
        raise InvalidParameterError(f"bay exponent m must be positive and finite, got {m!r}")
    omega = math.sqrt(m / (m + 1.0))
    return BayGeometry(m=m, omega=omega, q=2.0 * math.pi / omega)


@dataclass(frozen=True)
class ScalingParams:
    H0: float
    alpha: float
    g: float = 9.81

    def __post_init__(self):
        for name in ("H0", "alpha", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidParameterError(f"{name} must be positive, got {v!r}")

    @property
    def length(self) -> float:
        return self.H0 / self.alpha

    @property
    def time(self) -> float:
        return math.sqrt(self.H0 / self.g) / self.alpha

    @property
    def velocity(self) -> float:
        return math.sqrt(self.H0 * self.g)


@dataclass(frozen=True)
class Grid1D:
    nodes: np.ndarray
    label: str = "x"

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise InvalidParameterError("a grid needs at least two nodes")
        if not np.all(np.isfinite(nodes)):
            raise InvalidParameterError("grid nodes must be finite")
        if np.any(np.diff(nodes) <= 0.0):
            bad = int(np.argmax(np.diff(nodes) <= 0.0)) + 1
            raise InvalidParameterError(f"grid '{self.label}' is not strictly increasing at node {bad}")
        if self.label not in GRID_LABELS:
            raise InvalidParameterError(f"unknown grid label {self.label!r}")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, start, stop, n, label="x") -> "Grid1D":
        return cls(np.linspace(start, stop, int(n)), label)

    def __len__(self):
        return self.nodes.size

    def __array__(self, dtype=None, copy=None):
        return self.nodes if dtype is None else self.nodes.astype(dtype)

    @property
    def is_uniform(self) -> bool:
        d = np.diff(self.nodes)
        return bool(np.allclose(d, d[0], rtol=1e-9, atol=0.0))


def as_grid(g, label) -> Grid1D:
    return g if isinstance(g, Grid1D) else Grid1D(np.asarray(g, dtype=float), label)


@dataclass(frozen=True)
class PhysicalIC:
    """Initial displacement ``eta0`` and velocity ``u0`` sampled on ``x``."""

    x: Grid1D
    eta0: np.ndarray
    u0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", as_grid(self.x, "x"))
        eta0, u0 = _frozen(self.eta0), _frozen(self.u0)
        n = len(self.x)
        if eta0.shape != (n,) or u0.shape != (n,):
            raise InvalidParameterError("eta0 and u0 must match the x grid")
        if not (np.all(np.isfinite(eta0)) and np.all(np.isfinite(u0))):
            raise InvalidParameterError("initial conditions must be finite")
        wet = self.x.nodes >= 0.0
        if np.any(self.x.nodes[wet] + eta0[wet] < 0.0):
            raise InvalidParameterError("total depth x + eta0 is negative inside the domain")
        object.__setattr__(self, "eta0", eta0)
        object.__setattr__(self, "u0", u0)

    @classmethod
    def zeros(cls, x) -> "PhysicalIC":
        x = as_grid(x, "x")
        return cls(x, np.zeros(len(x)), np.zeros(len(x)))


@dataclass(frozen=True)
class ShorelineSeries:
    """Vertical shoreline displacement ``R`` sampled on ``t``."""

    t: Grid1D
    R: np.ndarray
    fit: Optional["GaussianSum"] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t", as_grid(self.t, "t"))
        R = _frozen(self.R)
        if R.shape != (len(self.t),):
            raise InvalidParameterError("R must match the t grid")
        if not np.all(np.isfinite(R)):
            raise InvalidParameterError("R contains non-finite values")
        object.__setattr__(self, "R", R)
        if self.fit is not None:
            rms = float(np.sqrt(np.mean((self.fit(self.t.nodes) - R) ** 2)))
            scale = float(np.max(np.abs(R))) if R.size else 0.0
            if rms > self.fit.residual * (1.0 + 1e-6) + 1e-13 * scale:
                raise InvalidParameterError("attached fit does not reproduce the samples within its residual")


State = Union[PhysicalIC, ShorelineSeries]


def dimensionalize(state: State, p: ScalingParams) -> State:
    """Attach units: x*H0/alpha, t*sqrt(H0/g)/alpha, eta*H0, u*sqrt(H0 g)."""
    if isinstance(state, PhysicalIC):
        return PhysicalIC(Grid1D(state.x.nodes * p.length, "x"), state.eta0 * p.H0, state.u0 * p.velocity)
    if isinstance(state, ShorelineSeries):
        return ShorelineSeries(Grid1D(state.t.nodes * p.time, "t"), state.R * p.H0)
    raise TypeError(f"cannot scale {type(state).__name__}")


def nondimensionalize(state: State, p: ScalingParams) -> State:
    if isinstance(state, PhysicalIC):
        return PhysicalIC(Grid1D(state.x.nodes / p.length, "x"), state.eta0 / p.H0, state.u0 / p.velocity)
    if isinstance(state, ShorelineSeries):
        return ShorelineSeries(Grid1D(state.t.nodes / p.time, "t"), state.R / p.H0)
    raise TypeError(f"cannot scale {type(state).__name__}")


__all__ = [
    "BayGeometry", "ScalingParams", "Grid1D", "PhysicalIC", "ShorelineSeries",
    "make_bay", "dimensionalize", "nondimensionalize", "as_grid",
    "RunupError", "InvalidParameterError", "BreakingError", "DomainRangeError", "ConvergenceError",
]
