"""Initial conditions used to exercise the solver: Gaussian pulse, soliton, N-wave.

The velocity of each case is the shoreward-propagating one,
``u0 = -2 sqrt((m+1)/m) (sqrt(eta0 + x) - sqrt(x))``.
"""
import numpy as np

from runup.core import Grid1D, InvalidParameterError, PhysicalIC

AMPLITUDE = 5e-5
N_X = 512
TAPER = (0.2, 0.8)


def gaussian(x, amplitude=AMPLITUDE):
    return amplitude * np.exp(-3.0 * (x - 3.0) ** 2)


def soliton(x, amplitude=AMPLITUDE):
    return amplitude / np.cosh(2.0 * x - 6.0) ** 2


def n_wave(x, amplitude=AMPLITUDE):
    return amplitude * np.exp(-3.0 * (x - 3.0) ** 2) - 0.5 * amplitude * np.exp(-2.0 * (x - 4.0) ** 2)


PROFILES = {"gaussian": gaussian, "soliton": soliton, "nwave": n_wave}
# domain long enough for each profile to fall below ~1e-16 of its peak
DOMAIN = {"gaussian": 8.0, "soliton": 12.0, "nwave": 8.0}


def shoreward_velocity(x, eta0, m):
    x = np.asarray(x, dtype=float)
    return -2.0 * np.sqrt((m + 1.0) / m) * (np.sqrt(eta0 + x) - np.sqrt(x))


def shore_taper(x, start=TAPER[0], stop=TAPER[1]):
    """C-infinity step: 0 for x <= start, 1 for x >= stop."""
    s = np.clip((np.asarray(x, dtype=float) - start) / (stop - start), 0.0, 1.0)

    def bump(v):
        with np.errstate(divide="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    return bump(s) / (bump(s) + bump(1.0 - s))


def make_case(name, m=2.0, amplitude=AMPLITUDE, n=N_X, x_max=None, taper=True, with_velocity=True) -> PhysicalIC:
    """Sampled initial condition for one of the named profiles.

    The displacement is smoothly switched off next to the shore (``taper``)
    before the velocity is derived; otherwise the square-root velocity law
    turns the exponentially small shore value of eta0 into a spike of
    sub-grid width at x = 0.
    """
    if name not in PROFILES:
        raise InvalidParameterError(f"unknown case {name!r}; choose from {sorted(PROFILES)}")
    x = np.linspace(0.0, DOMAIN[name] if x_max is None else x_max, int(n))
    eta0 = PROFILES[name](x, amplitude)
    if taper:
        eta0 = eta0 * shore_taper(x)
    u0 = shoreward_velocity(x, eta0, m) if with_velocity else np.zeros_like(x)
    return PhysicalIC(Grid1D(x, "x"), eta0, u0)


__all__ = ["gaussian", "soliton", "n_wave", "PROFILES", "DOMAIN", "shoreward_velocity", "shore_taper", "make_case"]
