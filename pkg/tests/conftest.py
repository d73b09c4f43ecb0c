import math
import os
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from runup.cases import make_case
from runup.core import make_bay
from runup.forward import forward_solution
from runup.inverse import compare_ic, inverse_pipeline

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def bay():
    return make_bay(2.0)


@pytest.fixture(scope="session")
def forward_cases(bay):
    """Forward runs of the three reference initial conditions (computed once)."""
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in ("gaussian", "soliton", "nwave"):
            ic = make_case(name)
            out[name] = (ic, forward_solution(ic, 2, bay))
    return out


@pytest.fixture(scope="session")
def gaussian_forward(forward_cases):
    return forward_cases["gaussian"]


@pytest.fixture(scope="session")
def inverse_cases(forward_cases, bay):
    """Inverse runs (J = 12) on the run-up of each reference case, with the IC comparison."""
    out = {}
    for name, (ic, fr) in forward_cases.items():
        res = inverse_pipeline(fr.runup, 12, bay)
        out[name] = (res, compare_ic(ic, res.ic))
    return out


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def fd_weights(order, npts):
    """Central finite-difference weights for the given derivative order."""
    k = np.arange(npts) - npts // 2
    A = np.vander(k, increasing=True).T.astype(float)
    b = np.zeros(npts)
    b[order] = math.factorial(order)
    return np.linalg.solve(A, b)


def fd(f, h, axis, order, npts=9):
    """Derivative along ``axis`` at the nodes that have a full stencil."""
    w = fd_weights(order, npts)
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    out = sum(w[i] * f[i:n - npts + 1 + i] for i in range(npts)) / h**order
    return np.moveaxis(out, 0, axis)


def wave_residual(psi, sigma, tau, w2, npts=9):
    """psi_tt - (w^2 sigma psi_ss + psi_s) on interior nodes, uniform sigma grid."""
    r = npts // 2
    hs, ht = sigma[1] - sigma[0], tau[1] - tau[0]
    s = sigma[r:-r, None]
    return fd(psi, ht, 1, 2, npts)[r:-r, :] - (w2 * s * fd(psi, hs, 0, 2, npts)[:, r:-r] + fd(psi, hs, 0, 1, npts)[:, r:-r])


def wave_residual_lambda(psi, lam, tau, w2, npts=9):
    """Same residual with the sigma derivatives taken in lambda = sqrt(sigma) on a uniform lambda grid."""
    r = npts // 2
    hl, ht = lam[1] - lam[0], tau[1] - tau[0]
    L = lam[r:-r, None]
    d1 = fd(psi, hl, 0, 1, npts)[:, r:-r]
    d2 = fd(psi, hl, 0, 2, npts)[:, r:-r]
    return fd(psi, ht, 1, 2, npts)[r:-r, :] - (w2 * (d2 / 4 - d1 / (4 * L)) + d1 / (2 * L))
