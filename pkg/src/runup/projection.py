"""Data projection from the curve tau = gamma(sigma) onto the line tau = 0.

Only the forward problem needs this; the inverse problem recovers the data
on tau = 0 directly.
"""
import math
import warnings

import numpy as np

from runup.cgt import HodographIC
from runup.core import BayGeometry, InvalidParameterError

MAX_ORDER = 8


class ProjectionAccuracyWarning(UserWarning):
    pass


def d_dsigma(f, h):
    """Fourth-order finite-difference derivative on a uniform grid."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 5:
        raise InvalidParameterError("need at least 5 nodes for fourth-order differences")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return d


def _corrections(sigma, phi, psi, n, bay):
    """Terms phi^k / k! [D Delta]^k (phi, psi) for k = 1..n."""
    h = sigma[1] - sigma[0]
    w2 = bay.omega**2
    dphi = d_dsigma(phi, h)
    v1, v2 = phi, psi
    out = []
    for k in range(1, n + 1):
        # Delta v = -(v2', w^2 sigma v1') - (0, v1)
        a1 = -d_dsigma(v2, h)
        a2 = -w2 * sigma * d_dsigma(v1, h) - v1
        # D = [[1, phi'], [w^2 sigma phi', 1]]
        v1 = a1 + dphi * a2
        v2 = w2 * sigma * dphi * a1 + a2
        c = phi**k / math.factorial(k)
        out.append((c * v1, c * v2))
    return out


def project_ic(ic: HodographIC, n: int, bay: BayGeometry) -> HodographIC:
    """n-th order projection of (phi_phys, psi_phys) from gamma to tau = 0."""
    if ic.kind != "phys-on-gamma":
        raise InvalidParameterError("project_ic expects data on the curve gamma")
    n = int(n)
    if n < 0 or n > MAX_ORDER:
        raise InvalidParameterError(f"projection order must be in [0, {MAX_ORDER}]")
    sigma = ic.sigma.nodes
    if not ic.sigma.is_uniform:
        raise InvalidParameterError("projection needs a uniform sigma grid")
    phi_n = ic.phi.copy()
    psi_n = ic.psi.copy()
    if n == 0 or not np.any(ic.phi):
        return HodographIC(ic.sigma, psi_n, phi_n, "projected-on-tau0")
    terms = _corrections(sigma, ic.phi, ic.psi, n, bay)
    for c1, c2 in terms:
        phi_n += c1
        psi_n += c2
    if sigma.size >= 10:
        _richardson_check(sigma, ic, terms, n, bay)
    return HodographIC(ic.sigma, psi_n, phi_n, "projected-on-tau0")


def _richardson_check(sigma, ic, terms, n, bay):
    coarse = _corrections(sigma[::2], ic.phi[::2], ic.psi[::2], n, bay)
    scale = max(np.max(np.abs(ic.psi)), np.max(np.abs(ic.phi)))
    for k, ((f1, f2), (c1, c2)) in enumerate(zip(terms, coarse), start=1):
        size = max(np.max(np.abs(f1)), np.max(np.abs(f2)))
        if size <= 1e-14 * scale:
            continue
        diff = max(np.max(np.abs(f1[::2] - c1)), np.max(np.abs(f2[::2] - c2)))
        if diff > 0.1 * size:
            warnings.warn(f"projection term of order {k} is not resolved by the sigma grid "
                          f"(coarse/fine mismatch {diff / size:.2e})", ProjectionAccuracyWarning, stacklevel=3)
            return


__all__ = ["project_ic", "d_dsigma", "ProjectionAccuracyWarning", "MAX_ORDER"]
