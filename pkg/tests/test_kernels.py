"""The numba kernels and their numpy twins must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from runup import _kernels_numba as nb
from runup import _kernels_numpy as npk
from runup.transforms import composite_gauss_legendre


@pytest.mark.parametrize("nu", [0.0, 1 / 3, 0.5, 1.0, 1.5, 2.0, 3.5])
def test_jv_regimes_agree(nu):
    # series, recurrence and asymptotic regimes and their boundaries
    x = np.concatenate([np.linspace(0, 3, 301), np.linspace(20, 30, 301), np.geomspace(30, 2000, 300)])
    a, b = nb.jv_array(nu, x), npk.jv_array(nu, x)
    assert np.max(np.abs(a - b)) <= 5e-14


def test_jv_scalar_matches_array():
    x = np.array([0.0, 0.3, 2.0, 7.5, 24.9, 25.1, 400.0])
    for nu in (0.5, 1.5):
        np.testing.assert_allclose([nb.jv_scalar(nu, v) for v in x], nb.jv_array(nu, x), rtol=0, atol=1e-16)


def test_hankel_moments_agree():
    lam, w = composite_gauss_legendre(0.0, 3.0, 300)
    f = np.sin(3 * lam) * np.exp(-lam)
    k = np.linspace(0, 60, 257)
    for nu, power in ((0.5, 1.5), (1.5, 2.5), (1 / 3, 4 / 3)):
        a = nb.hankel_moments(k, lam, w, f, nu, power)
        b = npk.hankel_moments(k, lam, w, f, nu, power)
        assert np.max(np.abs(a - b)) <= 1e-14 * max(1.0, np.max(np.abs(b)))


def test_bessel_matrix_agree():
    r = np.linspace(0.01, 3.0, 50)
    k = np.linspace(0.0, 80.0, 400)
    a, b = nb.bessel_matrix(0.5, r, k), npk.bessel_matrix(0.5, r, k)
    assert a.shape == (50, 400)
    assert np.max(np.abs(a - b)) <= 5e-14


def _trace_with(env_value):
    code = ("import warnings, numpy as np; warnings.simplefilter('ignore');"
            "from runup._backend import BACKEND; from runup.cases import make_case; from runup.core import make_bay;"
            "from runup.forward import forward_solution;"
            "fr = forward_solution(make_case('gaussian', n=256), 2, make_bay(2), n_tau=64);"
            "print(BACKEND); print(repr(fr.trace.psi0.tolist()))")
    env = dict(os.environ, RUNUP_DISABLE_NUMBA=env_value)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, values = out.stdout.strip().splitlines()
    return backend, np.array(eval(values))


def test_env_flag_switches_backend_and_results_agree():
    b1, v1 = _trace_with("0")
    b2, v2 = _trace_with("1")
    assert (b1, b2) == ("numba", "numpy")
    assert np.max(np.abs(v1 - v2)) <= 1e-12 * np.max(np.abs(v1))


def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")
    out = subprocess.run([sys.executable, script, "--repeat", "1", "--skip-end-to-end"],
                         capture_output=True, text=True, check=True)
    assert "hankel_moments" in out.stdout and "speed-up" in out.stdout
