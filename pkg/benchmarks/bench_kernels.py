"""Numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N] [--skip-end-to-end]

Kernel timings run both implementations in this process (numba compile time is
excluded by a warm-up call). The end-to-end timing runs a forward solve in a
subprocess per backend, switched with RUNUP_DISABLE_NUMBA.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from runup import _kernels_numba as nb
from runup import _kernels_numpy as npk
from runup.transforms import composite_gauss_legendre


def best_of(fn, repeat):
    fn()  # warm-up (jit compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases():
    lam, w = composite_gauss_legendre(0.0, 3.0, 1024)
    f = np.exp(-3 * (lam**2 - 3) ** 2)
    k = np.linspace(0, 120, 2048)
    x = np.linspace(0, 400, 200_000)
    r = np.linspace(0.01, 3.0, 512)
    kk = np.linspace(0, 60, 1024)
    return {
        "jv_array (2e5 points)": lambda mod: mod.jv_array(0.5, x),
        "hankel_moments (2048 k x 1024 nodes)": lambda mod: mod.hankel_moments(k, lam, w, f, 0.5, 1.5),
        "bessel_matrix (512 x 1024)": lambda mod: mod.bessel_matrix(0.5, r, kk),
    }


END_TO_END = ("import time, warnings; warnings.simplefilter('ignore');"
              "from runup.cases import make_case; from runup.core import make_bay;"
              "from runup.forward import forward_solution;"
              "ic = make_case('gaussian'); bay = make_bay(2); forward_solution(ic, 2, bay);"
              "t = time.perf_counter(); forward_solution(ic, 2, bay); print(time.perf_counter() - t)")


def end_to_end(flag):
    env = dict(os.environ, RUNUP_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-end-to-end", action="store_true")
    args = p.parse_args(argv)

    print(f"{'kernel':40s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, call in kernel_cases().items():
        a = best_of(lambda: call(nb), args.repeat)
        b = best_of(lambda: call(npk), args.repeat)
        print(f"{name:40s} {a:10.4f} {b:10.4f} {b / a:8.1f}x")
    if not args.skip_end_to_end:
        a, b = end_to_end("0"), end_to_end("1")
        print(f"{'forward_solution (gaussian, defaults)':40s} {a:10.4f} {b:10.4f} {b / a:8.1f}x")


if __name__ == "__main__":
    main()
