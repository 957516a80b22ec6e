"""Benchmark: jitted kernels vs the pure-numpy fallback path.

Times the three hot kernels (matrix exponential, Jacobi eigenvalues, power
iteration) on a few matrix sizes, plus one end-to-end double-integral error
representation.  Run with the backend enabled (default) to see both columns;
with SPLITBOUND_DISABLE_NUMBA=1 only the numpy path exists and the script
says so.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from splitbound import _kernels
from splitbound.backend import NUMBA_ENABLED
from splitbound.error_forms import strang_error_integral
from splitbound.problems import ProblemSpec, generate

SIZES = (4, 16, 32)
REPEATS = 200


def _bench(fn, arg, repeats=REPEATS):
    fn(arg)  # warm-up (and jit compile, on the jitted path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(arg)
    return (time.perf_counter() - t0) / repeats * 1e6  # microseconds


def _sample(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray(m / np.linalg.norm(m, 2) * 2.0)


def main():
    print(f"numba backend enabled: {NUMBA_ENABLED}")
    pairs = [
        ("expm", _kernels._expm_impl, _kernels.expm_kernel, lambda m: m),
        ("jacobi_eigvalsh", _kernels._jacobi_eigvalsh_impl,
         _kernels.jacobi_eigvalsh_kernel,
         lambda m: np.ascontiguousarray((m + m.conj().T) / 2)),
        ("opnorm_power", _kernels._opnorm_power_impl,
         _kernels.opnorm_power_kernel, lambda m: m),
    ]
    for n in SIZES:
        m = _sample(n, seed=n)
        print(f"\n-- dim {n} --")
        for name, plain, dispatched, prep in pairs:
            arg = prep(m)
            t_np = _bench(plain, arg)
            if NUMBA_ENABLED:
                t_jit = _bench(dispatched, arg)
                print(f"{name:16s} numpy {t_np:9.1f} us   numba {t_jit:9.1f} us"
                      f"   speedup {t_np / t_jit:5.2f}x")
            else:
                print(f"{name:16s} numpy {t_np:9.1f} us   (numba path disabled)")

    # end-to-end: one double-integral representation on the 4x4 corpus pair
    pair = generate(ProblemSpec(kind="random_general", dim=4, seed=101, scale=1.5))
    t0 = time.perf_counter()
    strang_error_integral(pair, 0.5)
    dt = time.perf_counter() - t0
    path = "numba" if NUMBA_ENABLED else "numpy"
    print(f"\nstrang_error_integral 4x4 (double integral, {path} path): "
          f"{dt * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
