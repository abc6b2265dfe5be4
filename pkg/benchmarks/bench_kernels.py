"""Time the numba kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Numba
compilation happens in a warm-up call and is reported separately.
"""

import argparse
import time

import numpy as np

from nlgauge import kernels
from nlgauge.algebroid import so3_generators


def cases(rng):
    E = so3_generators()
    N = 4096
    a = rng.normal(size=(N + 1, 3))
    W = np.einsum("ka,aij->kij", a, E)
    mids = np.einsum("ka,aij->kij", rng.normal(size=(N, 3)), E)
    comp = rng.integers(-1, 40, size=(40, 40))
    return {
        "fd4_derivative": (rng.normal(size=(N + 1, 6)), 1.0 / N),
        "midpoint_interp": (rng.normal(size=(N + 1, 3)),),
        "rk4_linear": (rng.normal(size=3), -W, -mids, 1.0 / N),
        "rk4_right_matrix": (np.eye(3), W, mids, 1.0 / N),
        "associativity_violations": (comp,),
    }


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if kernels.numba_kernels is None:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<26}{'compile s':>11}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for name, inputs in cases(rng).items():
        nb = getattr(kernels.numba_kernels, name)
        npk = getattr(kernels.numpy_kernels, name)
        t0 = time.perf_counter()
        nb(*inputs)
        compile_s = time.perf_counter() - t0
        t_np = best_of(npk, inputs, args.repeat)
        t_nb = best_of(nb, inputs, args.repeat)
        print(f"{name:<26}{compile_s:>11.2f}{t_np * 1e3:>11.3f}{t_nb * 1e3:>11.3f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
