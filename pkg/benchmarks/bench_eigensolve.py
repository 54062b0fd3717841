"""Compare the compiled and pure-Python eigensolver kernels.

Usage::

    python3 benchmarks/bench_eigensolve.py [--sizes 20,40,80] [--repeat 3]

Times dense random Hermitian matrices and one Rabi loop step (a
tridiagonal-after-reordering physics matrix) with each available backend.
"""
import argparse
import time

import numpy as np

from cavityberry.eigensolve import available_backends, bandwidth_order, hermitian_eig
from cavityberry.hamiltonians import RabiParams, build_rabi_rotated


def random_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="20,40,80")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':<16}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")

    cases = [(f"dense n={n}", random_hermitian(n, rng), None)
             for n in map(int, args.sizes.split(","))]
    h = build_rabi_rotated(RabiParams(1.0, 1.0, 0.5), 0.3, 40)
    cases.append(("rabi N=40", h, bandwidth_order(h)))

    for label, mat, perm in cases:
        times = [best_time(lambda b=b: hermitian_eig(mat, perm=perm, backend=b), args.repeat)
                 for b in backends]
        speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
        print(f"{label:<16}" + "".join(f"{t * 1e3:>12.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
