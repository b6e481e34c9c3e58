"""Time the alpha-sweep kernel under numba and plain numpy.

Usage: python benchmarks/bench_sweep.py [--grid N] [--repeat R]
"""
import argparse
import math
import timeit

import numpy as np

from qpyramid import kernels
from qpyramid._accel import HAVE_NUMBA
from qpyramid.solver import alpha_grid

# l2, l3, l4, l5, l6, l8 of the three-realization example
LENGTHS = (2.0, math.sqrt(2), 1.0, math.sqrt(2), math.sqrt(5), math.sqrt(3))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=8192)
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()

    alphas = alpha_grid(0.0, math.pi, args.grid)
    ref = kernels.sweep_numpy(alphas, *LENGTHS)
    timings = {"numpy": lambda: kernels.sweep_numpy(alphas, *LENGTHS)}
    if HAVE_NUMBA:
        got = kernels.sweep_numba(alphas, *LENGTHS)  # compile
        np.testing.assert_allclose(got[0], ref[0], rtol=1e-12, equal_nan=True)
        timings["numba"] = lambda: kernels.sweep_numba(alphas, *LENGTHS)
    else:
        print("numba not installed; numpy only")

    for name, fn in timings.items():
        best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        print(f"{name:6s} grid={args.grid:<7d} best {best * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
