"""Compare the numba and pure-numpy kernels.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``. Prints the best
wall time per call for each kernel and backend, and the speed-up.
"""

import argparse
import timeit

import numpy as np

from radosc import _kernels
from radosc.grid import DEFAULT_GRID, _stencils
from radosc.specfun import SERIES_MAX_TERMS, SERIES_RUN, SERIES_TOL


def _cases():
    z = DEFAULT_GRID.r ** 2
    f = np.exp(-DEFAULT_GRID.r ** 2 / 2).astype(np.complex128)
    interior, left, right = _stencils(2)
    kummer_args = (complex(0.75 - (11 + 5j) / 4), 1.5, z, SERIES_TOL, SERIES_RUN, SERIES_MAX_TERMS)
    return {
        "kummer_series (4001 points)": ("kummer_series", kummer_args),
        "apply_stencil (4001 points)": ("apply_stencil", (f, interior, left, right)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()
    print(f"active backend: {_kernels.BACKEND}")
    for label, (name, call_args) in _cases().items():
        times = {}
        for backend in ("numpy", "numba"):
            fn = getattr(_kernels, f"{backend}_{name}", None)
            if fn is None:
                continue
            fn(*call_args)  # warm-up, includes JIT compilation
            number = 20
            times[backend] = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat)) / number
        row = ", ".join(f"{b} {t * 1e3:.3f} ms" for b, t in times.items())
        if len(times) == 2:
            row += f", speed-up x{times['numpy'] / times['numba']:.1f}"
        print(f"{label}: {row}")


if __name__ == "__main__":
    main()
