"""Hot loops with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
``RADOSC_DISABLE_NUMBA`` is unset (or ``0``). Both paths expose the same
functions and produce identical results up to rounding, so the choice only
affects speed. ``BACKEND`` reports which one is active.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "kummer_series",
    "apply_stencil",
    "numpy_kummer_series",
    "numpy_apply_stencil",
    "numba_kummer_series",
    "numba_apply_stencil",
]

_DISABLE = os.environ.get("RADOSC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:  # pragma: no cover - exercised implicitly by whichever path is active
    if _DISABLE:
        raise ImportError("numba disabled by RADOSC_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def numpy_kummer_series(a, c, z, tol, run, max_terms):
    """Kahan-summed Taylor series of 1F1(a, c; z) for each entry of 1-D ``z``.

    A point stops accumulating once ``run`` consecutive terms each satisfy
    ``|t_k| < tol * |S_k|``. Converged points are frozen, so every result is
    independent of the other entries of ``z``.

    Returns
    -------
    values : complex ndarray
    converged : bool
        False when some point needed more than ``max_terms`` terms.
    """
    z = np.asarray(z, dtype=np.float64)
    total = np.ones(z.shape, dtype=np.complex128)
    comp = np.zeros(z.shape, dtype=np.complex128)
    term = np.ones(z.shape, dtype=np.complex128)
    streak = np.zeros(z.shape, dtype=np.int64)
    idx = np.arange(z.shape[0])
    k = 0
    while idx.size:
        if k >= max_terms:
            return total, False
        t = term[idx] * ((a + k) / (c + k)) * (z[idx] / (k + 1))
        s = total[idx]
        y = t - comp[idx]
        new = s + y
        comp[idx] = (new - s) - y
        total[idx] = new
        term[idx] = t
        streak[idx] = np.where(np.abs(t) < tol * np.abs(new), streak[idx] + 1, 0)
        idx = idx[streak[idx] < run]
        k += 1
    return total, True


def numpy_apply_stencil(f, interior, left, right):
    """Apply a banded finite-difference operator to ``f``.

    ``interior`` is a centred stencil of odd length ``2m+1``. ``left[i]``
    holds the weights of row ``i`` acting on ``f[:w]``; ``right[i]`` gives
    row ``n-1-i`` acting on ``f[n-w:]``. Weights are not divided by the
    grid spacing.
    """
    f = np.asarray(f, dtype=np.complex128)
    n = f.shape[0]
    width = interior.shape[0]
    m = width // 2
    out = np.zeros(n, dtype=np.complex128)
    for k in range(width):
        out[m:n - m] += interior[k] * f[k:n - 2 * m + k]
    w = left.shape[1]
    out[: left.shape[0]] = left @ f[:w]
    for i in range(right.shape[0]):
        out[n - 1 - i] = right[i] @ f[n - w:]
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def numba_kummer_series(a, c, z, tol, run, max_terms):  # pragma: no cover - compiled
        n = z.shape[0]
        out = np.empty(n, dtype=np.complex128)
        converged = True
        for i in range(n):
            total = 1.0 + 0.0j
            comp = 0.0 + 0.0j
            term = 1.0 + 0.0j
            streak = 0
            k = 0
            zi = z[i]
            while streak < run:
                if k >= max_terms:
                    converged = False
                    break
                term = term * ((a + k) / (c + k)) * (zi / (k + 1))
                y = term - comp
                new = total + y
                comp = (new - total) - y
                total = new
                if abs(term) < tol * abs(total):
                    streak += 1
                else:
                    streak = 0
                k += 1
            out[i] = total
        return out, converged

    @njit(cache=True)
    def numba_apply_stencil(f, interior, left, right):  # pragma: no cover - compiled
        n = f.shape[0]
        width = interior.shape[0]
        m = width // 2
        out = np.zeros(n, dtype=np.complex128)
        for i in range(m, n - m):
            acc = 0.0 + 0.0j
            for k in range(width):
                acc += interior[k] * f[i - m + k]
            out[i] = acc
        w = left.shape[1]
        for i in range(left.shape[0]):
            acc = 0.0 + 0.0j
            for k in range(w):
                acc += left[i, k] * f[k]
            out[i] = acc
        for i in range(right.shape[0]):
            acc = 0.0 + 0.0j
            for k in range(w):
                acc += right[i, k] * f[n - w + k]
            out[n - 1 - i] = acc
        return out

    kummer_series = numba_kummer_series
    apply_stencil = numba_apply_stencil
    BACKEND = "numba"
else:
    numba_kummer_series = None
    numba_apply_stencil = None
    kummer_series = numpy_kummer_series
    apply_stencil = numpy_apply_stencil
    BACKEND = "numpy"
