"""Associated Laguerre polynomials, the Kummer function 1F1 and Simpson weights."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridError, InvalidParameterError, NonConvergenceError

__all__ = [
    "LaguerreParams",
    "KummerParams",
    "Z_MAX",
    "laguerre_eval",
    "laguerre_derivative",
    "kummer_1f1",
    "kummer_1f1_array",
    "quadrature_weights",
]

#: Largest argument accepted by the direct series unless a caller raises it.
Z_MAX = 64.0
#: Relative size below which a term counts as negligible.
SERIES_TOL = 1e-17
#: Number of consecutive negligible terms that ends the series.
SERIES_RUN = 10
SERIES_MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class LaguerreParams:
    """Degree ``n`` and order ``nu`` of L^nu_n."""

    n: int
    nu: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, numbers.Integral):
            raise InvalidParameterError(f"Laguerre degree must be an integer, got {self.n!r}")
        if self.n < 0:
            raise InvalidParameterError(f"Laguerre degree must be >= 0, got {self.n}")
        if not math.isfinite(self.nu) or self.nu <= -1:
            raise InvalidParameterError(f"Laguerre order must satisfy nu > -1, got {self.nu}")


@dataclass(frozen=True)
class KummerParams:
    """Arguments of 1F1(a, c; z) with complex ``a``, real ``c`` and real ``z >= 0``."""

    a: complex
    c: float
    z: float

    def __post_init__(self):
        _check_kummer(self.a, self.c)
        if not math.isfinite(self.z) or self.z < 0:
            raise InvalidParameterError(f"Kummer argument must be finite and >= 0, got {self.z}")


def _check_kummer(a: complex, c: float) -> None:
    if not (math.isfinite(complex(a).real) and math.isfinite(complex(a).imag)):
        raise InvalidParameterError(f"Kummer parameter a must be finite, got {a}")
    if not math.isfinite(c):
        raise InvalidParameterError(f"Kummer parameter c must be finite, got {c}")
    if c <= 0 and float(c).is_integer():
        raise InvalidParameterError(f"1F1 has a pole at c = {c}")


def laguerre_eval(p: LaguerreParams, x):
    """Evaluate L^nu_n(x) by the three-term recurrence in the degree.

    Uses ``(k+1) L_{k+1} = (2k+1+nu-x) L_k - (k+nu) L_{k-1}`` starting from
    ``L_0 = 1`` and ``L_1 = 1 + nu - x``. ``x`` may be a scalar or an array.
    """
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0):
        raise InvalidParameterError("Laguerre argument must be >= 0")
    prev = np.ones_like(xa)
    if p.n == 0:
        return prev if xa.ndim else float(prev)
    cur = 1.0 + p.nu - xa
    for k in range(1, p.n):
        prev, cur = cur, ((2 * k + 1 + p.nu - xa) * cur - (k + p.nu) * prev) / (k + 1)
    return cur if xa.ndim else float(cur)


def laguerre_derivative(p: LaguerreParams, x):
    """d/dx L^nu_n(x), computed as -L^{nu+1}_{n-1}(x) (zero for n = 0)."""
    if p.n == 0:
        xa = np.asarray(x, dtype=np.float64)
        if np.any(xa < 0):
            raise InvalidParameterError("Laguerre argument must be >= 0")
        return np.zeros_like(xa) if xa.ndim else 0.0
    return -laguerre_eval(LaguerreParams(p.n - 1, p.nu + 1.0), x)


def kummer_1f1_array(a: complex, c: float, z, z_max: float = Z_MAX) -> np.ndarray:
    """Vectorised 1F1(a, c; z) over an array of real non-negative ``z``.

    Parameters
    ----------
    a, c : complex, float
        Series parameters; ``c`` may not be a non-positive integer.
    z : array_like
        Arguments in ``[0, z_max]``.
    z_max : float
        Series cutoff. Larger arguments raise :class:`InvalidParameterError`.

    Returns
    -------
    complex ndarray with the shape of ``z``.
    """
    _check_kummer(a, c)
    za = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(za)) or np.any(za < 0):
        raise InvalidParameterError("Kummer argument must be finite and >= 0")
    if np.any(za > z_max):
        raise InvalidParameterError(f"Kummer argument {za.max()} exceeds series cutoff z_max = {z_max}")
    flat = np.ascontiguousarray(za.ravel())
    vals, ok = _kernels.kummer_series(complex(a), float(c), flat, SERIES_TOL, SERIES_RUN, SERIES_MAX_TERMS)
    if not ok:
        raise NonConvergenceError(f"1F1({a}, {c}; z) did not converge within {SERIES_MAX_TERMS} terms")
    return vals.reshape(za.shape)


def kummer_1f1(p: KummerParams, z_max: float = Z_MAX) -> complex:
    """Scalar 1F1(a, c; z) by direct compensated Taylor summation."""
    return complex(kummer_1f1_array(p.a, p.c, np.array([p.z]), z_max=z_max)[0])


def quadrature_weights(g) -> np.ndarray:
    """Composite Simpson weights for a uniform grid.

    ``g`` needs ``n_points`` and ``h`` attributes (a :class:`~radosc.grid.RadialGrid`).
    With an odd number of intervals the last one is integrated by the
    trapezoid rule.
    """
    n = int(g.n_points)
    if n < 5:
        raise GridError(f"Simpson weights need at least 5 points, got {n}")
    h = float(g.h)
    w = np.zeros(n)
    m = n - 1 if (n - 1) % 2 == 0 else n - 2  # last index covered by Simpson
    w[0:m + 1:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = w[m] = 1.0
    w *= h / 3.0
    if m != n - 1:
        w[m] += h / 2.0
        w[n - 1] += h / 2.0
    return w
