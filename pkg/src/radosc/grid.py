"""Uniform radial grids, sampled functions and finite-difference operators.

Derivatives use 6th-order central stencils in the interior and 6th-order
one-sided stencils on the three points nearest each boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Union

import numpy as np

from . import _kernels
from .errors import GridError
from .specfun import quadrature_weights

__all__ = [
    "RadialGrid",
    "WindowSpec",
    "GridFunction",
    "FirstOrderOperator",
    "DEFAULT_GRID",
    "DEFAULT_WINDOW",
    "spacing_for_order",
    "fd_weights",
    "derivative",
    "second_derivative",
    "apply_first_order",
    "apply_hamiltonian",
    "inner_product",
    "window_inner_product",
    "phase_align",
    "relative_residual",
    "symmetric_residual",
    "annihilation_residual",
    "sign_changes",
    "zero_crossings",
]

Coefficient = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, complex, float]

MIN_POINTS = 64
RESIDUAL_FLOOR = 1e-30

# Rounding noise of a composite q-th order FD operator grows like eps / h^q,
# while truncation error shrinks like h^6. These spacings balance the two for
# smooth functions on the default interval.
_ORDER_SPACING = ((2, 0.0), (4, 0.004), (6, 0.01), (8, 0.02))


def spacing_for_order(order: int) -> float:
    """Grid spacing used for composite operators with ``order`` stacked derivatives.

    Orders up to 2 return 0 (use the grid as given).
    """
    for q, h in _ORDER_SPACING:
        if order <= q:
            return h
    return _ORDER_SPACING[-1][1]


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid on ``[r_min, r_max]`` with ``n_points`` nodes."""

    r_min: float = 1e-3
    r_max: float = 8.0
    n_points: int = 4001

    def __post_init__(self):
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)):
            raise GridError("grid bounds must be finite")
        if not 0 < self.r_min < self.r_max:
            raise GridError(f"need 0 < r_min < r_max, got r_min={self.r_min}, r_max={self.r_max}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise GridError(f"n_points must be an integer >= {MIN_POINTS}, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @cached_property
    def r(self) -> np.ndarray:
        r = np.linspace(self.r_min, self.r_max, int(self.n_points))
        r.flags.writeable = False
        return r

    @cached_property
    def weights(self) -> np.ndarray:
        w = quadrature_weights(self)
        w.flags.writeable = False
        return w

    def with_spacing(self, target: float) -> "RadialGrid":
        """Grid on the same interval whose spacing is at least ``target``.

        Returns ``self`` when the current spacing already reaches the target.
        """
        if target <= self.h * (1 + 1e-9):
            return self
        n = int(round((self.r_max - self.r_min) / target)) + 1
        return RadialGrid(self.r_min, self.r_max, max(n, MIN_POINTS))

    def for_order(self, order: int) -> "RadialGrid":
        """Grid suited to a composite operator with ``order`` stacked derivatives."""
        return self.with_spacing(spacing_for_order(order))


@dataclass(frozen=True)
class WindowSpec:
    """Sub-interval ``[r_lo, r_hi]`` where residuals are measured."""

    r_lo: float = 0.2
    r_hi: float = 6.0

    def __post_init__(self):
        if not self.r_lo < self.r_hi:
            raise GridError(f"window needs r_lo < r_hi, got [{self.r_lo}, {self.r_hi}]")

    def validate(self, grid: RadialGrid) -> None:
        if not grid.r_min < self.r_lo < self.r_hi < grid.r_max:
            raise GridError(
                f"window [{self.r_lo}, {self.r_hi}] must lie strictly inside [{grid.r_min}, {grid.r_max}]"
            )

    def mask(self, grid: RadialGrid) -> np.ndarray:
        self.validate(grid)
        r = grid.r
        return (r >= self.r_lo) & (r <= self.r_hi)


DEFAULT_GRID = RadialGrid()
DEFAULT_WINDOW = WindowSpec()


class GridFunction:
    """Immutable complex samples of a function on a :class:`RadialGrid`.

    Supports ``+``, ``-``, negation, and multiplication or division by
    scalars, arrays of matching length and other grid functions on the same
    grid.
    """

    __slots__ = ("grid", "values")
    __array_ufunc__ = None  # make ``ndarray * GridFunction`` use the reflected operators

    def __init__(self, grid: RadialGrid, values):
        vals = np.array(values, dtype=np.complex128)
        if vals.shape != (grid.n_points,):
            raise GridError(f"expected {grid.n_points} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("grid function contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @classmethod
    def from_callable(cls, grid: RadialGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, fn(grid.r))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n_points))

    def __len__(self):
        return self.grid.n_points

    def __repr__(self):
        return f"GridFunction(grid={self.grid!r}, sup={np.abs(self.values).max():.3g})"

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, np.conj(self.values))

    def sup(self, window: WindowSpec | None = None) -> float:
        v = self.values if window is None else self.values[window.mask(self.grid)]
        return float(np.abs(v).max())


@dataclass(frozen=True)
class FirstOrderOperator:
    """The operator ``derivative_sign * d/dr + superpotential(r)``."""

    derivative_sign: int
    superpotential: Coefficient

    def __post_init__(self):
        if self.derivative_sign not in (1, -1):
            raise ValueError("derivative_sign must be +1 or -1")


def fd_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights at ``offsets`` (in units of h) for d^order/dr^order at 0.

    Fornberg's recursive algorithm.
    """
    x = np.asarray(offsets, dtype=np.float64)
    n = x.size
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1, c4 = 1.0, x[0]
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _stencils(order: int):
    half = 3
    width = 7 if order == 1 else 8  # one-sided widths giving 6th-order accuracy
    interior = fd_weights(np.arange(-half, half + 1), order)
    left = np.array([fd_weights(np.arange(width) - i, order) for i in range(half)])
    # row n-1-i uses the last `width` points, expressed relative to that row
    right = np.array([fd_weights(np.arange(width) - (width - 1 - i), order) for i in range(half)])
    for a in (interior, left, right):
        a.flags.writeable = False
    return interior, left, right


def _apply(f: GridFunction, order: int) -> GridFunction:
    interior, left, right = _stencils(order)
    out = _kernels.apply_stencil(np.ascontiguousarray(f.values), interior, left, right)
    return GridFunction(f.grid, out / f.grid.h ** order)


def derivative(f: GridFunction) -> GridFunction:
    """First derivative with 6th-order finite differences."""
    return _apply(f, 1)


def second_derivative(f: GridFunction) -> GridFunction:
    """Second derivative with 6th-order finite differences."""
    return _apply(f, 2)


def _sample(coef: Coefficient, grid: RadialGrid):
    if callable(coef):
        return np.asarray(coef(grid.r))
    if isinstance(coef, GridFunction):
        if coef.grid != grid:
            raise GridError("coefficient sampled on a different grid")
        return coef.values
    return coef


def apply_first_order(op: FirstOrderOperator, f: GridFunction) -> GridFunction:
    """Return ``op.derivative_sign * f' + W f`` with ``W = op.superpotential``."""
    w = _sample(op.superpotential, f.grid)
    d = derivative(f).values
    return GridFunction(f.grid, (d if op.derivative_sign == 1 else -d) + w * f.values)


def apply_hamiltonian(potential: Coefficient, f: GridFunction) -> GridFunction:
    """Return ``-f'' + potential * f``.

    ``potential`` is a callable of ``r``, an array sampled on the grid, or a
    constant.
    """
    return GridFunction(f.grid, -second_derivative(f).values + _sample(potential, f.grid) * f.values)


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise GridError("grid functions live on different grids")


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """Quadrature inner product ``sum_i w_i conj(f_i) g_i`` over the whole grid."""
    _same_grid(f, g)
    return complex(np.sum(f.grid.weights * np.conj(f.values) * g.values))


def window_inner_product(f: GridFunction, g: GridFunction, window: WindowSpec) -> complex:
    """Inner product restricted to the window (Simpson weights zeroed outside)."""
    _same_grid(f, g)
    m = window.mask(f.grid)
    return complex(np.sum((f.grid.weights * m) * np.conj(f.values) * g.values))


def phase_align(f: GridFunction, g: GridFunction, window: WindowSpec | None = None) -> GridFunction:
    """Rescale ``f`` by ``c = <f, g> / <f, f>``, the complex factor minimising ``||c f - g||``."""
    ip = inner_product if window is None else (lambda a, b: window_inner_product(a, b, window))
    ff = ip(f, f)
    if ff == 0:
        return f
    return f * (ip(f, g) / ff)


def relative_residual(f: GridFunction, g: GridFunction, w: WindowSpec = DEFAULT_WINDOW) -> float:
    """``sup_w |f - g| / (sup_w |g| + 1e-30)`` over the window."""
    _same_grid(f, g)
    m = w.mask(f.grid)
    diff = np.abs(f.values[m] - g.values[m]).max()
    return float(diff / (np.abs(g.values[m]).max() + RESIDUAL_FLOOR))


def symmetric_residual(f: GridFunction, g: GridFunction, w: WindowSpec = DEFAULT_WINDOW) -> float:
    """Like :func:`relative_residual`, normalised by the larger of ``sup|f|`` and ``sup|g|``."""
    _same_grid(f, g)
    m = w.mask(f.grid)
    scale = max(np.abs(f.values[m]).max(), np.abs(g.values[m]).max())
    return float(np.abs(f.values[m] - g.values[m]).max() / (scale + RESIDUAL_FLOOR))


def annihilation_residual(f: GridFunction, scale: GridFunction | float, w: WindowSpec = DEFAULT_WINDOW) -> float:
    """``sup_w |f|`` relative to a magnitude scale for results expected to vanish.

    ``scale`` is either a grid function whose window sup sets the scale, or
    a positive number.
    """
    s = scale.sup(w) if isinstance(scale, GridFunction) else float(scale)
    return float(f.sup(w) / (s + RESIDUAL_FLOOR))


def sign_changes(f: GridFunction, w: WindowSpec = DEFAULT_WINDOW, rel_floor: float = 1e-10) -> int:
    """Count sign changes of ``Re f`` on the window.

    Samples with ``|Re f|`` below ``rel_floor * sup|Re f|`` are ignored, so
    that underflowing tails do not produce spurious crossings.
    """
    x = f.values.real[w.mask(f.grid)]
    x = x[np.abs(x) > rel_floor * np.abs(x).max()]
    return int(np.count_nonzero(np.signbit(x[1:]) != np.signbit(x[:-1])))


def zero_crossings(f: GridFunction, w: WindowSpec = DEFAULT_WINDOW, rel_floor: float = 1e-10) -> np.ndarray:
    """Positions of sign changes of ``Re f`` by linear interpolation between samples."""
    m = w.mask(f.grid)
    r = f.grid.r[m]
    x = f.values.real[m]
    keep = np.abs(x) > rel_floor * np.abs(x).max()
    r, x = r[keep], x[keep]
    i = np.nonzero(np.signbit(x[1:]) != np.signbit(x[:-1]))[0]
    return r[i] - x[i] * (r[i + 1] - r[i]) / (x[i + 1] - x[i])
