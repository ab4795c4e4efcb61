"""Complex Darboux deformation of the radial oscillator.

For a complex constant ``eps`` the Hamiltonian factorizes as
``H_l = A B + eps`` with ``A = -d/dr + beta`` and ``B = d/dr + beta``, where
``beta = -u'/u`` for the non-normalizable solution

    u(r) = r^{l+1} e^{-r^2/2} 1F1(l/2 + 3/4 - eps/4, l + 3/2; r^2)

of ``H_l u = eps u``. Reversing the product gives the non-Hermitian partner
``h = B A + eps = -d^2/dr^2 + v`` with ``v = 2 beta^2 - V_l + 2 eps``. The
functions ``psi_s = B phi_s`` are square integrable and satisfy
``h psi_s = E_s psi_s`` with the undeformed real energies. The fourth-order
operators ``M^+ = B S^+ A`` and ``N = B S A`` move along that ladder.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field

import numpy as np

from .canonical import (
    EigenLabel,
    apply_S,
    fix_phase,
    phi_closed_form,
    phi_derivative_closed_form,
    potential,
)
from .errors import BetaPoleError, DomainError, InvalidParameterError
from .grid import (
    DEFAULT_WINDOW,
    GridFunction,
    RadialGrid,
    WindowSpec,
    derivative,
    inner_product,
    relative_residual,
    second_derivative,
)
from .specfun import Z_MAX, kummer_1f1_array

__all__ = [
    "ComplexFactorization",
    "DeformedPotential",
    "DeformedState",
    "DeformedOperators",
    "DEFAULT_EPSILONS",
    "REFERENCE_EPSILON",
    "POLE_THRESHOLD",
    "u_eval",
    "beta_eval",
    "v_eval",
    "v_finite_difference",
    "deformed_potential",
    "psi_from_phi",
    "apply_MN",
    "node_depth",
    "zone_radius",
    "peak_im_radius",
    "poly_forward",
    "poly_reverse",
]

#: Deformation constants at l = 0 shown as potential curves.
DEFAULT_EPSILONS = (3 + 1e-3j, 7 + 2.5j, 11 + 5j)
#: Deformation constant for the node-free excited state at l = 0.
REFERENCE_EPSILON = 11 + 5j
#: Smallest admissible |1F1| in the denominator of beta.
POLE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ComplexFactorization:
    """Angular momentum ``l`` and complex factorization constant ``epsilon`` (``Im epsilon != 0``)."""

    l: int
    epsilon: complex

    def __post_init__(self):
        if isinstance(self.l, bool) or not isinstance(self.l, numbers.Integral) or self.l < 0:
            raise InvalidParameterError(f"l must be a non-negative integer, got {self.l!r}")
        eps = complex(self.epsilon)
        if not (math.isfinite(eps.real) and math.isfinite(eps.imag)):
            raise InvalidParameterError(f"epsilon must be finite, got {self.epsilon}")
        if eps.imag == 0:
            raise InvalidParameterError("epsilon needs a non-zero imaginary part")
        object.__setattr__(self, "epsilon", eps)

    @property
    def a_param(self) -> complex:
        return self.l / 2 + 0.75 - self.epsilon / 4

    @property
    def c_param(self) -> float:
        return self.l + 1.5

    def conjugate(self) -> "ComplexFactorization":
        return ComplexFactorization(self.l, self.epsilon.conjugate())


def _radii(r):
    ra = np.asarray(r, dtype=np.float64)
    if np.any(ra <= 0):
        raise DomainError("the deformation is defined for r > 0 only")
    return ra


def _out(x, like):
    return x if np.ndim(like) else complex(x)


def u_eval(cf: ComplexFactorization, r, z_max: float = Z_MAX):
    """Seed solution ``u = r^{l+1} e^{-r^2/2} 1F1(a, c; r^2)`` (normalization constant 1)."""
    ra = _radii(r)
    x = ra * ra
    return _out(ra ** (cf.l + 1) * np.exp(-x / 2) * kummer_1f1_array(cf.a_param, cf.c_param, x, z_max), r)


def _kummer_ratio(cf: ComplexFactorization, x: np.ndarray, z_max: float) -> np.ndarray:
    den = kummer_1f1_array(cf.a_param, cf.c_param, x, z_max)
    small = np.abs(den) <= POLE_THRESHOLD
    if np.any(small):
        bad = float(np.sqrt(x[np.argmax(small)]))
        raise BetaPoleError(f"|1F1| <= {POLE_THRESHOLD:g} near r = {bad:.6g} for epsilon = {cf.epsilon}")
    return kummer_1f1_array(cf.a_param + 1, cf.c_param + 1, x, z_max) / den


def beta_eval(cf: ComplexFactorization, r, z_max: float = Z_MAX):
    """Complex superpotential ``beta = -u'/u``.

    Evaluated as ``r - (l+1)/r - 2 r (a/c) 1F1(a+1, c+1; r^2) / 1F1(a, c; r^2)``.
    Raises :class:`BetaPoleError` where the denominator is below
    :data:`POLE_THRESHOLD` in modulus.
    """
    ra = _radii(r)
    x = np.atleast_1d(ra * ra)
    ratio = _kummer_ratio(cf, x, z_max).reshape(np.shape(ra))
    beta = ra - (cf.l + 1) / ra - 2 * ra * (cf.a_param / cf.c_param) * ratio
    return _out(beta, r)


def v_eval(cf: ComplexFactorization, r, z_max: float = Z_MAX):
    """Deformed potential ``v = V_l + 2 beta' = 2 beta^2 - V_l + 2 eps``.

    The second form follows from the Riccati equation and avoids
    differentiating ``beta``.
    """
    ra = _radii(r)
    beta = np.asarray(beta_eval(cf, ra, z_max))
    return _out(2 * beta ** 2 - potential(cf.l)(ra) + 2 * cf.epsilon, r)


def v_finite_difference(cf: ComplexFactorization, grid: RadialGrid, z_max: float = Z_MAX) -> GridFunction:
    """Cross-check route ``V_l + 2 beta'`` with ``beta'`` by finite differences."""
    beta = GridFunction(grid, beta_eval(cf, grid.r, z_max))
    return GridFunction(grid, potential(cf.l)(grid.r)) + 2 * derivative(beta)


@dataclass(frozen=True)
class DeformedPotential:
    """Potential ``v_{l+1}`` of the deformed Hamiltonian attached to its factorization."""

    parent: ComplexFactorization
    z_max: float = Z_MAX

    def __call__(self, r):
        return v_eval(self.parent, r, self.z_max)

    @property
    def im_origin_limit(self) -> float:
        """Limit of ``Im v`` as ``r -> 0``: ``4 Im(eps) / (4l + 6)``."""
        return 4 * self.parent.epsilon.imag / (4 * self.parent.l + 6)


def deformed_potential(cf: ComplexFactorization, z_max: float = Z_MAX) -> DeformedPotential:
    return DeformedPotential(cf, z_max)


class DeformedOperators:
    """Operators of one deformation sampled on one grid.

    ``beta`` and ``v`` are evaluated once at construction; the instance holds
    no other state. All methods take and return :class:`GridFunction`
    objects on ``grid``.
    """

    def __init__(self, cf: ComplexFactorization, grid: RadialGrid, z_max: float = Z_MAX):
        self.cf = cf
        self.grid = grid
        self.z_max = z_max
        self.beta = np.asarray(beta_eval(cf, grid.r, z_max))
        self.V = potential(cf.l)(grid.r)
        self.v = 2 * self.beta ** 2 - self.V + 2 * cf.epsilon
        for a in (self.beta, self.V, self.v):
            a.flags.writeable = False

    def _check(self, f: GridFunction) -> None:
        if f.grid != self.grid:
            raise InvalidParameterError("grid function lives on a different grid")

    def A(self, f: GridFunction) -> GridFunction:
        """``A f = -f' + beta f``."""
        self._check(f)
        return -derivative(f) + self.beta * f

    def B(self, f: GridFunction) -> GridFunction:
        """``B f = f' + beta f``."""
        self._check(f)
        return derivative(f) + self.beta * f

    def A_adj(self, f: GridFunction) -> GridFunction:
        """Formal adjoint ``A^+ f = f' + conj(beta) f``."""
        self._check(f)
        return derivative(f) + np.conj(self.beta) * f

    def B_adj(self, f: GridFunction) -> GridFunction:
        """Formal adjoint ``B^+ f = -f' + conj(beta) f``."""
        self._check(f)
        return -derivative(f) + np.conj(self.beta) * f

    def H(self, f: GridFunction) -> GridFunction:
        """Undeformed ``H_l f``."""
        self._check(f)
        return -second_derivative(f) + self.V * f

    def h(self, f: GridFunction) -> GridFunction:
        """Deformed ``h f = -f'' + v f``."""
        self._check(f)
        return -second_derivative(f) + self.v * f

    def M(self, f: GridFunction) -> GridFunction:
        """Raising operator ``M^+ = B S^+ A`` applied right to left."""
        return self.B(apply_S("raise", self.cf.l, self.A(f)))

    def N(self, f: GridFunction) -> GridFunction:
        """Lowering operator ``N = B S A`` applied right to left."""
        return self.B(apply_S("lower", self.cf.l, self.A(f)))

    def shifted_h(self, f: GridFunction, shifts) -> GridFunction:
        """``prod_k (h - c_k) f`` for the constants in ``shifts``, rightmost first."""
        for c in reversed(list(shifts)):
            f = self.h(f) - c * f
        return f


def poly_forward(cf: ComplexFactorization):
    """Roots ``c_k`` with ``M^+ N = (h + 2l - 1)(h - 2l - 3)(h - eps - 4)(h - eps)``."""
    l, e = cf.l, cf.epsilon
    return (-(2 * l - 1), 2 * l + 3, e + 4, e)


def poly_reverse(cf: ComplexFactorization):
    """Roots ``c_k`` with ``N M^+ = (h - 2l + 1)(h + 2l + 3)(h - eps + 4)(h - eps)``."""
    l, e = cf.l, cf.epsilon
    return (2 * l - 1, -(2 * l + 3), e - 4, e)


def node_depth(f: GridFunction, window: WindowSpec = DEFAULT_WINDOW) -> float:
    """Depth of the deepest interior dip of ``|f|`` relative to its maximum.

    Returns the smallest value of ``|f|`` at an interior local minimum on the
    window divided by ``max |f|``, or 1.0 when ``|f|`` has no interior local
    minimum. A zero of ``f`` shows up as a value near 0; monotone decay
    towards the window edges does not count.
    """
    mag = np.abs(f.values[window.mask(f.grid)])
    inner = mag[1:-1]
    dips = (inner <= mag[:-2]) & (inner <= mag[2:])
    if not dips.any():
        return 1.0
    return float(inner[dips].min() / mag.max())


@dataclass(frozen=True)
class DeformedState:
    """Normalized eigenfunction ``psi_s`` of the deformed Hamiltonian."""

    parent: ComplexFactorization
    s: int
    values: GridFunction
    energy: int
    eigen_residual: float = field(default=math.nan)
    node_depth: float = field(default=math.nan)
    residual_flagged: bool = False

    @property
    def node_free(self) -> bool:
        return self.node_depth > 1e-3


#: Eigen-residual above which a state is flagged in its metadata.
PSI_RESIDUAL_TOL = 1e-5


def psi_from_phi(
    cf: ComplexFactorization,
    s: int,
    grid: RadialGrid,
    window: WindowSpec = DEFAULT_WINDOW,
    z_max: float = Z_MAX,
    ops: DeformedOperators | None = None,
) -> DeformedState:
    """Deformed eigenstate ``psi_s ~ B phi_s`` with unit quadrature norm.

    ``B`` acts through the analytic derivative of the closed-form ``phi_s``,
    so ``psi`` carries no finite-difference error. The phase makes the first
    sizable sample near ``r_min`` real and positive. The eigen-residual under
    ``h`` (finite differences) and the node depth are stored on the result.
    """
    label = EigenLabel(cf.l, s)
    ops = ops if ops is not None else DeformedOperators(cf, grid, z_max)
    phi = phi_closed_form(label, grid)
    dphi = phi_derivative_closed_form(label, grid)
    raw = dphi + ops.beta * phi
    psi = fix_phase(raw / math.sqrt(inner_product(raw, raw).real))
    res = relative_residual(ops.h(psi), label.energy * psi, window)
    return DeformedState(
        parent=cf,
        s=s,
        values=psi,
        energy=label.energy,
        eigen_residual=res,
        node_depth=node_depth(psi, window),
        residual_flagged=res > PSI_RESIDUAL_TOL,
    )


def apply_MN(direction: str, cf: ComplexFactorization, f: GridFunction, z_max: float = Z_MAX) -> GridFunction:
    """Apply ``M^+ = B S^+ A`` (``direction="raise"``) or ``N = B S A`` (``"lower"``)."""
    ops = DeformedOperators(cf, f.grid, z_max)
    if direction == "raise":
        return ops.M(f)
    if direction == "lower":
        return ops.N(f)
    raise InvalidParameterError(f"direction must be 'raise' or 'lower', got {direction!r}")


def zone_radius(cf: ComplexFactorization, grid: RadialGrid, rel: float = 0.01, z_max: float = Z_MAX) -> float:
    """Heuristic outer edge of the deformation zone.

    Largest grid radius where ``|v - (V_l - 2)| > rel * |V_l|``, or
    ``r_min`` when no point qualifies.
    """
    r = grid.r
    V = potential(cf.l)(r)
    dev = np.abs(np.asarray(v_eval(cf, r, z_max)) - (V - 2)) > rel * np.abs(V)
    return float(r[np.nonzero(dev)[0][-1]]) if dev.any() else float(r[0])


def peak_im_radius(cf: ComplexFactorization, grid: RadialGrid, window: WindowSpec = DEFAULT_WINDOW,
                   z_max: float = Z_MAX) -> float:
    """Radius in the window where ``|Im v|`` is largest."""
    m = window.mask(grid)
    r = grid.r[m]
    return float(r[np.argmax(np.abs(np.asarray(v_eval(cf, r, z_max)).imag))])
