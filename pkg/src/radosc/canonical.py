"""Radial oscillator eigenbasis and its first- and second-order ladder operators.

The Hamiltonian is ``H_l = -d^2/dr^2 + l(l+1)/r^2 + r^2`` with spectrum
``E = 2(2s + l) + 3``. It factorizes in four ways through the
superpotentials ``alpha = r - (l+1)/r`` and ``gamma = r + (l+1)/r``::

    H_l     = a_l^+ a_l + (2l+3)          a_l   =  d/dr + alpha
    H_{l+1} = a_l a_l^+ + (2l+1)          a_l^+ = -d/dr + alpha
    H_l     = b_l b_l^+ - (2l+3)          b_l   =  d/dr + gamma
    H_{l+1} = b_l^+ b_l - (2l+1)          b_l^+ = -d/dr + gamma

and ``S_l = b_l a_l`` lowers ``s`` by one at fixed ``l``.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ForbiddenLadderError, InvalidParameterError
from .grid import (
    FirstOrderOperator,
    GridFunction,
    RadialGrid,
    apply_first_order,
    apply_hamiltonian,
    derivative,
    inner_product,
)
from .specfun import LaguerreParams, laguerre_derivative, laguerre_eval

__all__ = [
    "EigenLabel",
    "CanonicalConstants",
    "OPERATOR_KINDS",
    "superpotential_alpha",
    "superpotential_gamma",
    "potential",
    "canonical_operator",
    "apply_canonical",
    "apply_H",
    "apply_S",
    "lattice_step",
    "normalization_constant",
    "phi_closed_form",
    "phi_derivative_closed_form",
    "phi_via_raising_chain",
    "phi_via_lowering_chain",
    "normalize",
    "fix_phase",
]

OPERATOR_KINDS = ("a", "a+", "b", "b+")
_KIND_ALIASES = {"a": "a", "a+": "a+", "a†": "a+", "adag": "a+", "b": "b", "b+": "b+", "b†": "b+", "bdag": "b+"}


def _check_l(l) -> int:
    if isinstance(l, bool) or not isinstance(l, numbers.Integral):
        raise InvalidParameterError(f"angular momentum must be an integer, got {l!r}")
    if l < 0:
        raise ForbiddenLadderError(f"angular momentum l = {l} is outside the lattice (l >= 0)")
    return int(l)


@dataclass(frozen=True, order=True)
class EigenLabel:
    """Lattice point ``(l, s)`` with principal number ``n = 2s + l`` and energy ``E = 2n + 3``."""

    l: int
    s: int

    def __post_init__(self):
        _check_l(self.l)
        if isinstance(self.s, bool) or not isinstance(self.s, numbers.Integral) or self.s < 0:
            raise InvalidParameterError(f"radial quantum number must be an integer >= 0, got {self.s!r}")

    @property
    def n(self) -> int:
        return 2 * self.s + self.l

    @property
    def energy(self) -> int:
        return 2 * self.n + 3


@dataclass(frozen=True)
class CanonicalConstants:
    """Factorization constants ``epsilon = 2l+3``, ``theta = 2l+1`` and ``kappa = -(2l+3)``."""

    l: int

    def __post_init__(self):
        _check_l(self.l)

    @property
    def epsilon(self) -> int:
        return 2 * self.l + 3

    @property
    def theta(self) -> int:
        return self.epsilon - 2

    @property
    def kappa(self) -> int:
        return -self.epsilon


def _positive_r(r):
    ra = np.asarray(r, dtype=np.float64)
    if np.any(ra <= 0):
        raise DomainError("superpotentials are defined for r > 0 only")
    return ra


def superpotential_alpha(l: int, r):
    """``alpha(r) = r - (l+1)/r``."""
    ra = _positive_r(r)
    out = ra - (_check_l(l) + 1) / ra
    return out if out.ndim else float(out)


def superpotential_gamma(l: int, r):
    """``gamma(r) = r + (l+1)/r``."""
    ra = _positive_r(r)
    out = ra + (_check_l(l) + 1) / ra
    return out if out.ndim else float(out)


def potential(l: int):
    """Return ``V_l(r) = l(l+1)/r^2 + r^2`` as a callable."""
    l = _check_l(l)

    def v(r):
        ra = _positive_r(r)
        return l * (l + 1) / ra ** 2 + ra ** 2

    return v


def canonical_operator(kind: str, l: int) -> FirstOrderOperator:
    """First-order operator ``a_l``, ``a_l^+``, ``b_l`` or ``b_l^+``.

    ``kind`` is one of ``"a"``, ``"a+"``, ``"b"``, ``"b+"`` (``"a†"`` and
    ``"b†"`` are accepted too). A negative ``l`` raises
    :class:`ForbiddenLadderError`.
    """
    try:
        k = _KIND_ALIASES[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown operator kind {kind!r}") from None
    l = _check_l(l)
    sign = 1 if k in ("a", "b") else -1
    sp = (lambda r: superpotential_alpha(l, r)) if k[0] == "a" else (lambda r: superpotential_gamma(l, r))
    return FirstOrderOperator(sign, sp)


def apply_canonical(kind: str, l: int, f: GridFunction) -> GridFunction:
    """Apply ``a_l``, ``a_l^+``, ``b_l`` or ``b_l^+`` to ``f``.

    Lowering the angular momentum of a state of ``H_l`` uses the operator
    with index ``l - 1``; for ``l = 0`` that index is ``-1`` and the call is
    rejected with :class:`ForbiddenLadderError`.
    """
    return apply_first_order(canonical_operator(kind, l), f)


def apply_H(l: int, f: GridFunction) -> GridFunction:
    """``H_l f`` by finite differences."""
    return apply_hamiltonian(potential(l), f)


def apply_S(direction: str, l: int, f: GridFunction, form: str = "product") -> GridFunction:
    """Apply the second-order ladder operator ``S_l`` (lower) or ``S_l^+`` (raise).

    Parameters
    ----------
    direction : {"lower", "raise"}
    l : int
    f : GridFunction
    form : {"product", "shifted", "expanded"}
        ``"product"`` composes ``b_l a_l`` (lower) or ``a_l^+ b_l^+`` (raise)
        and works for every ``l``. ``"shifted"`` uses ``a_{l-1} b_{l-1}``
        or ``b_{l-1}^+ a_{l-1}^+`` and needs ``l >= 1``. ``"expanded"``
        uses ``-H_l +- 2r d/dr + 2r^2 +- 1``.
    """
    l = _check_l(l)
    if direction not in ("lower", "raise"):
        raise InvalidParameterError(f"direction must be 'lower' or 'raise', got {direction!r}")
    lower = direction == "lower"
    if form == "product":
        if lower:
            return apply_canonical("b", l, apply_canonical("a", l, f))
        return apply_canonical("a+", l, apply_canonical("b+", l, f))
    if form == "shifted":
        if l == 0:
            raise ForbiddenLadderError("the shifted form of S needs a_{l-1}, b_{l-1}, undefined at l = 0")
        if lower:
            return apply_canonical("a", l - 1, apply_canonical("b", l - 1, f))
        return apply_canonical("b+", l - 1, apply_canonical("a+", l - 1, f))
    if form == "expanded":
        r = f.grid.r
        sgn = 1.0 if lower else -1.0
        return -apply_H(l, f) + sgn * 2.0 * r * derivative(f) + (2.0 * r ** 2 + sgn) * f
    raise InvalidParameterError(f"unknown form {form!r}")


_STEPS = {
    # kind: (operator index offset, delta s, delta l)
    "a": (0, -1, +1),
    "a+": (-1, +1, -1),
    "b+": (0, 0, +1),
    "b": (-1, 0, -1),
    "S": (0, -1, 0),
    "S+": (0, +1, 0),
}


def lattice_step(label: EigenLabel, kind: str) -> Optional[EigenLabel]:
    """Label reached when a ladder operator acts on the state ``label``.

    ``"a"`` applies ``a_l`` and maps ``(l, s)`` to ``(l+1, s-1)``; ``"a+"``
    applies ``a_{l-1}^+`` and maps to ``(l-1, s+1)``; ``"b+"`` applies
    ``b_l^+`` and maps to ``(l+1, s)``; ``"b"`` applies ``b_{l-1}`` and maps
    to ``(l-1, s)``; ``"S"`` and ``"S+"`` change ``s`` by one at fixed ``l``.
    Returns ``None`` when the state is annihilated. Steps that need an
    operator with index ``-1`` raise :class:`ForbiddenLadderError`.
    """
    k = {"a†": "a+", "b†": "b+", "S†": "S+"}.get(kind, kind)
    if k not in _STEPS:
        raise InvalidParameterError(f"unknown ladder kind {kind!r}")
    offset, ds, dl = _STEPS[k]
    if label.l + offset < 0:
        raise ForbiddenLadderError(f"{kind} on a state with l = {label.l} needs an operator with index -1")
    if label.s + ds < 0:
        return None
    return EigenLabel(label.l + dl, label.s + ds)


def normalization_constant(label: EigenLabel) -> float:
    """Analytic ``C = sqrt(2 s! / Gamma(s + l + 3/2))`` giving unit norm on ``[0, inf)``."""
    return math.exp(0.5 * (math.log(2.0) + math.lgamma(label.s + 1) - math.lgamma(label.s + label.l + 1.5)))


def _phi_analytic(label: EigenLabel, r: np.ndarray):
    """Analytically normalized ``phi`` and ``phi'`` on ``r``."""
    p = LaguerreParams(label.s, label.l + 0.5)
    x = r * r
    lag = laguerre_eval(p, x)
    dlag = laguerre_derivative(p, x)
    g = normalization_constant(label) * r ** (label.l + 1) * np.exp(-x / 2)
    phi = g * lag
    dphi = g * (((label.l + 1) / r - r) * lag + 2 * r * dlag)
    return phi, dphi


def phi_closed_form(label: EigenLabel, grid: RadialGrid) -> GridFunction:
    """Eigenfunction ``C r^{l+1} e^{-r^2/2} L^{l+1/2}_s(r^2)`` with unit quadrature norm.

    The leading coefficient at small ``r`` is positive.
    """
    phi, _ = _phi_analytic(label, grid.r)
    f = GridFunction(grid, phi)
    return f / math.sqrt(inner_product(f, f).real)


def phi_derivative_closed_form(label: EigenLabel, grid: RadialGrid) -> GridFunction:
    """Analytic ``d/dr`` of :func:`phi_closed_form`, with the same normalization."""
    phi, dphi = _phi_analytic(label, grid.r)
    f = GridFunction(grid, phi)
    return GridFunction(grid, dphi) / math.sqrt(inner_product(f, f).real)


def fix_phase(f: GridFunction, rel: float = 1e-2) -> GridFunction:
    """Rotate ``f`` so its first sample above ``rel * sup|f|`` is real and positive.

    For states vanishing like a power of ``r`` at the origin this fixes the
    sign of the leading coefficient. The threshold keeps rounding noise at
    the smallest radii from deciding the phase.
    """
    mag = np.abs(f.values)
    i = int(np.argmax(mag > rel * mag.max()))
    v = f.values[i]
    return f * (abs(v) / v) if v != 0 else f


def normalize(f: GridFunction) -> GridFunction:
    """Unit quadrature norm with :func:`fix_phase` applied."""
    nrm = math.sqrt(inner_product(f, f).real)
    return fix_phase(f / nrm)


def phi_via_raising_chain(l: int, s: int, grid: RadialGrid) -> GridFunction:
    """Build ``phi^{(l)}_s`` from the ground state of ``H_{l+s}``.

    Applies ``a_{l+s-1}^+``, then ``a_{l+s-2}^+``, down to ``a_l^+``. Each
    step lowers the angular momentum by one and adds one node. The result is
    normalized with a positive leading coefficient.

    Every step is one finite-difference derivative, so rounding noise grows
    like ``eps / h^s``. For long chains pass ``grid.for_order(s)``.
    """
    label = EigenLabel(l, s)
    f = phi_closed_form(EigenLabel(l + s, 0), grid)
    for k in range(l + s - 1, l - 1, -1):
        f = apply_canonical("a+", k, f)
    return normalize(f) if label.s else f


def phi_via_lowering_chain(l: int, s: int, grid: RadialGrid) -> GridFunction:
    """Build ``phi^{(l)}_s`` from ``phi^{(0)}_{s+l}`` by applying ``a_0, a_1, ..., a_{l-1}``.

    Requires ``l >= 1``. Rounding noise grows like ``eps / h^l``; see
    :func:`phi_via_raising_chain`.
    """
    label = EigenLabel(l, s)
    if label.l == 0:
        raise InvalidParameterError("the lowering chain needs l >= 1")
    f = phi_closed_form(EigenLabel(0, s + l), grid)
    for k in range(l):
        f = apply_canonical("a", k, f)
    return normalize(f)
