import numpy as np
import pytest
from hypothesis import given, strategies as st

from radosc.errors import GridError
from radosc.grid import (
    FirstOrderOperator,
    GridFunction,
    RadialGrid,
    WindowSpec,
    annihilation_residual,
    apply_first_order,
    apply_hamiltonian,
    derivative,
    fd_weights,
    inner_product,
    phase_align,
    relative_residual,
    second_derivative,
    sign_changes,
    spacing_for_order,
    symmetric_residual,
    window_inner_product,
    zero_crossings,
)


def test_grid_geometry_and_immutability(grid):
    assert grid.n_points == 4001
    assert grid.h == pytest.approx((8.0 - 1e-3) / 4000)
    assert grid.r[0] == 1e-3 and grid.r[-1] == 8.0
    with pytest.raises(ValueError):
        grid.r[0] = 1.0
    with pytest.raises(ValueError):
        grid.weights[0] = 1.0


@pytest.mark.parametrize("kw", [dict(r_min=0.0), dict(r_min=-1.0), dict(r_max=1e-4), dict(n_points=10),
                                dict(r_max=np.inf)])
def test_grid_validation(kw):
    with pytest.raises(GridError):
        RadialGrid(**kw)


def test_spacing_policy(grid):
    assert spacing_for_order(1) == 0.0 and spacing_for_order(2) == 0.0
    assert spacing_for_order(4) == 0.004 and spacing_for_order(6) == 0.01 and spacing_for_order(8) == 0.02
    assert grid.for_order(2) is grid
    coarse = grid.for_order(6)
    assert coarse.h == pytest.approx(0.01, rel=1e-3)
    assert (coarse.r_min, coarse.r_max) == (grid.r_min, grid.r_max)
    fine = RadialGrid(1e-3, 8.0, 201)
    assert fine.for_order(8) is fine


def test_window_validation(grid):
    WindowSpec(0.2, 6.0).validate(grid)
    with pytest.raises(GridError):
        WindowSpec(1.0, 0.5)
    with pytest.raises(GridError):
        WindowSpec(0.2, 9.0).validate(grid)
    m = WindowSpec(0.2, 6.0).mask(grid)
    assert grid.r[m].min() >= 0.2 and grid.r[m].max() <= 6.0


@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("degree", range(0, 7))
def test_stencils_exact_on_polynomials(order, degree):
    g = RadialGrid(0.5, 2.0, 101)
    f = GridFunction(g, g.r ** degree)
    op = derivative if order == 1 else second_derivative
    exact = np.polynomial.Polynomial.basis(degree).deriv(order)(g.r)
    assert np.allclose(op(f).values.real, exact, atol=1e-7 * max(1, degree ** 2))


def test_fd_weights_known_values():
    assert np.allclose(fd_weights([-1, 0, 1], 1), [-0.5, 0, 0.5])
    assert np.allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1])


def test_gaussian_derivatives(grid):
    f = GridFunction.from_callable(grid, lambda r: np.exp(-r ** 2 / 2))
    r = grid.r
    assert np.abs(derivative(f).values - (-r * np.exp(-r ** 2 / 2))).max() < 1e-8
    assert np.abs(second_derivative(f).values - (r ** 2 - 1) * np.exp(-r ** 2 / 2)).max() < 1e-8


def test_sine_is_eigenfunction_of_free_hamiltonian(grid):
    f = GridFunction.from_callable(grid, lambda r: np.sin(3 * r))
    assert relative_residual(apply_hamiltonian(0.0, f), 9 * f) < 1e-8


@given(c1=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       c2=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_first_order_operator_is_linear(c1, c2):
    g = RadialGrid(1e-3, 8.0, 401)
    op = FirstOrderOperator(-1, lambda r: r - 1 / r)
    f = GridFunction.from_callable(g, lambda r: r * np.exp(-r ** 2))
    h = GridFunction.from_callable(g, lambda r: np.sin(r) * np.exp(-r))
    lhs = apply_first_order(op, f * c1 + h * c2)
    rhs = apply_first_order(op, f) * c1 + apply_first_order(op, h) * c2
    scale = 1 + abs(c1) + abs(c2)
    assert np.abs(lhs.values - rhs.values).max() <= 1e-10 * scale * np.abs(rhs.values).max() + 1e-12 * scale


def test_first_order_adjointness(grid):
    # <g, (d + W) f> = <(-d + W) g, f> for functions vanishing at both ends
    w = lambda r: r - 2 / r
    f = GridFunction.from_callable(grid, lambda r: r ** 2 * np.exp(-r ** 2))
    g = GridFunction.from_callable(grid, lambda r: r ** 3 * np.exp(-(r - 1) ** 2))
    lhs = inner_product(g, apply_first_order(FirstOrderOperator(1, w), f))
    rhs = inner_product(apply_first_order(FirstOrderOperator(-1, w), g), f)
    assert abs(lhs - rhs) < 1e-10 * abs(lhs)


def test_operator_validation():
    with pytest.raises(ValueError):
        FirstOrderOperator(0, 1.0)


def test_grid_function_immutability_and_arithmetic(grid):
    f = GridFunction.from_callable(grid, lambda r: r)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    with pytest.raises(AttributeError):
        f.values = np.zeros(grid.n_points)
    g = GridFunction.from_callable(grid, lambda r: 2 * r)
    assert np.allclose((f + f).values, g.values)
    assert np.allclose((g - f).values, f.values)
    assert np.allclose((grid.r * f).values, (f * grid.r).values)
    assert np.allclose((-f).values, -grid.r)
    assert np.allclose((f * 1j).conj().values, -1j * grid.r)
    with pytest.raises(GridError):
        f + GridFunction.from_callable(RadialGrid(1e-3, 8.0, 401), lambda r: r)
    with pytest.raises(GridError):
        GridFunction(grid, np.zeros(3))
    with pytest.raises(GridError):
        GridFunction(grid, np.full(grid.n_points, np.nan))


def test_residual_definitions(grid, window):
    g = GridFunction.from_callable(grid, lambda r: np.exp(-r))
    m = window.mask(grid)
    f = g * 1.001
    assert relative_residual(f, g, window) == pytest.approx(1e-3, rel=1e-12)
    assert symmetric_residual(f, g, window) == pytest.approx(1e-3 / 1.001, rel=1e-12)
    z = GridFunction.zeros(grid)
    assert relative_residual(z, z, window) == 0.0
    assert annihilation_residual(g * 1e-9, g, window) == pytest.approx(1e-9)
    assert annihilation_residual(g, 2.0, window) == pytest.approx(np.exp(-grid.r[m][0]) / 2)


def test_inner_products_and_phase_align(grid, window):
    f = GridFunction.from_callable(grid, lambda r: r * np.exp(-r ** 2))
    # the grid starts at r_min = 1e-3, so the integral misses a head of order r_min^3
    assert inner_product(f, f).real == pytest.approx(np.sqrt(np.pi / 2) / 8, rel=1e-8)
    assert abs(window_inner_product(f, f, window)) < inner_product(f, f).real
    c = 0.3 - 2.1j
    assert np.allclose(phase_align(f, f * c).values, (f * c).values)
    assert np.allclose(phase_align(f, f * c, window).values, (f * c).values)


def test_sign_changes_and_crossings(grid, window):
    f = GridFunction.from_callable(grid, lambda r: np.cos(r))
    assert sign_changes(f, window) == 2
    assert np.allclose(zero_crossings(f, window), [np.pi / 2, 3 * np.pi / 2], atol=1e-6)
    tail = GridFunction.from_callable(grid, lambda r: np.exp(-r ** 2) * (1 + 1e-14 * np.sin(200 * r)))
    assert sign_changes(tail, window) == 0
