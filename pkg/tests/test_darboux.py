import math

import mpmath
import numpy as np
import pytest

from radosc.canonical import EigenLabel, phi_closed_form, phi_derivative_closed_form, potential
from radosc.darboux import (
    DEFAULT_EPSILONS,
    ComplexFactorization,
    DeformedOperators,
    apply_MN,
    beta_eval,
    deformed_potential,
    node_depth,
    peak_im_radius,
    poly_forward,
    poly_reverse,
    psi_from_phi,
    u_eval,
    v_eval,
    v_finite_difference,
    zone_radius,
)
from radosc.errors import BetaPoleError, DomainError, InvalidParameterError
from radosc.grid import (
    FirstOrderOperator,
    GridFunction,
    RadialGrid,
    WindowSpec,
    annihilation_residual,
    apply_first_order,
    apply_hamiltonian,
    derivative,
    inner_product,
    relative_residual,
)

mpmath.mp.dps = 30
PRESET = 11 + 5j


def _mp_beta(l, eps, r):
    a = mpmath.mpf(l) / 2 + mpmath.mpf(3) / 4 - mpmath.mpc(eps) / 4
    c = l + mpmath.mpf(3) / 2
    u = lambda t: t ** (l + 1) * mpmath.exp(-t * t / 2) * mpmath.hyp1f1(a, c, t * t)
    return lambda t: -mpmath.diff(u, t) / u(t)


@pytest.fixture(scope="module")
def ops11(grid):
    return DeformedOperators(ComplexFactorization(0, PRESET), grid)


def test_factorization_validation():
    with pytest.raises(InvalidParameterError):
        ComplexFactorization(0, 3.0)
    with pytest.raises(InvalidParameterError):
        ComplexFactorization(-1, 3 + 1j)
    with pytest.raises(InvalidParameterError):
        ComplexFactorization(0, complex(np.nan, 1))
    cf = ComplexFactorization(1, 7 + 2j)
    assert cf.a_param == pytest.approx(0.5 + 0.75 - (7 + 2j) / 4)
    assert cf.c_param == 2.5
    assert cf.conjugate().epsilon == 7 - 2j


@pytest.mark.parametrize("l", [0, 1, 2])
@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_beta_and_v_against_mpmath(l, eps):
    cf = ComplexFactorization(l, eps)
    mb = _mp_beta(l, eps, None)
    for r in (0.05, 0.5, 1.0, 2.5, 4.0, 6.0, 7.5):
        ref = complex(mb(mpmath.mpf(r)))
        assert abs(beta_eval(cf, r) - ref) <= 1e-9 * max(1.0, abs(ref))
        dref = complex(mpmath.diff(mb, mpmath.mpf(r)))
        vref = l * (l + 1) / r ** 2 + r ** 2 + 2 * dref
        assert abs(v_eval(cf, r) - vref) <= 1e-8 * max(1.0, abs(vref))


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_seed_solves_the_eigen_equation(grid, window, eps):
    cf = ComplexFactorization(0, eps)
    u = GridFunction(grid, u_eval(cf, grid.r))
    assert relative_residual(apply_hamiltonian(potential(0), u), u * cf.epsilon, window) < 1e-6


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_B_annihilates_the_seed(grid, window, eps):
    cf = ComplexFactorization(0, eps)
    beta = GridFunction(grid, beta_eval(cf, grid.r))
    u = GridFunction(grid, u_eval(cf, grid.r))
    Bu = apply_first_order(FirstOrderOperator(+1, beta), u)
    assert annihilation_residual(Bu, derivative(u), window) < 1e-8


@pytest.mark.parametrize("l", [0, 2])
def test_beta_small_r_behaviour(l):
    cf = ComplexFactorization(l, PRESET)
    r = np.array([1e-4, 1e-3])
    assert np.allclose(beta_eval(cf, r) * r, -(l + 1), atol=1e-5)


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_conjugation_symmetry(grid, eps):
    cf = ComplexFactorization(1, eps)
    b = beta_eval(cf, grid.r)
    bc = beta_eval(cf.conjugate(), grid.r)
    assert np.abs(bc - np.conj(b)).max() <= 1e-12 * np.abs(b).max()
    vc = v_eval(cf.conjugate(), grid.r)
    assert np.allclose(vc, np.conj(v_eval(cf, grid.r)), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_v_riccati_route_matches_finite_differences(grid, window, eps):
    cf = ComplexFactorization(0, eps)
    fd = v_finite_difference(cf, grid)
    assert relative_residual(fd, GridFunction(grid, v_eval(cf, grid.r)), window) < 1e-7


@pytest.mark.parametrize("l", [0, 1, 3])
@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_imaginary_part_near_origin(l, eps):
    dp = deformed_potential(ComplexFactorization(l, eps))
    assert dp.im_origin_limit == pytest.approx(4 * eps.imag / (4 * l + 6))
    assert complex(dp(1e-4)).imag == pytest.approx(dp.im_origin_limit, rel=1e-3)


def test_scalar_and_array_evaluation_and_domain():
    cf = ComplexFactorization(0, PRESET)
    assert isinstance(beta_eval(cf, 1.0), complex)
    assert beta_eval(cf, np.array([1.0, 2.0])).shape == (2,)
    for fn in (u_eval, beta_eval, v_eval):
        with pytest.raises(DomainError):
            fn(cf, 0.0)


def test_pole_is_reported(monkeypatch, grid):
    import radosc.darboux as dx

    monkeypatch.setattr(dx, "POLE_THRESHOLD", 1e300)
    with pytest.raises(BetaPoleError):
        dx.DeformedOperators(ComplexFactorization(0, PRESET), grid)


def test_operator_arrays_are_read_only(ops11):
    for arr in (ops11.beta, ops11.V, ops11.v):
        with pytest.raises(ValueError):
            arr[0] = 0


def test_operator_grid_mismatch(ops11):
    other = GridFunction.zeros(RadialGrid(1e-3, 8.0, 401))
    with pytest.raises(Exception):
        ops11.A(other)


@pytest.mark.parametrize("s", range(5))
def test_deformed_states_are_eigenfunctions(grid, window, ops11, s):
    cf = ops11.cf
    st = psi_from_phi(cf, s, grid, window, ops=ops11)
    assert st.energy == 4 * s + 3
    assert st.eigen_residual < 1e-5 and not st.residual_flagged
    assert inner_product(st.values, st.values).real == pytest.approx(1.0, rel=1e-12)
    # the analytic route agrees with B applied by finite differences
    fd = ops11.B(phi_closed_form(EigenLabel(0, s), grid))
    c = inner_product(fd, st.values) / inner_product(fd, fd)
    assert relative_residual(fd * c, st.values, window) < 1e-7


def test_low_states_are_node_free(grid, window, ops11):
    cf = ComplexFactorization(0, PRESET)
    for s in range(3):
        st = psi_from_phi(cf, s, grid, window, ops=ops11)
        assert st.node_free and st.node_depth > 1e-3


def test_states_are_not_orthogonal_but_bilinear_orthogonal(grid, window, ops11):
    cf = ComplexFactorization(0, PRESET)
    psis = [psi_from_phi(cf, s, grid, window, ops=ops11).values for s in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(inner_product(psis[i], psis[j])) > 1e-2
            # complex-symmetric h: the unconjugated pairing vanishes
            assert abs(np.sum(grid.weights * psis[i].values * psis[j].values)) < 1e-10


def test_square_integrability_is_grid_independent():
    cf = ComplexFactorization(0, PRESET)
    norms = []
    for r_max, n in ((8.0, 4001), (10.0, 5001)):
        g = RadialGrid(1e-3, r_max, n)
        lab = EigenLabel(0, 3)
        beta = beta_eval(cf, g.r, z_max=100.0)
        phi = phi_closed_form(lab, g).values
        dphi = phi_derivative_closed_form(lab, g).values
        raw = GridFunction(g, dphi + beta * phi)
        norms.append(inner_product(raw, raw).real)
    assert math.isfinite(norms[0]) and abs(norms[0] - norms[1]) < 1e-6 * norms[0]


def test_ladder_operators_on_states(grid, window):
    cf = ComplexFactorization(0, PRESET)
    # psi has sharp small-r structure: truncation, not rounding, dominates here,
    # so the base grid is the right one even for fourth-order operators
    psi = [psi_from_phi(cf, s, grid, window).values for s in range(3)]
    up = apply_MN("raise", cf, psi[0])
    c = inner_product(psi[1], up) / inner_product(psi[1], psi[1])
    assert relative_residual(up, psi[1] * c, window) < 1e-5
    down = apply_MN("lower", cf, psi[2])
    c = inner_product(psi[1], down) / inner_product(psi[1], psi[1])
    assert relative_residual(down, psi[1] * c, window) < 1e-5
    assert annihilation_residual(apply_MN("lower", cf, psi[0]), up, window) < 1e-5
    with pytest.raises(InvalidParameterError):
        apply_MN("sideways", cf, psi[0])


def test_polynomial_roots():
    cf = ComplexFactorization(2, 7 + 1j)
    assert poly_forward(cf) == (-3, 7, 11 + 1j, 7 + 1j)
    assert poly_reverse(cf) == (3, -7, 3 + 1j, 7 + 1j)


def test_node_depth(grid, window):
    assert node_depth(GridFunction.from_callable(grid, lambda r: np.exp(-r)), window) == 1.0
    assert node_depth(GridFunction.from_callable(grid, lambda r: np.cos(r)), window) < 1e-3
    dip = GridFunction.from_callable(grid, lambda r: (1 + 0j) * np.exp(-r) + 1j * np.sin(r) * 0.3)
    assert 0 < node_depth(dip, window) <= 1


def test_zone_geometry(grid, window):
    cfs = [ComplexFactorization(0, e) for e in DEFAULT_EPSILONS]
    zones = [zone_radius(c, grid) for c in cfs]
    peaks = [peak_im_radius(c, grid, window) for c in cfs]
    assert all(window.r_lo < z < grid.r_max for z in zones)
    # stronger deformations pull the peak of |Im v| towards the origin
    assert peaks[0] > peaks[1] > peaks[2]


@pytest.mark.parametrize("l", [0, 1, 2])
def test_real_limit_on_compact_window(grid, l):
    # as Im eps -> 0 at eps = 2l+3, beta approaches alpha on a compact region
    cf = ComplexFactorization(l, (2 * l + 3) + 1e-6j)
    m = WindowSpec(0.2, 2.0).mask(grid)
    r = grid.r[m]
    assert np.abs(beta_eval(cf, r) - (r - (l + 1) / r)).max() < 1e-4


def _asymptotic_beta(l, eps, r, terms=12):
    # The series gives v = r^2 - 2 + (l(l+1) - 1 - eps)/r^2 + O(r^-4).
    # beta = -r + sum_k b_k r^(1-2k) from the Riccati equation beta^2 - beta' = V - eps
    L = l * (l + 1)
    b = [None, (1 + eps) / 2]
    for m in range(2, terms + 1):
        conv = sum(b[i] * b[m - i] for i in range(1, m))
        b.append((conv + (2 * m - 3) * b[m - 1] - (L if m == 2 else 0)) / 2)
    return -r + sum(b[k] * r ** (1 - 2 * k) for k in range(1, terms + 1))


@pytest.mark.parametrize("l", [0, 1])
@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_large_r_asymptotics_of_potential(l, eps):
    cf = ComplexFactorization(l, eps)
    for r in (7.5, 7.9):
        beta = _asymptotic_beta(l, eps, r)
        v_asym = 2 * beta ** 2 - (r * r + l * (l + 1) / r ** 2) + 2 * eps
        assert abs(v_eval(cf, r) - v_asym) < 1e-6 * abs(v_asym)


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_no_denominator_zero_on_grid(grid, eps):
    from radosc.specfun import kummer_1f1_array

    for l in range(4):
        cf = ComplexFactorization(l, eps)
        assert np.abs(kummer_1f1_array(cf.a_param, cf.c_param, grid.r ** 2)).min() > 0.1


@pytest.mark.parametrize("eps", DEFAULT_EPSILONS)
def test_eigen_residual_for_every_preset(grid, window, eps):
    cf = ComplexFactorization(0, eps)
    ops = DeformedOperators(cf, grid)
    for s in range(5):
        assert psi_from_phi(cf, s, grid, window, ops=ops).eigen_residual < 1e-5
