import math

import pytest

from stuffedmaps.cells import cellset
from stuffedmaps.errors import OddGammaPower
from stuffedmaps.series import TSeries, ts_derivative_t, ts_derivative_weight
from stuffedmaps.solver import (closed_form_gamma_quadrangle, eval_gamma_poly, moments_from_gamma,
                                moments_in_gamma, pointed_ordinary, pointed_stuffed, polygon_weights,
                                solve_stuffed_functional, solve_stuffed_tree_gamma, solve_stuffed_tutte,
                                solve_tree_gamma, solve_tutte_ordinary, w_residual, weight_derivative_coeff)

QUAD = cellset([4])
QB = cellset([4], [2, 2])
N = 8


def test_empty_cell_set_gives_catalan():
    mv = solve_tutte_ordinary(cellset(), 12, N)
    for ell in range(0, 13, 2):
        m = ell // 2
        want = TSeries.from_terms([(m + 1, {}, math.comb(2 * m, m) // (m + 1))], N, ())
        assert mv[ell] == want
    assert mv[3].is_zero()


@pytest.mark.parametrize("cells", [QUAD, cellset([6]), cellset([4], [6]), cellset([4], [8])])
def test_moment_formula_matches_recursion(cells):
    g = solve_tree_gamma(cells, N)
    T = solve_tutte_ordinary(cells, 8, N)
    M = moments_from_gamma(g, polygon_weights(cells, N), 8)
    for ell in range(0, 9, 2):
        assert M[ell] == T[ell]


def test_quadrangulation_gamma_closed_form():
    g = solve_tree_gamma(QUAD, 10)
    assert closed_form_gamma_quadrangle(10) == g
    assert [g.coefficient(n).get((n - 1,), 0) for n in range(1, 7)] == [1, 3, 18, 135, 1134, 10206]


def test_quadrangulation_closed_form_plus_root_is_not_a_series():
    with pytest.raises(ValueError):
        closed_form_gamma_quadrangle(6, sign=1)


def test_odd_gamma_power_rejected():
    g = solve_tree_gamma(QUAD, 4)
    with pytest.raises(OddGammaPower):
        eval_gamma_poly({1: TSeries.constant(1, 4, g.symbols)}, g)


def test_moments_in_gamma_quadrangle_T2():
    w = polygon_weights(QUAD, 6)
    t = TSeries.t(6, QUAD.symbols)
    g = solve_tree_gamma(QUAD, 6)
    t4 = w[4]
    assert eval_gamma_poly(moments_in_gamma(1, w, t), g) == t * g - t4 * g ** 3


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_t_derivative_of_moments(ell):
    g = solve_tree_gamma(QUAD, N)
    T = solve_tutte_ordinary(QUAD, 2 * ell, N)[2 * ell]
    assert ts_derivative_t(T) == pointed_ordinary(g, ell).truncate(N - 1)
    assert pointed_ordinary(g, ell) == math.comb(2 * ell, ell) * g ** ell


@pytest.mark.parametrize("ell,k", [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3)])
def test_weight_derivative_exponent(ell, k):
    cells = cellset([4], [6])
    T = solve_tutte_ordinary(cells, 2 * ell, N)[2 * ell]
    g = solve_tree_gamma(cells, N)
    lhs = ts_derivative_weight(T, f"t_{2 * k}")
    assert lhs == weight_derivative_coeff(ell, k) * g ** (k + ell)


def test_weight_derivative_coefficients():
    assert weight_derivative_coeff(1, 1) == 1
    assert weight_derivative_coeff(1, 2) == 2
    assert weight_derivative_coeff(2, 2) == 9
    assert weight_derivative_coeff(2, 1) == 4


def test_stuffed_routes_agree():
    f = solve_stuffed_functional(QB, [0, 2, 4], N)
    s = solve_stuffed_tutte(QB, 4, N)
    for ell in (0, 2, 4):
        assert f[ell] == s[ell]
    assert solve_stuffed_tree_gamma(QB, N) == f.gamma2


def test_literal_stuffed_tutte_factor_overcounts():
    f = solve_stuffed_functional(QB, [2], N)
    assert solve_stuffed_tutte(QB, 2, N, ordered_k=True)[2] != f[2]


def test_cement_sign_matters():
    plus = solve_stuffed_functional(QB, [2], 6)[2]
    minus = solve_stuffed_functional(QB, [2], 6, sign=-1)[2]
    assert plus != minus


def test_stuffed_odd_moments_vanish():
    f = solve_stuffed_functional(cellset([4], [2, 2], [2, 4]), [1, 3, 5], 6)
    assert all(f[ell].is_zero() for ell in (1, 3, 5))


def test_pointed_stuffed_matches_derivative():
    mv = solve_stuffed_functional(QB, [2, 4], N)
    for ell in (2, 4):
        assert pointed_stuffed(QB, ell, N, mv).truncate(N - 1) == ts_derivative_t(mv[ell])


@pytest.mark.parametrize("cells", [QUAD, QB, cellset([4], [2, 2], [2, 2, 2])])
def test_loop_equation_residual_vanishes(cells):
    mv = solve_stuffed_functional(cells, [2], 6)
    T = solve_stuffed_tutte(cells, 14, 6)
    res = w_residual(T.moments, mv.cement or polygon_weights(cells, 6))
    assert res and all(s.is_zero() for s in res.values())


def test_order_zero_is_constant_only():
    mv = solve_tutte_ordinary(cellset(), 4, 0)
    assert all(s.order == 0 and s.is_zero() for s in mv.moments.values())
