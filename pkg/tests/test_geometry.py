from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_local.errors import PreconditionViolated, RankMismatch, WrongType
from siegel_local.geometry import (
    IndicatorCombo,
    c_V_Lambda_combo,
    c_V_Lambda_value,
    check_local_modularity,
    choose_perpendicular_norm,
    combos_equal,
    fourier,
    generic_fiber_check,
    hor_set,
    horizontal_degree,
    int_V_Lambda,
    int_V_Lambda_combo,
    intersection_number,
    is_coisotropic,
    is_horizontal,
    pden_difference_check,
    pointwise_check,
    primitive_degree,
    quasi_canonical_degree,
    saturated_horizontal_property,
    t_max,
    type_two_overlattices,
    vertex_ctx,
    vertex_lattice,
)
from siegel_local.padic import PrimeCtx, chi, det, diag_lattice, direct_sum, hasse, identity, is_vertex, selfdual
from siegel_local.siegel import fe_sign, pden

from helpers import diagonal_grid


@pytest.mark.parametrize("q", [3, 5])
def test_quasi_canonical_degrees(q):
    assert quasi_canonical_degree(0, False, q) == 1
    for s in range(1, 4):
        assert quasi_canonical_degree(s, False, q) == q ** s + q ** (s - 1)
        assert quasi_canonical_degree(s, True, q) == 2 * q ** s


def test_primitive_degrees():
    ctx = PrimeCtx(3)
    assert primitive_degree(diag_lattice(ctx, [1, 1]), 1) == 1
    assert primitive_degree(diag_lattice(ctx, [1, 9]), 1) == 4


@pytest.mark.parametrize("p", [3, 5])
def test_generic_fiber_small_grid(p):
    for Lf in diagonal_grid(PrimeCtx(p), 2, 3):
        for eps in (1, -1):
            if not is_coisotropic(Lf, eps):
                assert generic_fiber_check(Lf, eps)["passed"]


def test_coisotropic_realizable_has_no_horizontal_part():
    ctx = PrimeCtx(3)
    Lf = diag_lattice(ctx, [3, 27])
    assert is_coisotropic(Lf, -1) and hor_set(Lf, -1) == [] and horizontal_degree(Lf, -1) == 0
    with pytest.raises(PreconditionViolated):
        pden_difference_check(Lf, -1)


def test_horizontal_rank_check():
    M = diag_lattice(PrimeCtx(3), [1, 3])
    assert is_horizontal(M, 1, n=3)
    with pytest.raises(RankMismatch):
        is_horizontal(M, 1, n=4)
    assert not is_horizontal(diag_lattice(PrimeCtx(3), [Fraction(1, 3), 1]), 1)


def test_choose_perpendicular_norm_is_admissible():
    for p in (3, 5):
        ctx = PrimeCtx(p)
        for Lf in diagonal_grid(ctx, 2, 3):
            for eps in (1, -1):
                if is_coisotropic(Lf, eps):
                    continue
                x = choose_perpendicular_norm(Lf, eps)
                assert fe_sign(direct_sum(Lf, diag_lattice(ctx, [x])), eps) == -1
                assert pden_difference_check(Lf, eps, x)["passed"]


def test_intersection_numbers():
    for p in (3, 5, 7):
        L = diag_lattice(PrimeCtx(p), [p, p, p])
        assert intersection_number(L, -1) == 3 - p
        # sign +1: L does not sit in the ambient space
        assert fe_sign(L, 1) == 1 and intersection_number(L, 1) == 0
    assert intersection_number(diag_lattice(PrimeCtx(3), [Fraction(1, 3), 1, 1]), -1) == 0


@pytest.mark.parametrize("m,eps", [(4, 1), (4, -1), (5, 1)])
def test_saturated_sublattices_are_horizontal(m, eps):
    import random

    assert saturated_horizontal_property(15, PrimeCtx(3), m, eps, random.Random(m))["passed"]


def test_t_max_and_vertex_lattices():
    assert [t_max(m, e) for m, e in ((4, 1), (4, -1), (5, 1), (6, -1))] == [2, 4, 4, 6]
    ctx = PrimeCtx(3)
    L = vertex_lattice(6, -1, 4, ctx)
    assert is_vertex(L) == (True, 4) and hasse(L) == -1 and chi(L) == -1
    from siegel_local.errors import Inadmissible

    with pytest.raises(Inadmissible):
        vertex_lattice(4, 1, 4, ctx)


def _random_combo(ambient, rng, terms):
    q = ambient.p
    n = ambient.n
    c = IndicatorCombo(ambient)
    for _ in range(terms):
        while True:
            B = [[Fraction(int(x), q ** int(rng.integers(0, 2))) for x in row] for row in rng.integers(-q, q + 1, size=(n, n))]
            if det(B) != 0:
                break
        c.add(B, int(rng.integers(-3, 4)) or 1)
    return c


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5]))
def test_fourier_is_an_involution_on_selfdual_ambient(seed, p):
    rng = np.random.default_rng(seed)
    H = selfdual(PrimeCtx(p), 3, int(rng.choice([1, -1])))
    c = _random_combo(H, rng, 3)
    assert combos_equal(fourier(fourier(c)), c)


def test_fourier_of_selfdual_lattice():
    H = selfdual(PrimeCtx(3), 4, 1)
    c = IndicatorCombo(H).add(identity(4), 1)
    assert fourier(c).terms == c.terms


def test_combos_equal_detects_difference():
    H = selfdual(PrimeCtx(3), 2, 1)
    a = IndicatorCombo(H).add(identity(2), 1)
    b = IndicatorCombo(H).add([[3, 0], [0, 3]], 1)
    ok, wit = combos_equal(a, b, witness=True)
    assert not ok and wit["difference"]
    # two of the four lines of L / 3L do not cover L
    c = IndicatorCombo(H).add([[1, 0], [0, 3]], 1).add([[3, 0], [0, 1]], 1).add([[3, 0], [0, 3]], -1)
    assert not combos_equal(a, c)
    # all four lines do, with the origin counted four times
    d = IndicatorCombo(H)
    for k in range(3):
        d.add([[1, k], [0, 3]], 1)
    d.add([[3, 0], [0, 1]], 1).add([[3, 0], [0, 3]], -3)
    assert combos_equal(a, d)


def test_int_function_table():
    ctx = PrimeCtx(3)
    vc = vertex_ctx(4, -1, 1, ctx)
    assert int_V_Lambda(vc, [0, 0, 0, 0]) == 1 - 3
    assert int_V_Lambda(vc, [Fraction(1, 9), 0, 0, 0]) == 0
    assert pointwise_check(vc, int_V_Lambda_combo(vc), int_V_Lambda)["passed"]
    assert len(type_two_overlattices(vc)) == 3 ** 2 + 1 and vc.W.chi0 == -1
    with pytest.raises(WrongType):
        int_V_Lambda(vertex_ctx(6, -1, 2, ctx), [0] * 6)


@pytest.mark.parametrize("m,eps", [(4, -1), (5, 1), (5, -1)])
def test_local_modularity_p3(m, eps):
    assert check_local_modularity(vertex_ctx(m, eps, 1, PrimeCtx(3)))["passed"]


def test_c_function_table_d1():
    vc = vertex_ctx(5, 1, 1, PrimeCtx(3))
    assert pointwise_check(vc, c_V_Lambda_combo(vc), c_V_Lambda_value)["passed"]
    assert check_local_modularity(vc, "c")["passed"]


def test_pden_matches_intersection_on_realizable():
    ctx = PrimeCtx(5)
    for L in diagonal_grid(ctx, 3, 3, min_rank=3):
        if fe_sign(L, -1) == -1:
            assert intersection_number(L, -1) == pden(L, -1)
