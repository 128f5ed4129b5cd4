from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from siegel_local.errors import InadmissibleParams, NotSelfDual, PreconditionViolated, WrongSign
from siegel_local.oracle import density_oracle
from siegel_local.padic import PrimeCtx, chi, diag_lattice, direct_sum, fundamental_invariants, selfdual
from siegel_local.poly import Poly
from siegel_local.sampling import item_rng, random_lattice
from siegel_local.siegel import (
    cancellation_check,
    check_functional_equation,
    check_functional_equation_flat,
    den_flat_at_1,
    den_flat_poly,
    den_poly,
    fe_sign,
    induction_step,
    induction_step_embedded,
    local_density_closed,
    nor_flat_poly,
    nor_poly,
    pden,
    pden_by_derivative,
    pden_by_weights,
    pden_difference,
    weight_factor,
    weight_poly,
    whittaker_derivative,
    whittaker_value,
)

from helpers import diagonal_grid

seeds = st.integers(0, 10 ** 6)
primes = st.sampled_from([3, 5, 7])
signs = st.sampled_from([1, -1])


def _lattice(p, seed, max_rank=4, max_val=6):
    rng = item_rng(seed, 0)
    return random_lattice(rng, PrimeCtx(p), int(rng.integers(1, max_rank + 1)), max_val)


@pytest.mark.parametrize("q", [3, 5])
def test_weight_factor_is_minus_derivative_at_one(q):
    for t in range(0, 7):
        for s in ((0,) if t % 2 == 0 else (-1, 0, 1)) if t else (0,):
            for eps in (1, -1):
                assert weight_factor(t, s, eps, q) == -weight_poly(t, s, eps, q).derivative()(1)


def test_weight_poly_low_rank():
    assert weight_poly(0, 0, 1, 3) == Poly([1])
    assert weight_poly(1, 1, -1, 3) == Poly([1, -1])
    assert weight_poly(2, 0, 1, 3) == Poly([1, 0, -1])
    with pytest.raises(InadmissibleParams):
        weight_poly(2, 1, 1, 3)


def test_example_111():
    for p in (3, 5, 7):
        L = diag_lattice(PrimeCtx(p), [p, p, p])
        for e in (1, -1):
            assert den_poly(L, e) == Poly([1, e * p, p, e])
        assert pden(L, -1) == 3 - p


@pytest.mark.parametrize("p", [3, 5])
def test_even_corank_density_matches_oracle(p):
    ctx = PrimeCtx(p)
    for L in diagonal_grid(ctx, 2, 3):
        for e in (1, -1):
            for k in (1, 2):
                X = Fraction(1, p ** k)
                oracle = density_oracle(selfdual(ctx, L.n + 2 * k, e), L).density
                assert den_flat_poly(L, e)(X) * nor_flat_poly(L.n, e, chi(L), p)(X) == oracle
                assert local_density_closed(L.n + 2 * k, e, L) == oracle


def test_non_integral_density_is_zero():
    L = diag_lattice(PrimeCtx(3), [Fraction(1, 3), 1])
    assert local_density_closed(4, 1, L) == 0
    assert den_poly(L, 1) == Poly()


@settings(max_examples=60, deadline=None)
@given(primes, seeds, signs)
def test_functional_equations(p, seed, eps):
    L = _lattice(p, seed)
    rep = check_functional_equation(L, eps)
    assert rep["sign"] == fe_sign(L, eps)
    check_functional_equation_flat(L, eps)
    P = den_poly(L, eps)
    assert P.coeff(0) == 1 and P.is_integral()


@settings(max_examples=60, deadline=None)
@given(primes, seeds, signs)
def test_sign_minus_one_routes(p, seed, eps):
    L = _lattice(p, seed)
    if fe_sign(L, eps) == -1:
        assert den_poly(L, eps)(1) == 0
        assert whittaker_value(L, eps, 0) == 0
        assert pden_by_derivative(L, eps) == pden_by_weights(L, eps)
        assert whittaker_derivative(L, eps) == pden(L, eps) * nor_poly(L.n, eps, p)(1)
    else:
        with pytest.raises(WrongSign):
            whittaker_derivative(L, eps)


@settings(max_examples=40, deadline=None)
@given(primes, seeds)
def test_fe_sign_does_not_depend_on_unit(p, seed):
    L = _lattice(p, seed)
    ctx = L.ctx
    for eps in (1, -1):
        units = [u for u in range(1, 3 * p) if u % p and (1 if pow(u, (p - 1) // 2, p) == 1 else -1) == eps]
        assert len({fe_sign(L, eps, u) for u in units}) == 1
    with pytest.raises(ValueError):
        fe_sign(L, 1, ctx.r)


@settings(max_examples=40, deadline=None)
@given(primes, seeds, signs)
def test_den_flat_at_one_routes(p, seed, eps):
    L = _lattice(p, seed, 3, 5)
    v = den_flat_at_1(L, eps, check=True)
    assert v == den_flat_poly(L, eps)(1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), seeds, signs)
def test_cancellation(p, seed, eps):
    ctx = PrimeCtx(p)
    Lf = _lattice(p, seed, 2, 4)
    M = selfdual(ctx, 2, int(item_rng(seed, 1).choice([1, -1])))
    rep = cancellation_check(Lf, M, eps)
    assert rep["passed"]


def test_cancellation_needs_selfdual():
    ctx = PrimeCtx(3)
    with pytest.raises(NotSelfDual):
        cancellation_check(diag_lattice(ctx, [3]), diag_lattice(ctx, [3]), 1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5]), seeds, signs)
def test_induction(p, seed, eps):
    ctx = PrimeCtx(p)
    Lf = _lattice(p, seed, 3, 4)
    k = fundamental_invariants(Lf).a[-1] + 1
    assert induction_step(Lf, ctx.r * p ** k, eps)["passed"]


def test_induction_embedded_agrees():
    ctx = PrimeCtx(3)
    V = diag_lattice(ctx, [1, 3, 27])
    a = induction_step_embedded(V, [[1, 0, 0], [0, 1, 0]], [0, 0, 1], -1)
    b = induction_step(diag_lattice(ctx, [1, 3]), 27, -1)
    assert a == b


@pytest.mark.parametrize("p", [3, 5])
def test_pden_difference(p):
    ctx = PrimeCtx(p)
    checked = 0
    for Lf in diagonal_grid(ctx, 2, 3):
        for eps in (1, -1):
            x = p ** (fundamental_invariants(Lf).a[-1] + 1)
            for u in (1, ctx.r):
                if fe_sign(direct_sum(Lf, diag_lattice(ctx, [u * x])), eps) != -1:
                    continue
                if chi(Lf) == eps:
                    with pytest.raises(PreconditionViolated):
                        pden_difference(Lf, u * x, eps)
                    continue
                assert pden_difference(Lf, u * x, eps)["passed"]
                checked += 1
    assert checked > 20
