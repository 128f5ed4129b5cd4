from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from siegel_local.hnf import canonical_basis, contains, index_exponent, saturate
from siegel_local.padic import det, mat_mul, rank_of
from siegel_local.poly import Poly
from siegel_local.qsqrt import QSqrt

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=9)
polys = st.lists(fracs, max_size=5).map(Poly)
qs = st.builds(lambda a, b: QSqrt(3, a, b), fracs, fracs)


@given(polys, polys, polys, fracs)
def test_poly_ring_laws(a, b, c, x):
    assert (a + b) * c == a * c + b * c
    assert (a * b)(x) == a(x) * b(x)
    assert (a - a) == Poly()
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


def test_poly_basics():
    P = Poly([1, 2, 3])
    assert P.degree == 2 and P.coeff(5) == 0
    assert P.padded(5) == [1, 2, 3, 0, 0]
    assert Poly.monomial(3, 2) == Poly([0, 0, 0, 2])
    assert P.int_coeffs() == [1, 2, 3]
    assert P.substitute_scaled(2)(Fraction(1, 3)) == P(Fraction(2, 3))


@given(qs, qs, qs)
def test_qsqrt_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).norm() == a.norm() * b.norm()
    if a:
        assert (b / a) * a == b


def test_qsqrt_powers():
    assert QSqrt.power(3, 2) == 3
    assert QSqrt.power(3, 1) * QSqrt.power(3, 1) == 3
    assert QSqrt.power(3, -3) * QSqrt.power(3, 3) == 1
    assert QSqrt.power(3, 1).is_rational() is False
    with pytest.raises(ValueError):
        QSqrt(3, 1) + QSqrt(5, 1)


matrices = st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3)
unimodular = st.sampled_from([
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[1, 1, 0], [0, 1, 0], [2, 0, 1]],
    [[2, 1, 0], [1, 1, 0], [0, 0, 1]],
    [[1, 0, 4], [0, 2, 0], [0, 0, 1]],
])


@settings(max_examples=80)
@given(matrices, unimodular, st.sampled_from([3, 5]))
def test_canonical_basis_is_basis_independent(B, U, p):
    if det(B) == 0:
        return
    B = [[Fraction(x) for x in row] for row in B]
    C = mat_mul(U, B)
    if det(C) == 0 or Fraction(det(U)).numerator % p == 0:
        return
    assert canonical_basis(B, p=p) == canonical_basis(C, p=p)
    H = canonical_basis(B, p=p)
    assert all(contains(H, v, p) for v in B)
    assert index_exponent(B, H, p) == 0


def test_overlattice_generators():
    B = [[1, 0], [0, 3]]
    H = canonical_basis(B, extra=[[0, 1]], p=3)
    assert contains(H, [0, 1], 3) and index_exponent(B, H, 3) == 1
    assert not contains(B, [0, 1], 3)


def test_saturate():
    S = saturate([[3, 0, 0], [1, 3, 0]], 3)
    assert rank_of(S) == 2
    assert contains(S + [(0, 0, 1)], [1, 0, 0], 3)
