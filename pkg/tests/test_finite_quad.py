import pytest
from hypothesis import given, strategies as st

from siegel_local.errors import BadDimension, DegenerateSpace
from siegel_local.finite_quad import (
    FiniteQuadSpace,
    brute_count_isometries,
    brute_count_isotropic_subspaces,
    brute_count_isotropic_vectors,
    brute_order_orthogonal,
    count_isometries,
    count_isotropic_subspaces,
    count_isotropic_vectors,
    order_gl,
    order_orthogonal,
    reduce_mod_p,
    sgn,
    sgn_m,
)
from siegel_local.padic import PrimeCtx, diag_lattice


def _spaces(q, max_m, radical=False):
    for m in range(0, max_m + 1):
        for t in range(0, m + 1) if radical else (0,):
            for c in (1, -1) if m > t else (1,):
                yield FiniteQuadSpace(q, m, t, c)


@pytest.mark.parametrize("q", [3, 5])
def test_counts_match_enumeration(q):
    max_m = 4 if q == 3 else 3
    for V in _spaces(q, max_m):
        assert order_orthogonal(V) == brute_order_orthogonal(V)
        assert count_isotropic_vectors(V) == brute_count_isotropic_vectors(V)
        for b in range(V.m // 2 + 1):
            assert count_isotropic_subspaces(V, b) == brute_count_isotropic_subspaces(V, b)


def test_isometries_with_radical_source():
    q = 3
    for V in _spaces(q, 3):
        for U in _spaces(q, V.m, radical=True):
            if U.m and U.m <= V.m:
                assert count_isometries(U, V) == brute_count_isometries(U, V), (U, V)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_isotropic_line_table(q):
    V = FiniteQuadSpace
    assert count_isotropic_subspaces(V(q, 2, 0, 1), 1) == 2
    assert count_isotropic_subspaces(V(q, 2, 0, -1), 1) == 0
    assert count_isotropic_subspaces(V(q, 3, 0, 1), 1) == q + 1
    assert count_isotropic_subspaces(V(q, 4, 0, 1), 1) == (q + 1) ** 2
    assert count_isotropic_subspaces(V(q, 4, 0, -1), 1) == q * q + 1


def test_hyperbolic_plane_is_split():
    # x^2 - y^2 has chi0 = +1
    U = reduce_mod_p(diag_lattice(PrimeCtx(3), [1, 2]))
    assert U.chi0 == 1 and count_isotropic_vectors(U) == 2 * (3 - 1) + 1


@given(st.sampled_from([3, 5, 7]), st.integers(0, 6))
def test_order_gl(q, b):
    expected = 1
    for i in range(b):
        expected *= q ** b - q ** i
    assert order_gl(q, b) == expected


def test_signs_and_errors():
    V = FiniteQuadSpace(3, 4, 1, -1)
    assert sgn_m(V, 3) == -1 and sgn_m(V, 4) == 0
    with pytest.raises(DegenerateSpace):
        V.chi
    with pytest.raises(BadDimension):
        FiniteQuadSpace(3, 2, 3)
    with pytest.raises(ValueError):
        FiniteQuadSpace(3, 2, 2, -1)
    assert sgn(FiniteQuadSpace(3, 2, 0, -1)) == -1
