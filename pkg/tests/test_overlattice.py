import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from siegel_local.errors import NotIntegral
from siegel_local.geometry import hor_set
from siegel_local.hnf import contains
from siegel_local.overlattice import (
    cache_snapshot,
    enumerate_integral_overlattices,
    isotropic_radical_lines,
    lattice_data,
    load_cache,
    minimal_overlattices,
)
from siegel_local.padic import PrimeCtx, diag_lattice, fundamental_invariants, selfdual, val

from helpers import diagonal_grid


def _brute_overlattices(entries, p):
    """Integral subgroups of L^dual / L for a diagonal L, found by closing generator sets.

    Returns the multiset of (val, type) of the corresponding overlattices.
    """
    exps = [val(d, p) for d in entries]
    mods = [p ** a for a in exps]
    elems = list(itertools.product(*[range(m) for m in mods]))

    def norm(x):
        return sum(Fraction(c, m) ** 2 * d for c, m, d in zip(x, mods, entries))

    iso = [x for x in elems if norm(x).denominator % p]

    def add(x, y):
        return tuple((a + b) % m for a, b, m in zip(x, y, mods))

    def close(gens):
        S = {tuple(0 for _ in mods)}
        frontier = list(S)
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = add(s, g)
                    if t not in S:
                        S.add(t)
                        nxt.append(t)
            frontier = nxt
        return frozenset(S)

    found = {close([])}
    frontier = list(found)
    while frontier:
        nxt = []
        for S in frontier:
            for x in iso:
                if x in S:
                    continue
                T = close(list(S) + [x])
                if T not in found and all(norm(y).denominator % p for y in T):
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    v0 = sum(exps)
    out = []
    for S in found:
        k = val(len(S), p)
        out.append(v0 - 2 * k)
    return sorted(out)


@pytest.mark.parametrize("p", [3, 5])
def test_enumeration_matches_subgroup_search(p):
    for L in diagonal_grid(PrimeCtx(p), 3, 4):
        ours = sorted(e.val for e in enumerate_integral_overlattices(L))
        assert ours == _brute_overlattices([L.gram[i][i] for i in range(L.n)], p), L


def test_strata_of_111():
    es = enumerate_integral_overlattices(diag_lattice(PrimeCtx(3), [3, 3, 3]))
    assert sorted(e.t for e in es) == [1, 1, 1, 1, 3]
    assert sorted(e.ell for e in es) == [0, 1, 1, 1, 1]


def test_entries_are_overlattices():
    L = diag_lattice(PrimeCtx(3), [3, 9, 27])
    for e in enumerate_integral_overlattices(L):
        assert all(contains(e.basis, row, 3) for row in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        M = e.gram(L.gram)
        assert all(x.denominator % 3 for row in M for x in row)
        assert lattice_data(M, 3).val == e.val


def test_selfdual_has_only_itself():
    H = selfdual(PrimeCtx(5), 3, -1)
    assert len(enumerate_integral_overlattices(H)) == 1
    assert [e.t for e in hor_set(H, 1)] == [0]


def test_horizontal_set_of_p2_p():
    for p in (3, 5):
        L = diag_lattice(PrimeCtx(p), [p * p, p])
        assert len(enumerate_integral_overlattices(L)) == 2
        assert sorted(e.t for e in hor_set(L, 1)) == [1, 2]
        assert [e.t for e in hor_set(L, -1)] == [1]


def test_coisotropic_hor_is_empty():
    assert hor_set(diag_lattice(PrimeCtx(3), [3, 27]), -1) == []


def test_minimal_overlattices_index_p():
    L = diag_lattice(PrimeCtx(3), [3, 3, 3])
    mins = minimal_overlattices(L)
    assert len(mins) == 4 and all(e.ell == 1 for e in mins)
    assert len(isotropic_radical_lines(L.gram, 3)) == 4


def test_non_integral_rejected():
    with pytest.raises(NotIntegral):
        enumerate_integral_overlattices(diag_lattice(PrimeCtx(3), [Fraction(1, 3)]))


def test_persistent_cache_round_trip(monkeypatch):
    from siegel_local import overlattice

    monkeypatch.setattr(overlattice, "_persistent", {})
    monkeypatch.setattr(overlattice, "_record", False)
    L = diag_lattice(PrimeCtx(5), [5, 25])
    load_cache({})
    first = enumerate_integral_overlattices(L)
    snap = cache_snapshot()
    assert (5, L.gram) in snap
    overlattice._persistent.clear()
    load_cache(snap)
    assert enumerate_integral_overlattices(L) == first


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 10 ** 6))
def test_enumeration_invariant_under_basis_change(p, seed):
    from siegel_local.sampling import item_rng, random_lattice

    ctx = PrimeCtx(p)
    D = random_lattice(item_rng(seed, 0), ctx, 3, 5, scramble=False)
    L = random_lattice(item_rng(seed, 0), ctx, 3, 5)
    a = sorted((e.val, e.t, e.data.chi0) for e in enumerate_integral_overlattices(D))
    b = sorted((e.val, e.t, e.data.chi0) for e in enumerate_integral_overlattices(L))
    assert a == b
    assert fundamental_invariants(L) == fundamental_invariants(D)
