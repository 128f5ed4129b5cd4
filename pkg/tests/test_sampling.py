from hypothesis import given, settings, strategies as st

from siegel_local.padic import PrimeCtx, fundamental_invariants, val
from siegel_local.sampling import item_rng, random_exponents, random_lattice, random_vector
from siegel_local.selftest import GROUPS, run


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7]), st.integers(1, 4), st.integers(0, 8))
def test_random_lattice_shape_and_determinism(seed, index, p, n, max_val):
    ctx = PrimeCtx(p)
    a = random_lattice(item_rng(seed, index), ctx, n, max_val)
    b = random_lattice(item_rng(seed, index), ctx, n, max_val)
    assert a.gram == b.gram
    assert a.n == n and a.is_integral() and val(a.det, p) <= max_val
    assert fundamental_invariants(a).val == val(a.det, p)


def test_streams_are_independent_of_order():
    first = [random_vector(item_rng(5, i), 3, 10) for i in range(6)]
    again = [random_vector(item_rng(5, i), 3, 10) for i in reversed(range(6))][::-1]
    assert first == again
    assert len({tuple(v) for v in first}) > 1
    assert random_vector(item_rng(5, 0), 3, 10) != random_vector(item_rng(6, 0), 3, 10)


def test_random_exponents_bounds():
    rng = item_rng(1, 1)
    for _ in range(50):
        a = random_exponents(rng, 3, 5, min_exp=1)
        assert a == sorted(a) and sum(a) <= 5 and min(a) >= 1


def test_selftest_groups_pass():
    for g in GROUPS:
        rep = run(g)
        assert rep["failures"] == [] and rep["passed"] == rep["total"] > 0
