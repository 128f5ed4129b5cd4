"""Acceptance criteria 1 to 10, each reported as one PASS/FAIL line in the terminal summary."""

from fractions import Fraction

import numpy as np
import pytest

from siegel_local.counting import (
    admissible,
    admissible_perp_norms,
    check_counting,
    mu_profile,
    pden_perp_jump,
    type_t_grid,
)
from siegel_local.errors import Inadmissible
from siegel_local.finite_quad import (
    FiniteQuadSpace,
    brute_count_isometries,
    brute_count_isotropic_subspaces,
    brute_order_orthogonal,
    count_isometries,
    count_isotropic_subspaces,
    order_orthogonal,
)
from siegel_local.geometry import (
    check_local_modularity,
    generic_fiber_check,
    horizontal_degree,
    is_coisotropic,
    pden_difference_check,
    t_max,
    type_two_overlattices,
    vertex_ctx,
)
from siegel_local.oracle import density_oracle
from siegel_local.padic import (
    PrimeCtx,
    QuadLattice,
    ambient_space,
    congruent,
    det,
    diag_lattice,
    fundamental_invariants,
    legendre,
    selfdual,
    val,
)
from siegel_local.poly import Poly
from siegel_local.sampling import item_rng, random_lattice
from siegel_local.siegel import (
    check_functional_equation,
    check_functional_equation_flat,
    den_poly,
    fe_sign,
    induction_step,
    nor_poly,
    pden,
)

from helpers import diagonal_grid

pytestmark = pytest.mark.acceptance

SEED = 20240611


def test_c01_oracle_equivalence(criterion):
    bad, cases = [], 0
    for p in (3, 5):
        ctx = PrimeCtx(p)
        for L in diagonal_grid(ctx, 3, 4):
            for eps in (1, -1):
                for k in (0, 1):
                    X = Fraction(1, p ** k)
                    oracle = density_oracle(selfdual(ctx, L.n + 1 + 2 * k, eps), L).density
                    closed = den_poly(L, eps)(X) * nor_poly(L.n, eps, p)(X)
                    cases += 1
                    if oracle != closed:
                        bad.append((p, L.gram, eps, k))
    criterion(1, not bad, f"{cases} cases, {len(bad)} mismatches")


def test_c02_rank_three_example(criterion):
    bad = []
    for p in (3, 5, 7):
        L = diag_lattice(PrimeCtx(p), [p, p, p])
        for eps in (1, -1):
            if den_poly(L, eps) != Poly([1, eps * p, p, eps]):
                bad.append(("den", p, eps))
        if pden(L, -1) != 3 - p:
            bad.append(("pden", p))
    criterion(2, not bad, f"p in (3, 5, 7), failures {bad}")


def test_c03_functional_equations(criterion):
    bad, cases = [], 0
    for p in (3, 5, 7):
        ctx = PrimeCtx(p)
        for i in range(500):
            rng = item_rng(SEED + p, i)
            L = random_lattice(rng, ctx, int(rng.integers(1, 5)), 6)
            eps = int(rng.choice([1, -1]))
            cases += 1
            try:
                rep = check_functional_equation(L, eps)
                check_functional_equation_flat(L, eps)
            except Exception as e:
                bad.append((p, i, type(e).__name__))
                continue
            # constant term is 1, so the top coefficient is the sign
            top = den_poly(L, eps).padded(val(L.det, p) + 1)[-1]
            if top != rep["sign"] or rep["sign"] != fe_sign(L, eps):
                bad.append((p, i, "sign"))
    criterion(3, not bad, f"{cases} lattices, {len(bad)} failures")


def test_c04_induction(criterion):
    bad = []
    for i in range(200):
        rng = item_rng(SEED, i)
        p = (3, 5)[i % 2]
        ctx = PrimeCtx(p)
        Lf = random_lattice(rng, ctx, int(rng.integers(1, 4)), 5)
        a = fundamental_invariants(Lf).a
        k = a[-1] + 1 + int(rng.integers(0, 2))
        x = Fraction(int(rng.choice([1, ctx.r])) * p ** k)
        eps = int(rng.choice([1, -1]))
        try:
            rep = induction_step(Lf, x, eps, ks=(0, 1, 2))
            assert [r["k"] for r in rep["naive"]] == [0, 1, 2]
        except Exception as e:
            bad.append((i, type(e).__name__))
    criterion(4, not bad, f"200 pairs, {len(bad)} failures")


def _sublattice(rng, V: QuadLattice, n: int) -> QuadLattice:
    while True:
        B = [[Fraction(int(x)) for x in row] for row in rng.integers(-3, 4, size=(V.n, n))]
        g = congruent(V.gram, B)
        if det(g) != 0:
            return QuadLattice(V.ctx, g)


def test_c05_embedding_sign(criterion):
    bad = {"nonsplit": 0, "split": 0}
    for i in range(200):
        rng = item_rng(SEED + 5, i)
        p = (3, 5)[i % 2]
        ctx = PrimeCtx(p)
        while True:
            n = int(rng.integers(1, 4))
            eps = int(rng.choice([1, -1]))
            if (n, eps) != (1, 1):  # a split plane has Hasse invariant +1
                break
        if fe_sign(_sublattice(rng, ambient_space(n + 1, eps, -1, ctx), n), eps) != -1:
            bad["nonsplit"] += 1
        if fe_sign(_sublattice(rng, selfdual(ctx, n + 1, eps), n), eps) != 1:
            bad["split"] += 1
    criterion(5, not any(bad.values()), f"200 + 200 lattices, failures {bad}")


def test_c06_horizontal_degrees(criterion):
    bad, aniso, iso = [], 0, 0
    for p in (3, 5):
        for Lf in diagonal_grid(PrimeCtx(p), 3, 5):
            for eps in (1, -1):
                if is_coisotropic(Lf, eps):
                    if not admissible_perp_norms(Lf, eps, 8):
                        continue  # not inside the ambient space
                    iso += 1
                    if horizontal_degree(Lf, eps) != 0:
                        bad.append((p, Lf.gram, eps, "coisotropic"))
                    continue
                aniso += 1
                try:
                    if not generic_fiber_check(Lf, eps)["passed"]:
                        bad.append((p, Lf.gram, eps, "degree"))
                    pden_difference_check(Lf, eps)
                except Exception as e:
                    bad.append((p, Lf.gram, eps, type(e).__name__))
    criterion(6, not bad, f"{aniso} co-anisotropic, {iso} co-isotropic, {len(bad)} failures")


def test_c07_local_modularity(criterion):
    checked, bad, type_two = [], [], []
    for p in (3, 5):
        ctx = PrimeCtx(p)
        for m in (4, 5, 6):
            for eps in (1, -1):
                if t_max(m, eps) < 4:
                    continue
                try:
                    vc = vertex_ctx(m, eps, 1, ctx)
                except Inadmissible:
                    continue
                checked.append((p, m, eps))
                if not check_local_modularity(vc)["passed"]:
                    bad.append((p, m, eps))
                if vc.W.chi0 == -1:
                    type_two.append(len(type_two_overlattices(vc)) == p * p + 1)
    c_ok = check_local_modularity(vertex_ctx(6, -1, 2, PrimeCtx(3)), "c")["passed"]
    ok = not bad and c_ok and bool(type_two) and all(type_two) and {m for _, m, _ in checked} == {4, 5, 6}
    criterion(7, ok, f"{len(checked)} vertex lattices, c-combo {c_ok}, type-2 counts {sum(type_two)}/{len(type_two)}")


def test_c08_counting(criterion):
    cases, bad = 0, []
    for p in (3, 5):
        ctx = PrimeCtx(p)
        for t in (2, 3, 4):
            for L in type_t_grid(t, t + 4, ctx):
                for s in (1, -1):
                    if admissible(L, s):
                        cases += 1
                        try:
                            check_counting(L, s)
                        except Exception as e:
                            bad.append((p, L.gram, s, type(e).__name__))
    tables = []
    for q in (3, 5):
        ctx = PrimeCtx(q)
        m = mu_profile(diag_lattice(ctx, [q, q, q]))
        tables.append((m.mu_plus, m.mu_zero, m.mu_minus) == (1, 0, q * q - 1))
        m = mu_profile(diag_lattice(ctx, [q, q, q * q]))
        same = m.mu_zero_plus if legendre(-1, q) == 1 else m.mu_zero_minus
        other = m.mu_zero_minus if legendre(-1, q) == 1 else m.mu_zero_plus
        tables.append(m.mu_zero == q - 1 and same == q - 1 and other == 0)
        m = mu_profile(diag_lattice(ctx, [q, q, q, q * q]))
        tables.append((m.mu_plus, m.mu_zero, m.mu_minus) == (1, q - 1, q ** 3 - q))
    ok = not bad and all(tables) and cases > 0
    criterion(8, ok, f"{cases} admissible pairs, {len(bad)} nonzero, base tables {sum(tables)}/{len(tables)}")


def _jump_lattices(ctx: PrimeCtx, coisotropic: bool, rng) -> list:
    pool = []
    for Lf in diagonal_grid(ctx, 3, 6):
        for eps in (1, -1):
            if is_coisotropic(Lf, eps) != coisotropic:
                continue
            norms = admissible_perp_norms(Lf, eps, fundamental_invariants(Lf).a[-1] + 12)
            if len(norms) >= 10:
                pool.append((Lf, eps, norms))
    idx = sorted(rng.choice(len(pool), size=min(20, len(pool)), replace=False))
    return [pool[i] for i in idx]


def test_c09_jump_constancy(criterion):
    bad, counts = [], []
    rng = np.random.default_rng(SEED)
    for p in (3, 5):
        ctx = PrimeCtx(p)
        for coiso in (False, True):
            picked = _jump_lattices(ctx, coiso, rng)
            counts.append(len(picked))
            for Lf, eps, norms in picked:
                chosen = [norms[i] for i in sorted(rng.choice(len(norms), size=10, replace=False))]
                values = {pden_perp_jump(Lf, x, eps) for x in chosen}
                if len(values) != 1 or (not coiso and values != {0}):
                    bad.append((p, Lf.gram, eps, coiso))
    ok = not bad and all(c == 20 for c in counts)
    criterion(9, ok, f"lattices per (p, kind) {counts}, {len(bad)} failures")


def test_c10_finite_field(criterion):
    q, bad = 3, []
    spaces = [FiniteQuadSpace(q, m, 0, c) for m in range(0, 5) for c in ((1,) if m == 0 else (1, -1))]
    for V in spaces:
        if order_orthogonal(V) != brute_order_orthogonal(V):
            bad.append(("O", V.m, V.chi0))
        for b in range(0, V.m // 2 + 1):
            if count_isotropic_subspaces(V, b) != brute_count_isotropic_subspaces(V, b):
                bad.append(("S", V.m, V.chi0, b))
        for U in spaces:
            if 0 < U.m <= V.m and count_isometries(U, V) != brute_count_isometries(U, V):
                bad.append(("I", U.m, U.chi0, V.m, V.chi0))
    S1 = {
        (2, 1): 2,
        (2, -1): 0,
        (3, 1): q + 1,
        (3, -1): q + 1,
        (4, 1): (q + 1) ** 2,
        (4, -1): q * q + 1,
    }
    for (m, c), want in S1.items():
        if count_isotropic_subspaces(FiniteQuadSpace(q, m, 0, c), 1) != want:
            bad.append(("S1", m, c))
    criterion(10, not bad, f"{len(spaces)} spaces at q = 3, failures {bad}")
