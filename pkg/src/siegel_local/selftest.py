"""Named example checks with known values, grouped for the `selftest` subcommand."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .counting import check_counting, mu_profile
from .finite_quad import (
    FiniteQuadSpace,
    brute_count_isometries,
    brute_count_isotropic_subspaces,
    brute_order_orthogonal,
    count_isometries,
    count_isotropic_subspaces,
    order_orthogonal,
)
from .geometry import (
    IndicatorCombo,
    check_local_modularity,
    fourier,
    hor_set,
    int_V_Lambda,
    intersection_number,
    primitive_degree,
    quasi_canonical_degree,
    type_two_overlattices,
    vertex_ctx,
)
from .overlattice import enumerate_integral_overlattices
from .padic import PrimeCtx, ambient_space, diag_lattice, hasse, identity, selfdual
from .poly import Poly
from .siegel import (
    check_functional_equation,
    den_flat_at_1,
    den_poly,
    fe_sign,
    pden,
    pden_by_weights,
    weight_factor,
    weight_poly,
    whittaker_value,
)

Check = Callable[[], bool]


def _c111(p: int) -> bool:
    ctx = PrimeCtx(p)
    L = diag_lattice(ctx, [p, p, p])
    return all(den_poly(L, e) == Poly([1, e * p, p, e]) for e in (1, -1))


def _strata_111() -> bool:
    ctx = PrimeCtx(3)
    es = enumerate_integral_overlattices(diag_lattice(ctx, [3, 3, 3]))
    return sorted(e.t for e in es) == [1] * 4 + [3]


def _pden_111(p: int) -> bool:
    L = diag_lattice(PrimeCtx(p), [p, p, p])
    return fe_sign(L, -1) == -1 and pden(L, -1) == 3 - p and pden_by_weights(L, -1) == 2 * (1 - p) + (p + 1)


def _embedded_sign() -> bool:
    ctx = PrimeCtx(3)
    V = ambient_space(4, -1, -1, ctx)
    L = diag_lattice(ctx, [V.gram[i][i] for i in range(3)])
    return fe_sign(L, -1) == -1


def _direct_sum_hasse() -> bool:
    from .padic import direct_sum, hilbert_symbol

    ctx = PrimeCtx(5)
    W1, W2 = diag_lattice(ctx, [2, 5]), diag_lattice(ctx, [10, 3])
    return hasse(direct_sum(W1, W2)) == hasse(W1) * hasse(W2) * hilbert_symbol(W1.det, W2.det, ctx)


def _coisotropic_vanishing() -> bool:
    ctx = PrimeCtx(3)
    Lf = diag_lattice(ctx, [3, 27])
    return den_flat_at_1(Lf, -1) == 0 and hor_set(Lf, -1) == []


def _whittaker_center() -> bool:
    L = diag_lattice(PrimeCtx(3), [3, 3, 3])
    return whittaker_value(L, -1, 0) == 0


def _finite_quad(q: int = 3) -> dict[str, Check]:
    V = FiniteQuadSpace
    return {
        "order_O_m0": lambda: order_orthogonal(V(q, 0)) == 1,
        "S1_m1": lambda: count_isotropic_subspaces(V(q, 1), 0) == 1 and brute_count_isotropic_subspaces(V(q, 2, 0, -1), 1) == 0,
        "S1_m2_split": lambda: count_isotropic_subspaces(V(q, 2, 0, 1), 1) == 2,
        "S1_m2_nonsplit": lambda: count_isotropic_subspaces(V(q, 2, 0, -1), 1) == 0,
        "S1_m3": lambda: count_isotropic_subspaces(V(q, 3), 1) == q + 1,
        "S1_m4_split": lambda: count_isotropic_subspaces(V(q, 4, 0, 1), 1) == (q + 1) ** 2,
        "S1_m4_nonsplit": lambda: count_isotropic_subspaces(V(q, 4, 0, -1), 1) == q * q + 1,
        "brute_order_O": lambda: all(order_orthogonal(V(q, m, 0, c)) == brute_order_orthogonal(V(q, m, 0, c)) for m in (1, 2, 3) for c in (1, -1)),
        "brute_isometries": lambda: count_isometries(V(q, 2, 1), V(q, 3)) == brute_count_isometries(V(q, 2, 1), V(q, 3)),
    }


def _vertex_examples() -> dict[str, Check]:
    ctx = PrimeCtx(3)
    vc = vertex_ctx(4, -1, 1, ctx)
    L = vc.lattice
    x_far = [Fraction(1, 9), 0, 0, 0]

    def unit_norm_point():
        G = L.gram
        for a in range(3):
            for b in range(3):
                x = [Fraction(a, 3), Fraction(b, 3), Fraction(1, 3), 0]
                norm = sum(G[i][i] * x[i] ** 2 for i in range(4))
                if norm.denominator == 1 and norm % 3:
                    return int_V_Lambda(vc, x) == 1
        return False

    return {
        "int_at_zero": lambda: int_V_Lambda(vc, [0, 0, 0, 0]) == 1 - 3,
        "int_unit_norm": unit_norm_point,
        "int_outside_dual": lambda: int_V_Lambda(vc, x_far) == 0,
        "type_two_count": lambda: len(type_two_overlattices(vc)) == 3 ** 2 + 1,
        "modularity_m4": lambda: check_local_modularity(vc)["passed"],
        "modularity_c_m6_d2": lambda: check_local_modularity(vertex_ctx(6, -1, 2, ctx), "c")["passed"],
        "fourier_selfdual": lambda: _fourier_selfdual(),
    }


def _fourier_selfdual() -> bool:
    H = selfdual(PrimeCtx(3), 4, 1)
    c = IndicatorCombo(H).add(identity(4), 1)
    return fourier(c).terms == c.terms


def _counting_examples() -> dict[str, Check]:
    out: dict[str, Check] = {}
    for p in (3, 5):
        q = p
        ctx = PrimeCtx(p)
        out[f"vertex_odd_p{p}"] = lambda ctx=ctx, q=q: _mu(diag_lattice(ctx, [q, q, q])) == (1, 0, q * q - 1)

        def odd_112(ctx=ctx, q=q):
            L = diag_lattice(ctx, [q, q, q * q])
            m = mu_profile(L)
            s = 1 if pow((-1) % q, (q - 1) // 2, q) == 1 else -1  # chi of <e1, e2> with unit entries 1, 1
            zs = m.mu_zero_plus if s == 1 else m.mu_zero_minus
            zo = m.mu_zero_minus if s == 1 else m.mu_zero_plus
            return m.mu_zero == q - 1 and zs == q - 1 and zo == 0

        out[f"odd_112_p{p}"] = odd_112
        out[f"even_112_base_p{p}"] = lambda ctx=ctx, q=q: _mu(diag_lattice(ctx, [q, q, q, q * q])) == (1, q - 1, q ** 3 - q)
        out[f"counting_base_p{p}"] = lambda ctx=ctx, q=q: all(
            check_counting(diag_lattice(ctx, d), s)["passed"]
            for d in ([q, q, q], [q, q, q * q])
            for s in (1,)
        )
    return out


def _mu(L) -> tuple[int, int, int]:
    m = mu_profile(L)
    return m.mu_plus, m.mu_zero, m.mu_minus


def example_checks() -> dict[str, Check]:
    checks: dict[str, Check] = {
        "weight_t0": lambda: weight_poly(0, 0, 1, 3) == Poly([1]) and weight_factor(0, 0, 1, 3) == 0,
        "weight_t1": lambda: all(weight_poly(1, 1, e, 3) == Poly([1, e]) and weight_factor(1, 1, e, 3) == -e for e in (1, -1)),
        "strata_111": _strata_111,
        "embedded_sign": _embedded_sign,
        "direct_sum_hasse": _direct_sum_hasse,
        "coisotropic_vanishing": _coisotropic_vanishing,
        "whittaker_center": _whittaker_center,
        "fe_111": lambda: check_functional_equation(diag_lattice(PrimeCtx(3), [3, 3, 3]), -1)["sign"] == -1,
        "quasi_canonical": lambda: quasi_canonical_degree(0, False, 3) == 1 and quasi_canonical_degree(1, False, 3) == 4 and quasi_canonical_degree(2, True, 3) == 18,
        "primitive_selfdual": lambda: primitive_degree(diag_lattice(PrimeCtx(3), [1, 1]), 1) == 1,
        "primitive_t1_val2": lambda: primitive_degree(diag_lattice(PrimeCtx(3), [1, 9]), 1) == 4,
        "int_111": lambda: all(intersection_number(diag_lattice(PrimeCtx(p), [p, p, p]), -1) == 3 - p for p in (3, 5, 7)),
    }
    for p in (3, 5, 7):
        checks[f"den_111_p{p}"] = lambda p=p: _c111(p)
        checks[f"pden_111_p{p}"] = lambda p=p: _pden_111(p)
    checks.update(_vertex_examples())
    checks.update(_counting_examples())
    checks.update({f"finite_quad_{k}": v for k, v in _finite_quad().items()})
    return checks


GROUPS: dict[str, Callable[[], dict[str, Check]]] = {
    "examples": example_checks,
    "finite-quad": _finite_quad,
}


def run(group: str = "examples") -> dict:
    checks = GROUPS[group]()
    failures = []
    for name, fn in checks.items():
        try:
            ok = bool(fn())
        except Exception as e:  # report, do not abort the run
            ok = False
            name = f"{name}: {type(e).__name__}: {e}"
        if not ok:
            failures.append(name)
    return {"group": group, "total": len(checks), "passed": len(checks) - len(failures), "failures": failures}


__all__ = ["GROUPS", "example_checks", "run"]
