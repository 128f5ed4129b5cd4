"""Lattice-side quantities attached to special cycles.

Horizontal lattices and their degrees, the intersection number API, the
vertex-lattice functions and their indicator-combination form, and an exact
Fourier transform on finite combinations of lattice indicators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm

import numpy as np

from .errors import IdentityViolated, Inadmissible, NotHorizontal, NotIntegral, PreconditionViolated, PropertyViolated, RankMismatch, WrongType
from .finite_quad import FiniteQuadSpace
from .hnf import canonical_basis, hnf_mod, saturate
from .overlattice import OverlatticeEntry, enumerate_integral_overlattices, lattice_data, minimal_overlattices
from .padic import (
    PrimeCtx,
    QuadLattice,
    as_matrix,
    chi,
    congruent,
    det,
    diag_lattice,
    direct_sum,
    fundamental_invariants,
    hasse,
    identity,
    inverse,
    mat_mul,
    rank_of,
    selfdual,
    transpose,
    val,
    vval,
)
from .qsqrt import QSqrt
from .siegel import den_flat_at_1, fe_sign, pden

# horizontal lattices -----------------------------------------------------------


def is_coisotropic(L_flat: QuadLattice, eps: int) -> bool:
    return chi(L_flat) == eps


def _check_rank(M: QuadLattice, n: int | None):
    if n is not None and M.n != n - 1:
        raise RankMismatch(f"expected rank {n - 1}, got {M.n}")


def is_horizontal(M_flat: QuadLattice, eps: int, n: int | None = None) -> bool:
    _check_rank(M_flat, n)
    if not M_flat.is_integral():
        return False
    d = lattice_data(M_flat.gram, M_flat.p)
    return _horizontal_data(d, eps)


def _horizontal_data(d, eps: int) -> bool:
    if d.t <= 1:
        return True
    return d.t == 2 and eps * d.sgn(d.n) == 1


def hor_set(L_flat: QuadLattice, eps: int) -> list[OverlatticeEntry]:
    if not L_flat.is_integral():
        raise NotIntegral("lattice is not integral")
    return [e for e in enumerate_integral_overlattices(L_flat) if _horizontal_data(e.data, eps)]


def quasi_canonical_degree(s: int, ramified: bool, q: int) -> int:
    if s < 0:
        raise ValueError("s must be nonnegative")
    if ramified:
        return 2 if s == 0 else 2 * q ** s
    return 1 if s == 0 else q ** s + q ** (s - 1)


def _primitive_degree_data(t: int, v: int, c: int, q: int) -> int:
    h = Fraction(q) ** (v // 2)
    if c != 0:
        table = {0: Fraction(1), 1: 1 + Fraction(1, q), 2: 2 * (1 + Fraction(1, q))}
        out = h * table[t]
    else:
        out = 2 * h * {1: 1, 2: 2}[t]
    if out.denominator != 1:
        raise ArithmeticError(f"non-integral primitive degree {out}")
    return int(out)


def primitive_degree(M_flat: QuadLattice, eps: int) -> int:
    if not is_horizontal(M_flat, eps):
        raise NotHorizontal("lattice is not horizontal")
    d = lattice_data(M_flat.gram, M_flat.p)
    return _primitive_degree_data(d.t, d.val, d.chi, M_flat.p)


def horizontal_degree(L_flat: QuadLattice, eps: int) -> int:
    return sum(_primitive_degree_data(e.t, e.val, e.data.chi, L_flat.p) for e in hor_set(L_flat, eps))


def generic_fiber_check(L_flat: QuadLattice, eps: int) -> dict:
    """Compare the horizontal degree with Den-flat(1) (doubled when chi = 0)."""
    deg = horizontal_degree(L_flat, eps)
    f = den_flat_at_1(L_flat, eps)
    expected = f if chi(L_flat) else 2 * f
    return {"horizontal_degree": deg, "den_flat_at_1": f, "expected": expected, "passed": deg == expected}


def is_realizable(L: QuadLattice, eps: int) -> bool:
    """Whether L embeds into the ambient space of rank n+1, class eps and Hasse invariant -1."""
    return fe_sign(L, eps) == -1


def intersection_number(L: QuadLattice, eps: int) -> int:
    """Arithmetic intersection number, computed as the central derivative.

    Zero for non-integral L and for L that do not fit in the ambient space.
    """
    if not L.is_integral() or not is_realizable(L, eps):
        return 0
    v = pden(L, eps)
    if v.denominator != 1:
        raise ArithmeticError(f"non-integral central derivative {v}")
    return int(v)


def t_max(m: int, eps: int) -> int:
    if m % 2:
        return m - 1
    return m - 2 if eps == 1 else m


def choose_perpendicular_norm(L_flat: QuadLattice, eps: int, min_val: int | None = None):
    """A norm (x, x) with val(x) > a_max such that L_flat + <x> fits in the ambient space."""
    a = fundamental_invariants(L_flat).a
    lo = (a[-1] if a else 0) + 1 if min_val is None else min_val
    p = L_flat.p
    for k in (lo, lo + 1):
        for u in (1, L_flat.ctx.r):
            x = Fraction(u * p ** k)
            if fe_sign(direct_sum(L_flat, diag_lattice(L_flat.ctx, [x])), eps) == -1:
                return x
    raise PreconditionViolated("no admissible perpendicular vector")


def pden_difference_check(L_flat: QuadLattice, eps: int, x_norm=None) -> dict:
    """pden(L) - pden(L~) against the horizontal sum, for co-anisotropic L_flat."""
    if is_coisotropic(L_flat, eps):
        raise PreconditionViolated("needs a co-anisotropic lattice")
    x = choose_perpendicular_norm(L_flat, eps) if x_norm is None else Fraction(x_norm)
    p = L_flat.p
    L = direct_sum(L_flat, diag_lattice(L_flat.ctx, [x]))
    Lt = direct_sum(L_flat, diag_lattice(L_flat.ctx, [x / p ** 2]))
    diff = pden(L, eps) - pden(Lt, eps)
    c = chi(L_flat)
    hsum = Fraction(0)
    for e in hor_set(L_flat, eps):
        h = Fraction(p) ** (e.val // 2)
        if c:
            hsum += h * {0: 1, 1: 1 + Fraction(1, p), 2: 2 * (1 + Fraction(1, p))}[e.t]
        else:
            hsum += h * {1: 1, 2: 2}[e.t]
    f = den_flat_at_1(L_flat, eps)
    expected = f if c else 2 * f
    horizontal = hsum if c else 2 * hsum
    report = {
        "x_norm": str(x),
        "difference": str(diff),
        "den_flat_at_1_route": str(expected),
        "horizontal_route": str(horizontal),
        "passed": diff == expected == horizontal,
    }
    if not report["passed"]:
        raise IdentityViolated("central derivative difference mismatch", report)
    return report


def saturated_horizontal_property(trials: int, ctx: PrimeCtx, m: int, eps: int, rng=None) -> dict:
    """Random saturated rank m-2 sublattices of the self-dual lattice are horizontal."""
    import random

    rng = rng or random.Random(0)
    H = selfdual(ctx, m, eps)
    failures = []
    for _ in range(trials):
        while True:
            vecs = [[rng.randrange(-ctx.p ** 2, ctx.p ** 2 + 1) for _ in range(m)] for _ in range(m - 2)]
            if rank_of(vecs) == m - 2:
                break
        basis = saturate(vecs, ctx.p)
        g = congruent(H.gram, transpose(basis))
        if det(g) == 0:
            continue
        M = QuadLattice(ctx, g)
        if not is_horizontal(M, eps):
            failures.append([[str(x) for x in row] for row in g])
    report = {"trials": trials, "failures": failures, "passed": not failures}
    if failures:
        raise PropertyViolated(f"{len(failures)} saturated sublattices are not horizontal")
    return report


# indicator combinations ------------------------------------------------------------

Key = tuple[tuple[Fraction, ...], ...]


def _dual_rows(B, G) -> Key:
    BG = mat_mul(as_matrix(B), G)
    return tuple(tuple(r) for r in transpose(inverse(BG)))


@dataclass
class IndicatorCombo:
    """Finite sum of coefficient * indicator(lattice); lattices are row bases in ambient coordinates."""

    ambient: QuadLattice
    terms: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.ambient.p

    def _key(self, basis) -> Key:
        return canonical_basis(basis, (), self.q)

    def add(self, basis, coeff=1) -> "IndicatorCombo":
        k = self._key(basis)
        c = self.terms.get(k, QSqrt(self.q)) + coeff
        if c:
            self.terms[k] = c
        else:
            self.terms.pop(k, None)
        return self

    def copy(self) -> "IndicatorCombo":
        return IndicatorCombo(self.ambient, dict(self.terms))

    def __add__(self, other: "IndicatorCombo") -> "IndicatorCombo":
        out = self.copy()
        for k, c in other.terms.items():
            out.add(k, c)
        return out

    def scale(self, c) -> "IndicatorCombo":
        out = IndicatorCombo(self.ambient)
        for k, v in self.terms.items():
            out.add(k, v * c)
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def lattice_val(self, key: Key) -> int:
        return val(det(congruent(self.ambient.gram, transpose(key))), self.q)

    def evaluate(self, x) -> QSqrt:
        from .hnf import contains

        total = QSqrt(self.q)
        for k, c in self.terms.items():
            if contains(k, x, self.q):
                total = total + c
        return total

    def as_dict(self) -> dict:
        return {
            "terms": [
                {"basis": [[str(v) for v in row] for row in k], "coeff": c.as_json()}
                for k, c in sorted(self.terms.items())
            ]
        }


def fourier(combo: IndicatorCombo) -> IndicatorCombo:
    """1_L -> q^(-val(L)/2) 1_{L dual}."""
    out = IndicatorCombo(combo.ambient)
    G = combo.ambient.gram
    for k, c in combo.terms.items():
        out.add(_dual_rows(k, G), c * QSqrt.power(combo.q, -combo.lattice_val(k)))
    return out


def _sum_lattice(keys, p) -> Key:
    keys = list(keys)
    return canonical_basis(keys[0], [v for k in keys[1:] for v in k], p)


def _coset_points(U: Key, J: Key, p: int):
    """Integer representatives z (points z / p^s) of U / J, plus s."""
    Uinv = inverse(U)
    C = mat_mul(J, Uinv)
    n = len(U)
    rows = [[int(x) for x in r] for r in C]
    if any(x.denominator != 1 for r in C for x in r):
        raise ArithmeticError("J is not contained in U")
    D = abs(int(det(C)))
    H = hnf_mod(rows, n, D) if D > 1 else [[int(i == j) for j in range(n)] for i in range(n)]
    diag = [H[i][i] for i in range(n)]
    s = max(0, -min(vval(x, p) if x else 0 for r in U for x in r))
    scale = p ** s
    Uint = np.array([[int(x * scale) for x in r] for r in U], dtype=object)
    coeffs = np.array(list(itertools.product(*[range(d) for d in diag])), dtype=object).reshape(-1, n)
    return coeffs.dot(Uint), s


def _membership(key: Key, Z: np.ndarray, s: int, p: int) -> np.ndarray:
    Binv = inverse(key)
    k = max(0, -min(vval(x, p) if x else 0 for r in Binv for x in r))
    # Binv entries have p-power denominators
    M = np.array([[int(x * p ** k) for x in r] for r in Binv], dtype=object)
    mod = p ** (s + k)
    prod = Z.dot(M) % mod
    return np.all(prod == 0, axis=1)


def evaluate_on_points(combo: IndicatorCombo, Z: np.ndarray, s: int) -> list[QSqrt]:
    q = combo.q
    keys = list(combo.terms)
    if not keys:
        return [QSqrt(q)] * len(Z)
    coeffs = [combo.terms[k] for k in keys]
    den = lcm(*[c.a.denominator for c in coeffs], *[c.b.denominator for c in coeffs])
    A = np.zeros(len(Z), dtype=object)
    Bv = np.zeros(len(Z), dtype=object)
    for k, c in zip(keys, coeffs):
        mask = _membership(k, Z, s, q)
        A = A + mask.astype(object) * int(c.a * den)
        Bv = Bv + mask.astype(object) * int(c.b * den)
    return [QSqrt(q, Fraction(int(a), den), Fraction(int(b), den)) for a, b in zip(A, Bv)]


def combos_equal(a: IndicatorCombo, b: IndicatorCombo, witness: bool = False):
    """Pointwise equality, decided on the cosets of J in U.

    U is the sum and J the intersection of all term lattices; every indicator
    is constant on J-cosets and vanishes off U.
    """
    diff = a - b
    if not diff.terms:
        return (True, None) if witness else True
    p = diff.q
    G = diff.ambient.gram
    keys = list(diff.terms)
    U = _sum_lattice(keys, p)
    J = _dual_rows(_sum_lattice([_dual_rows(k, G) for k in keys], p), G)
    J = canonical_basis(J, (), p)
    Z, s = _coset_points(U, J, p)
    vals = evaluate_on_points(diff, Z, s)
    for z, v in zip(Z, vals):
        if v:
            w = [str(Fraction(int(x), p ** s)) for x in z]
            return (False, {"point": w, "difference": str(v)}) if witness else False
    return (True, None) if witness else True


# vertex lattices -------------------------------------------------------------------


@dataclass(frozen=True)
class VertexLatticeCtx:
    lattice: QuadLattice
    d: int
    m: int
    eps: int

    @property
    def type(self) -> int:
        return 2 * self.d + 2

    @property
    def W(self) -> FiniteQuadSpace:
        """Lambda^dual / Lambda as a quadratic space over F_p."""
        return FiniteQuadSpace(self.lattice.p, self.type, 0, _w_class(self.lattice))


def _w_class(L: QuadLattice) -> int:
    """Discriminant class of Lambda^dual / Lambda with the form p (x, y)."""
    from .padic import diagonal_entries, square_class

    p = L.p
    units = [x / p for x in diagonal_entries(L) if val(x, p) == 1]
    t = len(units)
    prod = reduce(lambda a, b: a * b, units, Fraction(1))
    # the form on Lambda^dual / Lambda is p * (x, y) evaluated on p^-1 e_i: u_i
    return square_class((-1) ** (t * (t - 1) // 2) * prod, p) if t else 1


def vertex_lattice(m: int, eps: int, t: int, ctx: PrimeCtx) -> QuadLattice:
    """A vertex lattice of type t in the rank-m space with class eps and Hasse invariant -1."""
    if t % 2 or not 2 <= t <= t_max(m, eps):
        raise Inadmissible(f"type {t} not allowed for m={m}, eps={eps}")
    p, r = ctx.p, ctx.r
    for units in itertools.product((1, r), repeat=m):
        entries = [Fraction(u) for u in units[: m - t]] + [Fraction(u * p) for u in units[m - t:]]
        L = diag_lattice(ctx, entries)
        if chi(L) == eps and hasse(L) == -1:
            return L
    raise Inadmissible(f"no vertex lattice of type {t} for m={m}, eps={eps}")


def vertex_ctx(m: int, eps: int, d: int, ctx: PrimeCtx) -> VertexLatticeCtx:
    return VertexLatticeCtx(vertex_lattice(m, eps, 2 * d + 2, ctx), d, m, eps)


def _check_vertex(lat: QuadLattice, t: int):
    from .padic import is_vertex

    ok, tt = is_vertex(lat)
    if not ok or tt != t:
        raise WrongType(f"expected a vertex lattice of type {t}")


def int_V_Lambda(vc: VertexLatticeCtx, x) -> int:
    """Case table on the ambient space: 1 - q on Lambda, 1 on integral points of Lambda^dual minus Lambda."""
    if vc.d != 1:
        raise WrongType("needs a type 4 vertex lattice")
    L = vc.lattice
    _check_vertex(L, 4)
    p = L.p
    x = [Fraction(v) for v in x]
    if all(v.denominator % p for v in x):
        return 1 - p
    Gx = [sum((L.gram[i][j] * x[j] for j in range(L.n)), Fraction(0)) for i in range(L.n)]
    if any(v.denominator % p == 0 for v in Gx):
        return 0
    norm = sum((x[i] * Gx[i] for i in range(L.n)), Fraction(0))
    return 1 if vval(norm, p) >= 0 else 0


def _int_combo_for(ambient: QuadLattice, basis) -> IndicatorCombo:
    q = ambient.p
    basis = as_matrix(basis)
    sub = QuadLattice(ambient.ctx, congruent(ambient.gram, transpose(basis)))
    out = IndicatorCombo(ambient)
    out.add(basis, -q * (1 + q))
    for e in minimal_overlattices(sub):
        out.add(mat_mul(e.basis, basis), 1)
    return out


def type_two_overlattices(vc: VertexLatticeCtx) -> list[OverlatticeEntry]:
    if vc.d != 1:
        raise WrongType("needs a type 4 vertex lattice")
    return minimal_overlattices(vc.lattice)


def int_V_Lambda_combo(vc: VertexLatticeCtx) -> IndicatorCombo:
    if vc.d != 1:
        raise WrongType("needs a type 4 vertex lattice")
    _check_vertex(vc.lattice, 4)
    return _int_combo_for(vc.lattice, identity(vc.lattice.n))


def c_factor(d: int, q: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, d):
        out *= 1 - q ** i
    return out


def c_prime_factor(d: int, q: int) -> Fraction:
    out = Fraction(1)
    for i in range(2, d + 1):
        out *= 1 + q ** (i + 1)
    return out


def c_V_Lambda_combo(vc: VertexLatticeCtx) -> IndicatorCombo:
    L = vc.lattice
    _check_vertex(L, vc.type)
    q = L.p
    out = IndicatorCombo(L)
    for e in enumerate_integral_overlattices(L):
        if e.ell == vc.d - 1:
            out = out + _int_combo_for(L, e.basis)
    return out.scale(c_factor(vc.d, q) / c_prime_factor(vc.d, q))


def c_V_Lambda_value(vc: VertexLatticeCtx, x) -> Fraction:
    """Case table c(d) (1 - q^d) / c(d) / 0 for the c-function."""
    L = vc.lattice
    p = L.p
    c = c_factor(vc.d, p)
    x = [Fraction(v) for v in x]
    if all(v.denominator % p for v in x):
        return c * (1 - p ** vc.d)
    Gx = [sum((L.gram[i][j] * x[j] for j in range(L.n)), Fraction(0)) for i in range(L.n)]
    if any(v.denominator % p == 0 for v in Gx):
        return Fraction(0)
    norm = sum((x[i] * Gx[i] for i in range(L.n)), Fraction(0))
    return c if vval(norm, p) >= 0 else Fraction(0)


def pointwise_check(vc: VertexLatticeCtx, combo: IndicatorCombo, table) -> dict:
    """Compare combo with a case table on p^-1 Lambda / Lambda (both sides are Lambda-invariant)."""
    L = vc.lattice
    p = L.p
    n = L.n
    Z = np.array(list(itertools.product(range(p), repeat=n)), dtype=object).reshape(-1, n)
    vals = evaluate_on_points(combo, Z, 1)
    checked = 0
    for z, v in zip(Z, vals):
        x = [Fraction(int(c), p) for c in z]
        want = table(vc, x)
        if v != want:
            report = {"point": [str(c) for c in x], "combo": str(v), "table": str(want), "passed": False}
            raise IdentityViolated("combination disagrees with the case table", report)
        checked += 1
    return {"points": checked, "passed": True}


def check_local_modularity(vc: VertexLatticeCtx, which: str = "int") -> dict:
    """fourier(combo) == -combo, decided exactly."""
    combo = int_V_Lambda_combo(vc) if which == "int" else c_V_Lambda_combo(vc)
    gamma = -1
    ok, wit = combos_equal(fourier(combo), combo.scale(gamma), witness=True)
    report = {
        "m": vc.m,
        "eps": vc.eps,
        "d": vc.d,
        "p": vc.lattice.p,
        "function": which,
        "terms": len(combo.terms),
        "weil_constant": gamma,
        "passed": ok,
    }
    if not ok:
        report["witness"] = wit
        raise IdentityViolated("local modularity fails", report)
    return report


__all__ = [
    "IndicatorCombo",
    "VertexLatticeCtx",
    "c_V_Lambda_combo",
    "c_V_Lambda_value",
    "c_factor",
    "c_prime_factor",
    "check_local_modularity",
    "choose_perpendicular_norm",
    "combos_equal",
    "evaluate_on_points",
    "fourier",
    "generic_fiber_check",
    "hor_set",
    "horizontal_degree",
    "int_V_Lambda",
    "int_V_Lambda_combo",
    "intersection_number",
    "is_coisotropic",
    "is_horizontal",
    "is_realizable",
    "pden_difference_check",
    "pointwise_check",
    "primitive_degree",
    "quasi_canonical_degree",
    "saturated_horizontal_property",
    "t_max",
    "type_two_overlattices",
    "vertex_ctx",
    "vertex_lattice",
]
