"""Coset counts of type-t lattices, the weighted identities they satisfy, and the jump sum.

For L of rank t and type t, the counts classify cosets x + L by val((x, x)):
mu_plus counts x in p L^dual with val >= 1, mu_zero those with val = 0, and
mu_minus the x in L^dual with val >= 0 that are not in p L^dual. Coset
representatives are x = sum lam_i p^(shift - a_i) e_i in a diagonal basis.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import kernels
from .errors import IdentityViolated, Inadmissible, InadmissiblePair, NotIntegral, PreconditionViolated, WrongShape
from .geometry import hor_set, is_coisotropic
from .overlattice import enumerate_integral_overlattices, lattice_data
from .padic import (
    PrimeCtx,
    QuadLattice,
    chi,
    chi_of,
    congruent,
    diag_lattice,
    direct_sum,
    fundamental_invariants,
    mod_pk,
    orthogonal_basis,
    transpose,
    unit_part,
    val,
)
from .qsqrt import QSqrt
from .siegel import fe_sign, weight_factor


@dataclass(frozen=True)
class MuProfile:
    mu_plus: int
    mu_zero: int
    mu_minus: int
    mu_zero_plus: int
    mu_zero_minus: int

    def as_dict(self) -> dict:
        return asdict(self)


def _diag_data(L: QuadLattice) -> tuple[list[int], list[int]]:
    entries, _ = orthogonal_basis(L)
    exps = [val(x, L.p) for x in entries]
    prec = 2 * max(exps) + 4
    units = [mod_pk(unit_part(x, L.p), L.p, prec) for x in entries]
    return units, exps


def _check_shape(L: QuadLattice) -> None:
    if not L.is_integral():
        raise NotIntegral("lattice is not integral")
    t = fundamental_invariants(L).type
    if t != L.n or t <= 1:
        raise WrongShape(f"needs rank = type > 1, got rank {L.n} and type {t}")


def _zero_split(L: QuadLattice, zero_sq: int, zero_ns: int) -> tuple[int, int]:
    """(mu^{0,+}, mu^{0,-}) from the counts of val-0 cosets by the square class of (x, x)."""
    c = chi(L)
    if c == 0:
        # the class of <x> itself
        return zero_sq, zero_ns
    t = L.n
    # chi of the complement of <x>: (-1)^((t-1)(t-2)/2) det(L) / (x, x)
    base = chi_of((-1) ** ((t - 1) * (t - 2) // 2) * L.det, L.p)
    return (zero_sq, zero_ns) if base == 1 else (zero_ns, zero_sq)


def mu_profile(L: QuadLattice) -> MuProfile:
    _check_shape(L)
    units, exps = _diag_data(L)
    p = L.p
    _, zsq1, zns1, pos1 = kernels.coset_histogram(units, exps, 1, p)
    _, zsq0, zns0, pos0 = kernels.coset_histogram(units, exps, 0, p)
    zero = zsq1 + zns1
    zp, zm = _zero_split(L, zsq1, zns1)
    return MuProfile(
        mu_plus=pos1,
        mu_zero=zero,
        mu_minus=(zsq0 + zns0 + pos0) - (zero + pos1),
        mu_zero_plus=zp,
        mu_zero_minus=zm,
    )


def mu_profile_bruteforce(L: QuadLattice) -> MuProfile:
    """Unoptimized scan with exact rationals, for cross-checking."""
    _check_shape(L)
    entries, _ = orthogonal_basis(L)
    p = L.p
    exps = [val(x, p) for x in entries]
    t = L.n
    c = chi(L)

    def classes(shift):
        out = []
        for lam in itertools.product(*[range(p ** (a - shift)) for a in exps]):
            norm = sum((Fraction(l) ** 2 * Fraction(p) ** (2 * (shift - a)) * d for l, a, d in zip(lam, exps, entries)), Fraction(0))
            out.append(norm)
        return out

    one = classes(1)
    zero_set = [x for x in one if x != 0 and val(x, p) == 0]
    mu_plus = sum(1 for x in one if x == 0 or val(x, p) >= 1)
    mu_zero = len(zero_set)
    mu_minus = sum(1 for x in classes(0) if x == 0 or val(x, p) >= 0) - mu_plus - mu_zero
    zp = zm = 0
    for x in zero_set:
        if c == 0:
            s = chi_of(x, p)
        else:
            s = chi_of((-1) ** ((t - 1) * (t - 2) // 2) * L.det / x, p)
        if s == 1:
            zp += 1
        else:
            zm += 1
    return MuProfile(mu_plus, mu_zero, mu_minus, zp, zm)


def counting_odd_value(mu: MuProfile, t: int, s: int, q: int) -> int:
    h = q ** ((t - 1) // 2)
    return (1 - q ** (t - 1)) * mu.mu_plus + (1 - s * h) * mu.mu_zero_plus + (1 + s * h) * mu.mu_zero_minus + mu.mu_minus


def counting_even_value(mu: MuProfile, t: int, s: int, q: int) -> int:
    a = q ** (t // 2)
    b = q ** (t // 2 - 1)
    return (1 - s * a) * (1 + s * b) * mu.mu_plus + (1 + s * b) * mu.mu_zero + mu.mu_minus


def admissible(L: QuadLattice, s: int) -> bool:
    c = chi(L)
    if L.n % 2:
        return c == 0 or s == 1
    return c == 0 or s == c


def _check(L: QuadLattice, s: int, parity: int) -> dict:
    _check_shape(L)
    t = L.n
    if t % 2 != parity:
        raise WrongShape(f"type {t} has the wrong parity")
    if s not in (1, -1) or not admissible(L, s):
        raise InadmissiblePair(f"s={s} is not admissible for chi={chi(L)}")
    mu = mu_profile(L)
    value = (counting_odd_value if parity else counting_even_value)(mu, t, s, L.p)
    report = {"t": t, "s": s, "chi": chi(L), "val": val(L.det, L.p), "mu": mu.as_dict(), "value": value, "passed": value == 0}
    if value:
        report["gram"] = [[str(x) for x in row] for row in L.gram]
        raise IdentityViolated("weighted counting identity fails", report)
    return report


def check_counting_odd(L: QuadLattice, s: int) -> dict:
    return _check(L, s, 1)


def check_counting_even(L: QuadLattice, s: int) -> dict:
    return _check(L, s, 0)


def check_counting(L: QuadLattice, s: int) -> dict:
    return _check(L, s, L.n % 2)


def type_t_grid(t: int, max_val: int, ctx: PrimeCtx):
    """Diagonal lattices diag(u_i p^a_i), a_i >= 1 nondecreasing, u_i in {1, r}, val <= max_val."""
    def exps(n, lo, budget):
        if n == 0:
            yield ()
            return
        for a in range(lo, budget // n + 1):
            for rest in exps(n - 1, a, budget - a):
                yield (a,) + rest

    for ex in exps(t, 1, max_val):
        seen = set()
        for us in itertools.product((1, ctx.r), repeat=t):
            key = tuple(sorted(zip(ex, us)))
            if key in seen:
                continue
            seen.add(key)
            yield diag_lattice(ctx, [u * ctx.p ** a for a, u in zip(ex, us)])


# companion lattices ------------------------------------------------------------


def companion_lattice(L: QuadLattice) -> QuadLattice:
    """A type-t lattice M with L of index p in M, built from a diagonal basis of L.

    Uses M = L + <p^-1 e_t> when a_t >= 3, and M = L + <p^-1 (a e_{t-1} + b e_t)>
    with an isotropic residue pair when a_{t-1} = a_t = 2. Raises Inadmissible
    when neither shape is available.
    """
    _check_shape(L)
    entries, _ = orthogonal_basis(L)
    p = L.p
    order = sorted(range(L.n), key=lambda i: val(entries[i], p))
    d = [entries[i] for i in order]
    a = [val(x, p) for x in d]
    n = L.n
    if a[-1] >= 3:
        return diag_lattice(L.ctx, d[:-1] + [d[-1] / p ** 2])
    if n >= 2 and a[-1] == a[-2] == 2:
        u1 = mod_pk(unit_part(d[-2], p), p, 1)
        u2 = mod_pk(unit_part(d[-1], p), p, 1)
        for x in range(1, p):
            if (u1 + u2 * x * x) % p == 0:
                basis = [[int(i == j) for j in range(n)] for i in range(n - 1)]
                basis.append([0] * (n - 2) + [Fraction(1, p), Fraction(x, p)])
                G = [[Fraction(0)] * n for _ in range(n)]
                for i in range(n):
                    G[i][i] = d[i]
                return QuadLattice(L.ctx, congruent(G, transpose(basis)))
    raise Inadmissible("no companion lattice of the constructed shapes")


def mu_difference(L: QuadLattice, M: QuadLattice) -> dict:
    """mu(L) - [M : L] mu(M), per field."""
    mL, mM = mu_profile(L), mu_profile(M)
    index = val(L.det / M.det, L.p) // 2
    f = L.p ** index
    return {k: getattr(mL, k) - f * getattr(mM, k) for k in asdict(mL)}


def companion_report(L: QuadLattice) -> dict:
    """Difference relations for the companion lattice, when one is constructed."""
    M = companion_lattice(L)
    diff = mu_difference(L, M)
    q, t = L.p, L.n
    total_rel = diff["mu_plus"] + diff["mu_zero"] + diff["mu_minus"] == q ** (t - 1) * diff["mu_plus"]
    if t % 2:
        parity_rel = diff["mu_zero_plus"] == diff["mu_zero_minus"] if chi(L) else True
    else:
        parity_rel = diff["mu_plus"] + diff["mu_zero"] == q * diff["mu_plus"]
    return {"difference": diff, "total_relation": total_rel, "parity_relation": parity_rel, "passed": total_rel and parity_rel}


# jump sum ----------------------------------------------------------------------


def _perp_lattice(L_flat: QuadLattice, x_norm: Fraction) -> QuadLattice:
    return direct_sum(L_flat, diag_lattice(L_flat.ctx, [x_norm]))


def admissible_perp_norms(L_flat: QuadLattice, eps: int, max_val: int, min_val: int = 1) -> list[Fraction]:
    """Norms u p^k (u in {1, r}, min_val <= k <= max_val) of x making L_flat + <x> embed in the ambient space."""
    out = []
    for k in range(min_val, max_val + 1):
        for u in (1, L_flat.ctx.r):
            x = Fraction(u * L_flat.p ** k)
            if fe_sign(_perp_lattice(L_flat, x), eps) == -1:
                out.append(x)
    return out


def _jump_terms(L_flat: QuadLattice, eps: int):
    """For each non-horizontal overlattice: its diagonal data and the vol factor."""
    horizontal = {e.basis for e in hor_set(L_flat, eps)}
    out = []
    for e in enumerate_integral_overlattices(L_flat):
        if e.basis in horizontal:
            continue
        M = QuadLattice(L_flat.ctx, e.gram(L_flat.gram))
        entries, _ = orthogonal_basis(M)
        out.append((entries, e.val))
    return out


def pden_perp_jump(L_flat: QuadLattice, x_norm, eps: int) -> QSqrt:
    """Sum over non-horizontal integral L' over L_flat of vol(L') times the weight sum over dual cosets.

    Each coset u of L'^dual / L' with val((u, u)) >= 0 contributes the weight
    factor of L' + <u + x>.
    """
    x = Fraction(x_norm)
    p = L_flat.p
    if not L_flat.is_integral():
        raise PreconditionViolated("L_flat must be integral")
    if x == 0 or val(x, p) < 1:
        raise PreconditionViolated("x must be anisotropic with val >= 1")
    n = L_flat.n + 1
    total = QSqrt(p)
    for entries, v in _jump_terms(L_flat, eps):
        k = len(entries)
        exps = [val(d, p) for d in entries]
        acc = 0
        for lam in itertools.product(*[range(p ** a) for a in exps]):
            coords = [Fraction(l, p ** a) for l, a in zip(lam, exps)]
            uu = sum((c * c * d for c, d in zip(coords, entries)), Fraction(0))
            if uu != 0 and val(uu, p) < 0:
                continue
            G = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
            for i in range(k):
                G[i][i] = entries[i]
                G[i][k] = G[k][i] = coords[i] * entries[i]
            G[k][k] = uu + x
            d = lattice_data(tuple(tuple(r) for r in G), p)
            acc += weight_factor(d.t, d.sgn(n + 1), eps, p)
        total = total + QSqrt.power(p, -v) * acc
    return total


def jump_report(L_flat: QuadLattice, eps: int, norms) -> dict:
    """Values of the jump sum at several x; zero when co-anisotropic, constant otherwise."""
    values = [pden_perp_jump(L_flat, x, eps) for x in norms]
    co_iso = is_coisotropic(L_flat, eps)
    passed = len(set(values)) <= 1 and (co_iso or all(not v for v in values))
    report = {
        "gram": [[str(x) for x in row] for row in L_flat.gram],
        "eps": eps,
        "coisotropic": co_iso,
        "norms": [str(x) for x in norms],
        "values": [str(v) for v in values],
        "passed": passed,
    }
    if not passed:
        raise IdentityViolated("jump sum is not constant", report)
    return report


__all__ = [
    "MuProfile",
    "admissible",
    "admissible_perp_norms",
    "check_counting",
    "check_counting_even",
    "check_counting_odd",
    "companion_lattice",
    "companion_report",
    "counting_even_value",
    "counting_odd_value",
    "jump_report",
    "mu_difference",
    "mu_profile",
    "mu_profile_bruteforce",
    "pden_perp_jump",
    "type_t_grid",
]
