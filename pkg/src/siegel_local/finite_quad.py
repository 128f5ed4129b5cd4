"""Quadratic spaces over F_q: signs, orthogonal group orders, isometry and
isotropic-subspace counts, plus exhaustive counters for tiny q and m."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import BadDimension, DegenerateSpace, DegenerateTarget, GuardExceeded
from .overlattice import lattice_data
from .padic import QuadLattice, legendre

BRUTE_MAX_Q = 5
BRUTE_MAX_M = 4


@dataclass(frozen=True)
class FiniteQuadSpace:
    q: int
    m: int
    t: int = 0
    chi0: int = 1

    def __post_init__(self):
        if not 0 <= self.t <= self.m:
            raise BadDimension("radical dimension out of range")
        if self.chi0 not in (1, -1):
            raise ValueError("chi0 must be +1 or -1")
        if self.m == self.t and self.chi0 != 1:
            raise ValueError("chi of the zero space is +1")

    @property
    def dim0(self) -> int:
        return self.m - self.t

    @property
    def chi(self) -> int:
        """Discriminant class of a nondegenerate space."""
        if self.t:
            raise DegenerateSpace("space has a radical")
        return self.chi0

    def gram(self) -> np.ndarray:
        """A concrete diagonal Gram matrix over F_q with these invariants."""
        d0 = self.dim0
        g = np.zeros((self.m, self.m), dtype=np.int64)
        if d0:
            sign = legendre((-1) ** (d0 * (d0 - 1) // 2), self.q)
            last = 1 if sign * self.chi0 == 1 else _nonresidue(self.q)
            for i in range(d0 - 1):
                g[i, i] = 1
            g[d0 - 1, d0 - 1] = last
        return g


def _nonresidue(q: int) -> int:
    return next(a for a in range(2, q) if legendre(a, q) == -1)


def reduce_mod_p(L: QuadLattice) -> FiniteQuadSpace:
    from .errors import NotIntegral

    if not L.is_integral():
        raise NotIntegral("lattice is not integral")
    d = lattice_data(L.gram, L.p)
    return FiniteQuadSpace(L.p, L.n, d.t, d.chi0)


def sgn_m(U: FiniteQuadSpace, m: int) -> int:
    return U.chi0 if U.dim0 % 2 == m % 2 else 0


def sgn(U: FiniteQuadSpace) -> int:
    return sgn_m(U, 0)


def sgn_prime(U: FiniteQuadSpace) -> int:
    return sgn_m(U, 1)


def _qpow(q: int, e) -> Fraction:
    return Fraction(q) ** e


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise ArithmeticError(f"{what} evaluated to non-integer {x}")
    return int(x)


def order_orthogonal(V: FiniteQuadSpace) -> int:
    if V.t:
        raise DegenerateSpace("orthogonal group order needs a nondegenerate space")
    q, m = V.q, V.m
    s = sgn(V)
    x = Fraction(2 * q ** comb(m, 2))
    if s:
        x /= 1 + s * _qpow(q, -(m // 2))
    for i in range(1, m // 2 + 1):
        x *= 1 - _qpow(q, -2 * i)
    return _as_int(x, "#O(V)")


def count_isometries(U: FiniteQuadSpace, V: FiniteQuadSpace) -> int:
    """Number of isometric embeddings of U (possibly degenerate) into V."""
    if V.t:
        raise DegenerateTarget("target space must be nondegenerate")
    if V.q != U.q:
        raise ValueError("spaces over different fields")
    q, n, t, m = U.q, U.m, U.t, V.m
    if n > m:
        return 0
    if n == 0:
        return 1
    x = _qpow(q, Fraction(n * (2 * m - n - 1), 2))
    s = sgn(V)
    if s:
        x *= 1 - s * _qpow(q, -(m // 2))
    su = sgn_m(U, m)
    e = m - n - t
    if su:
        x *= 1 + V.chi0 * su * _qpow(q, Fraction(-e, 2))
    # product over integers i with e/2 < i < m/2
    for i in range(-m, m):
        if e < 2 * i < m:
            x *= 1 - _qpow(q, -2 * i)
    return _as_int(x, "#O(U,V)")


def count_isotropic_subspaces(V: FiniteQuadSpace, b: int) -> int:
    if V.t:
        raise DegenerateSpace("needs a nondegenerate space")
    q, m = V.q, V.m
    if not 0 <= 2 * b <= m:
        raise BadDimension(f"b={b} out of range for m={m}")
    if b == 0:
        return 1
    den = Fraction(1)
    for i in range(1, b + 1):
        den *= q ** i - 1
    if m % 2 == 0:
        c = V.chi0
        num = Fraction((q ** (m // 2) - c) * (q ** (m // 2 - b) + c))
        for i in range(1, b):
            num *= q ** (m - 2 * i) - 1
    else:
        num = Fraction(1)
        for i in range(b):
            num *= q ** (m - 1 - 2 * i) - 1
    return _as_int(num / den, "S_b(V)")


def count_isotropic_vectors(V: FiniteQuadSpace) -> int:
    """Isotropic vectors of V, zero included."""
    if V.m < 2:
        return 1
    return (V.q - 1) * count_isotropic_subspaces(V, 1) + 1


def order_gl(q: int, b: int) -> int:
    x = 1
    for i in range(b):
        x *= q ** b - q ** i
    return x


# exhaustive counters ---------------------------------------------------------


def _guard(q: int, m: int):
    if q > BRUTE_MAX_Q or m > BRUTE_MAX_M:
        raise GuardExceeded(f"exhaustive enumeration refused for q={q}, m={m}")


def _all_vectors(q: int, m: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=m)), dtype=np.int64).reshape(q ** m, m)


def _rank_mod(rows: np.ndarray, q: int) -> int:
    a = rows.copy() % q
    rank = 0
    nrow, ncol = a.shape
    for c in range(ncol):
        piv = next((r for r in range(rank, nrow) if a[r, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), -1, q) % q
        for r in range(nrow):
            if r != rank and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[rank]) % q
        rank += 1
    return rank


def brute_count_isometries(U: FiniteQuadSpace, V: FiniteQuadSpace) -> int:
    """Count injective linear maps U -> V preserving the forms, column by column."""
    q = U.q
    _guard(q, max(U.m, V.m))
    gu, gv = U.gram(), V.gram()
    vecs = _all_vectors(q, V.m)
    gram_all = vecs @ gv % q  # row i is (G v_i)^T
    norms = np.einsum("ij,ij->i", gram_all, vecs) % q

    def rec(chosen: list[int]) -> int:
        j = len(chosen)
        if j == U.m:
            return 1 if _rank_mod(vecs[chosen], q) == U.m else 0
        mask = norms == gu[j, j] % q
        for i, c in enumerate(chosen):
            mask &= gram_all[c] @ vecs.T % q == gu[i, j] % q
        total = 0
        for idx in np.nonzero(mask)[0]:
            if _rank_mod(vecs[chosen + [int(idx)]], q) == j + 1:
                total += rec(chosen + [int(idx)])
        return total

    return rec([])


def brute_order_orthogonal(V: FiniteQuadSpace) -> int:
    return brute_count_isometries(V, V)


def _rref_subspaces(q: int, m: int, b: int):
    """All b-dimensional subspaces of F_q^m as RREF generator matrices."""
    for pivots in itertools.combinations(range(m), b):
        free = [(r, c) for r in range(b) for c in range(m) if c > pivots[r] and c not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            a = np.zeros((b, m), dtype=np.int64)
            for r, c in enumerate(pivots):
                a[r, c] = 1
            for (r, c), v in zip(free, vals):
                a[r, c] = v
            yield a


def brute_count_isotropic_subspaces(V: FiniteQuadSpace, b: int) -> int:
    q = V.q
    _guard(q, V.m)
    g = V.gram()
    count = 0
    for a in _rref_subspaces(q, V.m, b):
        if not np.any(a @ g @ a.T % q):
            count += 1
    return count


def brute_count_isotropic_vectors(V: FiniteQuadSpace) -> int:
    q = V.q
    _guard(q, V.m)
    vecs = _all_vectors(q, V.m)
    return int(np.sum(np.einsum("ij,jk,ik->i", vecs, V.gram(), vecs) % q == 0))
