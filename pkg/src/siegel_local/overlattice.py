"""Integral overlattices L in L' in L'^dual, found by breadth-first search.

Each step adjoins v/p for a vector v of L' whose class spans an isotropic line
of the radical of L'/pL'. Lattices are deduplicated by their canonical basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import DegenerateSubspace, GuardExceeded, NotIntegral
from .hnf import canonical_basis, saturate
from .padic import (
    QuadLattice,
    as_matrix,
    chi_of,
    congruent,
    det,
    diagonal_entries,
    identity,
    kernel,
    mat_mul,
    mod_pk,
    square_class,
    transpose,
    val,
)

MAX_VAL = 12
MAX_RANK = 6
DEFAULT_CAPACITY = 4096


@dataclass(frozen=True)
class LatticeData:
    """Isometry data of an integral lattice needed by the weighted sums."""

    n: int
    t: int
    val: int
    chi: int
    chi0: int
    scales: tuple[int, ...]

    def sgn(self, m: int) -> int:
        """sgn_m of the reduction mod p: chi of the unimodular part when its rank has m's parity."""
        return self.chi0 if (self.n - self.t) % 2 == m % 2 else 0


def lattice_data(gram, p: int) -> LatticeData:
    from .padic import PrimeCtx

    L = QuadLattice(PrimeCtx(p), gram)
    d = diagonal_entries(L)
    vals = [val(x, p) for x in d]
    units = [x for x, v in zip(d, vals) if v == 0]
    r0 = len(units)
    prod = Fraction(1)
    for u in units:
        prod *= u
    chi0 = square_class((-1) ** (r0 * (r0 - 1) // 2) * prod, p) if r0 else 1
    dt = L.det
    return LatticeData(
        n=L.n,
        t=sum(1 for v in vals if v > 0),
        val=val(dt, p),
        chi=chi_of((-1) ** (L.n * (L.n - 1) // 2) * dt, p),
        chi0=chi0,
        scales=tuple(sorted(vals)),
    )


@dataclass(frozen=True)
class OverlatticeEntry:
    basis: tuple[tuple[Fraction, ...], ...]  # rows are basis vectors in L-coordinates
    ell: int
    data: LatticeData = field(compare=False)

    @property
    def t(self) -> int:
        return self.data.t

    @property
    def val(self) -> int:
        return self.data.val

    def sgn(self, m: int) -> int:
        return self.data.sgn(m)

    def gram(self, ambient_gram) -> tuple:
        return congruent(ambient_gram, transpose(self.basis))

    def as_dict(self, parity: int | None = None) -> dict:
        d = {
            "basis": [[str(x) for x in row] for row in self.basis],
            "ell": self.ell,
            "t": self.t,
            "val": self.val,
        }
        if parity is not None:
            d[f"sgn_{parity}"] = self.sgn(parity)
        return d


def _kernel_mod_p(gram: Sequence[Sequence[Fraction]], p: int) -> list[list[int]]:
    n = len(gram)
    m = [[mod_pk(x, p, 1) for x in row] for row in gram]
    pivots = []
    rank = 0
    for c in range(n):
        piv = next((r for r in range(rank, n) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(n):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        pivots.append(c)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = -m[i][f] % p
        basis.append(v)
    return basis


def _lines(basis: list[list[int]], p: int):
    """One normalized representative per line of the span of ``basis`` over F_p."""
    k = len(basis)
    n = len(basis[0]) if basis else 0
    for coeffs in itertools.product(range(p), repeat=k):
        first = next((c for c in coeffs if c), 0)
        if first != 1:
            continue
        yield [sum(c * b[j] for c, b in zip(coeffs, basis)) % p for j in range(n)]


def isotropic_radical_lines(gram, p: int) -> list[list[int]]:
    """Integer vectors v (mod p) with gram.v = 0 mod p and v.gram.v = 0 mod p^2."""
    rad = _kernel_mod_p(gram, p)
    out = []
    g2 = [[mod_pk(x, p, 2) for x in row] for row in gram]
    n = len(gram)
    for v in _lines(rad, p):
        q = sum(v[i] * g2[i][j] * v[j] for i in range(n) for j in range(n)) % (p * p)
        if q == 0:
            out.append(v)
    return out


def _minimal_from(ambient_gram, basis, p: int) -> list[tuple[tuple[Fraction, ...], ...]]:
    g = congruent(ambient_gram, transpose(basis))
    out = []
    for v in isotropic_radical_lines(g, p):
        w = tuple(sum((Fraction(c) * b[j] for c, b in zip(v, basis)), Fraction(0)) / p for j in range(len(basis)))
        out.append(canonical_basis(basis, [w], p))
    return out


def _check_integral(L: QuadLattice):
    if not L.is_integral():
        raise NotIntegral("lattice is not integral")


def minimal_overlattices(L: QuadLattice) -> list[OverlatticeEntry]:
    _check_integral(L)
    p = L.p
    base = canonical_basis(identity(L.n), (), p)
    seen = {}
    for b in _minimal_from(L.gram, base, p):
        if b not in seen:
            seen[b] = OverlatticeEntry(b, 1, lattice_data(congruent(L.gram, transpose(b)), p))
    return [seen[k] for k in sorted(seen)]


def _guard(L: QuadLattice, force: bool):
    if force:
        return
    v = val(L.det, L.p)
    if v > MAX_VAL or L.n > MAX_RANK:
        raise GuardExceeded(f"enumeration refused for val={v}, rank={L.n}; pass force=True")


def _enumerate(p: int, gram: tuple) -> tuple[OverlatticeEntry, ...]:
    n = len(gram)
    start = canonical_basis(identity(n), (), p)
    seen = {start: OverlatticeEntry(start, 0, lattice_data(gram, p))}
    frontier = [start]
    ell = 0
    while frontier:
        ell += 1
        nxt = []
        for b in frontier:
            for c in _minimal_from(gram, b, p):
                if c not in seen:
                    seen[c] = OverlatticeEntry(c, ell, lattice_data(congruent(gram, transpose(c)), p))
                    nxt.append(c)
        frontier = nxt
    return tuple(sorted(seen.values(), key=lambda e: (e.ell, e.basis)))


_cached_enumerate = lru_cache(maxsize=DEFAULT_CAPACITY)(_enumerate)


def set_cache_capacity(capacity: int) -> None:
    global _cached_enumerate
    _cached_enumerate = lru_cache(maxsize=capacity)(_enumerate)


def cache_info():
    return _cached_enumerate.cache_info()


_persistent: dict = {}
_record = False


def load_cache(store: dict) -> None:
    """Seed enumerations from a previously saved store and start recording new ones."""
    global _record
    _persistent.update(store)
    _record = True


def cache_snapshot() -> dict:
    return dict(_persistent)


def enumerate_integral_overlattices(L: QuadLattice, force: bool = False) -> list[OverlatticeEntry]:
    _check_integral(L)
    _guard(L, force)
    key = (L.p, L.gram)
    hit = _persistent.get(key)
    if hit is not None:
        return list(hit)
    out = _cached_enumerate(L.p, L.gram)
    if _record:
        _persistent[key] = out
    return list(out)


def restrict_to_sublattice(ambient_gram, basis, subspace, p: int):
    """Basis and Gram matrix of span(basis) cut with span(subspace).

    Vectors are in the ambient coordinates of ``ambient_gram``.
    """
    B = as_matrix(basis)
    S = as_matrix(subspace)
    dim = len(S)
    n = len(B[0])
    from .padic import rank_of

    if rank_of(S) != dim:
        raise DegenerateSubspace("subspace vectors are dependent")
    if dim == n:
        vecs = [tuple(v) for v in B]
    else:
        # functionals cutting out the subspace
        F = kernel(S)
        A = mat_mul(F, transpose(B))  # columns indexed by basis vectors
        coeffs = kernel(A)
        coeffs = saturate(coeffs, p)
        vecs = [tuple(sum((c[i] * B[i][j] for i in range(len(B))), Fraction(0)) for j in range(n)) for c in coeffs]
    gram = congruent(ambient_gram, transpose(vecs))
    if det(gram) == 0:
        raise DegenerateSubspace("restricted lattice is degenerate")
    return tuple(vecs), gram
