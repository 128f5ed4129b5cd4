"""Exact quadratic lattices over the p-adic integers, p odd.

A lattice is stored as a rational Gram matrix with respect to a fixed basis.
Every invariant used elsewhere in the package (valuations, unit square
classes, Hilbert symbols) is read off exactly from rationals, so there is
no p-adic precision to track.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    CtxMismatch,
    DegenerateSubspace,
    Inadmissible,
    NotIntegral,
    ParseError,
    SingularGram,
    ZeroArgument,
)

Matrix = tuple[tuple[Fraction, ...], ...]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class PrimeCtx:
    p: int

    def __post_init__(self):
        if self.p < 3 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")

    @property
    def r(self) -> int:
        return _smallest_nonresidue(self.p)

    def unit_of_class(self, cls: int) -> int:
        return 1 if cls == 1 else self.r


@lru_cache(maxsize=None)
def _smallest_nonresidue(p: int) -> int:
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise ValueError(p)


def val_int(n: int, p: int) -> int:
    if n == 0:
        raise ZeroArgument("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ZeroArgument("valuation of zero")
    return val_int(x.numerator, p) - val_int(x.denominator, p)


def vval(x, p: int) -> float | int:
    """Valuation with val(0) = +inf."""
    x = Fraction(x)
    return float("inf") if x == 0 else val(x, p)


def unit_part(x, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** val(x, p)


def square_class(x, p: int) -> int:
    """Legendre symbol of the unit part of a nonzero rational."""
    u = unit_part(x, p)
    return legendre(u.numerator, p) * legendre(u.denominator, p)


def mod_pk(x, p: int, k: int) -> int:
    """Reduce a p-integral rational modulo p^k."""
    x = Fraction(x)
    m = p ** k
    if x.denominator % p == 0:
        raise NotIntegral(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


def hilbert_symbol(a, b, ctx: PrimeCtx) -> int:
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol of zero")
    p = ctx.p
    al, be = val(a, p), val(b, p)
    sign = -1 if (al * be * (p - 1) // 2) % 2 else 1
    u, v = square_class(a, p), square_class(b, p)
    return sign * (u if be % 2 else 1) * (v if al % 2 else 1)


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(_frac(x) for x in row) for row in rows)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def transpose(a: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in zip(*a))


def congruent(gram: Sequence[Sequence], basis: Sequence[Sequence]) -> Matrix:
    """Gram matrix of the columns of ``basis``."""
    return mat_mul(transpose(basis), mat_mul(gram, basis))


def det(a: Sequence[Sequence]) -> Fraction:
    m = [list(map(Fraction, row)) for row in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return d


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise SingularGram("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        f = m[c][c]
        m[c] = [x / f for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                g = m[r][c]
                m[r] = [x - g * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class QuadLattice:
    ctx: PrimeCtx
    gram: Matrix

    def __init__(self, ctx: PrimeCtx, gram):
        g = as_matrix(gram)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square and nonempty")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "gram", g)

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> Fraction:
        return det(self.gram)

    def is_integral(self) -> bool:
        return all(x.denominator % self.p != 0 for row in self.gram for x in row)

    def transform(self, basis) -> "QuadLattice":
        return QuadLattice(self.ctx, congruent(self.gram, as_matrix(basis)))

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.gram)
        return f"QuadLattice(p={self.p}, [{rows}])"


def diag_lattice(ctx: PrimeCtx, entries: Iterable) -> QuadLattice:
    e = [Fraction(x) for x in entries]
    n = len(e)
    return QuadLattice(ctx, [[e[i] if i == j else 0 for j in range(n)] for i in range(n)])


def _require_nonsingular(L: QuadLattice):
    if L.det == 0:
        raise SingularGram("Gram matrix is singular")


def orthogonal_basis(L: QuadLattice) -> tuple[list[Fraction], Matrix]:
    """Diagonal entries and a unimodular change of basis (columns).

    Pivots on an entry of minimal valuation, preferring the diagonal with the
    smallest index; an off-diagonal pivot (i, j) is first moved to the diagonal
    by e_i <- e_i + e_j. All elimination coefficients are p-integral, so the
    returned basis spans the same lattice.
    """
    _require_nonsingular(L)
    p, n = L.p, L.n
    g = [list(row) for row in L.gram]
    b = [list(row) for row in identity(n)]  # columns are basis vectors
    order = list(range(n))
    diag: list[Fraction] = []
    done: list[int] = []
    while order:
        best = None
        for i in order:
            if g[i][i] != 0:
                v = val(g[i][i], p)
                if best is None or v < best[0]:
                    best = (v, i, i)
        for i in order:
            for j in order:
                if i < j and g[i][j] != 0:
                    v = val(g[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        _, i, j = best
        if i != j:
            for k in range(n):
                g[i][k] += g[j][k]
            for k in range(n):
                g[k][i] += g[k][j]
            for k in range(n):
                b[k][i] += b[k][j]
        piv = g[i][i]
        for k in order:
            if k == i:
                continue
            c = g[k][i] / piv
            if c:
                for h in range(n):
                    g[k][h] -= c * g[i][h]
                for h in range(n):
                    g[h][k] -= c * g[h][i]
                for h in range(n):
                    b[h][k] -= c * b[h][i]
        order.remove(i)
        done.append(i)
        diag.append(piv)
    basis = tuple(tuple(b[r][c] for c in done) for r in range(n))
    return diag, basis


def diagonal_entries(L: QuadLattice) -> list[Fraction]:
    d, _ = orthogonal_basis(L)
    return sorted(d, key=lambda x: val(x, L.p))


def diagonalize(L: QuadLattice) -> list[tuple[int, int]]:
    """Pairs (valuation, unit square class) of an orthogonal basis, sorted by valuation."""
    return [(val(x, L.p), square_class(x, L.p)) for x in diagonal_entries(L)]


@dataclass(frozen=True)
class FundamentalInvariants:
    a: tuple[int, ...]

    @property
    def val(self) -> int:
        return sum(self.a)

    @property
    def type(self) -> int:
        return sum(1 for x in self.a if x > 0)


def fundamental_invariants(L: QuadLattice) -> FundamentalInvariants:
    if not L.is_integral():
        raise NotIntegral("lattice is not integral")
    return FundamentalInvariants(tuple(a for a, _ in diagonalize(L)))


@dataclass(frozen=True)
class Invariants:
    val: int
    type: int
    det_class: tuple[int, int]
    disc_class: tuple[int, int]
    chi: int
    hasse: int

    def as_dict(self) -> dict:
        return {
            "val": self.val,
            "type": self.type,
            "det_class": list(self.det_class),
            "disc_class": list(self.disc_class),
            "chi": self.chi,
            "hasse": self.hasse,
        }


def hasse_of_diagonal(entries: Sequence[Fraction], ctx: PrimeCtx) -> int:
    h = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            h *= hilbert_symbol(entries[i], entries[j], ctx)
    return h


def chi_of(disc: Fraction, p: int) -> int:
    return 0 if val(disc, p) % 2 else square_class(disc, p)


def disc(L: QuadLattice) -> Fraction:
    n = L.n
    return (-1) ** (n * (n - 1) // 2) * L.det


def invariants(L: QuadLattice) -> Invariants:
    d = diagonal_entries(L)
    p = L.p
    dt = L.det
    dc = disc(L)
    vals = [val(x, p) for x in d]
    return Invariants(
        val=val(dt, p),
        type=sum(1 for v in vals if v > 0),
        det_class=(val(dt, p), square_class(dt, p)),
        disc_class=(val(dc, p), square_class(dc, p)),
        chi=chi_of(dc, p),
        hasse=hasse_of_diagonal(d, L.ctx),
    )


def chi(L: QuadLattice) -> int:
    return chi_of(disc(L), L.p)


def hasse(L: QuadLattice) -> int:
    return hasse_of_diagonal(diagonal_entries(L), L.ctx)


def dual(L: QuadLattice) -> QuadLattice:
    _require_nonsingular(L)
    return QuadLattice(L.ctx, inverse(L.gram))


def direct_sum(L1: QuadLattice, L2: QuadLattice) -> QuadLattice:
    if L1.ctx != L2.ctx:
        raise CtxMismatch("lattices live over different primes")
    n1, n2 = L1.n, L2.n
    z = Fraction(0)
    rows = [list(r) + [z] * n2 for r in L1.gram] + [[z] * n1 + list(r) for r in L2.gram]
    return QuadLattice(L1.ctx, rows)


def rescale(L: QuadLattice, k: int) -> QuadLattice:
    f = Fraction(L.p) ** k
    return QuadLattice(L.ctx, [[x * f for x in row] for row in L.gram])


def is_vertex(L: QuadLattice) -> tuple[bool, int]:
    a = fundamental_invariants(L).a
    t = sum(1 for x in a if x == 1)
    return all(x in (0, 1) for x in a), t


@dataclass(frozen=True)
class JordanProfile:
    """Per-scale blocks (scale, rank, det square class of the unit part).

    ``hasse_bit`` is set only when the profile names a quadratic space.
    """

    ctx: PrimeCtx
    blocks: tuple[tuple[int, int, int], ...]
    hasse_bit: int | None = None

    @property
    def n(self) -> int:
        return sum(r for _, r, _ in self.blocks)

    def representative(self) -> QuadLattice:
        """Diagonal lattice with unit entries 1 except the last of each block."""
        p = self.ctx.p
        entries: list[Fraction] = []
        for a, r, c in self.blocks:
            scale = Fraction(p) ** a
            entries += [scale] * (r - 1) + [scale * self.ctx.unit_of_class(c)]
        return diag_lattice(self.ctx, entries)


def jordan_profile(L: QuadLattice) -> JordanProfile:
    blocks: dict[int, list[int]] = {}
    for a, u in diagonalize(L):
        blocks.setdefault(a, []).append(u)
    out = []
    for a in sorted(blocks):
        c = 1
        for u in blocks[a]:
            c *= u
        out.append((a, len(blocks[a]), c))
    return JordanProfile(L.ctx, tuple(out))


def canonical_lattice(L: QuadLattice) -> QuadLattice:
    return jordan_profile(L).representative()


def selfdual(ctx: PrimeCtx, m: int, eps: int) -> QuadLattice:
    """The self-dual lattice of rank m whose discriminant has class eps."""
    sign = square_class((-1) ** (m * (m - 1) // 2), ctx.p)
    last = ctx.unit_of_class(sign * eps)
    return diag_lattice(ctx, [1] * (m - 1) + [last])


@lru_cache(maxsize=None)
def _ambient(p: int, m: int, eps: int, hs: int) -> tuple[Fraction, ...]:
    ctx = PrimeCtx(p)
    units = (1, ctx.r)
    cands = []
    for bs in itertools.product((0, 1), repeat=m):
        for us in itertools.product(units, repeat=m):
            cands.append((sum(bs), bs, us))
    cands.sort(key=lambda c: c[0])
    for _, bs, us in cands:
        d = [Fraction(u * p ** b) for u, b in zip(us, bs)]
        L = diag_lattice(ctx, d)
        inv = invariants(L)
        if inv.chi == eps and inv.hasse == hs:
            return tuple(d)
    raise Inadmissible(f"no quadratic space with m={m}, chi={eps}, hasse={hs}")


def ambient_space(m: int, eps: int, hasse_inv: int, ctx: PrimeCtx) -> QuadLattice:
    """A diagonal lattice spanning a space with chi = eps and the given Hasse invariant."""
    if m < 1 or eps not in (-1, 0, 1) or hasse_inv not in (-1, 1):
        raise Inadmissible("bad ambient-space parameters")
    return diag_lattice(ctx, _ambient(ctx.p, m, eps, hasse_inv))


def rank_of(vectors: Sequence[Sequence]) -> int:
    m = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def kernel(rows: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Basis of {v : rows . v = 0} over Q."""
    if not rows:
        raise ValueError("empty system")
    ncol = len(rows[0])
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    rank = 0
    for c in range(ncol):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        f = m[rank][c]
        m[rank] = [x / f for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                g = m[r][c]
                m[r] = [x - g * y for x, y in zip(m[r], m[rank])]
        pivots.append(c)
        rank += 1
    free = [c for c in range(ncol) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        out.append(tuple(v))
    return out


def orthogonal_complement(gram, sub_basis) -> list[tuple[Fraction, ...]]:
    """Basis of the perpendicular of span(sub_basis) in (Q^m, gram)."""
    g = as_matrix(gram)
    sub = [tuple(map(Fraction, v)) for v in sub_basis]
    if not sub:
        return [tuple(r) for r in identity(len(g))]
    sg = mat_mul(mat_mul(sub, g), transpose(sub))
    if det(sg) == 0:
        raise DegenerateSubspace("sub_basis spans a degenerate subspace")
    return kernel(mat_mul(sub, g))


def lattice_to_json(L: QuadLattice) -> str:
    return json.dumps({"p": L.p, "gram": [[str(x) for x in row] for row in L.gram]})


def lattice_from_json(text: str) -> QuadLattice:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, len(text[: e.pos].encode())) from e
    if not isinstance(obj, dict) or "p" not in obj or "gram" not in obj:
        raise ParseError("expected an object with keys 'p' and 'gram'", 0)
    try:
        rows = [[Fraction(str(x)) for x in row] for row in obj["gram"]]
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise ParseError(f"bad Gram entry: {e}", 0) from e
    p = obj["p"]
    ctx = PrimeCtx(p)
    for row in rows:
        for x in row:
            d = x.denominator
            while d % p == 0:
                d //= p
            if d != 1:
                raise ParseError(f"denominator of {x} is not a power of p", 0)
    return QuadLattice(ctx, rows)
