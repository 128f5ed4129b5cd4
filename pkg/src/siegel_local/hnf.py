"""Canonical bases for full-rank Z_p-lattices in Q_p^n.

A Z_p-lattice M with p^K Z_p^n inside M inside p^-b Z_p^n is determined by the
Z-lattice M cut with p^-b Z^n, whose Hermite normal form is canonical. All
vectors are rational tuples; non-p denominators are turned into p-adic units.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SingularGram
from .padic import inverse, mod_pk, vval

Vec = tuple[Fraction, ...]


def _min_val(vectors: Sequence[Sequence[Fraction]], p: int) -> int:
    m = min((vval(x, p) for v in vectors for x in v), default=0)
    return 0 if m == float("inf") else int(m)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_mod(rows: list[list[int]], n: int, D: int) -> list[list[int]]:
    """Upper-triangular HNF of the Z-span of ``rows`` together with D*Z^n."""
    work = [[x % D for x in r] for r in rows]
    out: list[list[int]] = []
    for c in range(n):
        e = [0] * n
        e[c] = D
        work.append(e)
        pivot = None
        rest = []
        for r in work:
            if r[c] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = _xgcd(pivot[c], r[c])
            a, b = pivot[c] // g, r[c] // g
            new_p = [(s * x + t * y) for x, y in zip(pivot, r)]
            new_r = [(a * y - b * x) for x, y in zip(pivot, r)]
            pivot = [x % D if i > c else x for i, x in enumerate(new_p)]
            rest.append([x % D if i > c else x for i, x in enumerate(new_r)])
        if pivot[c] < 0:
            pivot = [-x for x in pivot]
        out.append(pivot)
        work = [r for r in rest if any(r)]
    for i in range(n):
        d = out[i][i]
        for j in range(i):
            q = out[j][i] // d
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[i])]
    return out


def canonical_basis(basis: Sequence[Sequence], extra: Sequence[Sequence] = (), p: int = 3) -> tuple[Vec, ...]:
    """Canonical basis of the Z_p-span of ``basis`` plus ``extra``.

    ``basis`` must consist of n independent vectors; ``extra`` may add more
    generators of an overlattice.
    """
    B = [tuple(Fraction(x) for x in v) for v in basis]
    n = len(B)
    try:
        Binv = inverse(B)
    except SingularGram as e:
        raise SingularGram("basis vectors are dependent") from e
    K = max(0, -_min_val(Binv, p))
    gens = B + [tuple(Fraction(x) for x in v) for v in extra]
    b = max(0, -_min_val(gens, p))
    D = p ** (K + b)
    scale = Fraction(p) ** b
    rows = [[mod_pk(x * scale, p, K + b) for x in v] for v in gens]
    H = hnf_mod(rows, n, D)
    return tuple(tuple(Fraction(x) / scale for x in row) for row in H)


def contains(basis: Sequence[Sequence], x: Sequence, p: int) -> bool:
    """Whether x lies in the Z_p-span of the (independent) basis vectors."""
    Binv = inverse([tuple(map(Fraction, v)) for v in basis])
    coeffs = [sum((Fraction(xi) * Binv[i][j] for i, xi in enumerate(x)), Fraction(0)) for j in range(len(x))]
    return all(c.denominator % p for c in coeffs)


def index_exponent(sub: Sequence[Sequence], sup: Sequence[Sequence], p: int) -> int:
    """log_p [sup : sub] for nested full-rank lattices."""
    from .padic import det, val

    return val(det(sub) / det(sup), p)


def saturate(vectors: Sequence[Sequence], p: int) -> list[Vec]:
    """Basis of span_Q(vectors) cut with Z_p^n, for independent input vectors."""
    vs = [list(map(Fraction, v)) for v in vectors]
    vs = [[x / Fraction(p) ** _min_val([v], p) for x in v] for v in vs]
    while True:
        red = [[mod_pk(x, p, 1) for x in v] for v in vs]
        dep = _dependency_mod_p(red, p)
        if dep is None:
            return [tuple(v) for v in vs]
        i = next(k for k, c in enumerate(dep) if c)
        inv = pow(dep[i], -1, p)
        comb = [sum((dep[k] * inv * vs[k][j] for k in range(len(vs))), Fraction(0)) for j in range(len(vs[0]))]
        vs[i] = [x / p for x in comb]


def _dependency_mod_p(rows: list[list[int]], p: int) -> list[int] | None:
    k = len(rows)
    if k == 0:
        return None
    ncol = len(rows[0])
    aug = [r[:] + [int(i == j) for j in range(k)] for i, r in enumerate(rows)]
    rank = 0
    for c in range(ncol):
        piv = next((r for r in range(rank, k) if aug[r][c] % p), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = pow(aug[rank][c], -1, p)
        aug[rank] = [x * inv % p for x in aug[rank]]
        for r in range(k):
            if r != rank and aug[r][c] % p:
                f = aug[r][c]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[rank])]
        rank += 1
    if rank == k:
        return None
    return aug[rank][ncol:]
