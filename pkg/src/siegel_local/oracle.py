"""Representation densities by counting solutions of X^t G_M X = G_L mod p^N.

For self-dual M the count is organized by the kernel K of X mod p. After a
base change moving K to the last coordinates, X = [Y, pZ] with Y of full rank
mod p, and the Z-part reduces to a counting problem at level N - 2. Counts of
full-rank Y mod p are products of per-column counts (by Witt's extension
theorem the number of choices for the next column does not depend on the
earlier choices), each found by scanning all of F_p^m. The p-power lifting
factors come from the smoothness of Y -> Y^t G Y at full-rank points.

For other M, a literal column-by-column search mod p^N is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BudgetExceeded, NotIntegral, NotStabilized
from .padic import QuadLattice, mod_pk, val

DEFAULT_BUDGET = 10 ** 7


@dataclass(frozen=True)
class OracleResult:
    density: Fraction
    N_used: int
    stabilized: bool
    raw_counts: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "density": str(self.density),
            "N_used": self.N_used,
            "stabilized": self.stabilized,
            "raw_counts": [[N, c] for N, c in self.raw_counts],
        }


def rep_dimension(m: int, n: int) -> int:
    return m * n - n * (n + 1) // 2


def _int_gram(L: QuadLattice, k: int) -> tuple[tuple[int, ...], ...]:
    if not L.is_integral():
        raise NotIntegral("Gram matrix is not p-integral")
    return tuple(tuple(mod_pk(x, L.p, k) for x in row) for row in L.gram)


# self-dual targets -------------------------------------------------------------


def _span_mask(p: int, m: int, vectors) -> np.ndarray:
    mask = np.zeros(p ** m, dtype=np.uint8)
    weights = np.array([p ** (m - 1 - i) for i in range(m)], dtype=np.int64)
    vs = np.asarray(vectors, dtype=np.int64).reshape(-1, m)
    for coeffs in itertools.product(range(p), repeat=len(vs)):
        v = (np.asarray(coeffs, dtype=np.int64) @ vs) % p if len(vs) else np.zeros(m, dtype=np.int64)
        mask[int(v @ weights)] = 1
    return mask


def _decode(code: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        code, d = divmod(code, p)
        out.append(d)
    return out[::-1]


class _SelfDualCounter:
    """Counts for a fixed self-dual Gram matrix G over Z_p."""

    def __init__(self, G: np.ndarray, p: int):
        self.G = G
        self.p = p
        self.m = G.shape[0]
        self.full_rank_mod_p = lru_cache(maxsize=None)(self._full_rank_mod_p)
        self.count = lru_cache(maxsize=None)(self._count)

    def _full_rank_mod_p(self, T: tuple) -> int:
        """Number of Y in M_{m x r}(F_p) of rank r with Y^t G Y = T mod p."""
        p, m = self.p, self.m
        r = len(T)
        chosen: list[list[int]] = []
        total = 1
        for j in range(r):
            excluded = _span_mask(p, m, chosen)
            c, first = kernels.column_scan(self.G, chosen, [T[i][j] for i in range(j)], T[j][j], excluded, p)
            if c == 0:
                return 0
            total *= c
            chosen.append(_decode(first, p, m))
        return total

    def _count(self, T: tuple, N: int, r: int) -> int:
        """#{X mod p^N : X^t G X = T mod p^N, first r columns independent mod p}."""
        p, m = self.p, self.m
        n = len(T)
        Tm = np.array(T, dtype=object).reshape(n, n)
        total = 0
        for d in range(0, n - r + 1):
            rr = n - d
            if rr > m:
                continue
            for K in _kernels_avoiding(p, n, r, d):
                g = _completion(p, n, r, K)
                Tp = (g.T.dot(Tm).dot(g)) % p ** N
                T11 = Tp[:rr, :rr]
                T12 = Tp[:rr, rr:]
                T22 = Tp[rr:, rr:]
                if N == 1:
                    if (T12 % p).any() or (T22 % p).any():
                        continue
                    total += self.full_rank_mod_p(_key(T11 % p))
                    continue
                if (T12 % p).any() or (T22 % (p * p)).any():
                    continue
                reldim = m * rr - rr * (rr + 1) // 2
                if N == 2:
                    total += self.full_rank_mod_p(_key(T11 % p)) * p ** (reldim + (m - rr) * d)
                    continue
                low = p ** (N - 2)
                Tpp = np.empty((n, n), dtype=object)
                Tpp[:rr, :rr] = T11 % low
                Tpp[:rr, rr:] = (T12 // p) % low
                Tpp[rr:, :rr] = (T12.T // p) % low
                Tpp[rr:, rr:] = (T22 // (p * p)) % low
                total += self.count(_key(Tpp), N - 2, rr) * p ** (2 * reldim + (m - rr) * d)
        return total


def _key(a) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in a)


@lru_cache(maxsize=None)
def _subspaces(p: int, n: int, d: int) -> tuple:
    """Reduced row echelon bases of all d-dimensional subspaces of F_p^n."""
    out = []
    for pivots in itertools.combinations(range(n), d):
        free = [(i, c) for i in range(d) for c in range(n) if c > pivots[i] and c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(d)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return tuple(out)


def _rank_mod_p(rows, p: int) -> int:
    a = [list(r) for r in rows]
    rank = 0
    ncol = len(a[0]) if a else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(a)) if a[i][c] % p), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


@lru_cache(maxsize=None)
def _kernels_avoiding(p: int, n: int, r: int, d: int) -> tuple:
    """d-dimensional subspaces of F_p^n meeting span(e_1..e_r) trivially."""
    E = [tuple(int(i == j) for j in range(n)) for i in range(r)]
    return tuple(K for K in _subspaces(p, n, d) if _rank_mod_p(E + list(K), p) == r + d)


@lru_cache(maxsize=None)
def _completion(p: int, n: int, r: int, K: tuple) -> np.ndarray:
    """Columns e_1..e_r, then standard vectors completing a basis, then K."""
    cols = [tuple(int(i == j) for j in range(n)) for i in range(r)]
    for i in range(r, n):
        e = tuple(int(i == j) for j in range(n))
        if len(cols) + len(K) < n and _rank_mod_p(cols + [e] + list(K), p) == len(cols) + 1 + len(K):
            cols.append(e)
    cols += list(K)
    return np.array(cols, dtype=object).T


@lru_cache(maxsize=64)
def _selfdual_counter(G: tuple, p: int) -> _SelfDualCounter:
    return _SelfDualCounter(np.array(G, dtype=np.int64), p)


# literal search ---------------------------------------------------------------


def _literal_count(GM: np.ndarray, T: np.ndarray, modulus: int, budget: int) -> int:
    n = T.shape[0]
    steps = [0]

    def rec(cols: list) -> int:
        j = len(cols)
        if j == n:
            return 1
        sols = kernels.column_solutions(GM, cols, [int(T[i, j]) for i in range(j)], int(T[j, j]), modulus)
        steps[0] += modulus ** GM.shape[0]
        if steps[0] > budget:
            raise BudgetExceeded(f"literal search exceeded budget {budget}")
        return sum(rec(cols + [list(v)]) for v in sols)

    return rec([])


# public API -------------------------------------------------------------------


def _is_selfdual(M: QuadLattice) -> bool:
    return M.is_integral() and val(M.det, M.p) == 0


def count_representations(M: QuadLattice, L: QuadLattice, N: int, budget: int = DEFAULT_BUDGET, method: str = "auto") -> int:
    """#{X in M_{m x n}(Z/p^N) : X^t G_M X = G_L mod p^N}."""
    if M.p != L.p:
        from .errors import CtxMismatch

        raise CtxMismatch("lattices over different primes")
    if N < 1:
        raise ValueError("N must be at least 1")
    p = L.p
    GM = _int_gram(M, N)
    GL = _int_gram(L, N)
    if method == "auto":
        method = "recursive" if _is_selfdual(M) else "literal"
    if method == "recursive":
        if not _is_selfdual(M):
            raise ValueError("the recursive counter needs a self-dual M")
        return _selfdual_counter(_int_gram(M, 1), p).count(GL, N, 0)
    if method != "literal":
        raise ValueError(f"unknown method {method!r}")
    per_column = (p ** N) ** M.n
    if per_column > budget:
        raise BudgetExceeded(f"p^(N m) = {per_column} exceeds budget {budget}")
    mod = p ** N
    return _literal_count(np.array(GM, dtype=np.int64) % mod, np.array(GL, dtype=np.int64) % mod, mod, budget)


def density_oracle(M: QuadLattice, L: QuadLattice, N: int | None = None, budget: int = DEFAULT_BUDGET, method: str = "auto") -> OracleResult:
    """Den(M, L) from normalized counts, stopping after two equal values plus a confirming one."""
    dim = rep_dimension(M.n, L.n)
    p = L.p
    if N is not None:
        c = count_representations(M, L, N, budget, method)
        return OracleResult(Fraction(c, p ** (N * dim)), N, False, [(N, c)])
    if not L.is_integral():
        return OracleResult(Fraction(0), 0, True, [])
    cap = 2 * val(L.det, p) + 3
    raw = []
    values = []
    for k in range(1, cap + 1):
        c = count_representations(M, L, k, budget, method)
        raw.append((k, c))
        values.append(Fraction(c, p ** (k * dim)))
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            return OracleResult(values[-1], k, True, raw)
    raise NotStabilized(f"normalized counts did not stabilize by N = {cap}", raw)


__all__ = ["OracleResult", "count_representations", "density_oracle", "rep_dimension"]
