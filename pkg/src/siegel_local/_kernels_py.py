"""Pure-Python (numpy) versions of the hot loops; same signatures as the compiled module."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _all_vectors(base: int, m: int) -> np.ndarray:
    """All vectors of (Z/base)^m; row index is the big-endian base-`base` code."""
    out = np.array(list(itertools.product(range(base), repeat=m)), dtype=np.int64).reshape(-1, m)
    out.setflags(write=False)
    return out


def _constraint_mask(G, prev, targets, t_self, modulus):
    vecs = _all_vectors(modulus, G.shape[0])
    Gv = vecs @ (G % modulus) % modulus
    mask = np.einsum("ij,ij->i", Gv, vecs) % modulus == t_self % modulus
    for y, t in zip(prev, targets):
        mask &= Gv @ (np.asarray(y, dtype=np.int64) % modulus) % modulus == t % modulus
    return vecs, mask


def column_scan(G, prev, targets, t_self, excluded, p):
    """Count v in F_p^m with v.G.v = t_self, y_i.G.v = targets[i] and excluded[code(v)] == 0.

    Returns (count, code of the first such v or -1).
    """
    G = np.asarray(G, dtype=np.int64)
    _, mask = _constraint_mask(G, prev, targets, t_self, p)
    if excluded is not None:
        mask &= np.asarray(excluded, dtype=bool) == 0
    idx = np.flatnonzero(mask)
    return int(idx.size), int(idx[0]) if idx.size else -1


def column_solutions(G, prev, targets, t_self, modulus):
    """All v in (Z/modulus)^m with the same constraints taken mod ``modulus``."""
    G = np.asarray(G, dtype=np.int64)
    vecs, mask = _constraint_mask(G, prev, targets, t_self, modulus)
    return vecs[mask]


def coset_histogram(units, exps, shift, p):
    """Classify x = sum lam_i p^(shift - a_i) e_i, lam_i mod p^(a_i - shift), by (x, x).

    The form is diagonal with entries units[i] * p^exps[i] (units are integers
    prime to p). Returns counts (val < 0, val = 0 square, val = 0 non-square, val >= 1).
    """
    A = max(exps)
    top = A - 2 * shift  # (x, x) = S p^(-top) with S = sum u_i lam_i^2 p^(A - a_i)
    mod = p ** (top + 2) if top + 2 > 0 else 1
    acc = np.zeros(1, dtype=np.int64)
    for u, a in zip(units, exps):
        lam = np.arange(p ** (a - shift), dtype=np.int64)
        term = (u % mod) * (lam * lam % mod) % mod * (p ** (A - a) % mod) % mod
        acc = (acc[:, None] + term[None, :]).reshape(-1) % mod
    if top < 0:
        return 0, 0, 0, int(acc.size)
    pt = p ** top
    ok = acc % pt == 0
    neg = int(acc.size - np.count_nonzero(ok))
    s = acc[ok] // pt % p
    pos = int(np.count_nonzero(s == 0))
    rest = s[s != 0]
    squares = np.zeros(p, dtype=bool)
    squares[(np.arange(1, p) ** 2) % p] = True
    zero_sq = int(np.count_nonzero(squares[rest]))
    zero_ns = int(rest.size - zero_sq)
    return neg, zero_sq, zero_ns, pos
