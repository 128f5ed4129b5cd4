"""Seeded random lattices.

Item i of a suite with seed s draws from a Philox stream keyed by (s, i), so
results do not depend on how a suite is split across workers.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .padic import PrimeCtx, QuadLattice, congruent, det, diag_lattice, mod_pk


def item_rng(seed: int, index: int) -> np.random.Generator:
    key = (int(seed) % 2 ** 64) | (int(index) % 2 ** 64) << 64
    return np.random.Generator(np.random.Philox(key=key))


def random_exponents(rng: np.random.Generator, n: int, max_val: int, min_exp: int = 0) -> list[int]:
    while True:
        a = sorted(int(x) for x in rng.integers(min_exp, max_val + 1, size=n))
        if sum(a) <= max_val:
            return a


def random_lattice(rng: np.random.Generator, ctx: PrimeCtx, n: int, max_val: int, scramble: bool = True, min_exp: int = 0) -> QuadLattice:
    """Integral lattice of rank n and val <= max_val, with a random basis change unimodular mod p."""
    p = ctx.p
    a = random_exponents(rng, n, max_val, min_exp)
    units = [int(rng.integers(1, p)) + p * int(rng.integers(0, p)) for _ in range(n)]
    D = diag_lattice(ctx, [u * p ** e for u, e in zip(units, a)])
    if not scramble or n == 1:
        return D
    while True:
        B = [[Fraction(int(x)) for x in row] for row in rng.integers(-2, 3, size=(n, n))]
        if mod_pk(det(B), p, 1) % p:
            return QuadLattice(ctx, congruent(D.gram, B))


def random_vector(rng: np.random.Generator, n: int, bound: int) -> list[int]:
    return [int(x) for x in rng.integers(-bound, bound + 1, size=n)]


__all__ = ["item_rng", "random_exponents", "random_lattice", "random_vector"]
