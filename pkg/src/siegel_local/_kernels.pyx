# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in _kernels_py."""

import numpy as np

ctypedef long long i64


cdef inline i64 _mod(i64 a, i64 m) nogil:
    a %= m
    return a + m if a < 0 else a


cdef i64 _scan(i64[:, ::1] G, i64[:, ::1] Y, i64[::1] targets, i64 t_self, i64 modulus,
               unsigned char[::1] excluded, bint use_excluded, i64[:, ::1] out, i64 *first) nogil:
    cdef Py_ssize_t m = G.shape[0]
    cdef Py_ssize_t k = Y.shape[0]
    cdef Py_ssize_t i, j
    cdef i64 total = 1, code, count = 0, s, acc
    cdef i64 v[32]
    cdef i64 gv[32]
    for i in range(m):
        total *= modulus
        v[i] = 0
    first[0] = -1
    for code in range(total):
        if code:
            # increment the big-endian digit vector
            i = m - 1
            while True:
                v[i] += 1
                if v[i] < modulus:
                    break
                v[i] = 0
                i -= 1
        if use_excluded and excluded[code]:
            continue
        for i in range(m):
            acc = 0
            for j in range(m):
                acc += G[i, j] * v[j]
            gv[i] = _mod(acc, modulus)
        acc = 0
        for i in range(m):
            acc += gv[i] * v[i]
        if _mod(acc, modulus) != t_self:
            continue
        s = 1
        for j in range(k):
            acc = 0
            for i in range(m):
                acc += Y[j, i] * gv[i]
            if _mod(acc, modulus) != targets[j]:
                s = 0
                break
        if not s:
            continue
        if first[0] < 0:
            first[0] = code
        if out.shape[0] > 0:
            for i in range(m):
                out[count, i] = v[i]
        count += 1
    return count


def _prep(G, prev, targets, t_self, modulus):
    Gm = np.ascontiguousarray(np.asarray(G, dtype=np.int64) % modulus)
    m = Gm.shape[0]
    if m > 32:
        raise ValueError("rank too large for the compiled kernel")
    Y = np.ascontiguousarray(np.asarray(prev, dtype=np.int64).reshape(-1, m) % modulus)
    T = np.ascontiguousarray(np.asarray(list(targets), dtype=np.int64).reshape(-1) % modulus)
    return Gm, Y, T, int(t_self) % modulus


def column_scan(G, prev, targets, t_self, excluded, p):
    Gm, Y, T, ts = _prep(G, prev, targets, t_self, p)
    cdef i64 first = -1
    cdef i64 count
    empty = np.zeros((0, Gm.shape[0]), dtype=np.int64)
    if excluded is None:
        ex = np.zeros(1, dtype=np.uint8)
        count = _scan(Gm, Y, T, ts, p, ex, False, empty, &first)
    else:
        ex = np.ascontiguousarray(np.asarray(excluded, dtype=np.uint8))
        count = _scan(Gm, Y, T, ts, p, ex, True, empty, &first)
    return int(count), int(first)


def column_solutions(G, prev, targets, t_self, modulus):
    Gm, Y, T, ts = _prep(G, prev, targets, t_self, modulus)
    cdef i64 first = -1
    ex = np.zeros(1, dtype=np.uint8)
    empty = np.zeros((0, Gm.shape[0]), dtype=np.int64)
    n = _scan(Gm, Y, T, ts, modulus, ex, False, empty, &first)
    out = np.zeros((n, Gm.shape[0]), dtype=np.int64)
    _scan(Gm, Y, T, ts, modulus, ex, False, out, &first)
    return out


def coset_histogram(units, exps, shift, p):
    cdef Py_ssize_t t = len(exps)
    cdef i64 A = max(exps)
    cdef i64 top = A - 2 * shift
    cdef i64 P = p
    cdef Py_ssize_t i, j, last = t - 1
    if top < 0:
        n_all = 1
        for a in exps:
            n_all *= p ** (a - shift)
        return 0, 0, 0, int(n_all)
    if t > 32:
        raise ValueError("rank too large for the compiled kernel")
    cdef i64 mod = P ** (top + 1)
    cdef i64 pt = P ** top
    # class of each residue mod p^(top+1): 0 val < 0, 1 square unit, 2 non-square unit, 3 val >= 1
    sq = np.zeros(P, dtype=np.uint8)
    for i in range(1, P):
        sq[i * i % P] = 1
    res = np.arange(mod, dtype=np.int64)
    cls_np = np.where(res % pt != 0, 0, np.where(res // pt == 0, 3, 2 - sq[(res // pt) % P])).astype(np.uint8)
    cdef unsigned char[::1] cls = cls_np
    # per-coordinate terms u_i p^(A - a_i) lam^2 mod p^(top+1), laid out one row per coordinate
    lims = [P ** (a - shift) for a in exps]
    width = max(lims)
    terms_np = np.zeros((t, width), dtype=np.int64)
    for i in range(t):
        lam_np = np.arange(lims[i], dtype=np.int64)
        c = (units[i] % mod) * (P ** (A - exps[i]) % mod) % mod
        terms_np[i, : lims[i]] = c * (lam_np * lam_np % mod) % mod
    cdef i64[:, ::1] terms = terms_np
    cdef i64 lim[32]
    cdef i64 lam[32]
    cdef i64 partial[33]
    cdef i64 hist[4]
    cdef i64 r, base, k
    for i in range(t):
        lim[i] = lims[i]
        lam[i] = 0
    for i in range(4):
        hist[i] = 0
    with nogil:
        partial[0] = 0
        for i in range(last):
            partial[i + 1] = (partial[i] + terms[i, 0]) % mod
        while True:
            base = partial[last]
            for k in range(lim[last]):
                r = base + terms[last, k]
                if r >= mod:
                    r -= mod
                hist[cls[r]] += 1
            # advance the leading coordinates like an odometer
            i = last - 1
            while i >= 0:
                lam[i] += 1
                if lam[i] < lim[i]:
                    break
                lam[i] = 0
                i -= 1
            if i < 0:
                break
            for j in range(i, last):
                partial[j + 1] = partial[j] + terms[j, lam[j]]
                if partial[j + 1] >= mod:
                    partial[j + 1] -= mod
    return int(hist[0]), int(hist[1]), int(hist[2]), int(hist[3])
