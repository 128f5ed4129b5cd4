"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row times one kernel call on the same inputs with both backends and also
runs one end-to-end workload (oracle counts and mu profiles) with the backend
swapped in.
"""

from __future__ import annotations

import argparse
import timeit
from fractions import Fraction

import numpy as np

from siegel_local import _kernels_py, kernels

try:
    from siegel_local import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def kernel_cases():
    rng = np.random.default_rng(0)
    out = []
    for p, m in ((3, 6), (5, 5), (7, 4)):
        A = rng.integers(0, p, size=(m, m))
        G = ((A + A.T) % p).astype(np.int64)
        prev = [list(rng.integers(0, p, size=m)) for _ in range(2)]
        excluded = np.zeros(p ** m, dtype=np.uint8)
        out.append((f"column_scan p={p} m={m}", "column_scan", (G, prev, [1, 0], 1, excluded, p)))
    for mod, m in ((9, 4), (25, 3), (27, 3)):
        A = rng.integers(0, mod, size=(m, m))
        G = ((A + A.T) % mod).astype(np.int64)
        out.append((f"column_solutions mod={mod} m={m}", "column_solutions", (G, [], [], 1, mod)))
    for p, exps in ((3, [1, 2, 3, 4]), (5, [1, 2, 3]), (3, [2, 3, 3, 4])):
        out.append((f"coset_histogram p={p} a={exps}", "coset_histogram", ([1] * len(exps), exps, 0, p)))
    return out


def workload():
    from siegel_local.counting import mu_profile, type_t_grid
    from siegel_local.oracle import count_representations
    from siegel_local.padic import PrimeCtx, diag_lattice, selfdual

    ctx = PrimeCtx(3)
    for L in type_t_grid(3, 7, ctx):
        mu_profile(L)
    count_representations(selfdual(ctx, 5, 1), diag_lattice(ctx, [3, 9]), 4)
    count_representations(diag_lattice(ctx, [1, 3, 9]), diag_lattice(ctx, [3, Fraction(9)]), 2)


def _swap(impl):
    for name in ("column_scan", "column_solutions", "coset_histogram"):
        setattr(kernels, name, getattr(impl, name))


def _canon(x):
    if isinstance(x, np.ndarray):
        return sorted(map(tuple, x.tolist()))
    return tuple(int(v) for v in x)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not available; only the fallback can run")
        return
    print(f"{'case':42s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for label, name, inputs in kernel_cases():
        fc, fp = getattr(compiled, name), getattr(_kernels_py, name)
        a, b = fc(*inputs), fp(*inputs)
        assert _canon(a) == _canon(b), label
        tc = best(lambda: fc(*inputs), args.repeat)
        tp = best(lambda: fp(*inputs), args.repeat)
        print(f"{label:42s} {tc * 1e3:10.2f} {tp * 1e3:10.2f} {tp / tc:8.1f}")
    times = {}
    from siegel_local import siegel

    for impl, tag in ((compiled, "cython"), (_kernels_py, "python")):
        _swap(impl)
        siegel.clear_caches()
        times[tag] = best(workload, max(1, args.repeat // 2))
    _swap(compiled)
    print(f"{'end-to-end (mu grid t=3 + oracle counts)':42s} {times['cython'] * 1e3:10.1f} {times['python'] * 1e3:10.1f} {times['python'] / times['cython']:8.1f}")


if __name__ == "__main__":
    main()
