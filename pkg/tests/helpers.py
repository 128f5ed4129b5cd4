import itertools

from siegel_local.padic import PrimeCtx, diag_lattice


def diagonal_grid(ctx: PrimeCtx, max_rank: int, max_val: int, min_rank: int = 1):
    """Diagonal integral lattices with unit classes in {1, r}, up to isometry of the diagonal data."""
    p = ctx.p
    for n in range(min_rank, max_rank + 1):
        for ex in itertools.combinations_with_replacement(range(max_val + 1), n):
            if sum(ex) > max_val:
                continue
            seen = set()
            for us in itertools.product((1, ctx.r), repeat=n):
                key = tuple(sorted(zip(ex, us)))
                if key in seen:
                    continue
                seen.add(key)
                yield diag_lattice(ctx, [u * p ** a for a, u in key])
