"""Command-line front end.

stdout carries only the JSON or CSV report; diagnostics go to stderr.
Exit status: 0 success, 1 identity violation (witness on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import pickle
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import counting, geometry, overlattice, siegel
from .errors import IdentityViolated, ParseError, SiegelError
from .oracle import density_oracle
from .padic import PrimeCtx, QuadLattice, chi, diag_lattice, fundamental_invariants, hasse, invariants, jordan_profile, lattice_from_json
from .sampling import item_rng, random_lattice

# descriptors ---------------------------------------------------------------------

_NUM = re.compile(rb"\s*([+-]?\d+(?:/\d+)?)\s*")


def _parse_diag(data: bytes, start: int) -> list[Fraction]:
    pos = start
    out = []
    if data[pos:pos + 1] == b")":
        raise ParseError("empty diag()", pos)
    while True:
        m = _NUM.match(data, pos)
        if not m:
            raise ParseError("expected an integer or fraction", pos)
        try:
            out.append(Fraction(m.group(1).decode()))
        except ZeroDivisionError:
            raise ParseError("zero denominator", m.start(1)) from None
        pos = m.end()
        c = data[pos:pos + 1]
        if c == b",":
            pos += 1
            continue
        if c == b")":
            pos += 1
            break
        raise ParseError("expected ',' or ')'", pos)
    if data[pos:].strip():
        raise ParseError("trailing characters", pos)
    return out


def parse_lattice(descriptor: str, p: int | None = None) -> QuadLattice:
    """`diag(a,b,...)`, a JSON object {"p":..,"gram":[[..]]}, or a bare JSON Gram matrix."""
    data = descriptor.encode()
    lead = len(data) - len(data.lstrip())
    body = data.lstrip()
    if body.startswith(b"diag("):
        if p is None:
            raise ParseError("diag(...) needs --p", lead)
        return diag_lattice(PrimeCtx(p), _parse_diag(data, lead + 5))
    if body.startswith(b"{"):
        L = lattice_from_json(descriptor)
        if p is not None and L.p != p:
            raise ParseError(f"descriptor has p={L.p} but --p {p} was given", lead)
        return L
    if body.startswith(b"["):
        if p is None:
            raise ParseError("a bare Gram matrix needs --p", lead)
        return lattice_from_json(json.dumps({"p": p, "gram": json.loads(descriptor)}) if _valid_json(descriptor) else descriptor)
    raise ParseError("expected diag(...), a JSON object or a JSON matrix", lead)


def _valid_json(text: str) -> bool:
    try:
        json.loads(text)
        return True
    except json.JSONDecodeError:
        return False


def canonical_descriptor(L: QuadLattice) -> str:
    return json.dumps({"p": L.p, "gram": [[str(x) for x in row] for row in L.gram]}, separators=(",", ":"))


# output ------------------------------------------------------------------------


def _jsonable(x: Any) -> Any:
    if isinstance(x, QuadLattice):
        return json.loads(canonical_descriptor(x))
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, float, str)):
        return x
    if hasattr(x, "as_dict"):
        return _jsonable(x.as_dict())
    return str(x)


def _cell(v: Any) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def emit(report: Any, fmt: str = "json", stream=None) -> str:
    """Render a report; CSV has one row per record and JSON-encoded nested cells."""
    obj = _jsonable(report)
    if fmt == "json":
        text = json.dumps(obj) + "\n"
    else:
        rows = obj if isinstance(obj, list) else [obj]
        rows = [r if isinstance(r, dict) else {"value": r} for r in rows]
        fields: list[str] = []
        for r in rows:
            for k in r:
                if k not in fields:
                    fields.append(k)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_cell(r.get(k)) for k in fields])
        text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


class UsageError(Exception):
    pass


# parallel map ----------------------------------------------------------------------


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# workers (top level so they pickle) ------------------------------------------------


def _fe_item(args) -> dict | None:
    seed, i, p, eps, max_rank, max_val = args
    rng = item_rng(seed, i)
    L = random_lattice(rng, PrimeCtx(p), int(rng.integers(1, max_rank + 1)), max_val)
    e = eps if eps is not None else int(rng.choice([1, -1]))
    try:
        siegel.check_functional_equation(L, e)
        siegel.check_functional_equation_flat(L, e)
    except IdentityViolated as err:
        return {"index": i, "gram": canonical_descriptor(L), "eps": e, "witness": err.witness}
    return None


def _induction_item(args) -> dict | None:
    seed, i, p, eps, max_rank, max_val = args
    rng = item_rng(seed, i)
    ctx = PrimeCtx(p)
    # keeps val(L_flat + <x>) within the enumeration guard
    Lf = random_lattice(rng, ctx, int(rng.integers(1, max_rank + 1)), min(max_val, 5))
    a = fundamental_invariants(Lf).a
    k = (a[-1] if a else 0) + 1 + int(rng.integers(0, 2))
    x = Fraction(int(rng.choice([1, ctx.r])) * p ** k)
    e = eps if eps is not None else int(rng.choice([1, -1]))
    try:
        siegel.induction_step(Lf, x, e)
    except IdentityViolated as err:
        return {"index": i, "gram": canonical_descriptor(Lf), "x_norm": str(x), "eps": e, "witness": err.witness}
    return None


def _counting_item(args) -> list[dict]:
    seed, i, p, t, max_val = args
    rng = item_rng(seed, i)
    L = random_lattice(rng, PrimeCtx(p), t, max_val, min_exp=1)
    out = []
    for s in (1, -1):
        if counting.admissible(L, s):
            try:
                out.append(counting.check_counting(L, s))
            except IdentityViolated as err:
                out.append(err.witness)
    return out


# subcommands -----------------------------------------------------------------------


def _lattice(args, name: str = "gram") -> QuadLattice:
    d = getattr(args, name)
    if d is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return parse_lattice(d, args.p)


def _eps(args) -> int:
    if args.epsilon is None:
        raise UsageError("--epsilon is required")
    return args.epsilon


def _need_p(args) -> int:
    if args.p is None:
        raise UsageError("--p is required")
    return args.p


def cmd_invariants(args):
    L = _lattice(args)
    inv = invariants(L)
    out = {"p": L.p, "rank": L.n, "chi": chi(L), "hasse": hasse(L), "jordan": [list(b) for b in jordan_profile(L).blocks]}
    if L.is_integral():
        out["fundamental_invariants"] = list(fundamental_invariants(L).a)
    out.update(inv.as_dict())
    return out


def cmd_overlattices(args):
    L = _lattice(args)
    parity = L.n + 1
    return [e.as_dict(parity) for e in overlattice.enumerate_integral_overlattices(L, force=args.force)]


def cmd_den(args):
    L = _lattice(args)
    eps = _eps(args)
    P = siegel.den_poly(L, eps)
    out = {
        "input": canonical_descriptor(L),
        "eps": eps,
        "den": P.coeffs,
        "nor": siegel.nor_poly(L.n, eps, L.p).coeffs,
        "fe_sign": siegel.fe_sign(L, eps),
        "value_at_1": P(Fraction(1)),
        "checks": {"functional_equation": siegel.check_functional_equation(L, eps)["passed"]},
    }
    if args.k is not None:
        out["density"] = siegel.local_density_closed(L.n + 1 + 2 * args.k, eps, L)
    if L.is_integral():
        out["den_flat"] = siegel.den_flat_poly(L, eps).coeffs
    return out


def cmd_pden(args):
    L = _lattice(args)
    eps = _eps(args)
    return {"pden": siegel.pden(L, eps), "fe_sign": siegel.fe_sign(L, eps)}


def _suite(args, worker, label: str):
    p = _need_p(args)
    if args.gram is not None:
        return None
    if args.random is None:
        raise UsageError(f"{label} needs --gram or --random")
    items = [(args.seed, i, p, args.epsilon, args.max_rank, args.max_val) for i in range(args.random)]
    results = _pmap(worker, items, args.jobs)
    bad = [r for r in results if r is not None]
    if bad:
        raise IdentityViolated(f"{label} failed on {len(bad)} of {len(items)}", {"passed": len(items) - len(bad), "failures": bad})
    return {"passed": len(items)}


def cmd_fe_check(args):
    out = _suite(args, _fe_item, "fe-check")
    if out is not None:
        return out
    L = _lattice(args)
    eps = _eps(args)
    rep = {"odd": siegel.check_functional_equation(L, eps)}
    if L.is_integral():
        rep["even"] = siegel.check_functional_equation_flat(L, eps)
    rep["passed"] = 1
    return rep


def cmd_induction_check(args):
    out = _suite(args, _induction_item, "induction-check")
    if out is not None:
        return out
    Lf = _lattice(args)
    eps = _eps(args)
    if args.x_norm is None:
        a = fundamental_invariants(Lf).a
        x = Fraction(Lf.p ** ((a[-1] if a else 0) + 1))
    else:
        x = Fraction(args.x_norm)
    return siegel.induction_step(Lf, x, eps)


def cmd_oracle(args):
    M = _lattice(args, "m_gram")
    L = _lattice(args, "l_gram")
    res = density_oracle(M, L, N=args.N, budget=args.budget)
    return res.as_dict()


def cmd_horizontal(args):
    Lf = _lattice(args)
    eps = _eps(args)
    co = geometry.is_coisotropic(Lf, eps)
    hs = geometry.hor_set(Lf, eps)
    out = {
        "coisotropic": co,
        "hor_set": [e.as_dict(Lf.n) for e in hs],
        "horizontal_degree": geometry.horizontal_degree(Lf, eps),
        "den_flat_at_1": siegel.den_flat_at_1(Lf, eps),
    }
    if not co:
        out["generic_fiber"] = geometry.generic_fiber_check(Lf, eps)
        out["passed"] = out["generic_fiber"]["passed"]
    else:
        out["passed"] = out["horizontal_degree"] == 0 or not _flat_realizable(Lf, eps)
    return out


def _flat_realizable(Lf, eps) -> bool:
    return bool(counting.admissible_perp_norms(Lf, eps, fundamental_invariants(Lf).val + 3))


def cmd_int(args):
    L = _lattice(args)
    eps = _eps(args)
    return {"int": geometry.intersection_number(L, eps), "realizable": L.is_integral() and geometry.is_realizable(L, eps)}


def cmd_vertex(args):
    ctx = PrimeCtx(_need_p(args))
    eps = _eps(args)
    t = args.type
    L = geometry.vertex_lattice(args.m, eps, t, ctx)
    out = {"gram": canonical_descriptor(L), "m": args.m, "eps": eps, "type": t, "t_max": geometry.t_max(args.m, eps)}
    vc = geometry.VertexLatticeCtx(L, t // 2 - 1, args.m, eps)
    out["w_chi"] = vc.W.chi0
    if t == 4:
        out["type_two_count"] = len(geometry.type_two_overlattices(vc))
    return out


def cmd_modularity_check(args):
    ctx = PrimeCtx(_need_p(args))
    eps = _eps(args)
    vc = geometry.vertex_ctx(args.m, eps, args.d, ctx)
    return geometry.check_local_modularity(vc, args.function)


def cmd_counting_check(args):
    if args.t is None or args.val is None:
        raise UsageError("--t and --val are required")
    p = _need_p(args)
    items = [(args.seed, i, p, args.t, args.val) for i in range(args.trials)]
    reports = [r for rs in _pmap(_counting_item, items, args.jobs) for r in rs]
    bad = [r for r in reports if not r.get("passed")]
    out = {"t": args.t, "max_val": args.val, "p": p, "trials": args.trials, "checked": len(reports), "passed": len(reports) - len(bad)}
    if bad:
        out["failures"] = bad
        raise IdentityViolated("counting identity fails", out)
    return out


def cmd_whittaker(args):
    L = _lattice(args)
    eps = _eps(args)
    out = {"fe_sign": siegel.fe_sign(L, eps)}
    if args.k is not None:
        out["k"] = args.k
        out["value"] = siegel.whittaker_value(L, eps, args.k)
    elif out["fe_sign"] == -1:
        out["derivative"] = siegel.whittaker_derivative(L, eps)
    else:
        out["value"] = siegel.whittaker_value(L, eps, 0)
    return out


def cmd_selftest(args):
    from .selftest import GROUPS, run

    if args.group not in GROUPS:
        raise UsageError(f"unknown selftest group {args.group!r}; choose from {sorted(GROUPS)}")
    rep = run(args.group)
    if rep["failures"]:
        raise IdentityViolated("selftest failures", rep)
    return rep


COMMANDS: dict[str, Callable] = {
    "invariants": cmd_invariants,
    "overlattices": cmd_overlattices,
    "den": cmd_den,
    "pden": cmd_pden,
    "fe-check": cmd_fe_check,
    "induction-check": cmd_induction_check,
    "oracle": cmd_oracle,
    "horizontal": cmd_horizontal,
    "int": cmd_int,
    "vertex": cmd_vertex,
    "modularity-check": cmd_modularity_check,
    "counting-check": cmd_counting_check,
    "whittaker": cmd_whittaker,
    "selftest": cmd_selftest,
}


def _eps_arg(s: str) -> int:
    v = int(s)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("epsilon must be 1 or -1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--epsilon", type=_eps_arg)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--cache", default=None, help="overlattice cache file ($SIEGEL_CACHE takes precedence)")
    common.add_argument("--budget", type=int, default=10 ** 7)

    ap = argparse.ArgumentParser(prog="siegel-local", description="Local densities, Siegel series and lattice counts over Z_p.")
    sub = ap.add_subparsers(dest="command", required=True)
    lat = argparse.ArgumentParser(add_help=False)
    lat.add_argument("--gram")
    suite = argparse.ArgumentParser(add_help=False)
    suite.add_argument("--random", type=int)
    suite.add_argument("--max-rank", type=int, default=4)
    suite.add_argument("--max-val", type=int, default=6)

    sub.add_parser("invariants", parents=[common, lat])
    s = sub.add_parser("overlattices", parents=[common, lat])
    s.add_argument("--force", action="store_true")
    s = sub.add_parser("den", parents=[common, lat])
    s.add_argument("--k", type=int)
    sub.add_parser("pden", parents=[common, lat])
    sub.add_parser("fe-check", parents=[common, lat, suite])
    s = sub.add_parser("induction-check", parents=[common, lat, suite])
    s.add_argument("--x-norm")
    s = sub.add_parser("oracle", parents=[common])
    s.add_argument("--m-gram")
    s.add_argument("--l-gram")
    s.add_argument("--N", type=int)
    sub.add_parser("horizontal", parents=[common, lat])
    sub.add_parser("int", parents=[common, lat])
    s = sub.add_parser("vertex", parents=[common])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--type", type=int, default=4)
    s = sub.add_parser("modularity-check", parents=[common])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--function", choices=["int", "c"], default="int")
    s = sub.add_parser("counting-check", parents=[common])
    s.add_argument("--t", type=int)
    s.add_argument("--val", type=int)
    s.add_argument("--trials", type=int, default=20)
    s = sub.add_parser("whittaker", parents=[common, lat])
    s.add_argument("--k", type=int)
    s = sub.add_parser("selftest", parents=[common])
    s.add_argument("group", nargs="?", default="examples")
    return ap


def _load_cache(path: str | None):
    if not path:
        return
    if os.path.exists(path):
        try:
            with open(path, "rb") as fh:
                overlattice.load_cache(pickle.load(fh))
            return
        except (OSError, pickle.UnpicklingError, EOFError) as e:
            print(f"ignoring unreadable cache {path}: {e}", file=sys.stderr)
    overlattice.load_cache({})


def _save_cache(path: str | None):
    if not path:
        return
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        pickle.dump(overlattice.cache_snapshot(), fh)
    os.replace(tmp, path)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cache = os.environ.get("SIEGEL_CACHE") or args.cache
    _load_cache(cache)
    try:
        report = COMMANDS[args.command](args)
    except IdentityViolated as e:
        emit({"error": "identity_violated", "message": str(e), "witness": e.witness}, args.format, sys.stdout)
        return 1
    except (UsageError, ParseError, ValueError) as e:
        print(f"{ap.prog} {args.command}: error: {e}", file=sys.stderr)
        return 2
    except SiegelError as e:
        print(f"{ap.prog} {args.command}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    emit(report, args.format, sys.stdout)
    try:
        _save_cache(cache)
    except OSError as e:
        print(f"could not write cache {cache}: {e}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
