"""Command-line driver: construct, verify, count, bounds, search, reproduce, mols.

Every command prints canonical JSON (sorted keys) on stdout, except the
text forms of ``reproduce`` and ``mols``.  Exit codes::

    0  success or witness found
    1  usage error, bad input, or a failed reproduction claim
    2  proven empty (a complete search found nothing)
    3  exhausted (budget or cap reached without an answer)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import constructions as cons
from . import counting, manifest, mols
from .errors import CyclorthError
from .field import FieldCtx, make_field
from .orthomorphism import (
    CyclotomicMap,
    are_orthogonal_tables,
    from_record,
    is_irregular,
    is_orthomorphism_table,
    is_strong_table,
    least_index_of_table,
    to_record,
)
from .search import (
    DEFAULT_DD_CAP,
    DEFAULT_EXHAUSTIVE_CAP,
    DEFAULT_NODE_BUDGET,
    EXHAUSTED,
    PROVEN_EMPTY,
    PUBLISHED,
    WITNESS,
    count_orthomorphisms,
    exists_Dd_orthogonal_linear,
    exists_orthogonal_pair,
    validate_published,
    verify_equal_C_cases,
)

EXIT_OK, EXIT_USAGE, EXIT_EMPTY, EXIT_EXHAUSTED = 0, 1, 2, 3
VERDICT_EXIT = {WITNESS: EXIT_OK, PROVEN_EMPTY: EXIT_EMPTY, EXHAUSTED: EXIT_EXHAUSTED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "proven empty"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _field(args, required: bool = True) -> FieldCtx | None:
    if args.q is None:
        if required:
            raise UsageError("--q is required")
        return None
    return make_field(args.q, modulus=args.modulus, generator=args.generator)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{n}" for n in missing))


def _load_maps(args) -> tuple[FieldCtx, list]:
    """Maps from record files and/or ``--map`` multiplier lists over ``--q``."""
    F = _field(args, required=False)
    maps = []
    for path in args.records or []:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CyclorthError(f"{path}: not JSON ({exc})", code="bad-record") from exc
        if isinstance(data, dict) and "maps" in data:
            data = data["maps"]
        if isinstance(data, dict) and "witness" in data:
            data = data["witness"]
        for rec in data if isinstance(data, list) else [data]:
            if not isinstance(rec, dict):
                raise CyclorthError("record is not an object", code="bad-record")
            m = from_record(rec, F) if F is not None and "field" not in rec else from_record(rec)
            maps.append(m)
    for mult in args.map or []:
        if F is None:
            raise UsageError("--map needs --q")
        maps.append(CyclotomicMap(F, mult))
    if not maps:
        if F is None:
            raise UsageError("no maps given (use record files or --q with --map)")
        return F, []
    F0 = maps[0].field
    if any(m.field != F0 for m in maps):
        raise CyclorthError("records do not share one field", code="field-mismatch")
    return F0, maps


def _verify_payload(maps) -> dict:
    checks = []
    for m in maps:
        orth = is_orthomorphism_table(m)
        checks.append({
            "orthomorphism": orth,
            "strong": orth and is_strong_table(m),
            "least_index": least_index_of_table(m),
        })
    matrix = [[i != j and are_orthogonal_tables(a, b) for j, b in enumerate(maps)]
              for i, a in enumerate(maps)]
    return {"maps": checks, "orthogonal": matrix,
            "pairwise_orthogonal": all(matrix[i][j] for i in range(len(maps))
                                       for j in range(len(maps)) if i != j)}


# -- commands ------------------------------------------------------------------------------


def cmd_construct(args) -> int:
    F = _field(args)
    kind = args.kind
    extra = {}
    if kind == "near-linear":
        _need(args, "k")
        m = cons.near_linear_first(F, args.k)
        if m is None:
            _emit({"kind": kind, "q": F.q, "k": args.k, "verdict": PROVEN_EMPTY})
            return EXIT_EMPTY
        maps = [m]
    elif kind == "half-index":
        try:
            m, route = cons.build_half_index(F)
        except CyclorthError as exc:
            if exc.code != "q-in-5-7":
                raise
            _emit({"kind": kind, "q": F.q, "verdict": PROVEN_EMPTY, "reason": str(exc)})
            return EXIT_EMPTY
        maps, extra = [m], {"route": route}
    elif kind == "noncyclotomic":
        maps = [cons.construct_noncyclotomic(F)]
    elif kind == "irregular":
        m = cons.construct_irregular(F)
        maps, extra = [m], {"irregular": is_irregular(m)}
    elif kind in ("orthogonal-set", "strong-orthogonal-set"):
        _need(args, "index-list")
        found = cons.orthogonal_set(F, args.index_list, strong=kind.startswith("strong"))
        if found is None:
            _emit({"kind": kind, "q": F.q, "B": args.index_list, "verdict": EXHAUSTED})
            return EXIT_EXHAUSTED
        maps = found
    elif kind == "dd-ortho-linear":
        _need(args, "k")
        r = exists_Dd_orthogonal_linear(F, args.k, cap=args.cap or DEFAULT_DD_CAP,
                                        budget=args.budget or DEFAULT_NODE_BUDGET)
        if r.verdict != WITNESS:
            _emit(r.to_record())
            return VERDICT_EXIT[r.verdict]
        maps, extra = r.maps, {"method": r.method}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind}")
    out = {"kind": kind, "field": F.descriptor(), "maps": [to_record(m) for m in maps],
           "verified": _verify_payload(maps)}
    out.update(extra)
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    _, maps = _load_maps(args)
    _emit(_verify_payload(maps))
    return EXIT_OK


def cmd_count(args) -> int:
    what, q = args.what, args.q
    out = {"what": what}
    if what == "near-linear":
        _need(args, "q", "k")
        out.update(q=q, k=args.k, value=counting.near_linear_count(q, args.k))
    elif what == "linear-partners":
        _need(args, "q", "k")
        out.update(q=q, d=args.k, value=counting.linear_partner_count(q, args.k))
    elif what in ("ck", "dk"):
        _need(args, "q", "k")
        fn = counting.count_Ck if what == "ck" else counting.count_Dk
        cap = args.cap or counting.DEFAULT_COUNT_CAP
        val = fn(_field(args), args.k, cap)
        out.update({"q": q, "k": args.k, "value": val, "C_k" if what == "ck" else "D_k": val})
    elif what == "orthomorphisms":
        _need(args, "q")
        out.update(q=q, value=count_orthomorphisms(_field(args)))
    elif what == "exp-lower":
        _need(args, "q", "k")
        out.update(q=q, k=args.k, value=counting.exp_lower_bound(q, args.k))
    elif what == "solutions":
        _need(args, "q", "k", "A")
        out.update(q=q, k=args.k, A=args.A, value=counting.solution_count(_field(args), args.k, args.A))
    _emit(out)
    return EXIT_OK


def _sqrt_form(s: counting.SqrtForm) -> dict:
    return {"decimal": str(s), "const": str(s.const), "sqrt_coeff": str(s.coeff)}


def cmd_bounds(args) -> int:
    if args.what == "q0":
        _need(args, "k", "t")
        improved = args.variant == "babai2"
        val = counting.q0_threshold(args.k, args.t, improved)
        _emit({"what": "q0", "k": args.k, "t": args.t, "bound": args.variant, "q0": val, "value": val})
        return EXIT_OK
    _need(args, "q", "k", "t")
    p = counting.BoundParams(args.q, args.k, args.t)
    lo, hi = counting.babai_bounds(p)
    out = {"what": "weil", "q": args.q, "k": args.k, "t": args.t, "lower": _sqrt_form(lo),
           "upper": _sqrt_form(hi), "improved_lower": _sqrt_form(counting.babai2_lower(p))}
    _emit(out)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.what == "pair":
        _need(args, "index-list")
        if len(args.index_list) != 2:
            raise UsageError("--index-list must give exactly two indices a,b")
        a, b = sorted(args.index_list)
        r = exists_orthogonal_pair(_field(args), a, b, cap=args.cap or DEFAULT_EXHAUSTIVE_CAP,
                                   budget=args.budget or DEFAULT_NODE_BUDGET)
    elif args.what == "dd-linear":
        _need(args, "k")
        r = exists_Dd_orthogonal_linear(_field(args), args.k, cap=args.cap or DEFAULT_DD_CAP,
                                        budget=args.budget or DEFAULT_NODE_BUDGET)
    elif args.what == "published":
        if args.name not in PUBLISHED:
            raise UsageError(f"--name must be one of {sorted(PUBLISHED)}")
        r = validate_published(PUBLISHED[args.name], args.name)
    else:
        r = verify_equal_C_cases(args.q or 100)
    _emit(r.to_record())
    return VERDICT_EXIT.get(r.verdict, EXIT_EXHAUSTED)


def cmd_reproduce(args) -> int:
    claims = manifest.load_manifest(args.manifest)
    opts = {"budget": args.budget, "cap": args.cap}
    results = manifest.run_manifest(claims, jobs=args.jobs, opts=opts)
    if args.format == "json":
        sys.stdout.write(manifest.to_json(results))
    else:
        sys.stdout.write(manifest.format_table(results))
    return EXIT_OK if manifest.summary(results)["ok"] else EXIT_USAGE


def cmd_mols(args) -> int:
    F, maps = _load_maps(args)
    if args.out:
        paths = mols.write_mols(args.out, F, maps, stem=args.stem)
        _emit({"field": F.descriptor(), "squares": len(maps) + 1,
                     "files": [str(p) for p in paths]})
    else:
        squares = mols.build_mols(F, maps)
        sys.stdout.write("\n".join(mols.format_square(s) for s in squares))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field order (a prime power)")
    common.add_argument("--k", type=int, help="cyclotomic index (d for linear-partner queries)")
    common.add_argument("--index-list", type=_int_list, help="comma-separated indices, e.g. 2,3,5")
    common.add_argument("--generator", type=int, help="primitive element override (encoding)")
    common.add_argument("--modulus", type=_int_list,
                        help="irreducible modulus override, coefficients low to high")
    common.add_argument("--budget", type=int, help="search node budget")
    common.add_argument("--cap", type=int, help="largest q (or k for counts) searched exhaustively")

    maps = argparse.ArgumentParser(add_help=False)
    maps.add_argument("records", nargs="*", help="JSON map record files ('-' for stdin)")
    maps.add_argument("--map", type=_int_list, action="append",
                      help="multiplier list over --q; repeat for several maps")

    p = _Parser(prog="cyclorth", description="Cyclotomic orthomorphisms of finite fields.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build a verified orthomorphism")
    c.add_argument("kind", choices=["near-linear", "half-index", "noncyclotomic", "irregular",
                                    "orthogonal-set", "strong-orthogonal-set", "dd-ortho-linear"])
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common, maps], help="check map records")
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("count", parents=[common], help="closed-form and exact counts")
    n.add_argument("what", choices=["near-linear", "linear-partners", "ck", "dk", "orthomorphisms",
                                    "exp-lower", "solutions"])
    n.add_argument("--A", type=_int_list, help="shift set for 'solutions'")
    n.set_defaults(func=cmd_count)

    b = sub.add_parser("bounds", parents=[common], help="character-sum bounds and thresholds")
    b.add_argument("what", choices=["q0", "weil"])
    b.add_argument("--t", type=int, help="number of shifts")
    b.add_argument("--variant", choices=["babai", "babai2"], default="babai2",
                   help="plain or improved lower bound (default improved)")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("search", parents=[common], help="existence searches with verdicts")
    s.add_argument("what", choices=["pair", "dd-linear", "published", "equal-c"])
    s.add_argument("--name", help="worked example for 'published'")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reproduce", parents=[common], help="run a claims manifest")
    r.add_argument("manifest", nargs="?", help="manifest path (default: the shipped one)")
    r.add_argument("--jobs", type=int, default=1, help="worker processes")
    r.add_argument("--format", choices=["text", "json"], default="text")
    r.set_defaults(func=cmd_reproduce)

    m = sub.add_parser("mols", parents=[common, maps], help="Latin squares from orthogonal maps")
    m.add_argument("--out", help="directory for square files and the JSON sidecar")
    m.add_argument("--stem", default="square", help="file name stem (default 'square')")
    m.set_defaults(func=cmd_mols)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except CyclorthError as exc:
        sys.stderr.write(dumps({"error": exc.code, "message": str(exc)}))
        return EXIT_USAGE
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
