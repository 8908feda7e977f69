"""Reproduction manifests: parse claim lines, run them, tabulate the results.

One claim per line, whitespace-separated::

    <id> <kind> <params> <expected>

``params`` is ``key=value`` pairs joined by commas (``-`` for none); list
values use ``:`` as separator, e.g. ``B=2:3:5``.  ``expected`` is a verdict
(witness, proven-empty, exhausted) or an integer.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from .constructions import (
    build_half_index,
    construct_irregular,
    construct_noncyclotomic,
    dk_witness,
    near_linear_all,
    orthogonal_set,
)
from .counting import count_Dk, exp_lower_bound, linear_partner_count, near_linear_count, q0_threshold
from .errors import CyclorthError
from .field import make_field
from .orthomorphism import is_irregular, is_noncyclotomic, least_index_of_table
from .search import (
    EXHAUSTED,
    PUBLISHED,
    WITNESS,
    count_linear_partners,
    count_orthomorphisms,
    exists_Dd_orthogonal_linear,
    exists_orthogonal_pair,
    validate_published,
    verify_equal_C_cases,
)


@dataclass(frozen=True)
class Claim:
    id: str
    kind: str
    params: dict
    expected: str

    def to_line(self) -> str:
        ps = ",".join(f"{k}={':'.join(map(str, v)) if isinstance(v, tuple) else v}"
                      for k, v in self.params.items()) or "-"
        return f"{self.id} {self.kind} {ps} {self.expected}"


def _value(text: str):
    if ":" in text:
        return tuple(int(v) for v in text.split(":"))
    try:
        return int(text)
    except ValueError:
        return text


def parse_manifest(text: str) -> list[Claim]:
    claims, seen = [], set()
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise CyclorthError(f"line {n}: expected 4 fields, got {len(parts)}", code="bad-manifest")
        cid, kind, ps, expected = parts
        if kind not in RUNNERS:
            raise CyclorthError(f"line {n}: unknown claim kind {kind!r}", code="bad-manifest")
        if cid in seen:
            raise CyclorthError(f"line {n}: duplicate claim id {cid!r}", code="bad-manifest")
        seen.add(cid)
        params = {}
        if ps != "-":
            for item in ps.split(","):
                key, sep, val = item.partition("=")
                if not sep:
                    raise CyclorthError(f"line {n}: bad parameter {item!r}", code="bad-manifest")
                params[key] = _value(val)
        claims.append(Claim(cid, kind, params, expected))
    return claims


def load_manifest(path: str | Path | None = None) -> list[Claim]:
    if path is None:
        text = resources.files("cyclorth").joinpath("data/claims.manifest").read_text()
    else:
        text = Path(path).read_text()
    return parse_manifest(text)


# -- runners -------------------------------------------------------------------------------
# Each returns (observed, detail).  Observed is compared to the expected string.


def _agree(values) -> str:
    vals = set(values)
    if len(vals) == 1:
        return str(vals.pop())
    return "mismatch"


def _search_opts(opts):
    return {k: v for k, v in opts.items() if k in ("budget", "cap") and v is not None}


def _orthogonal_pair(p, opts):
    r = exists_orthogonal_pair(make_field(p["q"]), p["a"], p["b"], **_search_opts(opts))
    return r.verdict, {"method": r.method, "work": r.work}


def _dd_linear(p, opts):
    r = exists_Dd_orthogonal_linear(make_field(p["q"]), p["d"], **_search_opts(opts))
    return r.verdict, {"method": r.method, "work": r.work}


def _dk_count(p, opts):
    return str(count_Dk(make_field(p["q"]), p["k"])), {}


def _dk_witness(p, opts):
    F = make_field(p["q"])
    m = dk_witness(F, p["k"])
    return (WITNESS if least_index_of_table(m) == p["k"] else "wrong-index"), {}


def _near_linear_count(p, opts):
    F = make_field(p["q"])
    return _agree([len(near_linear_all(F, p["k"])), near_linear_count(p["q"], p["k"])]), {}


def _linear_partners(p, opts):
    F = make_field(p["q"])
    counts = [count_linear_partners(m) for m in near_linear_all(F, p["d"])]
    return _agree(counts + [linear_partner_count(p["q"], p["d"])]), {"maps": len(counts)}


def _q0(p, opts):
    return str(q0_threshold(p["k"], p["t"], p.get("variant", "babai2") == "babai2")), {}


def _half_index(p, opts):
    _, route = build_half_index(make_field(p["q"]))
    return WITNESS, {"route": route}


def _noncyclotomic(p, opts):
    ok = is_noncyclotomic(construct_noncyclotomic(make_field(p["q"])))
    return (WITNESS if ok else "not-noncyclotomic"), {}


def _irregular(p, opts):
    ok = is_irregular(construct_irregular(make_field(p["q"])))
    return (WITNESS if ok else "not-irregular"), {}


def _published(p, opts):
    r = validate_published(PUBLISHED[p["name"]], p["name"])
    return r.verdict, {"generator": r.generator}


def _orthomorphism_count(p, opts):
    return str(count_orthomorphisms(make_field(p["q"]))), {}


def _exp_lower(p, opts):
    n = count_orthomorphisms(make_field(p["q"]))
    bound = exp_lower_bound(p["q"], p["k"])
    return ("holds" if n >= bound else "fails"), {"count": n, "bound": bound}


def _equal_c(p, opts):
    r = verify_equal_C_cases(p.get("max_q", 100))
    return r.verdict, {"work": r.work}


def _orthogonal_set(p, opts, strong=False):
    B = p["B"] if isinstance(p["B"], tuple) else (p["B"],)
    found = orthogonal_set(make_field(p["q"]), B, strong=strong)
    return (WITNESS if found else EXHAUSTED), {}


RUNNERS: dict[str, Callable] = {
    "orthogonal-pair": _orthogonal_pair,
    "dd-linear": _dd_linear,
    "dk-count": _dk_count,
    "dk-witness": _dk_witness,
    "near-linear-count": _near_linear_count,
    "linear-partners": _linear_partners,
    "q0": _q0,
    "half-index": _half_index,
    "noncyclotomic": _noncyclotomic,
    "irregular": _irregular,
    "published": _published,
    "orthomorphism-count": _orthomorphism_count,
    "exp-lower": _exp_lower,
    "equal-c": _equal_c,
    "orthogonal-set": _orthogonal_set,
    "strong-orthogonal-set": lambda p, o: _orthogonal_set(p, o, strong=True),
}


def run_claim(claim: Claim, opts: dict | None = None) -> dict:
    opts = opts or {}
    try:
        observed, detail = RUNNERS[claim.kind](claim.params, opts)
    except CyclorthError as exc:
        observed, detail = f"error:{exc.code}", {"message": str(exc)}
    except KeyError as exc:
        observed, detail = "error:missing-param", {"message": f"missing parameter {exc}"}
    params = {k: list(v) if isinstance(v, tuple) else v for k, v in claim.params.items()}
    return {
        "id": claim.id,
        "kind": claim.kind,
        "params": params,
        "expected": claim.expected,
        "observed": observed,
        "pass": observed == claim.expected,
        "detail": detail,
    }


def _run_one(args):
    return run_claim(*args)


def run_manifest(claims: list[Claim], jobs: int = 1, opts: dict | None = None) -> list[dict]:
    """Run every claim; results come back in manifest order whatever ``jobs`` is."""
    work = [(c, opts) for c in claims]
    if jobs <= 1 or len(claims) < 2:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


def summary(results: list[dict]) -> dict:
    passed = sum(r["pass"] for r in results)
    return {"claims": len(results), "passed": passed, "failed": len(results) - passed,
            "ok": passed == len(results)}


def format_table(results: list[dict]) -> str:
    lines = []
    width = max((len(r["id"]) for r in results), default=2)
    for r in results:
        mark = "PASS" if r["pass"] else "FAIL"
        lines.append(f"{mark}  {r['id']:<{width}}  expected={r['expected']}  observed={r['observed']}")
    s = summary(results)
    lines.append(f"{s['passed']}/{s['claims']} claims passed")
    return "\n".join(lines) + "\n"


def to_json(results: list[dict]) -> str:
    return json.dumps({"summary": summary(results), "results": results}, sort_keys=True, indent=2) + "\n"

