"""Exhaustive enumeration and existence searches.

Every search ends in one of four verdicts:

* ``witness`` -- objects were found and re-verified with the table-level
  predicates;
* ``proven-empty`` -- the whole space was enumerated without a hit;
* ``exhausted`` -- a cap or budget stopped the search before it finished;
* ``skipped`` -- the search was not attempted.

``proven-empty`` is only ever reported after a complete enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .constructions import (
    construct_Dd_orthogonal_linear,
    dk_witness,
    near_linear_all,
    orthogonal_set,
)
from .counting import count_Dk
from .cyclotomy import indexer, multiplier_class_table
from .errors import BudgetExceededError, CyclorthError, DivisibilityError, NotOrthomorphismError
from .field import FieldCtx, divisors, make_field, prime_powers
from .orthomorphism import (
    AnyMap,
    CyclotomicMap,
    are_orthogonal,
    are_orthogonal_tables,
    is_orthomorphism,
    is_orthomorphism_table,
    least_index,
    least_index_of_table,
    linear,
    to_record,
)

WITNESS = "witness"
PROVEN_EMPTY = "proven-empty"
EXHAUSTED = "exhausted"
SKIPPED = "skipped"

DEFAULT_ENUM_BUDGET = 10**7  # bound on (k!)^2 for enumerate_Dk
DEFAULT_EXHAUSTIVE_CAP = 64
DEFAULT_DD_CAP = 128
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class SearchReport:
    claim: str
    params: dict
    verdict: str
    maps: list = dc_field(default_factory=list)
    generator: int | None = None
    work: int = 0
    method: str = ""
    notes: dict = dc_field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {
            "claim": self.claim,
            "params": self.params,
            "verdict": self.verdict,
            "witness": [to_record(m) for m in self.maps],
            "generator": self.generator,
            "work": self.work,
            "method": self.method,
        }
        if self.notes:
            rec["notes"] = self.notes
        return rec


def _member(m: AnyMap, k: int) -> bool:
    return is_orthomorphism_table(m) and least_index_of_table(m) == k


# -- enumeration of D_k ------------------------------------------------------------


def enumerate_Dk(field: FieldCtx, k: int, budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[CyclotomicMap]:
    """Stream every orthomorphism of least index k, as multiplier lists.

    The outer loop walks the pairs of class permutations (where ``a_i`` and
    ``a_i - 1`` send class i) and skips empty cells; each surviving pair
    contributes the product of its cells.
    """
    if k < 1 or (field.q - 1) % k:
        raise DivisibilityError(f"k={k} does not divide q-1={field.q - 1}")
    if math.factorial(k) ** 2 > budget:
        raise BudgetExceededError(f"(k!)^2 for k={k} exceeds the budget {budget}")
    cells = multiplier_class_table(field, k).cells

    def walk(i: int, used_s: int, used_t: int, chosen: list):
        if i == k:
            for combo in product(*chosen):
                m = CyclotomicMap(field, combo)
                if least_index(m) == k:
                    yield m
            return
        for s in range(k):
            if used_s >> s & 1:
                continue
            row = cells[(s - i) % k]
            for t in range(k):
                if used_t >> t & 1:
                    continue
                cell = row[(t - i) % k]
                if cell:
                    chosen.append(cell)
                    yield from walk(i + 1, used_s | 1 << s, used_t | 1 << t, chosen)
                    chosen.pop()

    return walk(0, 0, 0, [])


def _class_perm_rows(targets: np.ndarray) -> np.ndarray:
    """Rows of ``targets`` (values in 0..L-1) that are permutations."""
    srt = np.sort(targets, axis=1)
    return np.all(srt == np.arange(targets.shape[1]), axis=1)


def _orthogonal_to_many(field: FieldCtx, theta: Sequence[int], others: np.ndarray, L: int) -> np.ndarray:
    """Class-level orthogonality of one multiplier list against many (rows of ``others``)."""
    a = np.asarray([theta[i % len(theta)] for i in range(L)], dtype=np.int64)
    b = others[:, np.arange(L) % others.shape[1]]
    diff = field.sub_v(a[None, :], b)
    ok = np.all(diff != 0, axis=1)
    lab = indexer(field, L).labels[diff]
    return ok & _class_perm_rows((np.arange(L) + lab) % L)


# -- orthogonal pairs of given least indices ----------------------------------------


def exists_orthogonal_pair(field: FieldCtx, a: int, b: int, *, cap: int = DEFAULT_EXHAUSTIVE_CAP,
                           budget: int = DEFAULT_NODE_BUDGET) -> SearchReport:
    """Orthogonal orthomorphisms of least indices a and b.

    Near-linear pairs are tried first (the greedy class-system construction,
    then a scan of all near-linear pairs); if none exists and ``q <= cap``
    every pair in ``D_a x D_b`` is examined.
    """
    F = field
    params = {"q": F.q, "a": a, "b": b}
    if not 1 < a <= b:
        raise CyclorthError("need 1 < a <= b", code="parameter-violation")
    L = math.lcm(a, b)
    if (F.q - 1) % L:
        raise DivisibilityError(f"lcm(a,b)={L} does not divide q-1={F.q - 1}")
    claim = f"orthogonal-pair/q={F.q}/a={a}/b={b}"

    def done(pair, method, work):
        t1, t2 = pair
        if not (_member(t1, a) and _member(t2, b) and are_orthogonal_tables(t1, t2)):
            raise CyclorthError("witness pair failed verification", code="verification-failed")
        return SearchReport(claim, params, WITNESS, [t1, t2], F.generator, work, method)

    work = 0
    greedy = orthogonal_set(F, (a, b)) if 2 * b < F.q - 1 else None
    if greedy is not None:
        return done(greedy, "near-linear-greedy", 1)

    if 2 * b < F.q - 1:
        na, nb = near_linear_all(F, a), near_linear_all(F, b)
        if na and nb:
            rows = np.asarray([m.multipliers for m in nb], dtype=np.int64)
            for m in na:
                work += len(nb)
                hit = np.flatnonzero(_orthogonal_to_many(F, m.multipliers, rows, L))
                if hit.size:
                    return done((m, nb[int(hit[0])]), "near-linear-scan", work)
                if work > budget:
                    return SearchReport(claim, params, EXHAUSTED, [], F.generator, work,
                                        "near-linear-scan")

    if F.q > cap:
        return SearchReport(claim, params, EXHAUSTED, [], F.generator, work, "cap")
    db = list(enumerate_Dk(F, b))
    if not db:
        return SearchReport(claim, params, PROVEN_EMPTY, [], F.generator, work, "exhaustive")
    rows = np.asarray([m.multipliers for m in db], dtype=np.int64)
    for m in enumerate_Dk(F, a):
        work += len(db)
        hit = np.flatnonzero(_orthogonal_to_many(F, m.multipliers, rows, L))
        if hit.size:
            return done((m, db[int(hit[0])]), "exhaustive", work)
    return SearchReport(claim, params, PROVEN_EMPTY, [], F.generator, work, "exhaustive")


# -- D_d against linear maps ----------------------------------------------------------------


class _Budget:
    def __init__(self, nodes: int):
        self.left = nodes
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("node budget exhausted")


def exact_cover(rows: dict, budget: _Budget) -> Iterator[list]:
    """All exact covers of the columns by ``rows`` (row -> list of columns).

    Knuth's Algorithm X on dicts of sets, branching on a column with the
    fewest remaining rows.  Every column mentioned by some row must be
    covered exactly once.
    """
    cols: dict = {}
    for r, cs in rows.items():
        for c in cs:
            cols.setdefault(c, set()).add(r)

    def select(r):
        removed = []
        for j in rows[r]:
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].discard(i)
            removed.append(cols.pop(j))
        return removed

    def deselect(r, removed):
        for j in reversed(rows[r]):
            cols[j] = removed.pop()
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].add(i)

    partial: list = []

    def walk():
        budget.tick()
        if not cols:
            yield list(partial)
            return
        c = min(cols, key=lambda c: len(cols[c]))
        for r in sorted(cols[c]):
            partial.append(r)
            removed = select(r)
            yield from walk()
            deselect(r, removed)
            partial.pop()

    return walk()


def _dd_cover_rows(field: FieldCtx, d: int, c: int) -> dict | None:
    """Exact-cover rows for index-d lists orthogonal to [c]; None if some column is unreachable.

    Row (i, a) means multiplier a on class i; it covers position i and the
    target classes of a, a - 1 and a - c, each shifted by i.
    """
    F = field
    lab = indexer(F, d).labels.tolist()
    rows = {}
    for a in range(2, F.q):
        if a == c:
            continue
        x, y, z = lab[a], lab[F.sub(a, 1)], lab[F.sub(a, c)]
        for i in range(d):
            rows[(i, a)] = [("pos", i), ("img", (i + x) % d), ("dif", (i + y) % d),
                            ("lin", (i + z) % d)]
    reach = {col for cs in rows.values() for col in cs}
    if len(reach) < 4 * d:
        return None
    return rows


def _dd_search(field: FieldCtx, d: int, c: int, budget: _Budget) -> CyclotomicMap | None:
    """A list of least index exactly d orthogonal to [c], or None after a complete search."""
    rows = _dd_cover_rows(field, d, c)
    if rows is None:
        return None
    for cover in exact_cover(rows, budget):
        mult = [0] * d
        for i, a in cover:
            mult[i] = a
        m = CyclotomicMap(field, mult)
        if least_index(m) == d:
            return m
    return None


def exists_Dd_orthogonal_linear(field: FieldCtx, d: int, *, cap: int = DEFAULT_DD_CAP,
                                budget: int = DEFAULT_NODE_BUDGET) -> SearchReport:
    """An orthomorphism of least index d orthogonal to some linear orthomorphism.

    Structured constructions first; then, for q within ``cap``, an exact-cover
    search over index-d multiplier lists for each linear partner [c].  Only a
    search that ran to completion for every c yields proven-empty.
    """
    F = field
    if d < 1 or (F.q - 1) % d:
        raise DivisibilityError(f"d={d} does not divide q-1={F.q - 1}")
    claim = f"dd-linear/q={F.q}/d={d}"
    params = {"q": F.q, "d": d}
    built = construct_Dd_orthogonal_linear(F, d)
    if built is not None:
        return SearchReport(claim, params, WITNESS, list(built), F.generator, 1, "construction")
    if F.q > cap:
        return SearchReport(claim, params, EXHAUSTED, [], F.generator, 0, "cap")
    nodes = _Budget(budget)
    try:
        for c in range(2, F.q):
            theta = _dd_search(F, d, c, nodes)
            if theta is None:
                continue
            lin = linear(F, c)
            if not (_member(theta, d) and _member(lin, 1) and are_orthogonal_tables(theta, lin)):
                raise CyclorthError("search witness failed verification", code="verification-failed")
            return SearchReport(claim, params, WITNESS, [theta, lin], F.generator, nodes.used,
                                "exact-cover")
    except BudgetExceededError:
        return SearchReport(claim, params, EXHAUSTED, [], F.generator, nodes.used, "exact-cover")
    return SearchReport(claim, params, PROVEN_EMPTY, [], F.generator, nodes.used, "exact-cover")


# -- linear partners -------------------------------------------------------------------


def linear_partners(m: AnyMap) -> list[int]:
    """Every c not in {0, 1} with ``[c]`` orthogonal to ``m``, ascending."""
    F = m.field
    if isinstance(m, CyclotomicMap):
        if not is_orthomorphism(m):
            raise NotOrthomorphismError("linear partners need an orthomorphism")
        return [c for c in range(2, F.q) if are_orthogonal(m, linear(F, c))]
    if not is_orthomorphism_table(m):
        raise NotOrthomorphismError("linear partners need an orthomorphism")
    return [c for c in range(2, F.q) if are_orthogonal_tables(m, linear(F, c))]


def count_linear_partners(m: AnyMap) -> int:
    return len(linear_partners(m))


def count_linear_partners_batch(field: FieldCtx, multipliers: np.ndarray) -> np.ndarray:
    """Linear-partner counts for many index-k lists at once (rows of ``multipliers``).

    Rows are assumed to be orthomorphisms; the class-permutation test is the
    same as in :func:`cyclorth.orthomorphism.are_orthogonal`.
    """
    F = field
    rows = np.asarray(multipliers, dtype=np.int64)
    n, k = rows.shape
    lab = indexer(F, k).labels
    cs = np.arange(2, F.q, dtype=np.int64)
    diff = F.sub_v(rows[:, None, :], cs[None, :, None])  # (n, c, k)
    ok = np.all(diff != 0, axis=2)
    targets = (np.arange(k) + lab[diff]) % k
    srt = np.sort(targets, axis=2)
    ok &= np.all(srt == np.arange(k), axis=2)
    return ok.sum(axis=1)


# -- published examples ------------------------------------------------------------------


@dataclass(frozen=True)
class PublishedClaim:
    """A worked example: multiplier lists plus what is claimed about them.

    ``constraints`` holds (element, k, class) triples that the labelling
    must respect, e.g. (3, 3, 1) for "3 lies in class 1 of index 3".
    """

    q: int
    lists: tuple[tuple[int, ...], ...]
    indices: tuple[int, ...]
    pairwise_orthogonal: bool = False
    partner_counts: tuple[int | None, ...] | None = None
    partners: tuple[tuple[int, ...] | None, ...] | None = None
    constraints: tuple[tuple[int, int, int], ...] = ()


PUBLISHED = {
    "F31": PublishedClaim(
        q=31, lists=((3, 9, 2), (3, 9, 16)), indices=(3, 3),
        partner_counts=(1, 5), partners=((8,), None), constraints=((3, 3, 1),)),
    "F61": PublishedClaim(
        q=61, lists=((8, 31), (14, 44, 44), (47, 11, 11, 11, 11)), indices=(2, 3, 5),
        pairwise_orthogonal=True),
    "F421": PublishedClaim(
        q=421,
        lists=((165, 121), (111, 326, 326), (90, 132, 132, 132, 132),
               (47, 175, 175, 175, 175, 175, 175)),
        indices=(2, 3, 5, 7), pairwise_orthogonal=True),
}


def _labellings(field: FieldCtx, L: int) -> list[tuple[int, int]]:
    """(unit j mod L, smallest-encoding generator with dlog = j mod L)."""
    order = field.q - 1
    best: dict[int, int] = {}
    for e in range(1, order):
        if math.gcd(e, order) != 1:
            continue
        j = e % L
        g = field.gpow(e)
        if j not in best or g < best[j]:
            best[j] = g
    return sorted(best.items())


def _check_claim(F: FieldCtx, claim: PublishedClaim) -> tuple[bool, dict]:
    for x, k, cls in claim.constraints:
        if indexer(F, k).of(x) != cls:
            return False, {}
    maps = [CyclotomicMap(F, lst) for lst in claim.lists]
    for m, k in zip(maps, claim.indices):
        if not (is_orthomorphism(m) and least_index(m) == k and _member(m, k)):
            return False, {}
    if claim.pairwise_orthogonal:
        for i in range(len(maps)):
            for j in range(i + 1, len(maps)):
                if not (are_orthogonal(maps[i], maps[j]) and are_orthogonal_tables(maps[i], maps[j])):
                    return False, {}
    notes: dict = {}
    if claim.partner_counts is not None or claim.partners is not None:
        found = [linear_partners(m) for m in maps]
        notes["partners"] = found
        if claim.partner_counts is not None:
            for got, want in zip(found, claim.partner_counts):
                if want is not None and len(got) != want:
                    return False, {}
        if claim.partners is not None:
            for got, want in zip(found, claim.partners):
                if want is not None and tuple(got) != tuple(want):
                    return False, {}
    return True, notes


def validate_published(claim: PublishedClaim, name: str = "published") -> SearchReport:
    """Look for a labelling of the classes under which every part of ``claim`` holds.

    Changing the character of order k amounts to replacing the generator g by
    g^e with e coprime to q-1; only e modulo the lcm of the indices matters.
    """
    L = math.lcm(*claim.indices, *(k for _, k, _ in claim.constraints))
    base = make_field(claim.q)
    params = {"q": claim.q, "indices": list(claim.indices)}
    work = 0
    for j, g in _labellings(base, L):
        work += 1
        F = make_field(claim.q, generator=g)
        ok, notes = _check_claim(F, claim)
        if ok:
            notes["exponent_mod_lcm"] = j
            return SearchReport(name, params, WITNESS, [CyclotomicMap(F, lst) for lst in claim.lists],
                                g, work, "labelling-search", notes)
    raise CyclorthError(f"{name}: no labelling validates the claim", code="no-labelling-found")


# -- equal-C cases and the D_b witnesses --------------------------------------------------------

EQUAL_C_CASES = ((3, 2), (4, 3), (5, 2), (5, 4), (7, 3))


def verify_equal_C_cases(max_q: int = 100) -> SearchReport:
    """Check the listed equalities by ``|D_b| = 0`` and exhibit D_b witnesses elsewhere.

    For every q up to ``max_q`` and every divisor b > 1 of q - 1 outside the
    listed cases, some orthomorphism of least index exactly b is built and
    verified, so that C_a differs from C_b for every proper divisor a of b.
    """
    work = 0
    empty = []
    for q, b in EQUAL_C_CASES:
        work += 1
        if count_Dk(make_field(q), b) != 0:
            raise CyclorthError(f"D_{b}({q}) is not empty", code="verification-failed")
        empty.append([q, b])
    witnessed = 0
    for q in prime_powers(3, max_q):
        F = make_field(q)
        for b in divisors(q - 1):
            if b == 1 or (q, b) in EQUAL_C_CASES:
                continue
            w = dk_witness(F, b)
            if not _member(w, b):
                raise CyclorthError(f"D_{b}({q}) witness failed", code="verification-failed")
            witnessed += 1
            work += 1
    return SearchReport("equal-C", {"max_q": max_q}, WITNESS, [], None, work, "count+construct",
                        {"empty": empty, "witnessed": witnessed})


# -- total orthomorphism count ----------------------------------------------------------------


def count_orthomorphisms(field: FieldCtx) -> int:
    """Number of all orthomorphisms of F_q, by backtracking.

    Only maps with theta(0) = 0 are enumerated; adding a constant is a
    bijection onto the maps with any other value at 0, so the total is q
    times that.  Both theta and theta - id are kept injective while filling
    the domain in encoding order.
    """
    F = field
    q = F.q
    if q == 2:
        return 0
    sub = [[F.sub(y, x) for x in range(q)] for y in range(q)]  # sub[y][x] = y - x
    count = 0
    full = (1 << q) - 1

    def walk(x: int, used_img: int, used_diff: int) -> None:
        nonlocal count
        if x == q:
            count += 1
            return
        free = full & ~used_img
        while free:
            low = free & -free
            y = low.bit_length() - 1
            free ^= low
            dbit = 1 << sub[y][x]
            if not used_diff & dbit:
                walk(x + 1, used_img | low, used_diff | dbit)

    walk(1, 1, 1)
    return count * q
