"""Explicit constructions of cyclotomic and non-cyclotomic orthomorphisms.

Every public constructor re-checks its output with the table-level
predicates from :mod:`cyclorth.orthomorphism` before returning it; a failed
check raises rather than returning an unverified map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

import numpy as np

from .cyclotomy import indexer
from .errors import ConstraintError, CyclorthError, DivisibilityError, FieldZeroDivisionError
from .field import Element, FieldCtx
from .orthomorphism import (
    AnyMap,
    CyclotomicMap,
    PermutationMap,
    are_orthogonal,
    are_orthogonal_tables,
    is_irregular,
    is_orthomorphism,
    is_orthomorphism_table,
    is_strong,
    is_strong_table,
    least_index_of_table,
    linear,
    translate,
)


def _check_index(field: FieldCtx, k: int) -> None:
    if k < 1 or (field.q - 1) % k:
        raise DivisibilityError(f"k={k} does not divide q-1={field.q - 1}")


# -- near-linear maps ------------------------------------------------------------


def near_linear_all(field: FieldCtx, k: int) -> list[CyclotomicMap]:
    """All near-linear orthomorphisms ``[a0, a1, ..., a1]`` of index k.

    Pairs are drawn from the same (class(a), class(a-1)) bucket, which is
    exactly the near-linear criterion.  Sorted by (a0, a1).
    """
    _check_index(field, k)
    if k < 2:
        raise CyclorthError("near-linear maps need k >= 2", code="parameter-violation")
    ix = indexer(field, k)
    cand = np.arange(2, field.q, dtype=np.int64)
    key = ix.labels[cand] * k + ix.labels[field.sub_v(cand, 1)]
    buckets: dict[int, list[int]] = {}
    for a, kk in zip(cand.tolist(), key.tolist()):
        buckets.setdefault(kk, []).append(a)
    pairs = [(a0, a1) for group in buckets.values() for a0 in group for a1 in group if a0 != a1]
    pairs.sort()
    return [CyclotomicMap(field, (a0,) + (a1,) * (k - 1)) for a0, a1 in pairs]


def near_linear_first(field: FieldCtx, k: int) -> CyclotomicMap | None:
    """The lexicographically smallest near-linear orthomorphism of index k, if any."""
    _check_index(field, k)
    if k < 2:
        raise CyclorthError("near-linear maps need k >= 2", code="parameter-violation")
    ix = indexer(field, k)
    cand = np.arange(2, field.q, dtype=np.int64)
    key = ix.labels[cand] * k + ix.labels[field.sub_v(cand, 1)]
    seen: dict[int, int] = {}
    best = None
    for a, kk in zip(cand.tolist(), key.tolist()):
        if kk in seen:
            # the first bucket to fill up need not hold the smallest a0
            if best is None or seen[kk] < best[0]:
                best = (seen[kk], a)
        else:
            seen[kk] = a
    if best is None:
        return None
    return near_linear(field, *best, k)


def near_linear(field: FieldCtx, a0: int, a1: int, k: int) -> CyclotomicMap:
    return CyclotomicMap(field, (a0,) + (a1,) * (k - 1))


def constrained_solutions(field: FieldCtx, K: int, A: Iterable[int]) -> list[int]:
    """Sorted x with ``x + a`` in class 0 of index K for all a in A (with 0 and -1 added)."""
    _check_index(field, K)
    lab = indexer(field, K).labels
    ok = np.ones(field.q, dtype=bool)
    for a in set(A) | {0, field.neg(1)}:
        ok &= lab[field.add_v(field.elements, a)] == 0
    return np.flatnonzero(ok).tolist()


def near_linear_constrained(field: FieldCtx, c: int, A: Iterable[int], K: int) -> tuple[int, int] | None:
    """The two smallest solutions of the class system for ``A u {0, -1}``.

    ``[x1, x2, ..., x2]`` of index c is then a near-linear orthomorphism whose
    difference with any map having all multipliers in ``-A`` lies in class 0.
    """
    if c < 1 or K % c:
        raise DivisibilityError(f"c={c} must divide K={K}")
    sols = constrained_solutions(field, K, A)
    if len(sols) < 2:
        return None
    return sols[0], sols[1]


# -- Evans-style systems for index (q-1)/2 -----------------------------------------


@dataclass(frozen=True)
class EvansSystem:
    """Data for the half-index builder.

    ``rho`` and ``tau`` are 1-based permutations of ``1..h`` given as lists of
    images; ``m`` and ``v`` are field encodings.
    """

    field: FieldCtx
    h: int
    rho: tuple[int, ...]
    tau: tuple[int, ...]
    sigma: tuple[int, ...]
    r: int
    m: tuple[int, ...]
    v: tuple[int, ...]
    example: int | None = None
    xi: int | None = dc_field(default=None)


def validate_evans(sys: EvansSystem) -> None:
    """Raise ConstraintError naming the first violated condition."""
    F, h = sys.field, sys.h
    for name, perm in (("rho", sys.rho), ("tau", sys.tau)):
        if sorted(perm) != list(range(1, h + 1)):
            raise ConstraintError(f"{name} is not a permutation of 1..{h}", code="bad-permutation")
    if len(sys.m) != h or len(sys.v) != h or len(sys.sigma) != h:
        raise ConstraintError("system lists must have length h", code="bad-system")
    if any(s not in (1, -1) for s in sys.sigma):
        raise ConstraintError("sigma entries must be +-1", code="bad-system")
    if 0 in sys.m or 0 in sys.v or sys.r == 0:
        raise ConstraintError("r, m_i, v_i must be nonzero", code="zero-entry")
    r, m, v = sys.r, sys.m, sys.v
    for i in range(h):
        lhs = F.mul(F.mul(F.elem(sys.sigma[i]), m[i]), v[i])
        if lhs != F.mul(r, v[sys.rho[i] - 1]):
            raise ConstraintError(f"sigma*m*v = r*v_rho fails at i={i + 1}",
                                  code="condition-phi-violated")
        if F.mul(F.sub(m[i], 1), v[i]) != F.mul(F.sub(r, 1), v[sys.tau[i] - 1]):
            raise ConstraintError(f"(m-1)v = (r-1)v_tau fails at i={i + 1}",
                                  code="condition-phi-1-violated")
    prod = F.sub(m[0], r)
    for i in range(1, h):
        prod = F.mul(prod, F.sub(m[0], m[i]))
    for i, j in combinations(range(h), 2):
        prod = F.mul(prod, F.sub(F.mul(v[i], v[i]), F.mul(v[j], v[j])))
    if prod == 0:
        raise ConstraintError("nondegeneracy product vanishes", code="condition-nonz-violated")


def evans_build(sys: EvansSystem) -> PermutationMap:
    """``x -> m_i x`` on ``{+v_i, -v_i}``, ``x -> r x`` elsewhere; least index (q-1)/2."""
    F = sys.field
    if F.p == 2:
        raise ConstraintError("needs odd characteristic", code="even-characteristic")
    validate_evans(sys)
    table = F.mul_v(np.full(F.q, sys.r, dtype=np.int64), F.elements)
    for mi, vi in zip(sys.m, sys.v):
        for x in (vi, F.neg(vi)):
            table[x] = F.mul(mi, x)
    phi = PermutationMap(F, table)
    _verify(phi, (F.q - 1) // 2, "Evans system")
    return phi


def _poly_ex1(x: Element, xi: Element) -> Element:
    return (x * (x * x - 1) * (2 * x + xi + 1) * (2 * x + xi - 1) * (xi * x + x - 2)
            * (xi * x - x - 2) * (xi * x - x - 1 - xi) * (xi * x - x - 3 - xi)
            * (xi * x - 3 * x - 1 - xi))


def _poly_ex2(x: Element, xi: Element) -> Element:
    return (x * (x * x - 1) * (x + xi) * (x + xi - 1) * (2 * x + xi - 1) * (x + 2 * xi - 1)
            * (x + xi * x - 2) * (x + xi * x - 1) * (x + xi * x - 1 + xi)
            * (2 * x + xi + xi * x - 2) * (2 * xi * x + x - 1))


def _ex1(F: FieldCtx, xi: Element, v3: Element) -> dict:
    den = v3 - v3 * xi + 1 + xi
    return dict(h=3, rho=(2, 3, 1), tau=(3, 1, 2), sigma=(1, 1, 1), r=(1 + xi) / 2,
                v=(den / 2, F.wrap(1), v3),
                m=((1 + xi) / den, (1 + xi) * v3 / 2, (2 * v3 - 1 + xi) / (2 * v3)))


def _ex2(F: FieldCtx, xi: Element, v3: Element) -> dict:
    w = v3 + v3 * xi - 1
    return dict(h=4, rho=(2, 3, 4, 1), tau=(4, 1, 2, 3), sigma=(1, 1, 1, 1), r=(xi + 1) / 2,
                v=((v3 - 1 + xi) / xi, F.wrap(1), v3, w / xi),
                m=((xi - 1) / (2 * (v3 - 1 + xi)), (1 + xi) * v3 / 2,
                   (2 * v3 - 1 + xi) / (2 * v3), (v3 + v3 * xi - 2) / (2 * w)))


def _ex3(F: FieldCtx, xi: Element) -> dict:
    return dict(h=4, rho=(4, 3, 2, 1), tau=(3, 1, 4, 2), sigma=(-1, -1, -1, 1), r=1 - xi,
                v=(F.wrap(F.elem(-2)), -xi - 1, F.wrap(1), xi),
                m=(xi / 2 + 1, (xi + 2) / (xi - 2), F.wrap(F.elem(3)), xi + 2))


def _ex4(F: FieldCtx, xi: Element) -> dict:
    return dict(h=6, rho=(5, 4, 2, 1, 6, 3), tau=(2, 3, 1, 6, 4, 5),
                sigma=(1, -1, -1, 1, 1, -1), r=xi,
                v=(-1 + xi, F.wrap(1), -3 + xi, 4 - 3 * xi, 2 - 2 / xi, F.wrap(F.elem(2))),
                m=(F.wrap(F.elem(2)), 6 - 4 * xi, xi / (3 - xi), (xi - 2) / (3 * xi - 4),
                   2 + 2 * xi, -1 + 3 * xi / 2))


def _make_system(F: FieldCtx, n: int, parts: dict, xi: Element) -> EvansSystem:
    return EvansSystem(F, parts["h"], parts["rho"], parts["tau"], parts["sigma"],
                       int(parts["r"]), tuple(int(e) for e in parts["m"]),
                       tuple(int(e) for e in parts["v"]), example=n, xi=int(xi))


_EX_TARGET = {1: -3, 2: -1, 3: -2, 4: 2}


def _xi_candidates(F: FieldCtx, n: int) -> list[int]:
    roots = F.sqrts(F.elem(_EX_TARGET[n]))
    if n == 3 and F.p == 11:
        # -3 makes v_1 = -v_2 in characteristic 11
        return [F.elem(3), F.elem(-3)]
    if n == 4 and F.p == 23:
        # +5 makes v_3 = v_6 in characteristic 23
        return [F.elem(-5), F.elem(5)]
    return roots


def example_system(n: int, field: FieldCtx, *, v3: int | None = None,
                   xi: int | None = None) -> EvansSystem:
    """One of the four parametrised systems, instantiated over ``field``.

    For systems 1 and 2, ``v3`` defaults to the smallest-encoding element
    avoiding the exclusion polynomial.  Both square roots are tried (the
    characteristic 11 and 23 overrides first) and the first system passing
    every side condition is returned.
    """
    F = field
    if n not in (1, 2, 3, 4):
        raise CyclorthError(f"no example {n}", code="parameter-violation")
    if F.p == 2:
        raise ConstraintError("needs odd characteristic", code="even-characteristic")
    if n == 1 and v3 is None and F.q <= 10:
        raise ConstraintError("example 1 needs q > 10", code="q-too-small")
    if n == 2 and v3 is None and F.q <= 12:
        raise ConstraintError("example 2 needs q > 12", code="q-too-small")
    if n == 3 and F.p <= 3:
        raise ConstraintError("example 3 needs characteristic > 3", code="bad-characteristic")
    if n == 4 and F.p in (3, 7, 17):
        raise ConstraintError("example 4 excludes characteristics 3, 7, 17",
                              code="bad-characteristic")
    xis = [xi] if xi is not None else _xi_candidates(F, n)
    if not xis or any(F.mul(x, x) != F.elem(_EX_TARGET[n]) for x in xis):
        raise ConstraintError(f"{_EX_TARGET[n]} is not a square in F_{F.q}",
                              code="not-a-square")
    for x in xis:
        xe = F.wrap(x)
        if n in (1, 2):
            poly = _poly_ex1 if n == 1 else _poly_ex2
            builder = _ex1 if n == 1 else _ex2
            v3s = [v3] if v3 is not None else (
                c for c in range(F.q) if poly(F.wrap(c), xe) != 0)
            for c in v3s:
                try:
                    sys = _make_system(F, n, builder(F, xe, F.wrap(c)), xe)
                    validate_evans(sys)
                    return sys
                except (ConstraintError, FieldZeroDivisionError):
                    continue
        else:
            try:
                sys = _make_system(F, n, (_ex3 if n == 3 else _ex4)(F, xe), xe)
                validate_evans(sys)
                return sys
            except (ConstraintError, FieldZeroDivisionError):
                continue
    raise ConstraintError(f"example {n} has no valid instance over F_{F.q}",
                          code="constraint-not-satisfied")


def _partition_reps(h: int) -> list[tuple[int, ...]]:
    """One permutation of 0..h-1 per cycle type."""
    out = []

    def parts(n: int, mx: int):
        if n == 0:
            yield ()
            return
        for c in range(min(n, mx), 0, -1):
            for rest in parts(n - c, c):
                yield (c,) + rest

    for lens in parts(h, h):
        perm, start = [0] * h, 0
        for c in lens:
            for j in range(c):
                perm[start + j] = start + (j + 1) % c
            start += c
        out.append(tuple(perm))
    return out


@lru_cache(maxsize=None)
def _evans_shapes(h: int) -> tuple:
    """(rho, tau, sigma, det-polynomial) for every shape of size h.

    The polynomial is ``det(I - A(r))`` with ``A(r) = sigma r P_rho - (r - 1) P_tau``,
    as integer coefficients in increasing degree.  Conjugating rho and tau by
    the same permutation relabels a system, so rho runs over cycle types only.
    """
    rhos = _partition_reps(h)
    taus = list(permutations(range(h)))
    sigmas = list(product((1, -1), repeat=h))
    shapes = [(rho, tau, sig) for rho in rhos for tau in taus for sig in sigmas]
    pts = np.arange(h + 1, dtype=float)
    mats = np.zeros((len(shapes), h + 1, h, h))
    for s, (rho, tau, sig) in enumerate(shapes):
        for i in range(h):
            mats[s, :, i, i] += 1.0
            mats[s, :, i, rho[i]] -= sig[i] * pts
            mats[s, :, i, tau[i]] += pts - 1.0
    vals = np.rint(np.linalg.det(mats)).astype(np.int64)
    vander = np.vander(pts, h + 1, increasing=True)
    coeffs = np.rint(np.linalg.solve(vander, vals.T.astype(float)).T).astype(np.int64)
    assert np.array_equal(coeffs @ vander.T.astype(np.int64), vals)
    return tuple((rho, tau, sig, tuple(c.tolist()))
                 for (rho, tau, sig), c in zip(shapes, coeffs) if c.any())


def _kernel_vector(F: FieldCtx, mat: list[list[int]]) -> list[int] | None:
    """Spanning vector of a one-dimensional right kernel, else None."""
    h = len(mat)
    A = [row[:] for row in mat]
    pivots, row = [], 0
    for col in range(h):
        piv = next((i for i in range(row, h) if A[i][col]), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = F.inv(A[row][col])
        A[row] = [F.mul(x, inv) for x in A[row]]
        for i in range(h):
            if i != row and A[i][col]:
                f = A[i][col]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(h) if c not in pivots]
    if len(free) != 1:
        return None
    v = [0] * h
    v[free[0]] = 1
    for i, c in enumerate(pivots):
        v[c] = F.neg(A[i][free[0]])
    return v


def _system_from_kernel(F: FieldCtx, rho, tau, sig, r: int) -> EvansSystem | None:
    h = len(rho)
    mat = [[0] * h for _ in range(h)]
    for i in range(h):
        mat[i][i] = F.add(mat[i][i], 1)
        mat[i][rho[i]] = F.sub(mat[i][rho[i]], F.mul(F.elem(sig[i]), r))
        mat[i][tau[i]] = F.add(mat[i][tau[i]], F.sub(r, 1))
    v = _kernel_vector(F, mat)
    if v is None or 0 in v:
        return None
    m = [F.div(F.mul(F.mul(F.elem(sig[i]), r), v[rho[i]]), v[i]) for i in range(h)]
    # any index whose multiplier is unique can play the part of index 1
    lead = next((i for i in range(h)
                 if m[i] != r and all(m[i] != m[j] for j in range(h) if j != i)), None)
    if lead is None:
        return None
    order = [lead] + [i for i in range(h) if i != lead]
    pos = {old: new for new, old in enumerate(order)}
    sysm = EvansSystem(F, h, tuple(pos[rho[i]] + 1 for i in order),
                       tuple(pos[tau[i]] + 1 for i in order),
                       tuple(sig[i] for i in order), r,
                       tuple(m[i] for i in order), tuple(v[i] for i in order))
    try:
        validate_evans(sysm)
    except ConstraintError:
        return None
    return sysm


def evans_search(field: FieldCtx, max_h: int = 5) -> EvansSystem | None:
    """First valid system of size at most ``max_h`` found by direct search in ``field``.

    Shapes are scanned by increasing h; for each shape the admissible r are
    the roots in the field of the shape's determinant polynomial, in
    increasing encoding.  Deterministic; None when nothing is found.
    """
    F = field
    if F.p == 2:
        raise ConstraintError("needs odd characteristic", code="even-characteristic")
    elems = F.elements
    for h in range(2, min(max_h, (F.q - 1) // 2) + 1):
        for rho, tau, sig, poly in _evans_shapes(h):
            acc = np.zeros(F.q, dtype=np.int64)
            for c in reversed(poly):
                acc = F.add_v(F.mul_v(acc, elems), F.elem(c))
            for r in np.flatnonzero(acc == 0).tolist():
                if r in (0, 1):
                    continue
                found = _system_from_kernel(F, rho, tau, sig, r)
                if found is not None:
                    return found
    return None


def example2_pi_identity(sys: EvansSystem) -> bool:
    """``(m_i - 1/2) v_i == (r - 1/2) v_pi(i)`` with pi = [3, 4, 1, 2]."""
    F = sys.field
    half = F.inv(F.elem(2))
    pi = (3, 4, 1, 2)
    rh = F.sub(sys.r, half)
    return all(F.mul(F.sub(sys.m[i], half), sys.v[i]) == F.mul(rh, sys.v[pi[i] - 1])
               for i in range(4))


def half_index_route(field: FieldCtx) -> str:
    q, p = field.q, field.p
    if p == 2:
        raise ConstraintError("needs odd q", code="even-characteristic")
    if q in (5, 7):
        raise ConstraintError("no orthomorphism of least index (q-1)/2 for q in {5, 7}",
                              code="q-in-5-7")
    if q == 3:
        return "doubling"
    if q == 9:
        return "example1-q9"
    if p in (3, 7):
        return "example1"
    if q % 4 == 1:
        return "example2"
    if field.sqrt(field.elem(-2)) is not None:
        return "example3"
    return "example4"


def build_half_index(field: FieldCtx) -> tuple[PermutationMap, str]:
    """Half-index orthomorphism together with the route that produced it.

    The route is the dispatcher's choice, except that a parametrised system
    failing its side conditions falls through to :func:`evans_search`, which
    is then reported as ``"evans-search"``.
    """
    F = field
    route = half_index_route(F)
    if route == "doubling":
        phi = PermutationMap(F, F.mul_v(F.elements, 2))
        _verify(phi, 1, "doubling map")
        return phi, route
    if route == "example1-q9":
        i = F.sqrt(F.neg(1))
        return evans_build(example_system(1, F, xi=0, v3=F.add(1, i))), route
    try:
        return evans_build(example_system(int(route[-1]), F)), route
    except ConstraintError:
        found = evans_search(F)
        if found is None:
            raise
        return evans_build(found), "evans-search"


def construct_half_index(field: FieldCtx) -> PermutationMap:
    """An orthomorphism of least index (q-1)/2 for odd q not in {5, 7}."""
    return build_half_index(field)[0]


# -- non-cyclotomic maps ---------------------------------------------------------------


def char2_noncyclotomic(field: FieldCtx, a: int | None = None, c: int | None = None) -> PermutationMap:
    """``x -> a x + a(a+1)`` on ``H + c``, ``a x`` elsewhere, with H = {0, 1, a, a+1}.

    Defaults: the smallest valid ``a`` and then the smallest ``c`` outside H.
    """
    F = field
    if F.p != 2 or F.q < 8:
        raise ConstraintError("needs characteristic 2 and q >= 8", code="parameter-violation")
    if a is None:
        a = 2
    if a in (0, 1) or not 0 <= a < F.q:
        raise ConstraintError("a must avoid {0, 1}", code="parameter-violation")
    H = {0, 1, a, F.add(a, 1)}
    if c is None:
        c = next(x for x in range(F.q) if x not in H)
    if c in H or not 0 <= c < F.q:
        raise ConstraintError("c must lie outside H", code="parameter-violation")
    coset = {F.add(h, c) for h in H}
    shift = F.mul(a, F.add(a, 1))
    table = F.mul_v(np.full(F.q, a, dtype=np.int64), F.elements)
    for x in coset:
        table[x] = F.add(int(table[x]), shift)
    theta = PermutationMap(F, table)
    _verify(theta, F.q - 1, "characteristic-2 map")
    return theta


def oddchar_noncyclotomic(field: FieldCtx) -> PermutationMap:
    """The translate ``T_1`` of the first near-linear index-2 orthomorphism."""
    F = field
    if F.p == 2:
        raise ConstraintError("needs odd q", code="even-characteristic")
    first = near_linear_first(F, 2)
    if first is None:
        raise ConstraintError(f"no index-2 near-linear orthomorphism over F_{F.q}",
                              code="no-D2-witness")
    theta = translate(first, 1)
    _verify(theta, F.q - 1, "translated quadratic map")
    return theta


def construct_noncyclotomic(field: FieldCtx) -> PermutationMap:
    if field.q <= 5:
        raise ConstraintError("non-cyclotomic orthomorphisms need q > 5", code="q-too-small")
    if field.p == 2:
        return char2_noncyclotomic(field)
    return oddchar_noncyclotomic(field)


def construct_irregular(field: FieldCtx) -> PermutationMap:
    """Irregular orthomorphism over F_{2^(2k+1)}, k >= 1."""
    if field.p != 2 or field.n % 2 == 0 or field.q < 8:
        raise ConstraintError("irregular construction needs q = 2^(2k+1) >= 8",
                              code="parameter-violation")
    theta = char2_noncyclotomic(field)
    if not is_irregular(theta):
        raise ConstraintError("constructed map is not irregular", code="verification-failed")
    return theta


def dk_witness(field: FieldCtx, k: int) -> AnyMap:
    """Some orthomorphism of least index k, by the cheapest applicable route."""
    _check_index(field, k)
    q = field.q
    if k == 1:
        if q < 3:
            raise ConstraintError("F_2 has no orthomorphisms", code="empty")
        m = linear(field, 2)
    elif 2 * k < q - 1:
        m = near_linear_first(field, k)
    elif 2 * k == q - 1:
        return construct_half_index(field)
    else:
        return construct_noncyclotomic(field)
    _verify(m, k, "witness")
    return m


# -- orthogonal sets -------------------------------------------------------------------


def orthogonal_set(field: FieldCtx, B: Sequence[int], strong: bool = False,
                   max_candidates: int = 64, node_budget: int = 10_000) -> list[CyclotomicMap] | None:
    """Pairwise orthogonal near-linear maps of least indices ``B`` (greedy).

    Each map ``[x1, x2, ..., x2]`` takes x1, x2 from the solutions of the class
    system whose constant set collects the negated multipliers of all maps
    chosen so far (plus 1 for strong maps).  Up to ``max_candidates`` pairs are
    tried per step before giving up.
    """
    F = field
    if any(b < 2 for b in B):
        raise CyclorthError("indices must be >= 2", code="parameter-violation")
    K = math.lcm(*B) if B else 1
    _check_index(F, K)
    base = {0, F.neg(1)} | ({1} if strong else set())
    budget = [node_budget]

    def step(i: int, A: set[int], chosen: list[CyclotomicMap]):
        if i == len(B):
            return chosen
        sols = constrained_solutions(F, K, A)
        tried = 0
        for x1, x2 in combinations(sols, 2):
            if tried >= max_candidates or budget[0] <= 0:
                break
            tried += 1
            budget[0] -= 1
            m = near_linear(F, x1, x2, B[i])
            if not _ok_member(m, B[i], strong, chosen):
                continue
            res = step(i + 1, A | {F.neg(x1), F.neg(x2)}, chosen + [m])
            if res is not None:
                return res
        return None

    found = step(0, base, [])
    if found is None:
        found = _orthogonal_set_search(F, B, strong, node_budget * 20)
    return found


def _orthogonal_set_search(field: FieldCtx, B: Sequence[int], strong: bool,
                           node_budget: int) -> list[CyclotomicMap] | None:
    """Backtracking over all near-linear maps of each index in ``B``.

    Used when the class-0 system has too few solutions, which is the usual
    case below the character-sum threshold.  Candidates are taken in
    (a0, a1) order; ``node_budget`` bounds the orthogonality tests.
    """
    F = field
    pools = []
    for b in B:
        pool = [m for m in near_linear_all(F, b) if not strong or is_strong(m)]
        if not pool:
            return None
        pools.append(pool)
    budget = [node_budget]

    def step(i: int, chosen: list[CyclotomicMap]):
        if i == len(B):
            return chosen
        for m in pools[i]:
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            if all(are_orthogonal(m, other) for other in chosen) and _ok_member(m, B[i], strong, chosen):
                res = step(i + 1, chosen + [m])
                if res is not None:
                    return res
        return None

    return step(0, [])


def _ok_member(m: CyclotomicMap, b: int, strong: bool, chosen: Sequence[CyclotomicMap]) -> bool:
    if not (is_orthomorphism(m) and is_orthomorphism_table(m)):
        return False
    if least_index_of_table(m) != b:
        return False
    if strong and not (is_strong(m) and is_strong_table(m)):
        return False
    return all(are_orthogonal_tables(m, other) for other in chosen)


# -- orthogonal to a linear map ------------------------------------------------------


def _dd_linear(field: FieldCtx, d: int):
    F = field
    q = F.q
    _check_index(F, d)
    e = (q - 1) // d
    if d == 1:
        if q < 4:
            return None
        return linear(F, 3), linear(F, 2), "two-linear"
    if e >= 4:
        theta = near_linear_first(F, d)
        for c in range(2, q):
            lin = linear(F, c)
            if are_orthogonal_tables(theta, lin):
                return theta, lin, "near-linear"
        return None
    if e == 1 and q >= 8:
        if F.p == 2:
            a = 2
            return char2_noncyclotomic(F, a), linear(F, F.mul(a, a)), "char2-translate"
        theta2 = near_linear_first(F, 2)
        for c in range(2, q):
            lin = linear(F, c)
            if are_orthogonal_tables(theta2, lin):
                return translate(theta2, 1), lin, "translation"
        return None
    if e == 2 and q % 4 == 1 and q >= 13:
        phi = evans_build(example_system(2, F))
        return phi, linear(F, F.inv(F.elem(2))), "example2"
    return None


def construct_Dd_orthogonal_linear(field: FieldCtx, d: int) -> tuple[AnyMap, CyclotomicMap] | None:
    """A map of least index d orthogonal to a linear orthomorphism, or None.

    None means no structured route applies (or its output failed
    verification); exhaustive search is left to :mod:`cyclorth.search`.
    """
    try:
        res = _dd_linear(field, d)
    except ConstraintError:
        return None
    if res is None:
        return None
    theta, lin, _ = res
    if not (_is_member(theta, d) and _is_member(lin, 1) and are_orthogonal_tables(theta, lin)):
        return None
    return theta, lin


def dd_linear_route(field: FieldCtx, d: int) -> str | None:
    try:
        res = _dd_linear(field, d)
    except ConstraintError:
        return None
    return None if res is None else res[2]


# -- verification ----------------------------------------------------------------------


def _is_member(m: AnyMap, k: int) -> bool:
    return is_orthomorphism_table(m) and least_index_of_table(m) == k


def _verify(m: AnyMap, k: int, what: str) -> None:
    if not _is_member(m, k):
        raise ConstraintError(f"{what} failed verification (expected least index {k})",
                              code="verification-failed")
