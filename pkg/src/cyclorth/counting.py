"""Closed-form counts, character-sum bounds, q0 thresholds and exact |C_k|, |D_k|."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclotomy import indexer, multiplier_class_table
from .errors import BudgetExceededError, CyclorthError, DivisibilityError
from .field import FieldCtx, divisors, prime_factors

DEFAULT_COUNT_CAP = 6


def _require_divides(q: int, k: int) -> None:
    if k < 1 or (q - 1) % k:
        raise DivisibilityError(f"k={k} does not divide q-1={q - 1}")


def near_linear_count(q: int, k: int) -> int:
    """Number of near-linear orthomorphisms of index k over F_q, clamped at 0."""
    _require_divides(q, k)
    if k < 2:
        raise CyclorthError("near-linear maps need k >= 2", code="parameter-violation")
    num = (q - 1 - k) * (q - 1 - 2 * k)
    if q - 1 <= 2 * k:
        return 0
    assert num % (k * k) == 0
    return num // (k * k)


def linear_partner_count(q: int, d: int) -> int:
    """Linear orthomorphisms orthogonal to any near-linear map of least index d."""
    _require_divides(q, d)
    if d < 2:
        raise CyclorthError("need d >= 2", code="parameter-violation")
    if q < 3 * d + 1:
        raise CyclorthError(f"vacuous range: q={q} < 3d+1={3 * d + 1}", code="vacuous-range")
    return (q - 3 * d - 1) // d


def exp_lower_bound(q: int, k: int) -> int:
    """``2^((q-1)/k)``, a lower bound on the number of orthomorphisms of F_q when k > 2."""
    _require_divides(q, k)
    if k <= 2:
        raise CyclorthError("bound needs k > 2", code="parameter-violation")
    return 2 ** ((q - 1) // k)


# -- character-sum bounds ----------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    q: int
    k: int
    t: int

    def __post_init__(self):
        if self.k < 2 or self.t < 2:
            raise CyclorthError("bounds need k, t >= 2", code="parameter-violation")
        _require_divides(self.q, self.k)


@dataclass(frozen=True)
class SqrtForm:
    """The real number ``const + coeff * sqrt(q)`` with exact comparisons."""

    const: Fraction
    coeff: Fraction
    q: int

    def __float__(self) -> float:
        return float(self.const) + float(self.coeff) * math.sqrt(self.q)

    def _sign_minus(self, n) -> int:
        # sign of (self - n)
        lhs = self.const - Fraction(n)  # self - n = lhs + coeff*sqrt(q)
        c = self.coeff
        if c == 0:
            return (lhs > 0) - (lhs < 0)
        # compare lhs + c*sqrt(q) with 0
        if lhs >= 0 and c > 0:
            return 1 if (lhs > 0 or self.q > 0) else 0
        if lhs <= 0 and c < 0:
            return -1 if (lhs < 0 or self.q > 0) else 0
        sq = c * c * self.q
        ll = lhs * lhs
        if ll == sq:
            return 0
        if lhs > 0:  # c < 0
            return 1 if ll > sq else -1
        return 1 if sq > ll else -1

    def __le__(self, n) -> bool:
        return self._sign_minus(n) <= 0

    def __lt__(self, n) -> bool:
        return self._sign_minus(n) < 0

    def __ge__(self, n) -> bool:
        return self._sign_minus(n) >= 0

    def __gt__(self, n) -> bool:
        return self._sign_minus(n) > 0

    def __str__(self) -> str:
        return f"{float(self):.6f}"


def babai_bounds(p: BoundParams) -> tuple[SqrtForm, SqrtForm]:
    """Lower/upper bounds ``q k^-t -/+ t sqrt(q)`` on the solution count."""
    base = Fraction(p.q, p.k**p.t)
    return SqrtForm(base, Fraction(-p.t), p.q), SqrtForm(base, Fraction(p.t), p.q)


def babai2_lower(p: BoundParams) -> SqrtForm:
    """Improved lower bound ``q k^-t - (t - 1 - t/k + k^-t) sqrt(q) - t/k``."""
    k, t = p.k, p.t
    coeff = Fraction(t - 1) - Fraction(t, k) + Fraction(1, k**t)
    return SqrtForm(Fraction(p.q, k**t) - Fraction(t, k), -coeff, p.q)


def solution_count(field: FieldCtx, k: int, A: Sequence[int]) -> int:
    """Number of x in F_q with ``x + a`` in class 0 of index k for every a in A."""
    if len(set(A)) != len(A):
        raise CyclorthError("elements of A must be distinct", code="duplicates")
    lab = indexer(field, k).labels
    ok = np.ones(field.q, dtype=bool)
    for a in A:
        ok &= lab[field.add_v(field.elements, a)] == 0
    return int(ok.sum())


def _threshold_coeffs(k: int, t: int, use_babai2: bool) -> tuple[int, int]:
    # inequality scaled by k^t:  q - C > B sqrt(q)
    kt = k**t
    if use_babai2:
        return (t - 1) * kt - t * k ** (t - 1) + 1, t * k ** (t - 1) + kt
    return t * kt, kt


def q0_satisfied(q: int, k: int, t: int, use_babai2: bool = True) -> bool:
    """Exact test of ``q k^-t - (...) sqrt(q) - (...) > 1``."""
    B, C = _threshold_coeffs(k, t, use_babai2)
    lhs = q - C
    return lhs > 0 and lhs * lhs > B * B * q


def q0_threshold(k: int, t: int, use_babai2: bool = True) -> int:
    """Smallest positive integer q0 satisfying the strict threshold inequality."""
    if k < 2 or t < 2:
        raise CyclorthError("need k, t >= 2", code="parameter-violation")
    B, C = _threshold_coeffs(k, t, use_babai2)
    # positive root of s^2 - B s - C = 0 in s = sqrt(q0)
    s = (B + math.sqrt(B * B + 4 * C)) / 2
    q = max(1, int(s * s) - 2)
    while not q0_satisfied(q, k, t, use_babai2):
        q += 1
    while q > 1 and q0_satisfied(q - 1, k, t, use_babai2):
        q -= 1
    return q


# -- exact counts ----------------------------------------------------------------


def count_Ck(field: FieldCtx, k: int, cap: int = DEFAULT_COUNT_CAP) -> int:
    """Exact |C_k(q)|, the number of multiplier lists of index k giving orthomorphisms.

    Sums ``prod_i M(sigma(i) - i, tau(i) - i)`` over permutation pairs
    (sigma, tau), organised as a DP over the pair of used-target masks.
    """
    _require_divides(field.q, k)
    if k > cap:
        raise BudgetExceededError(f"k={k} exceeds the counting cap {cap}")
    M = multiplier_class_table(field, k).M.tolist()
    states = {(0, 0): 1}
    for i in range(k):
        nxt: dict[tuple[int, int], int] = {}
        for (ms, mt), cnt in states.items():
            for s in range(k):
                if ms >> s & 1:
                    continue
                row = M[(s - i) % k]
                for t in range(k):
                    if mt >> t & 1:
                        continue
                    w = row[(t - i) % k]
                    if w:
                        key = (ms | 1 << s, mt | 1 << t)
                        nxt[key] = nxt.get(key, 0) + cnt * w
        states = nxt
    full = (1 << k) - 1
    return states.get((full, full), 0)


def mobius(n: int) -> int:
    ps = prime_factors(n)
    m = n
    for p in ps:
        m //= p
        if m % p == 0:
            return 0
    return -1 if len(ps) % 2 else 1


def count_Dk(field: FieldCtx, k: int, cap: int = DEFAULT_COUNT_CAP) -> int:
    """Exact |D_k(q)| by Moebius inversion over the divisors of k."""
    _require_divides(field.q, k)
    total = sum(mobius(k // d) * count_Ck(field, d, cap) for d in divisors(k))
    assert total >= 0
    return total
