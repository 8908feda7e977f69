"""Cyclotomic maps, general value tables, and the predicates on them.

Two representations are used throughout:

* :class:`CyclotomicMap` -- multipliers ``[a_0, ..., a_{k-1}]``; the map fixes
  0 and sends ``x`` in class ``i`` to ``a_i * x``.
* :class:`PermutationMap` -- an explicit table of length q.

Class-level predicates (``is_orthomorphism`` and friends) work on
multipliers only.  The ``*_table`` predicates test bijectivity directly and
serve as the independent check for everything constructed elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .cyclotomy import indexer
from .errors import CyclorthError, DivisibilityError, NotOrthomorphismError
from .field import FieldCtx, divisors, parse_descriptor


@dataclass(frozen=True)
class CyclotomicMap:
    field: FieldCtx
    multipliers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "multipliers", tuple(int(a) for a in self.multipliers))
        k = len(self.multipliers)
        if k < 1 or (self.field.q - 1) % k:
            raise DivisibilityError(f"index {k} does not divide q-1={self.field.q - 1}")
        if any(not 0 <= a < self.field.q for a in self.multipliers):
            raise CyclorthError("multiplier out of range", code="bad-element")

    @property
    def k(self) -> int:
        return len(self.multipliers)

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def table(self) -> np.ndarray:
        F = self.field
        lab = indexer(F, self.k).labels
        mult = np.asarray(self.multipliers, dtype=np.int64)
        out = F.mul_v(mult[np.maximum(lab, 0)], F.elements)
        out[0] = 0
        return out

    def __repr__(self) -> str:
        return f"[{','.join(map(str, self.multipliers))}]^{self.field.q}"


@dataclass(frozen=True, eq=False)
class PermutationMap:
    field: FieldCtx
    table_: np.ndarray

    def __post_init__(self):
        t = np.array(self.table_, dtype=np.int64)
        if t.shape != (self.field.q,):
            raise CyclorthError(f"table must have length {self.field.q}", code="length-mismatch")
        t.setflags(write=False)
        object.__setattr__(self, "table_", t)

    def table(self) -> np.ndarray:
        return self.table_

    def __call__(self, x: int) -> int:
        return int(self.table_[x])

    def __eq__(self, other) -> bool:
        return (isinstance(other, PermutationMap) and self.field == other.field
                and bool(np.array_equal(self.table_, other.table_)))

    __hash__ = None


AnyMap = Union[CyclotomicMap, PermutationMap]


def as_table(m: AnyMap) -> PermutationMap:
    if isinstance(m, PermutationMap):
        return m
    return PermutationMap(m.field, m.table())


def linear(field: FieldCtx, a: int) -> CyclotomicMap:
    return CyclotomicMap(field, (a,))


def evaluate(m: CyclotomicMap, x: int) -> int:
    if x == 0:
        return 0
    return m.field.mul(m.multipliers[indexer(m.field, m.k).of(x)], x)


# -- class-level predicates ------------------------------------------------


def is_orthomorphism(m: CyclotomicMap) -> bool:
    F = m.field
    if any(a in (0, 1) for a in m.multipliers):
        return False
    ix = indexer(F, m.k)
    return ix.is_permutation(m.multipliers) and ix.is_permutation(
        [F.sub(a, 1) for a in m.multipliers])


def is_strong(m: CyclotomicMap) -> bool:
    F = m.field
    if not is_orthomorphism(m):
        return False
    plus = [F.add(a, 1) for a in m.multipliers]
    if 0 in plus:
        return False
    return indexer(F, m.k).is_permutation(plus)


def lift_index(m: CyclotomicMap, k2: int) -> CyclotomicMap:
    """Same map written with index ``k2`` (a multiple of ``m.k``)."""
    if k2 % m.k or (m.field.q - 1) % k2:
        raise DivisibilityError(f"cannot lift index {m.k} to {k2} over F_{m.field.q}")
    a = m.multipliers
    return CyclotomicMap(m.field, tuple(a[i % m.k] for i in range(k2)))


def least_index(m: CyclotomicMap) -> int:
    """Smallest period of the multiplier list (a divisor of k)."""
    a = m.multipliers
    for d in divisors(m.k):
        if all(a[i] == a[i + d] for i in range(m.k - d)):
            return d
    return m.k


def are_orthogonal(m1: CyclotomicMap, m2: CyclotomicMap) -> bool:
    """Class-level orthogonality test after lifting both maps to lcm(k1, k2)."""
    if m1.field != m2.field:
        raise CyclorthError("maps live over different fields", code="field-mismatch")
    L = math.lcm(m1.k, m2.k)
    a = lift_index(m1, L).multipliers
    b = lift_index(m2, L).multipliers
    F = m1.field
    diffs = [F.sub(x, y) for x, y in zip(a, b)]
    if 0 in diffs:
        return False
    return indexer(F, L).is_permutation(diffs)


# -- table-level predicates --------------------------------------------------


def _is_perm(t: np.ndarray) -> bool:
    return bool(np.all(np.bincount(t, minlength=len(t)) == 1)) if len(t) else True


def is_permutation_table(t: AnyMap) -> bool:
    return _is_perm(as_table(t).table())


def is_orthomorphism_table(t: AnyMap) -> bool:
    tab = as_table(t).table()
    F = t.field
    return _is_perm(tab) and _is_perm(F.sub_v(tab, F.elements))


def is_strong_table(t: AnyMap) -> bool:
    tab = as_table(t).table()
    F = t.field
    return is_orthomorphism_table(t) and _is_perm(F.add_v(tab, F.elements))


def are_orthogonal_tables(t1: AnyMap, t2: AnyMap) -> bool:
    """Whether ``t1 - t2`` is a permutation (only the difference is tested)."""
    if t1.field != t2.field:
        raise CyclorthError("maps live over different fields", code="field-mismatch")
    a, b = as_table(t1).table(), as_table(t2).table()
    if len(a) != len(b):
        raise CyclorthError("table length mismatch", code="length-mismatch")
    return _is_perm(t1.field.sub_v(a, b))


def least_index_of_table(t: AnyMap) -> int | None:
    """Least cyclotomic index of a table, or None when ``t(0) != 0``.

    ``q - 1`` always qualifies (its classes are singletons), so the result is
    None only for maps that move 0.
    """
    F = t.field
    tab = as_table(t).table()
    if tab[0] != 0:
        return None
    order = F.q - 1
    xs = F.exp[:order]
    ratio = F.div_v(tab[xs], xs)
    for k in divisors(order):
        block = ratio.reshape(-1, k)
        if np.all(block == block[0]):
            return k
    return order  # pragma: no cover


def is_noncyclotomic(t: AnyMap) -> bool:
    return least_index_of_table(t) == t.field.q - 1


def translate(t: AnyMap, g: int) -> PermutationMap:
    """``x -> t(x + g) - t(g)``."""
    F = t.field
    tab = as_table(t).table()
    shifted = tab[F.add_v(F.elements, g)]
    return PermutationMap(F, F.sub_v(shifted, tab[g]))


def is_irregular(t: AnyMap) -> bool:
    """True iff every translate of the orthomorphism ``t`` is non-cyclotomic."""
    if not is_orthomorphism_table(t):
        raise NotOrthomorphismError("is_irregular needs an orthomorphism")
    F = t.field
    return all(is_noncyclotomic(translate(t, g)) for g in range(F.q))


# -- polynomial form -----------------------------------------------------------


def to_polynomial(m: CyclotomicMap) -> list[int]:
    """Coefficients ``c_j`` with ``m(x) = sum_j c_j x^(j(q-1)/k + 1)``.

    Inverse DFT of the multipliers with ``zeta = g^((q-1)/k)``.
    """
    F, k = m.field, m.k
    step = (F.q - 1) // k
    kinv = F.inv(F.elem(k))
    out = []
    for j in range(k):
        acc = 0
        for i, a in enumerate(m.multipliers):
            acc = F.add(acc, F.mul(a, F.gpow(-i * j * step)))
        out.append(F.mul(acc, kinv))
    return out


def evaluate_polynomial(field: FieldCtx, coeffs: Sequence[int], x: int) -> int:
    """Evaluate ``sum_j c_j x^(j(q-1)/k + 1)`` with k = len(coeffs) directly."""
    k = len(coeffs)
    step = (field.q - 1) // k
    acc = 0
    for j, c in enumerate(coeffs):
        acc = field.add(acc, field.mul(c, field.pow(x, j * step + 1)))
    return acc


# -- JSON records ----------------------------------------------------------------


def to_record(m: AnyMap) -> dict:
    if isinstance(m, CyclotomicMap):
        return {"field": m.field.descriptor(), "index": m.k, "multipliers": list(m.multipliers)}
    return {"field": m.field.descriptor(), "table": [int(v) for v in m.table()]}


def from_record(rec: dict, field: FieldCtx | None = None) -> AnyMap:
    try:
        F = field if field is not None else parse_descriptor(rec["field"])
        if field is not None and "field" in rec and rec["field"] != field.descriptor():
            raise CyclorthError("record field does not match", code="field-mismatch")
        if "multipliers" in rec:
            m = CyclotomicMap(F, tuple(rec["multipliers"]))
            if "index" in rec and rec["index"] != m.k:
                raise CyclorthError("index disagrees with multiplier count", code="bad-record")
            return m
        return PermutationMap(F, np.asarray(rec["table"], dtype=np.int64))
    except (KeyError, TypeError) as exc:
        raise CyclorthError(f"malformed map record: {exc}", code="bad-record") from exc
