"""Cyclotomy classes of index k and the class-permutation test.

The character of order k is fixed by the field's generator: ``g`` lies in
class 1, so the class of a nonzero ``x`` is ``dlog(x) mod k``.  Characters
only ever enter through these integer labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DivisibilityError, ZeroArgumentError
from .field import FieldCtx


def _check_index(field: FieldCtx, k: int) -> None:
    if k < 1 or (field.q - 1) % k:
        raise DivisibilityError(f"k={k} does not divide q-1={field.q - 1}")


class ClassIndexer:
    """Class labels of index ``k`` for every element of ``field``.

    ``labels[x]`` is the class of ``x``; ``labels[0] == -1``.
    """

    def __init__(self, field: FieldCtx, k: int):
        _check_index(field, k)
        self.field = field
        self.k = k
        labels = np.where(field.log >= 0, field.log % k, -1)
        labels.setflags(write=False)
        self.labels = labels
        self._labels_l = labels.tolist()

    def of(self, x: int) -> int:
        if x == 0:
            raise ZeroArgumentError("zero lies in no cyclotomy class")
        return self._labels_l[x]

    def members(self, i: int) -> frozenset[int]:
        if not 0 <= i < self.k:
            raise IndexError(f"class index {i} out of range for k={self.k}")
        return frozenset(np.flatnonzero(self.labels == i).tolist())

    def is_permutation(self, lambdas: Sequence[int]) -> bool:
        """True iff ``C_i -> lambda_i C_i`` permutes the k classes."""
        k = self.k
        if len(lambdas) != k:
            raise ValueError(f"expected {k} multipliers, got {len(lambdas)}")
        seen = 0
        lab = self._labels_l
        for i, lam in enumerate(lambdas):
            if lam == 0:
                raise ZeroArgumentError("zero multiplier")
            bit = 1 << ((i + lab[lam]) % k)
            if seen & bit:
                return False
            seen |= bit
        return True


@lru_cache(maxsize=1024)
def indexer(field: FieldCtx, k: int) -> ClassIndexer:
    return ClassIndexer(field, k)


def class_of(field: FieldCtx, x: int, k: int) -> int:
    return indexer(field, k).of(x)


def class_members(field: FieldCtx, k: int, i: int) -> frozenset[int]:
    return indexer(field, k).members(i)


def is_class_permutation(field: FieldCtx, lambdas: Sequence[int]) -> bool:
    """Whether ``C_{k,i} -> lambda_i C_{k,i}`` permutes the classes, k = len(lambdas)."""
    return indexer(field, len(lambdas)).is_permutation(lambdas)


@dataclass(frozen=True)
class MultiplierClassTable:
    """``M[u, v]`` = #{a not in {0,1} : class(a) = u, class(a-1) = v}."""

    k: int
    M: np.ndarray
    cells: tuple  # cells[u][v] -> tuple of the elements a counted in M[u, v]


@lru_cache(maxsize=256)
def multiplier_class_table(field: FieldCtx, k: int) -> MultiplierClassTable:
    ix = indexer(field, k)
    cand = np.arange(2, field.q, dtype=np.int64)
    u = ix.labels[cand]
    v = ix.labels[field.sub_v(cand, 1)]
    M = np.zeros((k, k), dtype=np.int64)
    np.add.at(M, (u, v), 1)
    cells = [[[] for _ in range(k)] for _ in range(k)]
    for a, uu, vv in zip(cand.tolist(), u.tolist(), v.tolist()):
        cells[uu][vv].append(a)
    M.setflags(write=False)
    return MultiplierClassTable(k, M, tuple(tuple(tuple(c) for c in row) for row in cells))
