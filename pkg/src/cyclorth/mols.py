"""Latin squares from orthogonal orthomorphisms, with an independent checker.

Given pairwise orthogonal orthomorphisms t_1..t_n of F_q, the squares

    L_0(x, y) = x + y,    L_i(x, y) = t_i(x) + y

are n + 1 mutually orthogonal Latin squares of order q.  Rows are indexed
by x and columns by y, both by element encoding.

The checker at the bottom only looks at integer arrays, so it does not
share any code with the orthomorphism predicates it is meant to confirm.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CyclorthError, NotOrthomorphismError
from .field import FieldCtx
from .orthomorphism import AnyMap, are_orthogonal_tables, as_table, is_orthomorphism_table


def squares_from_maps(field: FieldCtx, maps: Sequence[AnyMap]) -> list[np.ndarray]:
    """The n + 1 squares for n orthomorphisms; raises unless the input is pairwise orthogonal."""
    F = field
    for m in maps:
        if m.field != F:
            raise CyclorthError("maps live over different fields", code="field-mismatch")
        if not is_orthomorphism_table(m):
            raise NotOrthomorphismError("every map must be an orthomorphism")
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            if not are_orthogonal_tables(maps[i], maps[j]):
                raise CyclorthError(f"maps {i} and {j} are not orthogonal", code="not-orthogonal")
    ys = F.elements[None, :]
    out = [F.add_v(F.elements[:, None], ys)]
    for m in maps:
        out.append(F.add_v(as_table(m).table()[:, None], ys))
    return out


def build_mols(field: FieldCtx, maps: Sequence[AnyMap]) -> list[np.ndarray]:
    """Like :func:`squares_from_maps`, but re-checked before returning."""
    sq = squares_from_maps(field, maps)
    if not all(is_latin(s) for s in sq) or not mutually_orthogonal(sq):
        raise AssertionError("constructed squares failed the independent check")
    return sq


# -- independent checker ---------------------------------------------------------------


def is_latin(square: np.ndarray) -> bool:
    s = np.asarray(square)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        return False
    n = s.shape[0]
    if s.size and (s.min() < 0 or s.max() >= n):
        return False
    want = np.arange(n)
    return bool(np.all(np.sort(s, axis=0) == want[:, None]) and np.all(np.sort(s, axis=1) == want))


def are_orthogonal_squares(a: np.ndarray, b: np.ndarray) -> bool:
    """Superimposing a and b yields every ordered symbol pair exactly once."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    n = a.shape[0]
    pairs = (a.astype(np.int64) * n + b).ravel()
    return bool(np.unique(pairs).size == n * n)


def mutually_orthogonal(squares: Sequence[np.ndarray]) -> bool:
    return all(are_orthogonal_squares(squares[i], squares[j])
               for i in range(len(squares)) for j in range(i + 1, len(squares)))


# -- text format ---------------------------------------------------------------------


def format_square(square: np.ndarray) -> str:
    """One row per line, space-separated symbols."""
    return "".join(" ".join(map(str, row)) + "\n" for row in np.asarray(square).tolist())


def parse_square(text: str) -> np.ndarray:
    rows = [[int(v) for v in line.split()] for line in text.splitlines() if line.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise CyclorthError("square text is not n lines of n integers", code="bad-square")
    return np.array(rows, dtype=np.int64)


def sidecar(field: FieldCtx, maps: Sequence[AnyMap], files: Sequence[str]) -> dict:
    from .orthomorphism import to_record

    return {
        "field": field.descriptor(),
        "order": field.q,
        "squares": list(files),
        "maps": [to_record(m) for m in maps],
        "construction": ["x+y"] + [f"map{i}(x)+y" for i in range(1, len(maps) + 1)],
    }


def write_mols(outdir: str | Path, field: FieldCtx, maps: Sequence[AnyMap],
               stem: str = "square") -> list[Path]:
    """Write ``stem{i}.txt`` per square plus ``stem.json``; returns all paths written."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    squares = build_mols(field, maps)
    paths = []
    for i, s in enumerate(squares):
        p = out / f"{stem}{i}.txt"
        p.write_text(format_square(s))
        paths.append(p)
    meta = out / f"{stem}.json"
    meta.write_text(json.dumps(sidecar(field, maps, [p.name for p in paths]), sort_keys=True,
                               indent=2) + "\n")
    return paths + [meta]
