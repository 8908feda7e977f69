from __future__ import annotations

import itertools
import json
import time

import numpy as np
import pytest

from conftest import SlowField
from cyclorth.errors import CyclorthError, NotOrthomorphismError
from cyclorth.field import make_field
from cyclorth.mols import (
    are_orthogonal_squares,
    build_mols,
    format_square,
    is_latin,
    mutually_orthogonal,
    parse_square,
    sidecar,
    squares_from_maps,
    write_mols,
)
from cyclorth.orthomorphism import CyclotomicMap, PermutationMap, linear
from cyclorth.search import PUBLISHED, validate_published


def f61_triple():
    return validate_published(PUBLISHED["F61"], "F61").maps


def test_no_maps_gives_addition_table():
    F = make_field(9)
    slow = SlowField(F)
    (sq,) = build_mols(F, [])
    assert sq.tolist() == [[slow.add(x, y) for y in range(9)] for x in range(9)]


def test_linear_maps_give_complete_set():
    F = make_field(7)
    sq = build_mols(F, [linear(F, c) for c in range(2, 7)])
    assert len(sq) == 6
    assert all(is_latin(s) for s in sq) and mutually_orthogonal(sq)


def test_square_entries_follow_the_map():
    F = make_field(5)
    slow = SlowField(F)
    sq = squares_from_maps(F, [linear(F, 2)])
    assert sq[1].tolist() == [[slow.add(slow.mul(2, x), y) for y in range(5)] for x in range(5)]


def test_f61_triple_gives_four_mols():
    maps = f61_triple()
    assert maps[0].field.q == 61
    start = time.perf_counter()
    sq = build_mols(maps[0].field, maps)
    assert time.perf_counter() - start < 5
    assert len(sq) == 4 and all(s.shape == (61, 61) for s in sq)
    assert all(is_latin(s) for s in sq) and mutually_orthogonal(sq)


def test_rejects_non_orthogonal_maps():
    F = make_field(7)
    with pytest.raises(CyclorthError) as exc:
        squares_from_maps(F, [linear(F, 2), linear(F, 2)])
    assert exc.value.code == "not-orthogonal"


def test_rejects_non_orthomorphism():
    F = make_field(7)
    with pytest.raises(NotOrthomorphismError):
        squares_from_maps(F, [PermutationMap(F, tuple(range(7)))])


def test_rejects_field_mismatch():
    with pytest.raises(CyclorthError) as exc:
        squares_from_maps(make_field(7), [linear(make_field(11), 2)])
    assert exc.value.code == "field-mismatch"


# -- checker ---------------------------------------------------------------------------


def brute_latin(s):
    n = len(s)
    return all(sorted(r) == list(range(n)) for r in s) and all(
        sorted(col) == list(range(n)) for col in zip(*s))


def brute_orthogonal(a, b):
    n = len(a)
    return len({(a[i][j], b[i][j]) for i in range(n) for j in range(n)}) == n * n


def test_checker_agrees_with_brute_on_small_squares():
    rng = np.random.default_rng(5)
    cyclic = [[(i + j) % 4 for j in range(4)] for i in range(4)]
    other = [[(2 * i + j) % 5 for j in range(5)] for i in range(5)]
    samples = [cyclic, other, rng.integers(0, 4, size=(4, 4)).tolist()]
    for s in samples:
        assert is_latin(np.array(s)) == brute_latin(s)
    for a, b in itertools.product(samples[:2], repeat=2):
        if len(a) == len(b):
            assert are_orthogonal_squares(np.array(a), np.array(b)) == brute_orthogonal(a, b)


def test_checker_rejects_bad_shapes_and_symbols():
    assert not is_latin(np.zeros((2, 3), dtype=int))
    assert not is_latin(np.array([[0, 2], [2, 0]]))
    assert not is_latin(np.array([[0, 1], [0, 1]]))
    assert not are_orthogonal_squares(np.zeros((2, 2)), np.zeros((3, 3)))


def test_cyclic_group_of_order_two_has_no_orthogonal_mate():
    a = np.array([[0, 1], [1, 0]])
    assert not are_orthogonal_squares(a, a)
    assert not are_orthogonal_squares(a, np.array([[1, 0], [0, 1]]))


# -- text and files ------------------------------------------------------------------


def test_format_parse_round_trip():
    F = make_field(8)
    sq = build_mols(F, [linear(F, 2)])
    for s in sq:
        text = format_square(s)
        assert text.count("\n") == 8
        assert np.array_equal(parse_square(text), s)


def test_parse_rejects_ragged_text():
    with pytest.raises(CyclorthError) as exc:
        parse_square("0 1\n1\n")
    assert exc.value.code == "bad-square"
    with pytest.raises(CyclorthError):
        parse_square("")


def test_write_mols(tmp_path):
    F = make_field(13)
    maps = [CyclotomicMap(F, (c,)) for c in (2, 3)]
    paths = write_mols(tmp_path / "out", F, maps, stem="ls")
    names = [p.name for p in paths]
    assert names == ["ls0.txt", "ls1.txt", "ls2.txt", "ls.json"]
    squares = [parse_square(p.read_text()) for p in paths[:3]]
    assert all(is_latin(s) for s in squares) and mutually_orthogonal(squares)
    meta = json.loads(paths[-1].read_text())
    assert meta["order"] == 13 and meta["squares"] == names[:3]
    assert meta == sidecar(F, maps, names[:3])
    assert meta["construction"] == ["x+y", "map1(x)+y", "map2(x)+y"]
