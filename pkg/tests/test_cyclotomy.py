from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclorth.cyclotomy import (
    class_members,
    class_of,
    indexer,
    is_class_permutation,
    multiplier_class_table,
)
from cyclorth.errors import DivisibilityError, ZeroArgumentError
from cyclorth.field import divisors, make_field, prime_powers


def test_labelling_convention():
    for q in (5, 8, 13, 61):
        F = make_field(q)
        for k in divisors(q - 1):
            if k >= 2:
                assert class_of(F, F.generator, k) == 1
            assert class_of(F, 1, k) == 0
        assert all(class_of(F, x, 1) == 0 for x in range(1, q))


def test_f5_quadratic_classes():
    F = make_field(5)
    assert class_members(F, 2, 0) == {1, 4}
    assert class_members(F, 2, 1) == {2, 3}


def test_f7_cubic_classes():
    F = make_field(7)
    assert class_members(F, 3, 0) == {1, 6}
    assert all(len(class_members(F, 3, i)) == 2 for i in range(3))


def test_singleton_and_plus_minus_classes():
    for q in (11, 13, 25, 27):
        F = make_field(q)
        for i in range(q - 1):
            assert class_members(F, q - 1, i) == {F.gpow(i)}
        h = (q - 1) // 2
        for i in range(h):
            x = min(class_members(F, h, i))
            assert class_members(F, h, i) == {x, F.neg(x)}


def test_errors():
    F = make_field(7)
    with pytest.raises(ZeroArgumentError):
        class_of(F, 0, 2)
    with pytest.raises(DivisibilityError):
        indexer(F, 4)
    with pytest.raises(IndexError):
        class_members(F, 3, 3)
    with pytest.raises(ZeroArgumentError):
        is_class_permutation(F, [0, 1])


def test_class_permutation_examples():
    F = make_field(5)
    assert is_class_permutation(F, [2, 3])  # both in class 1
    assert is_class_permutation(F, [4])
    # 2 (class 1) sends class 0 to 1; 1 (class 0) keeps class 1 at 1
    assert not is_class_permutation(F, [2, 1])


def test_multiplier_table_f5():
    t = multiplier_class_table(make_field(5), 2)
    assert t.M.tolist() == [[0, 1], [1, 1]]
    assert t.cells[0][1] == (4,) and t.cells[1][0] == (2,) and t.cells[1][1] == (3,)


@pytest.mark.parametrize("q", prime_powers(3, 64))
def test_multiplier_table_totals(q):
    F = make_field(q)
    assert multiplier_class_table(F, 1).M.tolist() == [[q - 2]]
    for k in divisors(q - 1):
        t = multiplier_class_table(F, k)
        assert int(t.M.sum()) == q - 2
        for u in range(k):
            for v in range(k):
                for a in t.cells[u][v]:
                    assert class_of(F, a, k) == u and class_of(F, F.sub(a, 1), k) == v


@pytest.mark.parametrize("q", [7, 13, 16, 25, 31, 37])
def test_partition_and_compatibility(q):
    F = make_field(q)
    for k in divisors(q - 1):
        parts = [class_members(F, k, i) for i in range(k)]
        assert sum(map(len, parts)) == q - 1
        assert set().union(*parts) == set(range(1, q))
        for k2 in divisors(k):
            for x in range(1, q):
                assert class_of(F, x, k2) == class_of(F, x, k) % k2


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([13, 16, 25, 31, 49, 61]), st.data())
def test_class_of_is_a_homomorphism(q, data):
    F = make_field(q)
    k = data.draw(st.sampled_from(divisors(q - 1)))
    x = data.draw(st.integers(1, q - 1))
    y = data.draw(st.integers(1, q - 1))
    assert class_of(F, F.mul(x, y), k) == (class_of(F, x, k) + class_of(F, y, k)) % k


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([13, 19, 25, 31, 37]), st.data())
def test_permutation_test_is_scale_invariant(q, data):
    F = make_field(q)
    k = data.draw(st.sampled_from(divisors(q - 1)))
    lams = data.draw(st.lists(st.integers(1, q - 1), min_size=k, max_size=k))
    c = data.draw(st.integers(1, q - 1))
    scaled = [F.mul(c, a) for a in lams]
    assert is_class_permutation(F, lams) == is_class_permutation(F, scaled)
    # brute: the induced index map is a bijection
    image = {(i + class_of(F, a, k)) % k for i, a in enumerate(lams)}
    assert is_class_permutation(F, lams) == (len(image) == k)


def test_constant_class_always_permutes():
    F = make_field(31)
    for k in divisors(30):
        for ell in range(k):
            members = sorted(class_members(F, k, ell))
            lams = [members[i % len(members)] for i in range(k)]
            assert is_class_permutation(F, lams)
