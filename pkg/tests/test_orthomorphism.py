from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    SlowField,
    brute_orthogonal,
    brute_orthomorphism,
    brute_strong,
    cyclotomic_table,
)
from cyclorth.constructions import construct_irregular, near_linear_all
from cyclorth.errors import CyclorthError, DivisibilityError, NotOrthomorphismError
from cyclorth.field import divisors, make_field, prime_powers
from cyclorth.orthomorphism import (
    CyclotomicMap,
    PermutationMap,
    are_orthogonal,
    are_orthogonal_tables,
    as_table,
    evaluate,
    evaluate_polynomial,
    from_record,
    is_irregular,
    is_noncyclotomic,
    is_orthomorphism,
    is_orthomorphism_table,
    is_strong,
    is_strong_table,
    least_index,
    least_index_of_table,
    lift_index,
    linear,
    to_polynomial,
    to_record,
    translate,
)

F61_LISTS = [(8, 31), (14, 44, 44), (47, 11, 11, 11, 11)]


def test_evaluate_examples():
    F = make_field(5)
    assert evaluate(CyclotomicMap(F, (2, 3)), 2) == 1
    m = CyclotomicMap(F, (2, 3))
    assert m(0) == 0
    assert all(evaluate(linear(F, 3), x) == 3 * x % 5 for x in range(5))


def test_table_matches_generator_walk():
    for q in (13, 16, 27):
        F = make_field(q)
        S = SlowField(F)
        for k in divisors(q - 1):
            mult = [(3 * i + 2) % q or 2 for i in range(k)]
            m = CyclotomicMap(F, mult)
            assert m.table().tolist() == cyclotomic_table(F, mult, S)


def test_type_validation():
    F = make_field(7)
    with pytest.raises(DivisibilityError):
        CyclotomicMap(F, (2, 3, 4, 5))
    with pytest.raises(CyclorthError):
        CyclotomicMap(F, (9,))
    with pytest.raises(CyclorthError):
        PermutationMap(F, [0, 1])


def test_linear_and_published_examples():
    F = make_field(7)
    assert is_orthomorphism(linear(F, 3)) and not is_orthomorphism(linear(F, 1))
    assert not is_orthomorphism(linear(F, 0))
    F61 = make_field(61)
    maps = [CyclotomicMap(F61, m) for m in F61_LISTS]
    assert all(is_orthomorphism(m) for m in maps)
    assert [least_index(m) for m in maps] == [2, 3, 5]
    for a, b in itertools.combinations(maps, 2):
        assert are_orthogonal(a, b) and are_orthogonal_tables(a, b)


def test_strong_examples():
    F7 = make_field(7)
    assert is_strong(linear(F7, 3))
    assert not is_strong(linear(F7, 6))  # -1
    F8 = make_field(8)
    for m in near_linear_all(F8, 7)[:50] + [linear(F8, a) for a in range(2, 8)]:
        assert is_strong(m) == is_orthomorphism(m)


def test_lift_and_least_index():
    F = make_field(61)
    m = CyclotomicMap(F, (8, 31))
    lifted = lift_index(m, 6)
    assert lifted.multipliers == (8, 31, 8, 31, 8, 31)
    assert least_index(lifted) == 2 and least_index_of_table(lifted) == 2
    assert np.array_equal(lifted.table(), m.table())
    assert lift_index(linear(F, 5), 3).multipliers == (5, 5, 5)
    assert least_index(CyclotomicMap(F, (5, 5, 5))) == 1
    with pytest.raises(DivisibilityError):
        lift_index(m, 3)
    with pytest.raises(DivisibilityError):
        lift_index(m, 8)


def test_orthogonality_examples():
    F = make_field(5)
    assert are_orthogonal(linear(F, 2), linear(F, 3))
    m = CyclotomicMap(make_field(61), (8, 31))
    assert not are_orthogonal(m, m)
    with pytest.raises(CyclorthError):
        are_orthogonal(linear(F, 2), linear(make_field(7), 3))


def test_table_predicates_basic():
    F = make_field(3)
    ident = PermutationMap(F, [0, 1, 2])
    double = PermutationMap(F, [0, 2, 1])
    assert not is_orthomorphism_table(ident) and is_orthomorphism_table(double)
    with pytest.raises(CyclorthError):
        are_orthogonal_tables(double, PermutationMap(make_field(5), [0, 1, 2, 3, 4]))


def test_least_index_of_table_examples():
    F9 = make_field(9)
    theta = near_linear_all(F9, 2)[0]
    t1 = translate(theta, 1)
    assert is_orthomorphism_table(t1) and least_index_of_table(t1) == 8 and is_noncyclotomic(t1)
    assert least_index_of_table(linear(F9, 2)) == 1
    moved = PermutationMap(F9, np.roll(np.arange(9), 1))
    assert least_index_of_table(moved) is None and not is_noncyclotomic(moved)


def test_translation_basics():
    F = make_field(13)
    lin = linear(F, 5)
    for g in range(13):
        assert translate(lin, g) == as_table(lin)
    theta = near_linear_all(F, 3)[0]
    assert translate(theta, 0) == as_table(theta)


def test_irregularity():
    F = make_field(8)
    assert not is_irregular(linear(F, 3))
    assert is_irregular(construct_irregular(F))
    assert is_irregular(construct_irregular(make_field(32)))
    with pytest.raises(NotOrthomorphismError):
        is_irregular(linear(F, 1))


def test_polynomial_form():
    F = make_field(13)
    assert to_polynomial(linear(F, 7)) == [7]
    m = near_linear_all(F, 2)[0]
    c = to_polynomial(m)
    assert c[1] != 0
    assert all(evaluate_polynomial(F, c, x) == evaluate(m, x) for x in range(13))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([13, 16, 25, 31]), st.data())
def test_polynomial_agrees_pointwise(q, data):
    F = make_field(q)
    k = data.draw(st.sampled_from(divisors(q - 1)))
    mult = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    m = CyclotomicMap(F, mult)
    c = to_polynomial(m)
    assert [evaluate_polynomial(F, c, x) for x in range(q)] == m.table().tolist()


@pytest.mark.parametrize("q", prime_powers(3, 31))
def test_class_level_predicates_match_brute_force(q):
    F = make_field(q)
    S = SlowField(F)
    rng = np.random.default_rng(q)
    for k in [d for d in divisors(q - 1) if d <= 6]:
        if q**k <= 4000:
            lists = itertools.product(range(q), repeat=k)
        else:
            lists = (tuple(rng.integers(0, q, size=k).tolist()) for _ in range(1500))
        orths = []
        for mult in lists:
            m = CyclotomicMap(F, mult)
            tab = cyclotomic_table(F, mult, S)
            o = brute_orthomorphism(tab, S)
            assert is_orthomorphism(m) == o == is_orthomorphism_table(m)
            assert is_strong(m) == brute_strong(tab, S) == is_strong_table(m)
            if o:
                orths.append((m, tab))
        for (m1, t1), (m2, t2) in zip(orths[::2], orths[1::2]):
            assert are_orthogonal(m1, m2) == brute_orthogonal(t1, t2, S) == are_orthogonal_tables(m1, m2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([13, 25, 31, 37, 61]), st.data())
def test_lift_preserves_least_index(q, data):
    F = make_field(q)
    k = data.draw(st.sampled_from(divisors(q - 1)))
    mult = data.draw(st.lists(st.integers(2, q - 1), min_size=k, max_size=k))
    m = CyclotomicMap(F, mult)
    k2 = data.draw(st.sampled_from([d for d in divisors(q - 1) if d % k == 0]))
    lifted = lift_index(m, k2)
    assert least_index(lifted) == least_index(m) == least_index_of_table(m)
    assert np.array_equal(lifted.table(), m.table())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([13, 16, 19, 25]), st.data())
def test_translation_preserves_orthogonality(q, data):
    F = make_field(q)
    k = min(d for d in divisors(q - 1) if d > 1)
    theta = data.draw(st.sampled_from(near_linear_all(F, k)))
    partners = [linear(F, c) for c in range(2, q) if are_orthogonal(theta, linear(F, c))]
    other = data.draw(st.sampled_from(partners)) if partners else None
    g = data.draw(st.integers(0, q - 1))
    t1 = translate(theta, g)
    assert t1(0) == 0 and is_orthomorphism_table(t1)
    if other is not None:
        assert are_orthogonal_tables(t1, translate(other, g))


@pytest.mark.parametrize("q,m", [(4, 2), (3, 2), (5, 2)])
def test_subfield_lift_keeps_orthomorphisms(q, m):
    small, big = make_field(q), make_field(q**m)
    emb = big.embedding_from(small)
    seen = 0
    for k in divisors(q - 1):
        for mult in itertools.product(range(q), repeat=k):
            if is_orthomorphism(CyclotomicMap(small, mult)):
                lifted = CyclotomicMap(big, [emb[a] for a in mult])
                assert is_orthomorphism(lifted) and is_orthomorphism_table(lifted)
                seen += 1
    assert seen > 0


def test_subfield_lift_can_fail_for_larger_index():
    # over F_7 this index-6 list is an orthomorphism, over F_49 it is not
    small, big = make_field(7), make_field(49)
    emb = big.embedding_from(small)
    mult = (2, 4, 3, 3, 6, 3)
    assert is_orthomorphism(CyclotomicMap(small, mult))
    assert not is_orthomorphism_table(CyclotomicMap(big, [emb[a] for a in mult]))


@pytest.mark.parametrize("q,Q", [(4, 16), (5, 25), (7, 49)])
def test_near_linear_lift_from_subfield(q, Q):
    small, big = make_field(q), make_field(Q)
    emb = big.embedding_from(small)
    k = (Q - 1) // (q - 1)
    for a1, a2 in itertools.permutations(range(2, q), 2):
        m = CyclotomicMap(big, (emb[a1],) + (emb[a2],) * (k - 1))
        assert is_orthomorphism(m) and is_orthomorphism_table(m)
        assert least_index(m) == k == least_index_of_table(m)


def test_minimum_difference_of_orthomorphisms():
    for q in (7, 8, 9, 11, 13, 16):
        F = make_field(q)
        pool = []
        for k in divisors(q - 1):
            if k >= 2:
                pool += near_linear_all(F, k)[:40]
        pool += [linear(F, a) for a in range(2, q)]
        tables = [as_table(m).table() for m in pool]
        for t1, t2 in itertools.combinations(tables, 2):
            diff = int((t1 != t2).sum())
            assert diff == 0 or diff >= 3


def test_records_round_trip():
    F = make_field(27)
    m = CyclotomicMap(F, (2, 5))
    rec = to_record(m)
    assert rec == {"field": F.descriptor(), "index": 2, "multipliers": [2, 5]}
    assert from_record(rec) == m
    t = as_table(m)
    assert from_record(to_record(t)) == t
    with pytest.raises(CyclorthError) as info:
        from_record({"field": F.descriptor(), "index": 3, "multipliers": [2, 5]})
    assert info.value.code == "bad-record"
    with pytest.raises(CyclorthError):
        from_record({"index": 2})
    with pytest.raises(CyclorthError) as info:
        from_record(rec, make_field(13))
    assert info.value.code == "field-mismatch"
