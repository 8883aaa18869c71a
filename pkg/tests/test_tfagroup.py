from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracle_algebra.numkit import INFINITY, nth_prime
from oracle_algebra.oracle import OracleSet, join
from oracle_algebra.tfagroup import (
    Characteristic,
    CodingGroup,
    GroupCoding,
    KnightDowneyGroup,
    NotAMember,
    Rank1TypeGroup,
    ZeroElement,
    baer_iso,
    brute_force_height,
    characteristic,
    enumerate_vectors,
    height,
    member,
    qvector,
    types_equivalent,
)

F = Fraction
p3 = nth_prime(3)

finite_heights = st.integers(0, 4)
chars = st.builds(
    Characteristic,
    st.just(0),
    st.dictionaries(st.integers(0, 6), st.one_of(finite_heights, st.just(INFINITY)), max_size=4),
)


def test_member_examples():
    Z2 = CodingGroup(2, OracleSet(6))
    assert member(Z2, (5, -3)) == (True, [])
    v = (F(1, p3), 2)
    assert member(CodingGroup(2, OracleSet(6, {3})), v) == (True, [3])
    assert member(CodingGroup(2, OracleSet(6, {1})), v) == (False, [3])
    for D in (set(), {0, 1}):
        kd = KnightDowneyGroup(OracleSet(2, D), 2)
        assert member(kd, (F(1, 9),))[0] is False


def test_height_examples():
    Z = CodingGroup(1, OracleSet(4))
    assert height(Z, (1,), 2) == 0
    assert height(CodingGroup(1, OracleSet(4, {0})), (1,), 2) is INFINITY
    kd = KnightDowneyGroup(OracleSet(2, {0}), 2)
    assert 0 in kd.X
    assert height(kd, (1,), 2) == 1
    with pytest.raises(ZeroElement):
        height(Z, (0,), 2)
    with pytest.raises(NotAMember):
        height(Z, (F(1, 2),), 2)


def test_characteristic_examples():
    Z = CodingGroup(1, OracleSet(4))
    assert characteristic(Z, (1,), 8) == Characteristic(0)
    full = CodingGroup(1, OracleSet(4, range(4)))
    assert characteristic(full, (1,), 4).default == 0  # only four places are coded
    assert all(characteristic(full, (1,), 4)[i] is INFINITY for i in range(4))
    kd = KnightDowneyGroup(OracleSet(2, {0}), 2)
    chi = characteristic(kd, (1,), 4)
    assert chi.exceptions == {0: 1, 3: 1}


def test_types_examples():
    assert types_equivalent(Characteristic(0), Characteristic(0, {0: 1}))
    assert not types_equivalent(Characteristic(0), Characteristic(0, {0: INFINITY}))
    assert not types_equivalent(Characteristic(0), Characteristic(INFINITY))


def test_baer_examples():
    chi = Characteristic(0, {1: 3})
    assert baer_iso(chi, chi) == 1
    # Z -> (1/4)Z is x -> x/4; its inverse multiplies by 4
    m = baer_iso(Characteristic(0), Characteristic(0, {0: 2}))
    assert m == F(1, 4)
    assert baer_iso(Characteristic(0, {0: 2}), Characteristic(0)) == 4
    assert baer_iso(Characteristic(0), Characteristic(INFINITY)) is None


@given(chars, chars)
def test_baer_iff_types(c1, c2):
    m = baer_iso(c1, c2)
    assert (m is not None) == types_equivalent(c1, c2)
    if m is None:
        return
    G, H = Rank1TypeGroup(c1), Rank1TypeGroup(c2)
    for n, i, e in itertools.product([1, -3, 10], range(5), range(4)):
        x = F(n, nth_prime(i) ** e)
        assert G.member((x,))[0] == H.member((m * x,))[0]


@given(chars, st.integers(0, 5), st.fractions(max_denominator=50).filter(lambda q: q != 0))
def test_height_vs_brute_force(chi, i, q):
    g = Rank1TypeGroup(chi)
    if not g.member((q,))[0]:
        return
    p = nth_prime(i)
    h = height(g, (q,), p)
    bf = brute_force_height(g, (q,), p, depth=12)
    assert bf == (12 if h is INFINITY or h >= 12 else h)


@given(st.frozensets(st.integers(0, 7)))
def test_knight_downey_height_one_set(D):
    g = KnightDowneyGroup(OracleSet(8, D), 8)
    ones = {i for i in range(16) if height(g, (1,), nth_prime(i)) == 1}
    assert ones == set(join(OracleSet(8, D), 8).support)


@given(chars)
def test_characteristic_json(chi):
    assert Characteristic.from_json(chi.to_json()) == chi


def test_characteristic_validation():
    with pytest.raises(ValueError):
        Characteristic(3)
    with pytest.raises(ValueError):
        Characteristic(0, {1: -1})
    assert Characteristic(0, {2: 0}).exceptions == {}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_enumerate_vectors(k):
    X = OracleSet(6, {0, 3})
    g = CodingGroup(k, X)
    items = list(itertools.islice(enumerate_vectors(k, indices=X.members()), 2000))
    assert len(set(items)) == len(items)
    assert all(member(g, v)[0] for v in items)
    target = (F(1, 2),) + (F(0),) * (k - 1)
    assert target in items


def test_group_coding():
    assert GroupCoding(3, 2).to_json() == {"kind": "group", "n_pairs": 3, "k": 2}
    with pytest.raises(ValueError):
        GroupCoding(3, 0)
    assert qvector(1, "1/2") == (F(1), F(1, 2))
