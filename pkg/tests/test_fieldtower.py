from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracle_algebra.fieldtower import (
    FieldCoding,
    MqElement,
    conjugate_product,
    enumerate_tower,
    find_root_T2_minus_p,
    member_of_MX,
    mq_add,
    mq_inverse,
    mq_mul,
    rational_norm,
    support,
    verify_stability,
    verify_total_linear_disjointness,
)
from oracle_algebra.numkit import nth_prime
from oracle_algebra.oracle import Dovetailer, OracleSet, OutOfBound

S2 = MqElement.sqrt_prime(0)
S3 = MqElement.sqrt_prime(1)
ONE = MqElement.rational(1)


def as_float(a: MqElement) -> float:
    """Independent numeric evaluation of an element."""
    total = 0.0
    for mask, c in a.terms:
        r = 1.0
        for i in range(mask.bit_length()):
            if mask >> i & 1:
                r *= math.sqrt(nth_prime(i))
        total += float(c) * r
    return total


coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elements = st.dictionaries(st.integers(0, 15), coeffs, max_size=4).map(MqElement)
nonzero = elements.filter(lambda a: not a.is_zero())


def test_add_examples():
    assert (S2 + S3).coords == {frozenset({0}): 1, frozenset({1}): 1}
    assert mq_add(S2, MqElement()) == S2
    assert mq_add(1 + S2, 1 - S2) == MqElement.rational(2)


def test_mul_examples():
    assert mq_mul(S2, S3).coords == {frozenset({0, 1}): 1}
    assert S2 * S2 == MqElement.rational(2)
    assert (1 + S2) * (1 - S2) == MqElement.rational(-1)


def test_inverse_examples():
    assert mq_inverse(MqElement.rational(2)) == MqElement.rational(Fraction(1, 2))
    assert mq_inverse(1 + S2) == S2 - 1
    a = 1 + S2 + S3
    assert a * mq_inverse(a) == ONE
    # conjugate-product oracle
    assert mq_inverse(a) == conjugate_product(a) * (1 / rational_norm(a))
    with pytest.raises(ZeroDivisionError):
        mq_inverse(MqElement())


def test_support_examples():
    assert support(MqElement.rational(Fraction(7, 3))) == frozenset()
    assert support(S2 * S3) == {0, 1}
    a = MqElement.from_subsets({(): 1, (0,): 1, (0, 2): 1})
    assert support(a) == {0, 2}


def test_member_examples():
    X = OracleSet(4, {0, 3})
    assert member_of_MX(MqElement.rational(Fraction(5, 2)), X) == (True, [])
    assert member_of_MX(S2, X) == (True, [0])
    assert member_of_MX(S3, X) == (False, [1])
    with pytest.raises(OutOfBound):
        member_of_MX(MqElement.sqrt_prime(4), X)


@given(elements, elements)
def test_ring_laws_numerically(a, b):
    assert math.isclose(as_float(a + b), as_float(a) + as_float(b), rel_tol=1e-9, abs_tol=1e-6)
    assert math.isclose(as_float(a * b), as_float(a) * as_float(b), rel_tol=1e-9, abs_tol=1e-6)
    assert a * b == b * a
    assert a + (-a) == MqElement()


@given(elements, elements, elements)
def test_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60)
@given(nonzero)
def test_inverse_property(a):
    assert a * mq_inverse(a) == ONE


@given(elements)
def test_json_roundtrip(a):
    assert MqElement.from_json(a.to_json()) == a


def test_disjointness_examples():
    assert verify_total_linear_disjointness([0])
    assert verify_total_linear_disjointness([0, 1, 2])
    assert not verify_total_linear_disjointness([1, 1])
    for k in range(7):
        assert verify_total_linear_disjointness(range(k + 1))


def test_stability_examples():
    assert verify_stability([0])
    assert verify_stability([0, 1])
    assert verify_stability([])
    for k in range(7):
        assert verify_stability(range(k + 1))


def test_find_root():
    task = find_root_T2_minus_p([ONE, S3, S2], 2)
    assert next(iter(Dovetailer([task]).run(10)))[1] == S2
    rationals = (MqElement.rational(Fraction(n, d)) for n in range(-30, 30) for d in range(1, 10))
    task = find_root_T2_minus_p(rationals, 2)
    assert list(Dovetailer([task]).run(10_000)) == []


def test_find_root_in_canonical_enumeration():
    task = find_root_T2_minus_p(enumerate_tower([0, 3]), nth_prime(3))
    (_, w), = Dovetailer([task]).run(10_000)
    assert w * w == MqElement.rational(7)
    assert task.steps < 100


def test_enumeration_is_injective_and_complete():
    first = list(itertools.islice(enumerate_tower([0, 1]), 3000))
    assert first[0].is_zero()
    assert len(set(first)) == len(first)
    assert all(support(a) <= {0, 1} for a in first)
    for target in [S2, S3, S2 * S3, 1 + S2, MqElement.rational(Fraction(-1, 3))]:
        assert target in first


def test_full_tower_enumeration():
    first = list(itertools.islice(enumerate_tower(None), 2000))
    assert len(set(first)) == len(first)
    assert S2 in first and S3 in first


def test_field_coding():
    c = FieldCoding(3)
    assert c.polynomials()[1] == (1, 0, -3)
    assert c.to_json() == {"kind": "field", "n_pairs": 3}
    with pytest.raises(ValueError):
        FieldCoding(-1)
