"""Concrete coded structures behind a presentation.

Each structure lists its universe in canonical order and evaluates the
operations of its signature.  Nothing here is visible to decoders; they
only see codes through a diagram interface.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterator, Optional

from ..fieldtower import FieldCoding, MqElement, enumerate_tower, mq_inverse
from ..oracle import JoinedSet, OracleSet, join
from ..sring import KElement, RingCoding, Variant, enumerate_ring, field_for
from ..tfagroup import GroupCoding, enumerate_vectors

__all__ = [
    "FieldStructure",
    "RingStructure",
    "GroupStructure",
    "build_structure",
    "coding_from_json",
]


class _Structure:
    signature: str
    ops: dict[str, tuple[int, Callable]]
    constants: dict[str, object]

    def elements(self) -> Iterator:
        raise NotImplementedError

    def key(self, e) -> tuple:
        raise NotImplementedError


class FieldStructure(_Structure):
    """``M_X = Q(sqrt p_i : i in X)``."""

    signature = "field"

    def __init__(self, X: OracleSet):
        self.X = X
        self.ops = {
            "add": (2, lambda a, b: a + b),
            "neg": (1, lambda a: -a),
            "mul": (2, lambda a, b: a * b),
            "inv": (1, lambda a: None if a.is_zero() else mq_inverse(a)),
        }
        self.constants = {"zero": MqElement.rational(0), "one": MqElement.rational(1)}

    def elements(self) -> Iterator[MqElement]:
        return enumerate_tower(self.X.members())

    def key(self, e: MqElement) -> tuple:
        return e.key()


class RingStructure(_Structure):
    """``O_{K, W_X}`` for K = Q or a quadratic field."""

    signature = "ring"

    def __init__(self, X: OracleSet, d: Optional[int], variant: Variant):
        self.X = X
        self.field = field_for(d)
        self.variant = Variant(variant)
        self.ops = {
            "add": (2, lambda a, b: a + b),
            "neg": (1, lambda a: -a),
            "mul": (2, lambda a, b: a * b),
        }
        self.constants = {"zero": self.field.element(0), "one": self.field.element(1)}

    def elements(self) -> Iterator[KElement]:
        return enumerate_ring(self.field, self.X.members(), self.variant)

    def key(self, e: KElement) -> tuple:
        return e.key()


# Group vectors live internally as integer tuples (den, n_1, ..., n_k) in
# lowest terms; this keeps the decoders' many additions cheap.


def _gnorm(den: int, nums: list[int]) -> tuple:
    g = den
    for n in nums:
        g = math.gcd(g, n)
    if g > 1:
        den //= g
        nums = [n // g for n in nums]
    return (den, *nums)


def _gadd(a: tuple, b: tuple) -> tuple:
    da, db = a[0], b[0]
    if da == db:
        return _gnorm(da, [x + y for x, y in zip(a[1:], b[1:])])
    return _gnorm(da * db, [x * db + y * da for x, y in zip(a[1:], b[1:])])


def _gneg(a: tuple) -> tuple:
    return (a[0], *(-x for x in a[1:]))


def _gpack(v) -> tuple:
    den = 1
    for c in v:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return _gnorm(den, [int(c * den) for c in v])


def gunpack(t: tuple) -> tuple:
    return tuple(Fraction(n, t[0]) for n in t[1:])


class GroupStructure(_Structure):
    """``(O_{Q, V_X})^k`` with the standard generators as constants."""

    signature = "group"

    def __init__(self, X: OracleSet, k: int):
        self.X = X
        self.k = k
        self.ops = {"add": (2, _gadd), "neg": (1, _gneg)}
        self.constants = {"zero": (1,) + (0,) * k}
        for j in range(k):
            self.constants[f"g{j + 1}"] = (1,) + tuple(int(i == j) for i in range(k))

    def elements(self) -> Iterator[tuple]:
        return (_gpack(v) for v in enumerate_vectors(self.k, indices=self.X.members()))

    def key(self, e: tuple) -> tuple:
        return e


def build_structure(coding, D: OracleSet) -> _Structure:
    """The structure coding ``join(D)`` under ``coding``."""
    X: JoinedSet = join(D, coding.n_pairs)
    if isinstance(coding, FieldCoding):
        return FieldStructure(X)
    if isinstance(coding, RingCoding):
        return RingStructure(X, coding.d, coding.variant)
    if isinstance(coding, GroupCoding):
        return GroupStructure(X, coding.k)
    raise TypeError(f"unknown coding {coding!r}")


def coding_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "field":
        return FieldCoding(int(obj["n_pairs"]))
    if kind == "ring":
        d = obj.get("d")
        return RingCoding(int(obj["n_pairs"]), None if d is None else int(d), Variant(obj["variant"]))
    if kind == "group":
        return GroupCoding(int(obj["n_pairs"]), int(obj["k"]))
    raise ValueError(f"unknown coding kind {kind!r}")
