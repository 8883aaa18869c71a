"""Multiquadratic towers Q(sqrt(p_i) : i in I).

An element is a finite sum ``sum_S c_S * prod_{i in S} sqrt(p_i)`` with
rational ``c_S``.  Subsets ``S`` are stored as bitmasks over prime indices,
so the basis law reads ``w(S) * w(T) = (prod of p_i, i in S & T) * w(S ^ T)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping

from .numkit import nth_prime
from .oracle import NOT_YET, Found, OracleSet, OutOfBound, SearchTask

__all__ = [
    "MqElement",
    "FieldCoding",
    "mq_add",
    "mq_mul",
    "mq_inverse",
    "support",
    "member_of_MX",
    "verify_total_linear_disjointness",
    "verify_stability",
    "find_root_T2_minus_p",
    "sign_conjugate",
    "rational_norm",
    "conjugate_product",
    "enumerate_tower",
    "tower_level",
    "rationals_of_height",
    "uniform_cost",
    "absolute_cost",
    "element_weight",
]


@lru_cache(maxsize=None)
def _mask_prime_product(mask: int) -> int:
    out, i = 1, 0
    while mask:
        if mask & 1:
            out *= nth_prime(i)
        mask >>= 1
        i += 1
    return out


def _bits(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if i < 0:
            raise ValueError("prime indices are nonnegative")
        m |= 1 << i
    return m


class MqElement:
    """Immutable element of a multiquadratic tower in canonical (trimmed) form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Fraction] | None = None):
        # terms: bitmask -> coefficient
        items = []
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    items.append((m, c))
        items.sort()
        self._terms = tuple(items)
        self._hash = None

    @classmethod
    def _raw(cls, items: tuple) -> "MqElement":
        obj = object.__new__(cls)
        obj._terms = items
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q) -> "MqElement":
        q = Fraction(q)
        return cls._raw(((0, q),) if q else ())

    @classmethod
    def sqrt_prime(cls, i: int) -> "MqElement":
        """The positive square root of ``p_i``."""
        return cls._raw(((1 << i, Fraction(1)),))

    @classmethod
    def from_subsets(cls, coords: Mapping[Iterable[int], object]) -> "MqElement":
        terms: dict[int, Fraction] = {}
        for S, c in coords.items():
            m = _mask(S)
            terms[m] = terms.get(m, Fraction(0)) + Fraction(c)
        return cls(terms)

    # -- views ---------------------------------------------------------------
    @property
    def terms(self) -> tuple:
        """Sorted ``(bitmask, coefficient)`` pairs, no zero coefficients."""
        return self._terms

    @property
    def coords(self) -> dict[frozenset, Fraction]:
        return {frozenset(_bits(m)): c for m, c in self._terms}

    @property
    def index_mask(self) -> int:
        m = 0
        for t, _ in self._terms:
            m |= t
        return m

    @property
    def index_set(self) -> frozenset:
        return frozenset(_bits(self.index_mask))

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 0)

    def rational_part(self) -> Fraction:
        if self._terms and self._terms[0][0] == 0:
            return self._terms[0][1]
        return Fraction(0)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MqElement):
            other = MqElement.rational(other)
        acc = dict(self._terms)
        for m, c in other._terms:
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return MqElement._raw(tuple(sorted(acc.items())))

    __radd__ = __add__

    def __neg__(self):
        return MqElement._raw(tuple((m, -c) for m, c in self._terms))

    def __sub__(self, other):
        if not isinstance(other, MqElement):
            other = MqElement.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return MqElement.rational(other) - self

    def __mul__(self, other):
        if not isinstance(other, MqElement):
            q = Fraction(other)
            if not q:
                return MqElement._raw(())
            return MqElement._raw(tuple((m, c * q) for m, c in self._terms))
        acc: dict[int, Fraction] = {}
        for m1, c1 in self._terms:
            for m2, c2 in other._terms:
                common = m1 & m2
                c = c1 * c2
                if common:
                    c *= _mask_prime_product(common)
                m = m1 ^ m2
                acc[m] = acc.get(m, 0) + c
        return MqElement._raw(tuple(sorted((m, c) for m, c in acc.items() if c)))

    __rmul__ = __mul__

    def inverse(self) -> "MqElement":
        return mq_inverse(self)

    def __truediv__(self, other):
        if not isinstance(other, MqElement):
            other = MqElement.rational(other)
        return self * mq_inverse(other)

    def __eq__(self, other):
        if isinstance(other, MqElement):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MqElement.rational(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "MqElement(0)"
        parts = []
        for m, c in self._terms:
            basis = "*".join(f"sqrt({nth_prime(i)})" for i in _bits(m))
            if not basis:
                parts.append(str(c))
            elif c == 1:
                parts.append(basis)
            else:
                parts.append(f"({c})*{basis}")
        return "MqElement(" + " + ".join(parts) + ")"

    # -- serialization -------------------------------------------------------
    def key(self) -> tuple:
        return tuple((m, c.numerator, c.denominator) for m, c in self._terms)

    def to_json(self) -> dict:
        return {
            "terms": [
                {"indices": _bits(m), "num": str(c.numerator), "den": str(c.denominator)}
                for m, c in self._terms
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MqElement":
        terms: dict[int, Fraction] = {}
        for t in obj["terms"]:
            idx = t["indices"]
            if list(idx) != sorted(set(idx)):
                raise ValueError("term indices must be sorted and distinct")
            m = _mask(idx)
            if m in terms:
                raise ValueError("duplicate basis term")
            terms[m] = Fraction(int(t["num"]), int(t["den"]))
        return cls(terms)


def mq_add(a: MqElement, b: MqElement) -> MqElement:
    return a + b


def mq_mul(a: MqElement, b: MqElement) -> MqElement:
    return a * b


def sign_conjugate(a: MqElement, flips: int) -> MqElement:
    """Image of ``a`` under ``sqrt(p_i) -> -sqrt(p_i)`` for every bit ``i`` of ``flips``."""
    return MqElement._raw(
        tuple((m, -c if bin(m & flips).count("1") & 1 else c) for m, c in a.terms)
    )


def _split_on(a: MqElement, bit: int) -> tuple[MqElement, MqElement]:
    """Write ``a = b + c*sqrt(p_bit)`` with ``b, c`` free of that root."""
    flag = 1 << bit
    b, c = [], []
    for m, q in a.terms:
        if m & flag:
            c.append((m ^ flag, q))
        else:
            b.append((m, q))
    return MqElement._raw(tuple(b)), MqElement._raw(tuple(sorted(c)))


def mq_inverse(a: MqElement) -> MqElement:
    """Inverse by successive conjugation down the tower.

    Each round multiplies by the conjugate in one root, which removes that
    root from the product; the accumulated multiplier is the product of all
    nontrivial sign-conjugates of ``a``.
    """
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero in a multiquadratic field")
    multiplier = MqElement.rational(1)
    cur = a
    while not cur.is_rational():
        top = _bits(cur.index_mask)[-1]
        b, c = _split_on(cur, top)
        conj = b - c * MqElement.sqrt_prime(top)
        multiplier = multiplier * conj
        cur = cur * conj
    return multiplier * (1 / cur.rational_part())


def rational_norm(a: MqElement) -> Fraction:
    """Product of all sign-conjugates of ``a`` over its own index set."""
    if a.is_zero():
        return Fraction(0)
    return (a * conjugate_product(a)).rational_part()


def conjugate_product(a: MqElement) -> MqElement:
    """Product of the ``2**|I| - 1`` nontrivial sign-conjugates of ``a``."""
    m = a.index_mask
    out = MqElement.rational(1)
    sub = m
    while sub:
        out = out * sign_conjugate(a, sub)
        sub = (sub - 1) & m
    return out


def support(a: MqElement) -> frozenset:
    """Prime indices occurring in some basis term with nonzero coordinate."""
    return a.index_set


def member_of_MX(a: MqElement, X: OracleSet) -> tuple[bool, list[int]]:
    """Decide ``a in M_X`` asking ``X`` only about indices in ``support(a)``.

    Returns ``(answer, queries)``; queries stop at the first negative answer.
    """
    sup = sorted(support(a))
    if sup and sup[-1] >= X.bound:
        raise OutOfBound(f"support index {sup[-1]} beyond oracle bound {X.bound}")
    queries = []
    for i in sup:
        queries.append(i)
        if not X.query(i):
            return False, queries
    return True, queries


# --- Definitions of disjointness and stability, finite instances -------------


def verify_total_linear_disjointness(indices: Iterable[int]) -> bool:
    """True iff no nonempty sub-product of the listed primes is a perfect square.

    ``indices`` is read as a list, so a repeated index is a repeated prime.
    That is equivalent to ``[Q(sqrt p_i : i in I) : Q] = 2**|I|``.
    """
    primes = [nth_prime(i) for i in indices]
    n = len(primes)
    if n > 20:
        raise ValueError("at most 20 generators")
    prods = [1] * (1 << n)
    for s in range(1, 1 << n):
        low = (s & -s).bit_length() - 1
        prods[s] = prods[s & (s - 1)] * primes[low]
        r = math.isqrt(prods[s])
        if r * r == prods[s]:
            return False
    return True


def verify_stability(indices: Iterable[int]) -> bool:
    """Check every sign embedding maps each ``Q(sqrt p_i)`` onto itself.

    The embeddings of the compositum fixing Q are the ``2**|I|`` sign flips;
    for each one, the images of the basis ``1, sqrt(p_i)`` must again lie in
    ``Q(sqrt p_i)``, be roots of the right equations, and span it.
    """
    idx = sorted(set(indices))
    if len(idx) > 12:
        raise ValueError("at most 12 generators")
    flip_masks = [_mask(S) for S in _subsets(idx)]
    for flips in flip_masks:
        for i in idx:
            alpha = MqElement.sqrt_prime(i)
            image = sign_conjugate(alpha, flips)
            one = sign_conjugate(MqElement.rational(1), flips)
            if image * image != nth_prime(i) or one != 1:
                return False
            if not support(image) <= {i}:
                return False
            # 2x2 determinant of the images of (1, alpha) in the basis (1, alpha)
            det = one.rational_part() * dict(image.terms).get(1 << i, 0) - dict(
                one.terms
            ).get(1 << i, 0) * image.rational_part()
            if det == 0:
                return False
    return True


def _subsets(items: list[int]) -> Iterator[tuple[int, ...]]:
    for s in range(1 << len(items)):
        yield tuple(items[j] for j in range(len(items)) if s >> j & 1)


def find_root_T2_minus_p(candidates: Iterable[MqElement], p: int) -> SearchTask:
    """Search task stepping through ``candidates`` until ``y*y == p``."""

    def body():
        target = MqElement.rational(p)
        for y in candidates:
            if y * y == target:
                yield Found(y)
                return
            yield NOT_YET

    return SearchTask(body(), name=("sqrt", p))


# --- canonical enumeration ---------------------------------------------------


@lru_cache(maxsize=None)
def rationals_of_height(h: int) -> tuple[Fraction, ...]:
    """Nonzero rationals ``n/d`` with ``|n| + d - 1 == h``, in a fixed order."""
    out = []
    for n in range(1, h + 1):
        d = h + 1 - n
        if math.gcd(n, d) == 1:
            out.append(Fraction(n, d))
            out.append(Fraction(-n, d))
    return tuple(out)


def uniform_cost(c: int = 1) -> Callable[[int], int]:
    """Every prime index costs ``c``; the default for finite index sets."""
    return lambda i: c


def absolute_cost(i: int) -> int:
    return i + 1


def enumerate_tower(
    indices: Iterable[int] | None, cost: Callable[[int], int] | None = None
) -> Iterator[MqElement]:
    """Every element of ``Q(sqrt p_i : i in indices)`` exactly once.

    Elements come in order of weight, where each basis term contributes
    ``1 + (sum of index costs) + (|num| + den - 1)`` and zero has weight 0.
    The default cost is 1 per index for a finite ``indices``.  With
    ``indices=None`` the whole tower over all primes is listed; the cost must
    then be at least ``i + 1`` (``absolute_cost`` is).
    """
    if indices is None:
        if cost is None:
            cost = absolute_cost
        idx_at = lambda w: range(w)
    else:
        idx = sorted(set(indices))
        if cost is None:
            cost = uniform_cost(1)
        idx_at = lambda w: idx
    yield MqElement._raw(())
    w = 1
    while True:
        yield from _tower_level(idx_at(w), cost, w)
        w += 1


def tower_level(indices: Iterable[int], cost: Callable[[int], int], weight: int) -> Iterator[MqElement]:
    """The elements of weight exactly ``weight`` over ``indices``, canonically ordered."""
    if weight == 0:
        return iter((MqElement._raw(()),))
    return _tower_level(sorted(set(indices)), cost, weight)


def _tower_masks(idx: Iterable[int], cost: Callable[[int], int], limit: int) -> list[tuple[int, int]]:
    """``(cost, mask)`` for index subsets light enough to carry a term at ``limit``."""
    items = sorted((cost(i), i) for i in idx if cost(i) + 2 <= limit)
    out = []

    def rec(k: int, c: int, m: int):
        out.append((c, m))
        for t in range(k, len(items)):
            ci, i = items[t]
            if c + ci + 2 > limit:
                break
            rec(t + 1, c + ci, m | (1 << i))

    rec(0, 0, 0)
    out.sort()
    return out


def _tower_level(idx: Iterable[int], cost, weight: int) -> Iterator[MqElement]:
    masks = _tower_masks(idx, cost, weight)

    def rec(j: int, remaining: int, acc: list):
        if remaining == 0:
            yield MqElement._raw(tuple(sorted(acc)))
            return
        for k in range(j, len(masks)):
            c, m = masks[k]
            top = remaining - 1 - c
            if top < 1:
                break
            for h in range(1, top + 1):
                for q in rationals_of_height(h):
                    acc.append((m, q))
                    yield from rec(k + 1, remaining - 1 - c - h, acc)
                    acc.pop()

    yield from rec(0, weight, [])


def element_weight(a: MqElement, cost: Callable[[int], int]) -> int:
    w = 0
    for m, q in a.terms:
        w += 1 + sum(cost(i) for i in _bits(m)) + abs(q.numerator) + q.denominator - 1
    return w


class FieldCoding:
    """The field coding ``M_X = Q(sqrt p_i : i in X)`` over ``2 * n_pairs`` indices."""

    kind = "field"

    def __init__(self, n_pairs: int):
        if n_pairs < 0:
            raise ValueError("n_pairs must be nonnegative")
        self.n_pairs = n_pairs

    def polynomials(self) -> list[tuple[int, int, int]]:
        """Coefficients ``(1, 0, -p_j)`` of ``T^2 - p_j`` for each coded index."""
        return [(1, 0, -nth_prime(j)) for j in range(2 * self.n_pairs)]

    def to_json(self) -> dict:
        return {"kind": "field", "n_pairs": self.n_pairs}

    def __eq__(self, other):
        return isinstance(other, FieldCoding) and other.n_pairs == self.n_pairs

    def __hash__(self):
        return hash(("field", self.n_pairs))

    def __repr__(self):
        return f"FieldCoding(n_pairs={self.n_pairs})"
