"""S-integer rings of K = Q or K = Q(sqrt d), d squarefree and d = 2, 3 mod 4.

Elements are ``(u + v*sqrt(d)) / w`` over the integral basis ``{1, sqrt(d)}``.
A prime of K above ``p`` is named by its kind and, when ``p`` splits, by the
residue ``a`` with ``sqrt(d) -> a (mod p)``; that prime is the kernel
``{u + v*sqrt(d) : u + v*a = 0 (mod p)}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

from .numkit import (
    INFINITY,
    ExtOrd,
    factorize,
    hensel_lift,
    is_squarefree,
    legendre,
    nth_prime,
    ord_p,
    prime_index,
    smooth_numbers,
    sqrt_mod_p,
)
from .oracle import OracleSet, OutOfBound

__all__ = [
    "QuadField",
    "QQ",
    "KElement",
    "Kind",
    "KPrime",
    "PoleElement",
    "Variant",
    "ZeroElement",
    "field_for",
    "splitting_type",
    "choose_factor",
    "factors_above",
    "ord_P",
    "divisor",
    "pole_element",
    "member_of_ring",
    "negative_support",
    "RingCoding",
    "enumerate_K",
    "K_level",
    "enumerate_ring",
    "ring_needs",
    "element_weight",
]


class ZeroElement(ValueError):
    """The operation is undefined at zero."""


class Variant(str, enum.Enum):
    ONE_FACTOR = "one-factor"
    ALL_FACTORS = "all-factors"


class Kind(str, enum.Enum):
    SPLIT = "SPLIT"
    INERT = "INERT"
    RAMIFIED = "RAMIFIED"
    RATIONAL = "RATIONAL"  # the prime of Q itself, when K = Q


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt d) with ring of integers Z[sqrt d]."""

    d: int

    def __post_init__(self):
        d = self.d
        if d in (0, 1) or not is_squarefree(d):
            raise ValueError(f"d={d} must be squarefree and not 0 or 1")
        if d % 4 not in (2, 3):
            raise ValueError(f"d={d} must be 2 or 3 mod 4")

    @property
    def degree(self) -> int:
        return 2

    @property
    def name(self) -> str:
        return "Q(i)" if self.d == -1 else f"Q(sqrt({self.d}))"

    def element(self, u, v=0, w=1) -> "KElement":
        return KElement(u, v, w, self.d)

    def sqrt_d(self) -> "KElement":
        return KElement(0, 1, 1, self.d)


@dataclass(frozen=True)
class _Rationals:
    @property
    def d(self):
        return None

    @property
    def degree(self) -> int:
        return 1

    @property
    def name(self) -> str:
        return "Q"

    def element(self, u, v=0, w=1) -> "KElement":
        if v:
            raise ValueError("elements of Q have no sqrt(d) part")
        return KElement(u, 0, w, None)


QQ = _Rationals()


def field_for(d: Optional[int]):
    return QQ if d is None else QuadField(d)


class KElement:
    """``(u + v*sqrt(d)) / w`` with ``gcd(u, v, w) = 1`` and ``w >= 1``.

    ``d is None`` stands for K = Q (then ``v == 0``).
    """

    __slots__ = ("u", "v", "w", "d")

    def __init__(self, u: int, v: int = 0, w: int = 1, d: Optional[int] = None):
        if w == 0:
            raise ZeroDivisionError("zero denominator")
        if d is None and v:
            raise ValueError("rational element with a sqrt(d) part")
        if w < 0:
            u, v, w = -u, -v, -w
        g = math.gcd(math.gcd(u, v), w)
        if g > 1:
            u, v, w = u // g, v // g, w // g
        if u == 0 and v == 0:
            w = 1
        self.u, self.v, self.w, self.d = u, v, w, d

    @classmethod
    def _raw(cls, u, v, w, d):
        obj = object.__new__(cls)
        obj.u, obj.v, obj.w, obj.d = u, v, w, d
        return obj

    def _coerce(self, other) -> "KElement":
        if isinstance(other, KElement):
            if other.d != self.d:
                raise ValueError("elements of different fields")
            return other
        q = Fraction(other)
        return KElement(q.numerator, 0, q.denominator, self.d)

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def is_rational(self) -> bool:
        return self.v == 0

    def is_integral(self) -> bool:
        return self.w == 1

    def __add__(self, other):
        o = self._coerce(other)
        return KElement(self.u * o.w + o.u * self.w, self.v * o.w + o.v * self.w, self.w * o.w, self.d)

    __radd__ = __add__

    def __neg__(self):
        return KElement._raw(-self.u, -self.v, self.w, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self.d or 0
        return KElement(
            self.u * o.u + d * self.v * o.v,
            self.u * o.v + self.v * o.u,
            self.w * o.w,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "KElement":
        return KElement._raw(self.u, -self.v, self.w, self.d)

    def norm(self) -> Fraction:
        d = self.d or 0
        if self.d is None:
            return Fraction(self.u, self.w)
        return Fraction(self.u * self.u - d * self.v * self.v, self.w * self.w)

    def inverse(self) -> "KElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.d is None:
            return KElement(self.w, 0, self.u, None)
        n = self.u * self.u - self.d * self.v * self.v
        # (u + v r)/w inverse = w (u - v r) / n
        return KElement(self.w * self.u, -self.w * self.v, n, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, KElement):
            return (self.u, self.v, self.w, self.d) == (other.u, other.v, other.w, other.d)
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self.v == 0 and self.u == q.numerator and self.w == q.denominator
        return NotImplemented

    def __hash__(self):
        return hash((self.u, self.v, self.w, self.d))

    def __repr__(self):
        if self.d is None:
            return f"KElement({Fraction(self.u, self.w)})"
        r = "i" if self.d == -1 else f"sqrt({self.d})"
        num = f"{self.u} + {self.v}*{r}" if self.v else f"{self.u}"
        return f"KElement(({num})/{self.w})" if self.w != 1 else f"KElement({num})"

    def key(self) -> tuple:
        return (self.u, self.v, self.w)

    def to_json(self) -> dict:
        return {"u": str(self.u), "v": str(self.v), "w": str(self.w), "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> "KElement":
        d = obj.get("d")
        el = cls(int(obj["u"]), int(obj["v"]), int(obj["w"]), None if d is None else int(d))
        if (el.u, el.v, el.w) != (int(obj["u"]), int(obj["v"]), int(obj["w"])):
            raise ValueError("KElement JSON is not in lowest terms")
        return el


@dataclass(frozen=True, order=True)
class KPrime:
    """A prime of K: the rational prime below it, its kind, and for split
    primes the residue ``branch`` of ``sqrt(d)`` modulo ``p``."""

    p: int
    kind: Kind
    branch: Optional[int] = None

    @property
    def conjugate_branch(self) -> Optional[int]:
        return None if self.branch is None else self.p - self.branch

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind is Kind.INERT else 1

    @property
    def index(self) -> int:
        return prime_index(self.p)

    def conjugate(self) -> "KPrime":
        if self.kind is not Kind.SPLIT:
            return self
        return KPrime(self.p, self.kind, self.p - self.branch)

    def to_json(self) -> dict:
        return {"p": self.p, "kind": self.kind.value, "branch": self.branch}

    @classmethod
    def from_json(cls, obj: dict) -> "KPrime":
        return cls(int(obj["p"]), Kind(obj["kind"]), obj.get("branch"))

    def __repr__(self):
        if self.branch is None:
            return f"KPrime({self.p}, {self.kind.value})"
        return f"KPrime({self.p}, {self.kind.value}, a={self.branch})"


@dataclass(frozen=True)
class PoleElement:
    z: KElement
    a: KElement
    b: KElement


# --- splitting ---------------------------------------------------------------


def splitting_type(p: int, field) -> Kind:
    d = field.d
    if d is None:
        return Kind.RATIONAL
    if p == 2 or d % p == 0:
        return Kind.RAMIFIED
    return Kind.SPLIT if legendre(d, p) == 1 else Kind.INERT


@lru_cache(maxsize=None)
def _factors(p: int, d: Optional[int]) -> tuple[KPrime, ...]:
    kind = splitting_type(p, field_for(d))
    if kind is Kind.SPLIT:
        a = sqrt_mod_p(d, p)
        return (KPrime(p, kind, a), KPrime(p, kind, p - a))
    return (KPrime(p, kind),)


def factors_above(p: int, field) -> tuple[KPrime, ...]:
    """All primes of K over ``p``; for split ``p`` the chosen one comes first."""
    return _factors(p, field.d)


def choose_factor(p: int, field) -> KPrime:
    """The distinguished factor: least branch residue for split primes."""
    return _factors(p, field.d)[0]


# --- orders and divisors -----------------------------------------------------


def _ord_integral(u: int, v: int, P: KPrime, d: Optional[int]) -> ExtOrd:
    """Order at ``P`` of the integral element ``u + v*sqrt(d)``."""
    if u == 0 and v == 0:
        return INFINITY
    p = P.p
    if P.kind is Kind.RATIONAL:
        return ord_p(u, p)
    g = min(ord_p(u, p), ord_p(v, p))
    if g:
        pg = p ** g
        u, v = u // pg, v // pg
    n = u * u - d * v * v
    vn = ord_p(n, p)
    if P.kind is Kind.INERT:
        return g + vn // 2
    if P.kind is Kind.RAMIFIED:
        return 2 * g + vn
    # split: at most one of the two factors divides a primitive element
    if vn == 0:
        return g
    m = vn + 1
    root = hensel_lift(d, p, m, P.branch)
    pm = p ** m
    return g + ord_p((u + v * root) % pm or pm, p)


def ord_P(x: KElement, P: KPrime) -> ExtOrd:
    """Order of ``x`` at the prime ``P`` (``INFINITY`` at zero)."""
    if x.is_zero():
        return INFINITY
    num = _ord_integral(x.u, x.v, P, x.d)
    den = _ord_integral(x.w, 0, P, x.d)
    return num - den


def divisor(x: KElement) -> dict[KPrime, int]:
    """Primes where ``x`` has nonzero order, with those orders.

    Candidates come from the rational primes dividing the norm of the
    integral numerator and the denominator.
    """
    if x.is_zero():
        raise ZeroElement("zero has no divisor")
    field = field_for(x.d)
    n = abs(x.u * x.u - (x.d or 0) * x.v * x.v) if x.d is not None else abs(x.u)
    cands = {p for p, _ in factorize(n)} | {p for p, _ in factorize(x.w)}
    out = {}
    for p in sorted(cands):
        for P in factors_above(p, field):
            e = ord_P(x, P)
            if e:
                out[P] = e
    return out


def negative_support(x: KElement) -> dict[KPrime, int]:
    return {P: e for P, e in divisor(x).items() if e < 0}


# --- pole elements -----------------------------------------------------------


def _small_integrals(d: int, limit: int = 64) -> Iterator[tuple[int, int]]:
    """Nonzero ``(u, v)`` with ``v >= 0`` by increasing ``|u| + |v|``."""
    for s in range(1, limit + 1):
        for v in range(0, s + 1):
            u = s - v
            if v == 0:
                yield (u, 0)
                yield (-u, 0)
            elif u == 0:
                yield (0, v)
            else:
                yield (u, v)
                yield (-u, v)


@lru_cache(maxsize=None)
def _pole_element(P: KPrime, d: Optional[int]) -> PoleElement:
    p = P.p
    if P.kind in (Kind.RATIONAL, Kind.INERT):
        one = KElement(1, 0, 1, d)
        return PoleElement(KElement(1, 0, p, d), one, KElement(p, 0, 1, d))
    b = KElement(p, 0, 1, d)
    for u, v in _small_integrals(d):
        t = KElement._raw(u, v, 1, d)
        if P.kind is Kind.RAMIFIED:
            ok = _ord_integral(u, v, P, d) == 1
        else:
            ok = _ord_integral(u, v, P, d) == 0 and _ord_integral(u, v, P.conjugate(), d) >= 1
        if ok:
            z = KElement(u, v, p, d)
            if negative_support(z) == {P: -1}:
                return PoleElement(z, t, b)
    raise RuntimeError(f"no small pole element found for {P}")  # pragma: no cover


def pole_element(P: KPrime, field=QQ) -> PoleElement:
    """``z = a/b`` with ``P`` its only pole, of order exactly -1.

    ``b = p`` and ``a`` is the integral element of least ``|u| + |v|`` with
    order 1 at ``P`` (ramified) or lying in the conjugate prime but not in
    ``P`` (split).  Inert and rational primes use ``1/p``.
    """
    if (field.d is None) != (P.kind is Kind.RATIONAL):
        raise ValueError(f"{P} is not a prime of {field.name}")
    return _pole_element(P, field.d)


# --- membership --------------------------------------------------------------


def member_of_ring(
    x: KElement,
    X: OracleSet,
    variant: Variant = Variant.ONE_FACTOR,
    W_extra: Iterable[KPrime] = (),
) -> tuple[bool, list[int]]:
    """Decide ``x in O_{K, W_X}``, querying ``X`` only under poles of ``x``.

    ``ONE_FACTOR``: ``W_X`` holds the chosen factor of each ``p_i``, ``i in X``.
    ``ALL_FACTORS``: ``W_X`` holds every factor of those ``p_i``.
    """
    variant = Variant(variant)
    extra = frozenset(W_extra)
    field = field_for(x.d)
    poles = [P for P in negative_support(x) if P not in extra] if not x.is_zero() else []
    for P in poles:
        i = prime_index(P.p)
        if i >= X.bound:
            raise OutOfBound(f"pole above p_{i} = {P.p} beyond oracle bound {X.bound}")
    queries: list[int] = []
    asked: dict[int, bool] = {}
    for P in poles:
        if variant is Variant.ONE_FACTOR and P != choose_factor(P.p, field):
            return False, queries
        i = prime_index(P.p)
        if i not in asked:
            queries.append(i)
            asked[i] = X.query(i)
        if not asked[i]:
            return False, queries
    return True, queries


# --- codings and canonical enumeration ---------------------------------------


@dataclass(frozen=True)
class RingCoding:
    """The ring coding ``O_{K, W_X}`` over ``2 * n_pairs`` indices."""

    n_pairs: int
    d: Optional[int] = None
    variant: Variant = Variant.ONE_FACTOR
    kind = "ring"

    def __post_init__(self):
        if self.n_pairs < 0:
            raise ValueError("n_pairs must be nonnegative")
        field_for(self.d)  # validates d
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def field(self):
        return field_for(self.d)

    def to_json(self) -> dict:
        return {"kind": "ring", "n_pairs": self.n_pairs, "d": self.d, "variant": self.variant.value}


def _integral_pairs(s: int, quadratic: bool) -> list[tuple[int, int]]:
    """``(u, v)`` with ``|u| + |v| == s``; ``v == 0`` over Q."""
    if not quadratic:
        return [(s, 0), (-s, 0)]
    out = []
    for a in range(s, -1, -1):
        b = s - a
        for u in ((a, -a) if a else (0,)):
            for v in ((b, -b) if b else (0,)):
                out.append((u, v))
    return out


def enumerate_K(
    field, cost: Callable[[int], int], indices: Optional[Iterable[int]] = None
) -> Iterator[KElement]:
    """Elements of K whose denominators use only primes ``p_i``, ``i in indices``.

    Ordered by weight ``|u| + |v| + cost(w)``, where ``cost(w)`` sums the
    index costs of the prime factors of ``w`` with multiplicity.  With
    ``indices=None`` all primes are allowed and ``cost(i) >= i + 1`` is
    assumed, so only finitely many primes matter per weight.
    """
    fixed = None if indices is None else sorted(set(indices))
    W = 0
    while True:
        yield from K_level(field, cost, range(W) if fixed is None else fixed, W)
        W += 1


def K_level(field, cost: Callable[[int], int], indices: Iterable[int], W: int) -> Iterator[KElement]:
    """Elements of weight exactly ``W`` with denominators over ``indices``."""
    d = field.d
    if W == 0:
        yield KElement(0, 0, 1, d)
        return
    pcs = [(nth_prime(i), cost(i)) for i in indices if cost(i) < W]
    for c, w in smooth_numbers(pcs, W - 1):
        for u, v in _integral_pairs(W - c, d is not None):
            if math.gcd(math.gcd(u, v), w) == 1:
                yield KElement._raw(u, v, w, d)


def element_weight(x: KElement, cost: Callable[[int], int]) -> int:
    return abs(x.u) + abs(x.v) + sum(e * cost(prime_index(p)) for p, e in factorize(x.w))


def ring_needs(x: KElement, variant: Variant) -> Optional[frozenset]:
    """Prime indices that must lie in X for ``x`` to be in ``O_{K, W_X}``.

    ``None`` when no X works (a pole at a factor the variant never admits).
    With ``gcd(u, v, w) = 1`` every prime dividing ``w`` carries a pole.
    """
    field = field_for(x.d)
    out = []
    for p, _ in factorize(x.w):
        if Variant(variant) is Variant.ONE_FACTOR:
            fs = factors_above(p, field)
            if len(fs) == 2 and ord_P(x, fs[1]) < 0:
                return None
        out.append(prime_index(p))
    return frozenset(out)


def enumerate_ring(
    field, X_indices: Iterable[int], variant: Variant = Variant.ONE_FACTOR, cost=None
) -> Iterator[KElement]:
    """Canonical enumeration of ``O_{K, W_X}`` for the finite set ``X_indices``.

    Each prime factor of a denominator costs 4 by default, which keeps the
    pole elements of every coded prime close to the front.
    """
    idx = sorted(set(X_indices))
    if cost is None:
        cost = lambda i: 4
    for x in enumerate_K(field, cost, idx):
        if x.w == 1 or ring_needs(x, variant) is not None:
            yield x
