"""Torsion-free abelian groups inside Q^k given by membership rules.

Three families are supported:

* ``CodingGroup(k, X)``: ``(O_{Q, V_X})^k``, rationals whose denominators use
  only primes ``p_i`` with ``i in X``;
* ``KnightDowneyGroup(D, n_pairs)``: the rank-one group whose type sequence is
  1 on ``join(D)`` and 0 elsewhere (squarefree denominators from that set);
* ``Rank1TypeGroup(chi)``: ``{q : -ord_p(q) <= chi(p) for all p}``.

Heights are computed from the rule; :func:`brute_force_height` searches
divisibility directly and is what the tests compare against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .numkit import INFINITY, ExtOrd, factorize, nth_prime, ord_p_rational, prime_index, smooth_numbers
from .oracle import JoinedSet, OracleSet, OutOfBound, join

__all__ = [
    "QVector",
    "Characteristic",
    "CodingGroup",
    "KnightDowneyGroup",
    "Rank1TypeGroup",
    "NotAMember",
    "ZeroElement",
    "qvector",
    "member",
    "height",
    "brute_force_height",
    "characteristic",
    "types_equivalent",
    "baer_iso",
    "GroupCoding",
    "enumerate_vectors",
    "vector_level",
    "vector_needs",
]

QVector = tuple  # tuple of Fractions


class NotAMember(ValueError):
    pass


class ZeroElement(ValueError):
    pass


def qvector(*coords) -> QVector:
    return tuple(Fraction(c) for c in coords)


def _denominator_primes(v: QVector) -> list[int]:
    ps = set()
    for c in v:
        ps.update(p for p, _ in factorize(c.denominator))
    return sorted(ps)


# --- characteristics ---------------------------------------------------------


@dataclass(frozen=True)
class Characteristic:
    """Height sequence with finitely many exceptions to a default of 0 or INFINITY."""

    default: ExtOrd = 0
    exceptions: Mapping[int, ExtOrd] = field(default_factory=dict)

    def __post_init__(self):
        if self.default not in (0, INFINITY):
            raise ValueError("default must be 0 or INFINITY")
        clean = {}
        for i, v in dict(self.exceptions).items():
            if v is not INFINITY and (not isinstance(v, int) or v < 0):
                raise ValueError(f"height at index {i} must be a natural number or INFINITY")
            if v != self.default:
                clean[int(i)] = v
        object.__setattr__(self, "exceptions", dict(sorted(clean.items())))

    def __getitem__(self, i: int) -> ExtOrd:
        return self.exceptions.get(i, self.default)

    def __eq__(self, other):
        if not isinstance(other, Characteristic):
            return NotImplemented
        return self.default == other.default and self.exceptions == other.exceptions

    def __hash__(self):
        return hash((self.default, tuple(self.exceptions.items())))

    def to_json(self) -> dict:
        enc = lambda v: "inf" if v is INFINITY else str(v)
        return {
            "default": enc(self.default),
            "exceptions": [{"index": i, "value": enc(v)} for i, v in self.exceptions.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "Characteristic":
        if isinstance(obj, str):
            obj = json.loads(obj)
        dec = lambda s: INFINITY if s == "inf" else int(s)
        return cls(dec(obj["default"]), {int(e["index"]): dec(e["value"]) for e in obj["exceptions"]})


def types_equivalent(c1: Characteristic, c2: Characteristic) -> bool:
    """Equal except at finitely many places, all of which are finite in both."""
    if c1.default != c2.default:
        return False
    for i in set(c1.exceptions) | set(c2.exceptions):
        a, b = c1[i], c2[i]
        if a != b and (a is INFINITY or b is INFINITY):
            return False
    return True


# --- groups ------------------------------------------------------------------


@dataclass(frozen=True)
class CodingGroup:
    k: int
    X: OracleSet

    def member(self, v: QVector) -> tuple[bool, list[int]]:
        _check_rank(v, self.k)
        idx = [prime_index(p) for p in _denominator_primes(v)]
        if idx and idx[-1] >= self.X.bound:
            raise OutOfBound(f"denominator prime index {idx[-1]} beyond bound {self.X.bound}")
        queries = []
        for i in idx:
            queries.append(i)
            if not self.X.query(i):
                return False, queries
        return True, queries

    def height(self, v: QVector, p: int) -> ExtOrd:
        _check_height_args(self, v)
        if prime_index(p) in self.X:
            return INFINITY
        return min(ord_p_rational(c, p) for c in v if c)

    def default_height(self) -> ExtOrd:
        return 0


@dataclass(frozen=True)
class KnightDowneyGroup:
    D: OracleSet
    n_pairs: int

    @property
    def k(self) -> int:
        return 1

    @property
    def X(self) -> JoinedSet:
        return join(self.D, self.n_pairs)

    def type_value(self, i: int) -> int:
        """``a_i``: 1 on ``join(D)`` and 0 elsewhere."""
        return 1 if i in self.X else 0

    def member(self, v: QVector) -> tuple[bool, list[int]]:
        _check_rank(v, 1)
        den = v[0].denominator
        fac = factorize(den)
        X = self.X
        idx = [prime_index(p) for p, _ in fac]
        if idx and idx[-1] >= X.bound:
            raise OutOfBound(f"denominator prime index {idx[-1]} beyond bound {X.bound}")
        if any(e > 1 for _, e in fac):
            return False, []
        queries = []
        for i in idx:
            queries.append(i)
            if not X.query(i):
                return False, queries
        return True, queries

    def height(self, v: QVector, p: int) -> ExtOrd:
        _check_height_args(self, v)
        return self.type_value(prime_index(p)) + ord_p_rational(v[0], p)

    def default_height(self) -> ExtOrd:
        return 0


@dataclass(frozen=True)
class Rank1TypeGroup:
    chi: Characteristic

    @property
    def k(self) -> int:
        return 1

    def member(self, v: QVector) -> tuple[bool, list[int]]:
        _check_rank(v, 1)
        q = v[0]
        if q == 0:
            return True, []
        fac = factorize(q.denominator)
        for p, e in fac:
            if e > self.chi[prime_index(p)]:
                return False, []
        return True, []

    def height(self, v: QVector, p: int) -> ExtOrd:
        _check_height_args(self, v)
        return self.chi[prime_index(p)] + ord_p_rational(v[0], p)

    def default_height(self) -> ExtOrd:
        return self.chi.default


GroupSpec = Union[CodingGroup, KnightDowneyGroup, Rank1TypeGroup]


def _check_rank(v: Sequence, k: int) -> None:
    if len(v) != k:
        raise ValueError(f"expected a vector of length {k}, got {len(v)}")


def _check_height_args(g, v: QVector) -> None:
    if all(c == 0 for c in v):
        raise ZeroElement("height of zero is INFINITY at every prime")
    ok, _ = g.member(v)
    if not ok:
        raise NotAMember(f"{v} is not in the group")


def member(g: GroupSpec, v: Iterable) -> tuple[bool, list[int]]:
    """Membership with the list of oracle indices consulted."""
    return g.member(qvector(*v))


def height(g: GroupSpec, v: Iterable, p: int) -> ExtOrd:
    """Largest ``m`` with ``v / p**m`` in ``g`` (``INFINITY`` if unbounded)."""
    return g.height(qvector(*v), p)


def brute_force_height(g: GroupSpec, v: Iterable, p: int, depth: int = 12) -> ExtOrd:
    """Largest ``m <= depth`` with ``v / p**m`` in ``g``; ``depth`` itself if all pass.

    Divisibility is monotone in ``m``, so the first failure ends the search.
    """
    v = qvector(*v)
    m = 0
    while m < depth:
        w = tuple(c / p ** (m + 1) for c in v)
        try:
            ok = g.member(w)[0]
        except OutOfBound:
            ok = False  # indices at or past the bound are non-members
        if not ok:
            return m
        m += 1
    return m


def characteristic(g: GroupSpec, v: Iterable, n_primes: int) -> Characteristic:
    """Heights at ``p_0 .. p_{n_primes-1}`` plus every other place where the
    height leaves the group's default (those are finitely many)."""
    v = qvector(*v)
    _check_height_args(g, v)
    places = set(range(n_primes))
    for c in v:
        if c:
            places.update(prime_index(p) for p, _ in factorize(abs(c.numerator)))
    heights = {i: g.height(v, nth_prime(i)) for i in sorted(places)}
    return Characteristic(g.default_height(), heights)


def baer_iso(chi_g: Characteristic, chi_h: Characteristic) -> Optional[Fraction]:
    """Multiplier ``m`` with ``x -> m*x`` an isomorphism ``G -> H``, or None.

    ``G`` and ``H`` are the rank-one groups of the given characteristics (the
    characteristic of 1).  The multiplier moves heights from ``chi_g`` to
    ``chi_h``: ``m = prod p_i ** (chi_g(i) - chi_h(i))`` over the finite places
    where they differ.
    """
    if not types_equivalent(chi_g, chi_h):
        return None
    m = Fraction(1)
    for i in set(chi_g.exceptions) | set(chi_h.exceptions):
        a, b = chi_g[i], chi_h[i]
        if a != b:
            m *= Fraction(nth_prime(i)) ** (a - b)
    return m


# --- coding and canonical enumeration ----------------------------------------


@dataclass(frozen=True)
class GroupCoding:
    """The group coding ``(O_{Q, V_X})^k`` over ``2 * n_pairs`` indices."""

    n_pairs: int
    k: int = 1
    kind = "group"

    def __post_init__(self):
        if self.n_pairs < 0:
            raise ValueError("n_pairs must be nonnegative")
        if self.k < 1:
            raise ValueError("rank k must be at least 1")

    def to_json(self) -> dict:
        return {"kind": "group", "n_pairs": self.n_pairs, "k": self.k}


def _scalars_by_height(pcs, limit: int) -> list[list[Fraction]]:
    """``out[h]``: nonzero ``n/w`` with ``|n| + cost(w) == h`` (``w`` smooth)."""
    out: list[list[Fraction]] = [[] for _ in range(limit + 1)]
    dens = smooth_numbers(pcs, limit - 1) if limit >= 1 else []
    for h in range(1, limit + 1):
        for c, w in dens:
            if c >= h:
                break
            n = h - c
            if math.gcd(n, w) == 1:
                out[h].append(Fraction(n, w))
                out[h].append(Fraction(-n, w))
    return out


def enumerate_vectors(
    k: int, cost: Optional[Callable[[int], int]] = None, indices: Optional[Iterable[int]] = None
) -> Iterator[QVector]:
    """Vectors of ``Q^k`` whose denominators use only primes ``p_i``, ``i in indices``.

    A nonzero coordinate at position ``j`` holding ``n/w`` weighs
    ``1 + j + |n| + cost(w)``; vectors are listed by total weight.  With
    ``indices=None`` every prime is allowed and ``cost(i) >= i + 1`` is
    assumed.  The default cost is 2 per prime factor (finite ``indices``).
    """
    fixed = None if indices is None else sorted(set(indices))
    if cost is None:
        cost = (lambda i: i + 1) if fixed is None else (lambda i: 2)
    W = 0
    while True:
        yield from vector_level(k, cost, range(W) if fixed is None else fixed, W)
        W += 1


def vector_level(k: int, cost: Callable[[int], int], indices: Iterable[int], W: int) -> Iterator[QVector]:
    """Vectors of weight exactly ``W`` with denominators over ``indices``."""
    zero = Fraction(0)
    if W == 0:
        yield (zero,) * k
        return
    pcs = [(nth_prime(i), cost(i)) for i in indices if cost(i) < W]
    sc = _scalars_by_height(pcs, W)

    def rec(j: int, r: int):
        if j == k:
            if r == 0:
                yield ()
            return
        yield from ((zero,) + rest for rest in rec(j + 1, r))
        for h in range(1, r - j):
            for q in sc[h]:
                for rest in rec(j + 1, r - 1 - j - h):
                    yield (q,) + rest

    yield from rec(0, W)


def vector_needs(v: QVector) -> frozenset:
    """Prime indices of all denominators: what X must contain for ``v`` to be in A_X."""
    return frozenset(prime_index(p) for p in _denominator_primes(v))
