"""Exact integer and rational kernels: primes, factorization, p-adic orders,
Legendre symbols and Hensel-lifted square roots.

Rationals are :class:`fractions.Fraction` throughout; nothing in the package
touches floating point.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Union

__all__ = [
    "INFINITY",
    "ExtOrd",
    "NotAResidue",
    "nth_prime",
    "prime_index",
    "is_prime",
    "factorize",
    "ord_p",
    "ord_p_rational",
    "legendre",
    "sqrt_mod_p",
    "hensel_lift",
    "hensel_sqrt",
    "is_squarefree",
    "smooth_numbers",
]


class _Infinity:
    """The extended order value larger than every integer."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __add__(self, other):
        if isinstance(other, (int, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return self
        return NotImplemented

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INFINITY")

    def __lt__(self, other):
        if isinstance(other, (int, _Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (int, _Infinity)):
            return other is self
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (int, _Infinity)):
            return other is not self
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, _Infinity)):
            return True
        return NotImplemented

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
ExtOrd = Union[int, _Infinity]


class NotAResidue(ValueError):
    """Raised when a square root is requested of a non-residue."""


# --- primes ------------------------------------------------------------------

_primes: list[int] = [2, 3, 5, 7, 11, 13]
_sieved_to = 14


def _extend_sieve(limit: int) -> None:
    global _primes, _sieved_to
    if limit <= _sieved_to:
        return
    limit = max(limit, 2 * _sieved_to)
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    _primes = [i for i in range(limit + 1) if flags[i]]
    _sieved_to = limit


def nth_prime(i: int) -> int:
    """Return the ``i``-th prime, counting from ``nth_prime(0) == 2``."""
    if i < 0:
        raise ValueError("prime index must be nonnegative")
    while i >= len(_primes):
        _extend_sieve(2 * _sieved_to)
    return _primes[i]


def prime_index(p: int) -> int:
    """Inverse of :func:`nth_prime`; raises ValueError for non-primes."""
    if p < 2:
        raise ValueError(f"{p} is not prime")
    _extend_sieve(p)
    j = bisect.bisect_left(_primes, p)
    if j == len(_primes) or _primes[j] != p:
        raise ValueError(f"{p} is not prime")
    return j


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= _sieved_to:
        j = bisect.bisect_left(_primes, n)
        return j < len(_primes) and _primes[j] == n
    return factorize(n) == [(n, 1)]


# --- factorization -----------------------------------------------------------

_WHEEL = (4, 2, 4, 2, 4, 6, 2, 6)  # gaps between residues coprime to 30, from 7


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization with a 2-3-5 wheel.

    Returns ``[(p, e), ...]`` with strictly increasing primes.

    >>> factorize(12)
    [(2, 2), (3, 1)]
    >>> factorize(1)
    []
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = []
    for p in (2, 3, 5):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p, k = 7, 0
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += _WHEEL[k]
        k = (k + 1) & 7
    if n > 1:
        out.append((n, 1))
    return out


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n))


def smooth_numbers(prime_costs, limit: int) -> list[tuple[int, int]]:
    """``(cost, n)`` for every ``n`` built from the given primes whose summed
    cost (with multiplicity) is at most ``limit``, sorted by cost then ``n``.

    ``prime_costs`` is an iterable of ``(p, cost)`` with ``cost >= 1``.

    >>> smooth_numbers([(2, 1), (3, 2)], 2)
    [(0, 1), (1, 2), (2, 3), (2, 4)]
    """
    out = [(0, 1)]
    for p, c in prime_costs:
        if c < 1:
            raise ValueError("prime costs must be positive")
        if c > limit:
            continue
        ext = []
        for cost, n in out:
            cc, nn = cost + c, n * p
            while cc <= limit:
                ext.append((cc, nn))
                cc += c
                nn *= p
        out.extend(ext)
    out.sort()
    return out


# --- valuations --------------------------------------------------------------

def ord_p(n: int, p: int) -> ExtOrd:
    """p-adic order of an integer; ``ord_p(0) == INFINITY``."""
    if n == 0:
        return INFINITY
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def ord_p_rational(q, p: int) -> ExtOrd:
    """p-adic order of a rational: order of numerator minus order of denominator.

    >>> ord_p_rational(Fraction(1, 9), 3)
    -2
    """
    q = Fraction(q)
    if q == 0:
        return INFINITY
    return ord_p(q.numerator, p) - ord_p(q.denominator, p)


# --- quadratic residues ------------------------------------------------------

def legendre(d: int, p: int) -> int:
    if p == 2:
        raise ValueError("legendre symbol needs an odd prime")
    r = pow(d % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def sqrt_mod_p(d: int, p: int) -> int:
    """Least ``x`` in ``[1, p-1]`` with ``x*x == d (mod p)`` (Tonelli-Shanks)."""
    if legendre(d, p) != 1:
        raise NotAResidue(f"{d} is not a nonzero square mod {p}")
    d %= p
    if p % 4 == 3:
        x = pow(d, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, c, t, x = s, pow(z, q, p), pow(d, q, p), pow(d, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, x = t * c % p, x * b % p
    return min(x, p - x)


def hensel_lift(d: int, p: int, m: int, root: int) -> int:
    """Lift a simple root of ``x^2 - d`` mod ``p`` to a root mod ``p**m``."""
    if m < 1:
        raise ValueError("precision must be >= 1")
    if p == 2:
        raise ValueError("hensel lifting needs an odd prime")
    x = root % p
    if (x * x - d) % p or x == 0:
        raise NotAResidue(f"{root} is not a nonzero root of x^2 - {d} mod {p}")
    pk = p
    for _ in range(1, m):
        pk *= p
        # Newton step; 2x is a unit because p is odd and x != 0 mod p
        x = (x - (x * x - d) * pow(2 * x, -1, pk)) % pk
    return x % (p ** m)


def hensel_sqrt(d: int, p: int, m: int) -> int:
    """Square root of ``d`` modulo ``p**m`` congruent to the least root mod ``p``.

    >>> hensel_sqrt(-1, 5, 2)
    7
    """
    return hensel_lift(d, p, m, sqrt_mod_p(d, p))
