"""Enumeration operators and positive-information stream transformers.

A :class:`Stream` is a pull-based, possibly infinite sequence with a position
counter.  ``apply_operator`` runs a finite enumeration operator against an
input stream; ``enum_field``, ``enum_ring`` and ``enum_group`` turn an
enumeration of X into enumerations of ``M_X``, ``O_{K, W_X}`` and
``(O_{Q, V_X})^k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Optional

from .fieldtower import MqElement, absolute_cost, tower_level
from .sring import K_level, KElement, Variant, field_for, ring_needs
from .tfagroup import vector_level, vector_needs

__all__ = [
    "Stream",
    "EnumOperator",
    "canonical_set",
    "canonical_index",
    "apply_operator",
    "enum_field",
    "enum_ring",
    "enum_group",
    "item_to_json",
]

_END = object()


class Stream:
    """Single-consumer pull stream; ``position`` counts items handed out."""

    def __init__(self, source: Iterable):
        self._it = iter(source)
        self.position = 0
        self.exhausted = False

    def pull(self, default=_END):
        """Next item, or ``default`` once the stream has ended."""
        if self.exhausted:
            return default
        try:
            item = next(self._it)
        except StopIteration:
            self.exhausted = True
            return default
        self.position += 1
        return item

    def __iter__(self) -> Iterator:
        return self

    def __next__(self):
        item = self.pull()
        if item is _END:
            raise StopIteration
        return item

    def take(self, n: int) -> list:
        out = []
        while len(out) < n:
            item = self.pull()
            if item is _END:
                break
            out.append(item)
        return out


def canonical_set(u: int) -> frozenset:
    """``D_u``: the positions of the 1-bits of ``u``."""
    if u < 0:
        raise ValueError("canonical index must be nonnegative")
    out, i = [], 0
    while u:
        if u & 1:
            out.append(i)
        u >>= 1
        i += 1
    return frozenset(out)


def canonical_index(s: Iterable[int]) -> int:
    """Inverse of :func:`canonical_set`."""
    return sum(1 << n for n in set(s))


@dataclass(frozen=True)
class EnumOperator:
    """A finite relation of pairs ``(x, u)``: ``x`` is enumerated once ``D_u`` is."""

    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(x), int(u)) for x, u in self.pairs))

    def apply(self, Y: Iterable[int]) -> frozenset:
        """Evaluate on a finite set: ``{x : D_u ⊆ Y and (x, u) in E}``."""
        Y = frozenset(Y)
        return frozenset(x for x, u in self.pairs if canonical_set(u) <= Y)


def apply_operator(E: EnumOperator, Y_stream) -> Stream:
    """Emit each ``x`` as soon as some ``(x, u)`` in ``E`` has ``D_u`` inside the
    Y-items seen so far.  No duplicates."""
    Y = Y_stream if isinstance(Y_stream, Stream) else Stream(Y_stream)
    rules = sorted((x, canonical_set(u)) for x, u in E.pairs)

    def gen():
        seen: set[int] = set()
        emitted: set[int] = set()

        def ready():
            out = []
            for x, need in rules:
                if x not in emitted and need <= seen:
                    emitted.add(x)
                    out.append(x)
            return out

        yield from ready()
        while True:
            y = Y.pull()
            if y is _END:
                return
            if y not in seen:
                seen.add(y)
                yield from ready()

    return Stream(gen())


def _staged(level: Callable[[list, int], Iterable], need: Callable[[Any], Optional[frozenset]], X_stream) -> Iterator:
    """Stage ``W`` pulls one X item and then emits the weight-``W`` level over
    the indices seen so far.  A newly seen index first releases the lighter
    elements that were waiting on it.  ``need = None`` drops an element.

    Weights do not depend on the index set, so after stage ``W`` the output is
    exactly ``{e : weight(e) <= W, need(e) inside the X items seen}``.
    """
    X = X_stream if isinstance(X_stream, Stream) else Stream(X_stream)
    seen: set[int] = set()
    W = 0
    while True:
        i = X.pull()
        if i is not _END and i not in seen:
            seen.add(i)
            idx = sorted(seen)
            for w in range(W):
                for e in level(idx, w):
                    n = need(e)
                    if n is not None and i in n:
                        yield e
        for e in level(sorted(seen), W):
            if need(e) is not None:
                yield e
        W += 1


def enum_field(X_stream) -> Stream:
    """Enumerate ``M_X`` from an enumeration of ``X``, in stages of weight."""
    return Stream(
        _staged(lambda idx, w: tower_level(idx, absolute_cost, w), lambda a: a.index_set, X_stream)
    )


def enum_ring(X_stream, field=None, variant: Variant = Variant.ONE_FACTOR) -> Stream:
    """Enumerate ``O_{K, W_X}``: an element goes out once the primes under its
    poles have all been seen."""
    field = field_for(None) if field is None else field
    variant = Variant(variant)
    return Stream(
        _staged(
            lambda idx, w: K_level(field, absolute_cost, idx, w),
            lambda x: frozenset() if x.w == 1 else ring_needs(x, variant),
            X_stream,
        )
    )


def enum_group(X_stream, k: int = 1) -> Stream:
    """Enumerate ``(O_{Q, V_X})^k``: a vector goes out once the primes of its
    denominators have all been seen."""
    return Stream(_staged(lambda idx, w: vector_level(k, absolute_cost, idx, w), vector_needs, X_stream))


def item_to_json(item) -> Any:
    """JSON form of a stream item (one record per line when piped)."""
    if isinstance(item, (MqElement, KElement)):
        return item.to_json()
    if isinstance(item, tuple) and all(isinstance(c, Fraction) for c in item):
        return {"coords": [{"num": str(c.numerator), "den": str(c.denominator)} for c in item]}
    return item


def to_ndjson(items: Iterable) -> str:
    return "".join(json.dumps(item_to_json(it), sort_keys=True) + "\n" for it in items)
