"""Finite-support oracle sets, the D-join-complement construction, and the
round-robin dovetailer used by every black-box decoder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "OracleSet",
    "JoinedSet",
    "MalformedJoin",
    "OutOfBound",
    "BudgetExhausted",
    "NOT_YET",
    "Found",
    "SearchTask",
    "Dovetailer",
    "join",
    "split",
    "dovetail",
]


class MalformedJoin(ValueError):
    """A pair ``{2n, 2n+1}`` holds zero or two members."""


class OutOfBound(ValueError):
    """An oracle question at or beyond the set's declared bound."""


class BudgetExhausted(Exception):
    def __init__(self, steps: int):
        super().__init__(f"no search halted within {steps} steps")
        self.steps = steps


@dataclass(frozen=True)
class OracleSet:
    """A subset of the naturals with support inside ``[0, bound)``.

    Every ``n >= bound`` is a non-member; that is part of the meaning of the
    set, not a truncation.
    """

    bound: int
    support: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        support = frozenset(int(n) for n in self.support)
        object.__setattr__(self, "support", support)
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")
        bad = [n for n in support if n < 0 or n >= self.bound]
        if bad:
            raise OutOfBound(f"support elements {sorted(bad)} outside [0, {self.bound})")

    @classmethod
    def of(cls, members: Iterable[int], bound: int | None = None) -> "OracleSet":
        members = frozenset(members)
        if bound is None:
            bound = max(members) + 1 if members else 0
        return cls(bound, members)

    def __contains__(self, n: int) -> bool:
        return n in self.support

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.support))

    def __len__(self) -> int:
        return len(self.support)

    def members(self) -> list[int]:
        return sorted(self.support)

    def query(self, n: int) -> bool:
        """Membership question that refuses indices past the bound."""
        if n < 0 or n >= self.bound:
            raise OutOfBound(f"query {n} outside [0, {self.bound})")
        return n in self.support

    def to_json(self) -> dict[str, Any]:
        return {"bound": self.bound, "support": self.members()}

    @classmethod
    def from_json(cls, obj: dict[str, Any] | str) -> "OracleSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        support = obj["support"]
        if list(support) != sorted(set(support)):
            raise ValueError("support must be sorted and duplicate-free")
        return cls(int(obj["bound"]), frozenset(support))


class JoinedSet(OracleSet):
    """An oracle set over pair indices with exactly one member per pair."""

    @property
    def n_pairs(self) -> int:
        return self.bound // 2


def join(D: OracleSet, n_pairs: int) -> JoinedSet:
    """``{2n : n in D} | {2n+1 : n not in D}`` for ``n < n_pairs``."""
    if n_pairs < D.bound:
        raise OutOfBound(f"n_pairs={n_pairs} is below the bound {D.bound} of D")
    return JoinedSet(2 * n_pairs, frozenset(2 * n if n in D else 2 * n + 1 for n in range(n_pairs)))


def split(Y: OracleSet) -> OracleSet:
    """Inverse of :func:`join`."""
    if Y.bound % 2:
        raise MalformedJoin("joined set bound must be even")
    members = []
    for n in range(Y.bound // 2):
        even, odd = 2 * n in Y, 2 * n + 1 in Y
        if even == odd:
            raise MalformedJoin(f"pair {n} has {'two' if even else 'no'} members")
        if even:
            members.append(n)
    return OracleSet(Y.bound // 2, frozenset(members))


# --- dovetailing -------------------------------------------------------------


class _NotYet:
    __slots__ = ()

    def __repr__(self):
        return "NOT_YET"


NOT_YET = _NotYet()


class Found(NamedTuple):
    witness: Any


class SearchTask:
    """A resumable search.

    ``body`` is an iterator whose items are :data:`NOT_YET` or ``Found(w)``;
    every ``next()`` is one step.  An exhausted body means the search can never
    halt and keeps answering NOT_YET.  Once found, the witness is sticky.
    """

    __slots__ = ("_body", "name", "steps", "result", "dead")

    def __init__(self, body: Iterable, name: Any = None):
        self._body = iter(body)
        self.name = name
        self.steps = 0
        self.result: Found | None = None
        self.dead = False

    @property
    def found(self) -> bool:
        return self.result is not None

    def step(self):
        self.steps += 1
        if self.result is not None:
            return self.result
        if self.dead:
            return NOT_YET
        try:
            out = next(self._body)
        except StopIteration:
            self.dead = True
            return NOT_YET
        if isinstance(out, Found):
            self.result = out
            self._body = iter(())
            return out
        return NOT_YET


class Dovetailer:
    """Round-robin stepping: one step per unfinished task per round, in index order."""

    def __init__(self, tasks: Sequence[SearchTask]):
        if not tasks:
            raise ValueError("dovetail needs at least one task")
        self.tasks = list(tasks)
        self.steps = 0
        self._cursor = 0

    def run(self, budget: int) -> Iterator[tuple[int, Any]]:
        """Yield ``(index, witness)`` as tasks halt; stop after ``budget`` steps."""
        spent = 0
        n = len(self.tasks)
        while spent < budget:
            if self._cursor == 0 and not any(not t.found and not t.dead for t in self.tasks):
                return
            i = self._cursor
            self._cursor = (i + 1) % n
            task = self.tasks[i]
            if task.found:
                continue
            out = task.step()
            spent += 1
            self.steps += 1
            if out is not NOT_YET:
                yield i, out.witness


def dovetail(tasks: Sequence[SearchTask], budget: int) -> tuple[int, Any]:
    """First task to halt under round-robin stepping.

    Raises :class:`BudgetExhausted` once ``budget`` steps pass without a hit.
    """
    dt = Dovetailer(tasks)
    for hit in dt.run(budget):
        return hit
    raise BudgetExhausted(dt.steps)
