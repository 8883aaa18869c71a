"""Opaque diagram interfaces over coded structures, and stage dumps.

A :class:`LazyDiagram` renames every element of a structure by a keyed hash
and hands the universe out in a seeded, block-shuffled order.  Each answer is
logged as a fact, so a finished run can be frozen into a :class:`StageDump`
and replayed by a :class:`DumpDiagram` that knows nothing else.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Protocol

from ..oracle import OracleSet
from .structures import build_structure

__all__ = [
    "DiagramInterface",
    "LazyDiagram",
    "DumpDiagram",
    "StageDump",
    "StageExceeded",
    "ChecksumMismatch",
    "UNDEFINED",
    "present",
    "canonical_json",
]

UNDEFINED = None
_BLOCK = 32
_MAX_SEED = 1 << 64


class StageExceeded(LookupError):
    """The diagram cannot answer beyond its recorded stage."""


class ChecksumMismatch(ValueError):
    pass


class DiagramInterface(Protocol):
    signature: str
    coding: dict
    queries: int
    stage: int

    def next_element(self) -> int: ...

    def apply(self, op: str, *codes: int) -> Optional[int]: ...

    def eq(self, a: int, b: int) -> bool: ...

    def constants(self) -> dict[str, int]: ...


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _sha256(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError("seed must fit in 64 unsigned bits")
    return seed


class LazyDiagram:
    """Materializes elements on demand; every answer is memoized and logged."""

    def __init__(self, structure, coding: dict, seed: int, stage_cap: Optional[int] = None):
        self.signature = structure.signature
        self.coding = dict(coding)
        self.seed = _check_seed(seed)
        self.stage_cap = stage_cap
        self.queries = 0
        self.stage = 0
        self.facts: list[list] = []
        self._s = structure
        self._hkey = self.seed.to_bytes(8, "little")
        self._el2code: dict[Any, int] = {}
        self._code2el: dict[int, Any] = {}
        self._revealed: set[int] = set()
        self._memo: dict[tuple, Any] = {}
        self._stream = self._shuffled(structure.elements(), random.Random(self.seed))
        self._constants = {name: self._reveal(e) for name, e in structure.constants.items()}

    @staticmethod
    def _shuffled(it, rng):
        while True:
            block = list(itertools.islice(it, _BLOCK))
            if not block:
                return
            rng.shuffle(block)
            yield from block

    def _code(self, e) -> int:
        c = self._el2code.get(e)
        if c is not None:
            return c
        material = repr(self._s.key(e)).encode()
        salt = 0
        while True:
            h = hashlib.blake2b(material + (b"#%d" % salt if salt else b""), key=self._hkey, digest_size=8)
            c = int.from_bytes(h.digest(), "big")
            if c not in self._code2el:
                break
            salt += 1  # pragma: no cover - 64-bit collision
        self._el2code[e] = c
        self._code2el[c] = e
        return c

    def _reveal(self, e) -> int:
        c = self._code(e)
        self._revealed.add(c)
        return c

    def constants(self) -> dict[str, int]:
        return dict(self._constants)

    def next_element(self) -> int:
        self.queries += 1
        if self.stage_cap is not None and self.stage >= self.stage_cap:
            raise StageExceeded(f"stage cap {self.stage_cap} reached")
        e = next(self._stream)
        c = self._reveal(e)
        self.facts.append(["next", [self.stage], c])
        self.stage += 1
        return c

    def apply(self, op: str, *codes: int) -> Optional[int]:
        self.queries += 1
        key = (op, codes)
        if key in self._memo:
            return self._memo[key]
        if op not in self._s.ops:
            raise ValueError(f"{op!r} is not in the {self.signature} signature")
        arity, fn = self._s.ops[op]
        if len(codes) != arity:
            raise ValueError(f"{op} takes {arity} arguments")
        if all(c in self._revealed for c in codes):
            out = fn(*(self._code2el[c] for c in codes))
            res = UNDEFINED if out is None else self._reveal(out)
        else:
            res = UNDEFINED
        self._memo[key] = res
        self.facts.append([op, list(codes), res])
        return res

    def eq(self, a: int, b: int) -> bool:
        self.queries += 1
        key = ("eq", (a, b))
        if key in self._memo:
            return self._memo[key]
        res = a == b and a in self._revealed
        self._memo[key] = res
        self.facts.append(["eq", [a, b], res])
        return res

    def to_dump(self) -> "StageDump":
        stage = self.stage_cap if self.stage_cap is not None else self.stage
        return StageDump.build(self.signature, self._constants, self.coding, self.seed, stage, self.facts)


@dataclass
class StageDump:
    """A finite view of a presentation: header plus the facts asked so far."""

    signature: str
    constants: dict
    coding: dict
    coding_hash: str
    seed: int
    stage: int
    facts: list = field(default_factory=list)
    checksum: str = ""

    @classmethod
    def build(cls, signature, constants, coding, seed, stage, facts) -> "StageDump":
        coding = {k: v for k, v in coding.items() if k != "D"}
        dump = cls(signature, dict(constants), coding, _sha256(coding), seed, stage, [list(f) for f in facts])
        dump.checksum = dump.compute_checksum()
        return dump

    def payload(self) -> dict:
        return {
            "signature": self.signature,
            "constants": self.constants,
            "coding": self.coding,
            "coding_hash": self.coding_hash,
            "seed": self.seed,
            "stage": self.stage,
            "facts": self.facts,
        }

    def compute_checksum(self) -> str:
        return _sha256(self.payload())

    def to_json(self) -> dict:
        return {**self.payload(), "checksum": self.checksum}

    @classmethod
    def from_json(cls, obj, verify: bool = True) -> "StageDump":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            dump = cls(
                obj["signature"],
                dict(obj["constants"]),
                dict(obj["coding"]),
                obj["coding_hash"],
                int(obj["seed"]),
                int(obj["stage"]),
                list(obj["facts"]),
                obj["checksum"],
            )
        except (KeyError, TypeError) as exc:
            raise ChecksumMismatch(f"malformed dump: {exc}") from exc
        if verify and dump.compute_checksum() != dump.checksum:
            raise ChecksumMismatch("dump checksum does not match its contents")
        return dump

    def save(self, path) -> None:
        Path(path).write_text(canonical_json(self.to_json()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "StageDump":
        text = Path(path).read_text(encoding="utf-8")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ChecksumMismatch(f"dump is not valid JSON: {exc}") from exc
        return cls.from_json(obj)


class DumpDiagram:
    """Answers exactly the facts of a dump and nothing else."""

    def __init__(self, dump: StageDump):
        self.dump = dump
        self.signature = dump.signature
        self.coding = dict(dump.coding)
        self.seed = dump.seed
        self.queries = 0
        self.stage = 0
        self._next: dict[int, int] = {}
        self._facts: dict[tuple, Any] = {}
        for op, args, res in dump.facts:
            if op == "next":
                self._next[args[0]] = res
            else:
                self._facts[(op, tuple(args))] = res

    def constants(self) -> dict[str, int]:
        return dict(self.dump.constants)

    def next_element(self) -> int:
        self.queries += 1
        if self.stage not in self._next:
            raise StageExceeded(f"no element recorded at position {self.stage}")
        c = self._next[self.stage]
        self.stage += 1
        return c

    def _lookup(self, key):
        try:
            return self._facts[key]
        except KeyError:
            raise StageExceeded(f"{key[0]}{key[1]} is not in the dump") from None

    def apply(self, op: str, *codes: int) -> Optional[int]:
        self.queries += 1
        return self._lookup((op, codes))

    def eq(self, a: int, b: int) -> bool:
        self.queries += 1
        return self._lookup(("eq", (a, b)))


PROBE_BUDGET = 10**6


def present(coding, D: OracleSet, seed: int, mode: str = "lazy", stage: Optional[int] = None):
    """A scrambled presentation of the structure coding ``join(D)``.

    ``mode="lazy"`` gives a live :class:`LazyDiagram`.  ``mode="dump"``
    probes the structure with the standard decoder while revealing at most
    ``stage`` elements, and returns a :class:`DumpDiagram` over the facts
    that probe asked.
    """
    structure = build_structure(coding, D)
    if mode == "lazy":
        return LazyDiagram(structure, coding.to_json(), seed, stage)
    if mode == "dump":
        if stage is None or stage < 0:
            raise ValueError("dump mode needs a nonnegative stage")
        from .decode import decode

        probe = LazyDiagram(structure, coding.to_json(), seed, stage)
        decode(probe, budget=PROBE_BUDGET)
        return DumpDiagram(probe.to_dump())
    raise ValueError(f"unknown mode {mode!r}")
