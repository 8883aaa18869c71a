"""Black-box decoders: recover D from a presentation of the structure coding
``join(D)``, touching it only through diagram queries.

For each pair ``n`` the decoder dovetails witness searches for index ``2n``
against index ``2n+1``.  Exactly one of them can succeed, and which one
decides bit ``n``.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, Optional

from ..numkit import nth_prime
from ..oracle import NOT_YET, BudgetExhausted, Dovetailer, Found, OracleSet, SearchTask, dovetail
from ..sring import Kind, Variant, choose_factor, field_for, pole_element
from .diagram import StageExceeded, canonical_json

__all__ = [
    "BitRecord",
    "DecodeReport",
    "locate_integer",
    "decode_field",
    "decode_ring",
    "decode_group",
    "decode",
    "enum_decode",
    "DEFAULT_CONFIRM",
]

DEFAULT_CONFIRM = 16  # extra dovetail rounds spent watching the rival searches


@dataclass
class BitRecord:
    pair: int
    halted: Optional[int]  # the coded index whose search halted, None if undetermined
    steps: int
    queries: int
    rival_halted: bool = False

    @property
    def bit(self) -> Optional[bool]:
        return None if self.halted is None else self.halted % 2 == 0


@dataclass
class DecodeReport:
    coding: dict
    n_pairs: int
    bits: list = field(default_factory=list)
    total_queries: int = 0
    stage: int = 0
    setup_steps: int = 0

    @property
    def recovered(self) -> OracleSet:
        return OracleSet(self.n_pairs, frozenset(b.pair for b in self.bits if b.bit))

    @property
    def undetermined(self) -> list[int]:
        return [b.pair for b in self.bits if b.halted is None]

    @property
    def exactly_one_halts(self) -> bool:
        return all(b.halted is not None and not b.rival_halted for b in self.bits)

    def to_json(self) -> dict:
        return {
            "coding": self.coding,
            "n_pairs": self.n_pairs,
            "recovered": self.recovered.members(),
            "undetermined": self.undetermined,
            "bits": [asdict(b) for b in self.bits],
            "total_queries": self.total_queries,
            "stage": self.stage,
            "setup_steps": self.setup_steps,
        }

    def checksum(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json()).encode()).hexdigest()

    CSV_COLUMNS = ("pair", "halted", "bit", "steps", "queries", "rival_halted")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for b in self.bits:
            bit = "" if b.bit is None else int(b.bit)
            w.writerow([b.pair, "" if b.halted is None else b.halted, bit, b.steps, b.queries, int(b.rival_halted)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [
            f"coding: {canonical_json(self.coding)}",
            f"recovered: {self.recovered.members()}",
            f"undetermined: {self.undetermined}",
            f"queries: {self.total_queries}  stage: {self.stage}  setup steps: {self.setup_steps}",
        ]
        for b in self.bits:
            state = "undetermined" if b.halted is None else f"index {b.halted} halted"
            lines.append(f"  pair {b.pair}: {state}, {b.steps} steps, {b.queries} queries")
        return "\n".join(lines)


# --- helpers over the interface ----------------------------------------------


class _Context:
    """Per-decode caches built from queries only."""

    def __init__(self, B):
        self.B = B
        self.codes: list[int] = []
        c = B.constants()
        self.zero, self.one = c["zero"], c.get("one")
        self._ladder = [self.zero, self.one]

    def at(self, pos: int) -> int:
        while len(self.codes) <= pos:
            self.codes.append(self.B.next_element())
        return self.codes[pos]

    def integer(self, n: int) -> int:
        if n < 0:
            return self.B.apply("neg", self.integer(-n))
        while len(self._ladder) <= n:
            self._ladder.append(self.B.apply("add", self._ladder[-1], self.one))
        return self._ladder[n]


def locate_integer(B, n: int) -> int:
    """Code of ``n * 1``: repeated addition of one, negated for ``n < 0``."""
    c = B.constants()
    if n == 0:
        return c["zero"]
    if n < 0:
        return B.apply("neg", locate_integer(B, -n))
    acc = c["one"]
    for _ in range(n - 1):
        acc = B.apply("add", acc, c["one"])
    return acc


def _scalar(B, p: int, y: int) -> int:
    """``p * y`` in a group by doubling."""
    acc = None
    add = y
    while True:
        if p & 1:
            acc = add if acc is None else B.apply("add", acc, add)
        p >>= 1
        if not p:
            return acc
        add = B.apply("add", add, add)


def _search(ctx: _Context, check: Callable[[int], bool]) -> Iterator:
    pos = 0
    while True:
        try:
            y = ctx.at(pos)
            hit = check(y)
        except StageExceeded:
            return
        yield Found(y) if hit else NOT_YET
        pos += 1


def _decide(tasks, indices, budget: int, confirm: int):
    """Dovetail until one task halts, then watch the others for ``confirm`` rounds.

    Returns ``(winning task, steps to the first halt, whether a search for
    the other index also halted)``.
    """
    dt = Dovetailer(tasks)
    first = next(iter(dt.run(budget)), None)
    if first is None:
        return None, dt.steps, False
    steps = dt.steps
    winner = indices[first[0]]
    rival = any(indices[i] != winner for i, _ in dt.run(confirm * len(tasks)))
    return first[0], steps, rival


def _run_pairs(B, ctx, n_pairs, budget, confirm, make_tasks, setup_steps=0, on_win=None) -> DecodeReport:
    """``make_tasks(n)`` gives ``(index, check, tag)`` search specs for pair ``n``;
    ``on_win(tag)`` hears the tag of every winning search."""
    report = DecodeReport(dict(B.coding), n_pairs, setup_steps=setup_steps)
    for n in range(n_pairs):
        q0 = B.queries
        try:
            specs = make_tasks(n)
        except StageExceeded:
            specs = None
        if not specs:
            report.bits.append(BitRecord(n, None, 0, B.queries - q0))
            continue
        tasks = [SearchTask(_search(ctx, chk), name=j) for j, chk, _ in specs]
        win, steps, rival = _decide(tasks, [j for j, _, _ in specs], budget, confirm)
        halted = None if win is None else specs[win][0]
        if win is not None and on_win is not None:
            on_win(specs[win][2])
        report.bits.append(BitRecord(n, halted, steps, B.queries - q0, rival))
    report.total_queries = B.queries
    report.stage = B.stage
    return report


def _n_pairs(B, n_pairs):
    return int(B.coding["n_pairs"]) if n_pairs is None else n_pairs


# --- decoders ----------------------------------------------------------------


def decode_field(B, n_pairs: Optional[int] = None, budget: int = 10**6, confirm: int = DEFAULT_CONFIRM) -> DecodeReport:
    """Per pair, search for a square root of ``p_{2n}`` against one of ``p_{2n+1}``."""
    n_pairs = _n_pairs(B, n_pairs)
    ctx = _Context(B)

    def make(n):
        specs = []
        for j in (2 * n, 2 * n + 1):
            target = ctx.integer(nth_prime(j))
            specs.append((j, lambda y, t=target: B.eq(B.apply("mul", y, y), t), None))
        return specs

    return _run_pairs(B, ctx, n_pairs, budget, confirm, make)


def _find_sqrt_d(B, ctx, d: int, budget: int):
    target = ctx.integer(d)
    task = SearchTask(_search(ctx, lambda y: B.eq(B.apply("mul", y, y), target)), name="sqrt")
    try:
        _, s = dovetail([task], budget)
    except BudgetExhausted:
        s = None
    return s, task.steps


class _RingSpecs:
    """Search specs for ring pairs.

    ``orients`` holds the candidate codes for the image of ``sqrt(d)``.  A
    win at a split prime can only come from the true orientation (the other
    one describes a pole at the excluded conjugate factor), so such a win
    pins it for all later pairs.
    """

    def __init__(self, B, ctx, d, variant, orients):
        self.B, self.ctx, self.d, self.variant = B, ctx, d, variant
        self.field = field_for(d)
        self.orients = list(orients)

    def pin(self, tag) -> None:
        if tag is not None:
            self.orients = [tag]

    def __call__(self, n: int) -> list:
        B, ctx = self.B, self.ctx
        specs = []
        for j in (2 * n, 2 * n + 1):
            p = nth_prime(j)
            if self.d is None or self.variant is Variant.ALL_FACTORS:
                pairs = [(ctx.one, ctx.integer(p), None)]
            else:
                P = choose_factor(p, self.field)
                z = pole_element(P, self.field).z
                b = ctx.integer(z.w)
                pairs = []
                for s in self.orients if z.v else self.orients[:1]:
                    a = ctx.integer(z.u)
                    if z.v:
                        a = B.apply("add", a, B.apply("mul", ctx.integer(z.v), s))
                    tag = s if P.kind is Kind.SPLIT and len(self.orients) > 1 else None
                    pairs.append((a, b, tag))
            for a, b, tag in pairs:
                specs.append((j, lambda y, a=a, b=b: B.eq(B.apply("mul", b, y), a), tag))
        return specs


def decode_ring(B, n_pairs: Optional[int] = None, budget: int = 10**6, confirm: int = DEFAULT_CONFIRM) -> DecodeReport:
    """Per pair, solve ``b*y = a`` for the pole element ``a/b`` of each coded prime.

    Over a quadratic field with one factor per prime, ``sqrt(d)`` is found
    first.  The presentation does not say which root it is, so each pole
    element is searched in both orientations; any halting search decides
    the bit by its index.
    """
    n_pairs = _n_pairs(B, n_pairs)
    ctx = _Context(B)
    d = B.coding.get("d")
    variant = Variant(B.coding.get("variant", Variant.ONE_FACTOR))
    setup = 0
    orients: list[int] = []
    if d is not None and variant is Variant.ONE_FACTOR:
        try:
            s, setup = _find_sqrt_d(B, ctx, d, budget)
        except StageExceeded:
            s = None
        if s is None:
            return _run_pairs(B, ctx, n_pairs, budget, confirm, lambda n: None, setup)
        orients = [s, B.apply("neg", s)]
    specs = _RingSpecs(B, ctx, d, variant, orients)
    return _run_pairs(B, ctx, n_pairs, budget, confirm, specs, setup, on_win=specs.pin)


def decode_group(B, n_pairs: Optional[int] = None, budget: int = 10**6, confirm: int = DEFAULT_CONFIRM) -> DecodeReport:
    """Per pair, search for ``y`` with ``p*y = g1`` for ``p = p_{2n}`` and ``p_{2n+1}``."""
    n_pairs = _n_pairs(B, n_pairs)
    ctx = _Context(B)
    g1 = B.constants()["g1"]

    def make(n):
        return [(j, lambda y, p=nth_prime(j): B.eq(_scalar(B, p, y), g1), None) for j in (2 * n, 2 * n + 1)]

    return _run_pairs(B, ctx, n_pairs, budget, confirm, make)


_DECODERS = {"field": decode_field, "ring": decode_ring, "group": decode_group}


def decode(B, budget: int = 10**6, n_pairs: Optional[int] = None, confirm: int = DEFAULT_CONFIRM) -> DecodeReport:
    """Dispatch on the interface signature."""
    try:
        fn = _DECODERS[B.signature]
    except KeyError:
        raise ValueError(f"no decoder for signature {B.signature!r}") from None
    return fn(B, n_pairs, budget, confirm)


def enum_decode(B, budget: int) -> Iterator[int]:
    """Stream the coded indices ``i`` whose witness turns up in ``B``.

    All index searches run together under one dovetailer, so only members of
    ``join(D)`` are ever emitted, each as soon as its witness appears.
    """
    if budget <= 0:
        return
    n_pairs = int(B.coding["n_pairs"])
    ctx = _Context(B)
    sig = B.signature
    spent = 0
    if sig == "field":
        make = lambda n: [
            (j, lambda y, t=ctx.integer(nth_prime(j)): B.eq(B.apply("mul", y, y), t), None) for j in (2 * n, 2 * n + 1)
        ]
    elif sig == "group":
        g1 = B.constants()["g1"]
        make = lambda n: [(j, lambda y, p=nth_prime(j): B.eq(_scalar(B, p, y), g1), None) for j in (2 * n, 2 * n + 1)]
    elif sig == "ring":
        d = B.coding.get("d")
        variant = Variant(B.coding.get("variant", Variant.ONE_FACTOR))
        orients: list[int] = []
        if d is not None and variant is Variant.ONE_FACTOR:
            try:
                s, spent = _find_sqrt_d(B, ctx, d, budget)
            except StageExceeded:
                return
            if s is None:
                return
            orients = [s, B.apply("neg", s)]
        make = _RingSpecs(B, ctx, d, variant, orients)
    else:
        raise ValueError(f"no decoder for signature {sig!r}")
    specs = []
    try:
        for n in range(n_pairs):
            specs.extend(make(n))
    except StageExceeded:
        return
    if not specs or spent >= budget:
        return
    tasks = [SearchTask(_search(ctx, chk), name=j) for j, chk, _ in specs]
    emitted = set()
    for i, _ in Dovetailer(tasks).run(budget - spent):
        j = specs[i][0]
        if j not in emitted:
            emitted.add(j)
            yield j
