"""Randomized property checks per module, shared by the CLI and the test suite.

Every check returns a :class:`CheckResult` carrying the number of instances
examined and the first counterexample found (``None`` on success).  Instances
come from a seeded ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .eop import EnumOperator, apply_operator, canonical_set
from .fieldtower import (
    MqElement,
    member_of_MX,
    support,
    verify_stability,
    verify_total_linear_disjointness,
)
from .numkit import INFINITY, factorize, nth_prime, ord_p, prime_index
from .oracle import OracleSet, join, split
from .sring import (
    KElement,
    Kind,
    QuadField,
    Variant,
    choose_factor,
    divisor,
    factors_above,
    member_of_ring,
    negative_support,
    pole_element,
)
from .tfagroup import (
    Characteristic,
    CodingGroup,
    KnightDowneyGroup,
    Rank1TypeGroup,
    baer_iso,
    brute_force_height,
    characteristic,
    height,
    member,
    types_equivalent,
)

TEST_FIELDS = (-1, 3, -5, 10)


@dataclass
class CheckResult:
    name: str
    count: int
    counterexample: Any = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        tail = "" if self.ok else f"  counterexample: {self.counterexample!r}"
        return f"{status} {self.name} ({self.count} cases){tail}"


def _run(name: str, cases, prop: Callable[[Any], bool]) -> CheckResult:
    n = 0
    for case in cases:
        n += 1
        if not prop(case):
            return CheckResult(name, n, case)
    return CheckResult(name, n)


# --- random instances --------------------------------------------------------


def random_oracle(rng: random.Random, n_pairs: int = 8) -> OracleSet:
    return join(OracleSet(n_pairs, frozenset(i for i in range(n_pairs) if rng.random() < 0.5)), n_pairs)


def random_mq(rng: random.Random, bound: int = 16, max_terms: int = 4) -> MqElement:
    coords = {}
    for _ in range(rng.randint(0, max_terms)):
        S = tuple(i for i in range(bound) if rng.random() < 0.2)
        coords[S] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    return MqElement.from_subsets(coords)


def random_kelement(rng: random.Random, d: Optional[int], nonzero: bool = True, span: int = 40) -> KElement:
    while True:
        u = rng.randint(-span, span)
        v = rng.randint(-span, span) if d is not None else 0
        w = rng.randint(1, span)
        if u or v or not nonzero:
            return KElement(u, v, w, d)


# --- oracle ------------------------------------------------------------------


def check_join_split(rng: random.Random, n: int = 300) -> list[CheckResult]:
    def cases():
        for _ in range(n):
            b = rng.randint(0, 12)
            yield OracleSet(b, frozenset(i for i in range(b) if rng.random() < 0.5)), b + rng.randint(0, 3)

    def prop(case):
        D, n_pairs = case
        Y = join(D, n_pairs)
        ok = all((2 * i in Y) != (2 * i + 1 in Y) for i in range(n_pairs))
        return ok and split(Y).support == D.support

    return [_run("join/split round trip", cases(), prop)]


# --- fieldtower --------------------------------------------------------------


def check_fieldtower(rng: random.Random, n: int = 10_000) -> list[CheckResult]:
    def frugal_cases():
        for _ in range(n):
            yield random_mq(rng), random_oracle(rng)

    def frugal(case):
        a, X = case
        ok, queries = member_of_MX(a, X)
        return set(queries) <= support(a) and ok == (support(a) <= X.support)

    def inv_cases():
        for _ in range(min(n, 200)):
            a = random_mq(rng, bound=6, max_terms=3)
            if not a.is_zero():
                yield a

    out = [
        _run("member_of_MX queries only its support", frugal_cases(), frugal),
        _run("a * a^-1 == 1", inv_cases(), lambda a: a * a.inverse() == 1),
        _run("total linear disjointness of {0..k}", range(7), lambda k: verify_total_linear_disjointness(range(k + 1))),
        _run("stability of {0..k}", range(7), lambda k: verify_stability(range(k + 1))),
        _run("repeated index is not disjoint", [[0, 0], [1, 2, 1]], lambda I: not verify_total_linear_disjointness(I)),
    ]
    return out


# --- sring -------------------------------------------------------------------


def _norm_sum_ok(x: KElement) -> bool:
    N = x.norm()
    dv = divisor(x)
    primes = {p for p, _ in factorize(abs(N.numerator))} | {p for p, _ in factorize(N.denominator)}
    primes |= {P.p for P in dv}
    for p in primes:
        total = sum(P.residue_degree * dv.get(P, 0) for P in factors_above(p, QuadField(x.d)))
        if total != ord_p(N.numerator, p) - ord_p(N.denominator, p):
            return False
    return True


def check_divisors(rng: random.Random, n: int = 1000, fields=TEST_FIELDS) -> list[CheckResult]:
    out = []
    for d in fields:
        pairs = [(random_kelement(rng, d), random_kelement(rng, d)) for _ in range(n)]

        def additive(case):
            x, y = case
            dx, dy, dxy = divisor(x), divisor(y), divisor(x * y)
            keys = set(dx) | set(dy)
            expect = {P: dx.get(P, 0) + dy.get(P, 0) for P in keys}
            return {P: e for P, e in expect.items() if e} == dxy

        out.append(_run(f"divisor(xy) = divisor(x) + divisor(y) in Q(sqrt {d})", pairs, additive))
        out.append(_run(f"norm-sum consistency in Q(sqrt {d})", (x for x, _ in pairs), _norm_sum_ok))
    return out


def check_pole_elements(fields=TEST_FIELDS, n_primes: int = 30) -> list[CheckResult]:
    out = []
    for d in fields:
        F = QuadField(d)
        cases = [P for i in range(n_primes) for P in factors_above(nth_prime(i), F)]
        out.append(
            _run(
                f"pole elements in Q(sqrt {d})",
                cases,
                lambda P, F=F: negative_support(pole_element(P, F).z) == {P: -1},
            )
        )
    return out


def check_ring_frugality(rng: random.Random, n: int = 10_000, fields=(None,) + TEST_FIELDS) -> list[CheckResult]:
    def cases():
        for t in range(n):
            d = fields[t % len(fields)]
            variant = Variant.ONE_FACTOR if t % 2 else Variant.ALL_FACTORS
            x = random_kelement(rng, d, nonzero=False, span=60)
            # keep denominators under the oracle bound
            while x.w > 1 and max(prime_index(p) for p, _ in factorize(x.w)) >= 16:
                x = random_kelement(rng, d, nonzero=False, span=60)
            yield x, random_oracle(rng), variant

    def prop(case):
        x, X, variant = case
        ok, queries = member_of_ring(x, X, variant)
        poles = negative_support(x) if not x.is_zero() else {}
        pole_idx = {prime_index(P.p) for P in poles}
        if not set(queries) <= pole_idx:
            return False
        field = QuadField(x.d) if x.d is not None else None
        expect = True
        for P in poles:
            if prime_index(P.p) not in X:
                expect = False
            elif variant is Variant.ONE_FACTOR and field is not None and P != choose_factor(P.p, field):
                expect = False
        return ok == expect

    return [_run("member_of_ring queries only its poles", cases(), prop)]


def check_sring(rng: random.Random, scale: float = 1.0) -> list[CheckResult]:
    return (
        check_divisors(rng, max(1, int(1000 * scale)))
        + check_pole_elements()
        + check_ring_frugality(rng, max(1, int(10_000 * scale)))
    )


# --- tfagroup ----------------------------------------------------------------


def random_characteristic(rng: random.Random, places: int = 6) -> Characteristic:
    default = rng.choice((0, INFINITY))
    exc = {}
    for i in range(places):
        if rng.random() < 0.5:
            exc[i] = rng.choice((0, 1, 2, 3, INFINITY))
    return Characteristic(default, exc)


def perturb(rng: random.Random, chi: Characteristic, places: int = 6) -> Characteristic:
    """A characteristic that is often, not always, type-equivalent to ``chi``."""
    r = rng.random()
    if r < 0.15:
        return Characteristic(INFINITY if chi.default == 0 else 0, chi.exceptions)
    exc = {i: chi[i] for i in range(places)}
    for i in range(places):
        if rng.random() < 0.3:
            if exc[i] is INFINITY:
                if rng.random() < 0.3:
                    exc[i] = rng.randint(0, 3)
            else:
                exc[i] = rng.choice((0, 1, 2, 3, 4)) if rng.random() < 0.85 else INFINITY
    return Characteristic(chi.default, exc)


def random_rational(rng: random.Random, places: int = 8, max_exp: int = 3) -> Fraction:
    num = rng.choice((1, -1)) * rng.randint(1, 30)
    den = 1
    for i in range(places):
        if rng.random() < 0.3:
            den *= nth_prime(i) ** rng.randint(1, max_exp)
    return Fraction(num, den)


def _sample_member(rng, g, tries: int = 200) -> Optional[Fraction]:
    for _ in range(tries):
        q = random_rational(rng)
        if q and g.member((q,))[0]:
            return q
    return Fraction(rng.randint(1, 30))


def random_group_case(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        X = random_oracle(rng, 6)
        k = rng.randint(1, 3)
        g = CodingGroup(k, X)
        v = tuple(rng.choice((Fraction(0), _sample_member(rng, CodingGroup(1, X)))) for _ in range(k))
        if all(c == 0 for c in v):
            v = (Fraction(1),) + v[1:]
    elif kind == 1:
        D = OracleSet(6, frozenset(i for i in range(6) if rng.random() < 0.5))
        g = KnightDowneyGroup(D, 6)
        v = (_sample_member(rng, g),)
    else:
        g = Rank1TypeGroup(random_characteristic(rng))
        v = (_sample_member(rng, g),)
    p = nth_prime(rng.randrange(8))
    return g, v, p


def check_heights(rng: random.Random, n: int = 500, depth: int = 12) -> list[CheckResult]:
    def prop(case):
        g, v, p = case
        h = height(g, v, p)
        bf = brute_force_height(g, v, p, depth)
        if h is INFINITY:
            return bf == depth and brute_force_height(g, v, p, 2 * depth) == 2 * depth
        return bf == min(h, depth)

    return [_run("height matches brute-force divisibility", (random_group_case(rng) for _ in range(n)), prop)]


def check_homogeneity(rng: random.Random, n: int = 100) -> list[CheckResult]:
    def cases():
        for _ in range(n):
            g = CodingGroup(1, random_oracle(rng, 6))
            yield g, _sample_member(rng, g), _sample_member(rng, g)

    def prop(case):
        g, a, b = case
        return types_equivalent(characteristic(g, (a,), 12), characteristic(g, (b,), 12))

    return [_run("rank-1 coding group is homogeneous", cases(), prop)]


def check_baer(rng: random.Random, n: int = 200, samples: int = 200) -> list[CheckResult]:
    def cases():
        for _ in range(n):
            chi = random_characteristic(rng)
            yield chi, perturb(rng, chi)

    def prop(case):
        chi_g, chi_h = case
        q = baer_iso(chi_g, chi_h)
        if q is None:
            return not types_equivalent(chi_g, chi_h)
        if not types_equivalent(chi_g, chi_h):
            return False
        G, H = Rank1TypeGroup(chi_g), Rank1TypeGroup(chi_h)
        for _ in range(samples):
            x, y = random_rational(rng), random_rational(rng)
            if member(G, (x,))[0] != member(H, (q * x,))[0]:
                return False
            if member(H, (y,))[0] != member(G, (y / q,))[0]:
                return False
            if q * (x + y) != q * x + q * y:
                return False
        return True

    return [_run("baer_iso exists iff types agree, and preserves membership", cases(), prop)]


def kd_height_one_set(D: OracleSet, n_pairs: int) -> frozenset:
    g = KnightDowneyGroup(D, n_pairs)
    return frozenset(i for i in range(2 * n_pairs) if height(g, (1,), nth_prime(i)) == 1)


def check_knight_downey(n_pairs: int = 8) -> list[CheckResult]:
    def cases():
        for u in range(1 << n_pairs):
            yield OracleSet(n_pairs, canonical_set(u))

    return [
        _run(
            "height-one set of 1 is join(D)",
            cases(),
            lambda D: kd_height_one_set(D, n_pairs) == join(D, n_pairs).support,
        )
    ]


def check_tfagroup(rng: random.Random, scale: float = 1.0) -> list[CheckResult]:
    s = lambda k: max(1, int(k * scale))
    return (
        check_heights(rng, s(500))
        + check_homogeneity(rng, s(100))
        + check_baer(rng, s(200), s(200))
        + check_knight_downey()
    )


# --- eop ---------------------------------------------------------------------


def operator_prefixes_ok(E: EnumOperator, Y: list) -> bool:
    """When the operator pulls ``Y[pos]``, what it has emitted so far must be
    exactly ``E`` applied to ``Y[:pos]``; at the end, ``E`` applied to ``Y``."""
    marks: list[int] = []
    out = None

    def feed():
        for y in Y:
            marks.append(out.position)
            yield y

    out = apply_operator(E, feed())
    got = list(out)
    if len(got) != len(set(got)) or set(got) != E.apply(Y):
        return False
    return all(set(got[:m]) == E.apply(Y[:pos]) for pos, m in enumerate(marks))


def check_operators(rng: random.Random, n: int = 200) -> list[CheckResult]:
    def cases():
        for _ in range(n):
            E = EnumOperator(frozenset((rng.randrange(10), rng.randrange(64)) for _ in range(rng.randint(0, 8))))
            Y = [rng.randrange(6) for _ in range(rng.randint(0, 8))]
            yield E, Y

    def matches(case):
        return operator_prefixes_ok(*case)

    def monotone(case):
        E, Y = case
        cut = len(Y) // 2
        return E.apply(Y[:cut]) <= E.apply(Y)

    return [
        _run("apply_operator matches its definition", cases(), matches),
        _run("apply_operator is monotone", cases(), monotone),
    ]


# --- registry ----------------------------------------------------------------


SUITES = {
    "oracle": lambda rng, scale: check_join_split(rng, max(1, int(300 * scale))),
    "fieldtower": lambda rng, scale: check_fieldtower(rng, max(1, int(10_000 * scale))),
    "sring": check_sring,
    "tfagroup": check_tfagroup,
    "eop": lambda rng, scale: check_operators(rng, max(1, int(200 * scale))),
}


def run_suites(names, seed: int = 0, scale: float = 1.0) -> list[CheckResult]:
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(name)
        out.extend(SUITES[name](random.Random(f"{seed}:{name}"), scale))
    return out
