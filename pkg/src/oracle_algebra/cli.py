"""Command line: encode presentations into stage dumps, decode them, sweep
round trips, run the property suites, and stream enumeration demos.

Exit codes: 0 ok, 2 invalid configuration, 3 I/O failure, 4 checksum
mismatch, 5 undetermined bits or failed checks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .eop import enum_field, enum_group, enum_ring, to_ndjson
from .fieldtower import FieldCoding, member_of_MX
from .invariants import SUITES, run_suites
from .numkit import is_squarefree
from .oracle import OracleSet, OutOfBound
from .presentation import ChecksumMismatch, DumpDiagram, StageDump, decode, present
from .sring import QQ, QuadField, RingCoding, Variant, member_of_ring
from .tfagroup import CodingGroup, GroupCoding

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_CHECKSUM, EXIT_FAIL = 0, 2, 3, 4, 5
SEED_ENV = "ORACLE_ALGEBRA_SEED"
ROUNDTRIP_COLUMNS = ("coding", "D", "seed", "ok", "steps", "queries", "stage_needed")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


# --- config parsing ----------------------------------------------------------


def parse_int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def parse_field(token: str) -> Optional[int]:
    """``q`` -> None, ``qi`` -> -1, otherwise the integer ``d``."""
    token = token.strip().lower()
    if token == "q":
        return None
    if token in ("qi", "i"):
        return -1
    try:
        d = int(token[1:] if token.startswith("d") else token)
    except ValueError:
        raise ConfigError(f"unknown field {token!r}; use q, qi or an integer d") from None
    if d in (0, 1) or not is_squarefree(d) or d % 4 not in (2, 3):
        raise ConfigError(f"d = {d} must be squarefree with d = 2 or 3 mod 4")
    return d


def make_coding(kind: str, n_pairs: int, field: str = "q", variant: str = "one-factor", k: int = 1):
    if n_pairs < 0:
        raise ConfigError("--pairs must be nonnegative")
    if kind == "field":
        return FieldCoding(n_pairs)
    if kind == "ring":
        try:
            return RingCoding(n_pairs, parse_field(field), Variant(variant))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if kind == "group":
        if k < 1:
            raise ConfigError("--k must be at least 1")
        return GroupCoding(n_pairs, k)
    raise ConfigError(f"unknown coding {kind!r}")


def parse_coding_token(token: str, n_pairs: int, variant: str):
    """Sweep tokens: field, ring-q, ring-qi, ring-d<d>, group, group-k<k>."""
    token = token.strip().lower()
    if token == "field":
        return make_coding("field", n_pairs)
    if token.startswith("ring-"):
        return make_coding("ring", n_pairs, field=token[5:], variant=variant)
    if token == "group":
        return make_coding("group", n_pairs)
    if token.startswith("group-k"):
        try:
            k = int(token[7:])
        except ValueError:
            raise ConfigError(f"bad group token {token!r}") from None
        return make_coding("group", n_pairs, k=k)
    raise ConfigError(f"unknown coding token {token!r}")


def coding_label(coding) -> str:
    j = coding.to_json()
    if j["kind"] == "field":
        return "field"
    if j["kind"] == "group":
        return f"group-k{j['k']}"
    d = j["d"]
    f = "q" if d is None else ("qi" if d == -1 else f"d{d}")
    return f"ring-{f}/{j['variant']}"


def resolve_seed(seed: int) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer") from None
    if not 0 <= seed < 1 << 64:
        raise ConfigError("seed must fit in 64 unsigned bits")
    return seed


def make_D(support: list[int], n_pairs: int) -> OracleSet:
    bad = [n for n in support if n < 0 or n >= n_pairs]
    if bad:
        raise ConfigError(f"D support {bad} outside [0, {n_pairs})")
    return OracleSet(n_pairs, frozenset(support))


# --- commands ----------------------------------------------------------------


def cmd_encode(args) -> int:
    coding = make_coding(args.coding, args.pairs, args.field, args.variant, args.k)
    D = make_D(parse_int_list(args.d_set), args.pairs)
    seed = resolve_seed(args.seed)
    if args.stage < 0:
        raise ConfigError("--stage must be nonnegative")
    B = present(coding, D, seed, mode="dump", stage=args.stage)
    try:
        B.dump.save(args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(B.dump.checksum)
    return EXIT_OK


def _render_report(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**report.to_json(), "checksum": report.checksum()}, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return report.to_csv()
    return report.to_text() + "\n"


def _emit(text: str, out: Optional[str]) -> int:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"cannot write {out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_decode(args) -> int:
    if args.budget < 0:
        raise ConfigError("--budget must be nonnegative")
    try:
        dump = StageDump.load(args.dump)
    except ChecksumMismatch as exc:
        print(f"checksum error: {exc}", file=sys.stderr)
        return EXIT_CHECKSUM
    except OSError as exc:
        print(f"cannot read {args.dump}: {exc}", file=sys.stderr)
        return EXIT_IO
    report = decode(DumpDiagram(dump), budget=args.budget)
    rc = _emit(_render_report(report, args.format), args.out)
    if rc:
        return rc
    return EXIT_FAIL if report.undetermined else EXIT_OK


def _roundtrip_row(job) -> dict:
    coding, support, seed, budget = job
    D = OracleSet(coding.n_pairs, frozenset(support))
    report = decode(present(coding, D, seed), budget=budget)
    ok = report.recovered == D and not report.undetermined and report.exactly_one_halts
    return {
        "coding": coding_label(coding),
        "D": ",".join(map(str, sorted(support))),
        "seed": seed,
        "ok": ok,
        "steps": sum(b.steps for b in report.bits) + report.setup_steps,
        "queries": report.total_queries,
        "stage_needed": report.stage,
    }


def cmd_roundtrip(args) -> int:
    if args.pairs < 0 or args.seeds < 0 or args.budget < 0 or args.jobs < 1:
        raise ConfigError("--pairs, --seeds, --budget must be nonnegative and --jobs positive")
    if args.pairs > 16:
        raise ConfigError("--pairs above 16 makes the sweep too large")
    base = resolve_seed(args.seed)
    try:
        variants = [Variant(v.strip()) for v in args.variants.split(",")] if args.variants else [Variant.ONE_FACTOR]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    codings = []
    for tok in args.codings.split(","):
        if tok.strip().lower().startswith("ring-"):
            codings.extend(parse_coding_token(tok, args.pairs, v.value) for v in variants)
        else:
            codings.append(parse_coding_token(tok, args.pairs, "one-factor"))
    jobs = [
        (c, [i for i in range(args.pairs) if u >> i & 1], base + s, args.budget)
        for c in codings
        for u in range(1 << args.pairs)
        for s in range(args.seeds)
    ] if args.pairs > 0 else []
    t0 = time.perf_counter()
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_roundtrip_row, jobs, chunksize=8))
    else:
        rows = [_roundtrip_row(j) for j in jobs]
    rows.sort(key=lambda r: (r["coding"], r["D"], r["seed"]))
    elapsed = time.perf_counter() - t0
    if args.format == "json":
        text = json.dumps({"rows": rows, "all_ok": all(r["ok"] for r in rows)}, sort_keys=True, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, ROUNDTRIP_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        lines = [" ".join(f"{c:>12}" for c in ROUNDTRIP_COLUMNS)]
        lines += [" ".join(f"{str(r[c]):>12}" for c in ROUNDTRIP_COLUMNS) for r in rows]
        n_ok = sum(r["ok"] for r in rows)
        lines.append(f"{n_ok}/{len(rows)} ok in {elapsed:.1f}s")
        text = "\n".join(lines) + "\n"
    rc = _emit(text, args.out)
    if rc:
        return rc
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def cmd_invariants(args) -> int:
    names = [s.strip() for s in args.select.split(",") if s.strip()] if args.select else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    if args.scale <= 0:
        raise ConfigError("--scale must be positive")
    results = run_suites(names, seed=resolve_seed(args.seed), scale=args.scale)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def _sound(check, *a) -> bool:
    try:
        return check(*a)[0]
    except OutOfBound:
        return False


def cmd_enum_demo(args) -> int:
    if args.n < 0:
        raise ConfigError("-n must be nonnegative")
    X_list = parse_int_list(args.x)
    if any(i < 0 for i in X_list):
        raise ConfigError("X indices must be nonnegative")
    bound = max(X_list, default=-1) + 1
    X = OracleSet(bound, frozenset(X_list))
    if args.coding == "field":
        items = enum_field(X_list).take(args.n)
        sound = all(_sound(member_of_MX, a, X) for a in items)
    elif args.coding == "ring":
        d = parse_field(args.field)
        variant = Variant(args.variant)
        items = enum_ring(X_list, QQ if d is None else QuadField(d), variant).take(args.n)
        sound = all(_sound(member_of_ring, x, X, variant) for x in items)
    elif args.coding == "group":
        if args.k < 1:
            raise ConfigError("--k must be at least 1")
        items = enum_group(X_list, args.k).take(args.n)
        sound = all(_sound(CodingGroup(args.k, X).member, v) for v in items)
    else:
        raise ConfigError(f"unknown coding {args.coding!r}")
    rc = _emit(to_ndjson(items), args.out)
    if rc:
        return rc
    if not sound:
        print("an emitted item failed its membership check", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oracle-algebra", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def coding_flags(sp):
        sp.add_argument("--coding", choices=("field", "ring", "group"), required=True)
        sp.add_argument("--field", default="q", help="ring base field: q, qi, or an integer d")
        sp.add_argument("--variant", default="one-factor", choices=[v.value for v in Variant])
        sp.add_argument("--k", type=int, default=1, help="group rank")

    e = sub.add_parser("encode", help="write a stage dump of a presentation")
    coding_flags(e)
    e.add_argument("--d-set", default="", help="support of D, e.g. 0,2")
    e.add_argument("--pairs", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--stage", type=int, default=2000)
    e.add_argument("--out", default="dump.json")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="recover D from a stage dump")
    d.add_argument("dump")
    d.add_argument("--budget", type=int, default=10**6)
    d.add_argument("--format", choices=("json", "csv", "text"), default="text")
    d.add_argument("--out")
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("roundtrip", help="sweep present/decode over all D")
    r.add_argument("--codings", default="field,ring-q,group")
    r.add_argument("--variants", default="one-factor")
    r.add_argument("--pairs", type=int, default=4)
    r.add_argument("--seeds", type=int, default=1)
    r.add_argument("--seed", type=int, default=1, help="first seed of the sweep")
    r.add_argument("--budget", type=int, default=10**6)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--format", choices=("json", "csv", "text"), default="text")
    r.add_argument("--out")
    r.set_defaults(func=cmd_roundtrip)

    i = sub.add_parser("invariants", help="run the per-module property suites")
    i.add_argument("--select", default="", help=f"comma list from {','.join(SUITES)}")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--scale", type=float, default=1.0, help="multiply instance counts")
    i.set_defaults(func=cmd_invariants)

    m = sub.add_parser("enum-demo", help="stream the first N enumerated elements as JSON lines")
    coding_flags(m)
    m.add_argument("--x", default="", help="enumeration of X, e.g. 1,0")
    m.add_argument("-n", type=int, default=50)
    m.add_argument("--out")
    m.set_defaults(func=cmd_enum_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
