"""Command-line interface.

Machine output (JSON) goes to stdout, diagnostics to stderr. Exit codes:
0 ok, 1 verification failure, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

from loopcount import __version__, counting, oracle
from loopcount.action import generators_from_config, partition_orbits
from loopcount.cocycles import CocycleVector, dimension, extend
from loopcount.errors import LoopCountError, NotOddPrime, ResourceCap
from loopcount.ntheory import check_odd_prime
from loopcount.report import CountReport
from loopcount.subspaces import decompose
from sympy import primerange

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
METHOD_NAMES = {"formula": "formula", "burnside": "burnside", "orbits": "orbit_enumeration", "oracle": "oracle"}


class UsageError(Exception):
    pass


def log(msg: str):
    print(msg, file=sys.stderr, flush=True)


def atomic_write(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- cache -------------------------------------------------------------------


def cache_dir() -> Path:
    return Path(os.environ.get("LOOPCOUNT_CACHE", ".loopcount-cache"))


def cache_key(**parts) -> str:
    blob = json.dumps({"version": __version__, **parts}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def cached(name: str, key: str, compute):
    """Return the cached text for ``key`` or compute, store, and return it."""
    path = cache_dir() / f"{name}-{key[:16]}.json"
    if path.exists():
        try:
            entry = json.loads(path.read_text())
            if entry.get("key") == key:
                return entry["payload"]
            log(f"cache: hash mismatch in {path}, recomputing")
        except (OSError, ValueError):
            log(f"cache: unreadable {path}, recomputing")
    payload = compute()
    try:
        atomic_write(path, json.dumps({"key": key, "payload": payload}, sort_keys=True))
    except OSError as exc:
        log(f"cache: could not write {path}: {exc}")
    return payload


# --- argument helpers -----------------------------------------------------------


def parse_q(text: str) -> int:
    try:
        return check_odd_prime(int(text))
    except (ValueError, NotOddPrime) as exc:
        raise UsageError(f"invalid q {text!r}: expected an odd prime") from exc


def parse_q_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError as exc:
            raise UsageError(f"invalid q range {text!r}") from exc
        qs = [int(p) for p in primerange(max(lo, 3), hi + 1)]
        if not qs:
            raise UsageError(f"no odd primes in {text!r}")
        return qs
    return [parse_q(text)]


def load_generator_config(path):
    if path is None:
        return counting.isotopy_config()
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read generator config {path}: {exc}") from exc


def check_config(config, q: int):
    try:
        generators_from_config(config, q)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad generator config: {exc!r}") from exc


def emit(text: str, out):
    if out:
        atomic_write(Path(out), text)
    sys.stdout.write(text)


# --- commands ------------------------------------------------------------------


def run_count(q: int, method: str, config, *, threads: int = 1, per_component=None) -> CountReport:
    if method == "formula":
        return counting.count_via_formula(q)
    if method == "oracle":
        return oracle.oracle_count(q, progress=log, workers=threads)
    key = cache_key(kind="count", q=q, method=method, config=config, per_component=per_component)

    def compute():
        if method == "burnside":
            rep = counting.count_via_burnside(q, config, per_component=per_component)
        else:
            rep = counting.count_via_orbits(q, config)
        return rep.to_dict()

    return CountReport.from_dict(cached(f"count-{method}-q{q}", key, compute))


def cmd_count(args) -> int:
    q = parse_q(args.q)
    config = load_generator_config(args.generators)
    check_config(config, q)
    method = METHOD_NAMES[args.method]
    per_component = {"auto": None, "yes": True, "no": False}[args.per_component]
    report = run_count(q, method, config, threads=args.threads, per_component=per_component)
    emit(report.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    qs = parse_q_range(args.q)
    config = load_generator_config(args.generators)
    certificates = []
    for q in qs:
        check_config(config, q)
        reports = [counting.count_via_formula(q)]
        reports.append(run_count(q, "burnside", config, threads=args.threads))
        if dimension(q) <= 16:
            reports.append(run_count(q, "orbit_enumeration", config))
            reports.append(counting.count_isomorphism_baseline(q))
        if q in oracle.ORACLE_PRIMES and not args.no_oracle:
            cert = oracle.certify(q, reports, workers=args.threads)
        else:
            log(f"q={q}: oracle skipped ({'disabled' if args.no_oracle else 'beyond brute-force cap'}); "
                "comparing against the Burnside count")
            cert = oracle.certify(q, reports[:1], truth=reports[1])
        log(f"q={q}: {'PASS' if cert.passed else 'FAIL'}")
        certificates.append(cert.to_dict())
    passed = all(c["passed"] for c in certificates)
    emit(json.dumps({"passed": passed, "certificates": certificates}, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if passed else EXIT_VERIFY


def export_text(kind: str, q: int, config, threads: int = 1) -> str:
    if kind == "orbits":
        key = cache_key(kind="orbits", q=q, config=config)
        return cached(f"orbits-q{q}", key, lambda: partition_orbits(q, generators_from_config(config, q)).to_jsonl())
    if kind == "decomposition":
        return decompose(q, counting.cyclic_generator(q)).to_json() + "\n"
    return oracle.oracle_result(q, progress=log, workers=threads).to_jsonl()


def cmd_export(args) -> int:
    q = parse_q(args.q)
    config = load_generator_config(args.generators)
    check_config(config, q)
    text = export_text(args.kind, q, config, args.threads)
    atomic_write(Path(args.out), text)
    log(f"wrote {args.kind} for q={q} to {args.out}")
    return EXIT_OK


def cmd_cayley(args) -> int:
    q = parse_q(args.q)
    try:
        vec = CocycleVector.from_hex(q, args.cocycle)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = extend(q, vec.unflatten())
    emit(table.to_text() if args.format == "text" else table.to_json() + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopcount", description="Count nilpotent loops of order 2q up to isotopy.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--generators", help="generator config JSON (default: bundled isotopy_2q.json)")
        p.add_argument("--out", help="also write the output to this file")
        p.add_argument("--threads", type=int, default=1, help="worker processes for the oracle (0 = auto)")

    p = sub.add_parser("count", help="count loops of order 2q")
    p.add_argument("--q", required=True)
    p.add_argument("--method", choices=sorted(METHOD_NAMES), default="formula")
    p.add_argument("--per-component", choices=("auto", "yes", "no"), default="auto",
                   help="Burnside evaluation through invariant subspaces")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="cross-check every applicable method")
    p.add_argument("--q", required=True, help="a prime or a range such as 3..5")
    p.add_argument("--no-oracle", action="store_true")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write orbits, decomposition or oracle classes")
    p.add_argument("kind", choices=("orbits", "decomposition", "classes"))
    p.add_argument("--q", required=True)
    p.add_argument("--generators")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("cayley", help="print the extension table of a cocycle")
    p.add_argument("--q", required=True)
    p.add_argument("--cocycle", required=True, help="hex cocycle vector")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cayley)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        log(f"error: {exc}")
        return EXIT_USAGE
    except ResourceCap as exc:
        log(f"error ({exc.code}): {exc}")
        return EXIT_CAP
    except LoopCountError as exc:
        log(f"error ({exc.code}): {exc}")
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
