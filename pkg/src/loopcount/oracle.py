"""Brute-force ground truth for q = 3 and q = 5.

Builds every candidate nilpotent loop of order 2q as a Cayley table, then
classifies by isomorphism and isotopy straight from the definitions. Nothing
here touches the group action on cocycles, so the two cannot share a bug.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import random
from dataclasses import dataclass, field

import numpy as np

from loopcount.cocycles import dimension, extend_vector
from loopcount.report import CountReport
from loopcount.errors import QTooLarge
from loopcount.loops import (
    CayleyTable,
    are_isomorphic,
    element_invariants,
    find_isotopy,
    is_loop,
    is_nilpotent,
    principal_isotope,
)
from loopcount.ntheory import check_odd_prime

ORACLE_PRIMES = (3, 5)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> int:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        # smaller index stays the root
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return rx

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return out


def kernel_zq_extension(q: int, c: int) -> CayleyTable:
    """Central extension of Zq by Z2: (x, a)(y, b) = (x + y + c[a = b = 1], a + b).

    Element (x, a) is encoded as a*q + x so the identity is 0.
    """
    idx = np.arange(2 * q)
    a, x = idx // q, idx % q
    top = (a[:, None] + a[None, :]) % 2
    bottom = (x[:, None] + x[None, :] + c * (a[:, None] & a[None, :])) % q
    return CayleyTable(top * q + bottom, check=False)


@dataclass
class _Entry:
    table: CayleyTable
    family: str
    label: int
    invariants: list = field(repr=False, default=None)
    key: tuple = field(repr=False, default=None)


class _IsoIndex:
    """Isomorphism classes, bucketed by invariant signature."""

    def __init__(self):
        self.buckets: dict[tuple, list[int]] = {}
        self.reps: list[_Entry] = []

    def locate(self, table: CayleyTable, inv=None, key=None):
        inv = inv if inv is not None else element_invariants(table)
        key = key if key is not None else tuple(sorted(inv))
        for r in self.buckets.get(key, ()):
            rep = self.reps[r]
            if are_isomorphic(rep.table, table, inv1=rep.invariants, inv2=inv) is not None:
                return r, inv, key
        return None, inv, key

    def add(self, entry: _Entry) -> int:
        r, inv, key = self.locate(entry.table)
        if r is not None:
            return r
        entry.invariants, entry.key = inv, key
        self.reps.append(entry)
        self.buckets.setdefault(key, []).append(len(self.reps) - 1)
        return len(self.reps) - 1


@dataclass
class OracleResult:
    q: int
    tables_built: int
    iso_of_cocycle: list[int]
    iso_of_zq: list[int]
    iso_reps: list[_Entry]
    isotopy_of_iso: list[int]
    n_isotopy: int
    rejected: list = field(default_factory=list)

    @property
    def n_isomorphism(self) -> int:
        return len(self.iso_reps)

    def isotopy_of_cocycle(self) -> list[int]:
        return [self.isotopy_of_iso[i] if i >= 0 else -1 for i in self.iso_of_cocycle]

    def classes(self) -> list[dict]:
        out = []
        for c in range(self.n_isotopy):
            members = [i for i, k in enumerate(self.isotopy_of_iso) if k == c]
            rep = self.iso_reps[members[0]]
            families = sorted({self.iso_reps[i].family for i in members}
                              | ({"kernel_zq"} if any(self.isotopy_of_iso[i] == c for i in self.iso_of_zq) else set()))
            out.append({
                "class": c,
                "families": families,
                "isomorphism_classes": len(members),
                "cocycles": sum(1 for i in self.iso_of_cocycle if self.isotopy_of_iso[i] == c),
                "representative": rep.table.rows(),
            })
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.classes())

    def report(self) -> CountReport:
        breakdown = {
            "tables_built": self.tables_built,
            "kernel_z2_tables": len(self.iso_of_cocycle),
            "kernel_zq_tables": len(self.iso_of_zq),
            "rejected_not_nilpotent": len(self.rejected),
            "kernel_zq_isotopy_classes": len({self.isotopy_of_iso[i] for i in self.iso_of_zq}),
            "class_sizes": [c["cocycles"] for c in self.classes()],
        }
        return CountReport(self.q, self.n_isotopy, self.n_isomorphism, "oracle", breakdown)


def _iso_chunk(args):
    q, lo, hi = args
    index = _IsoIndex()
    labels, rejected = [], []
    for v in range(lo, hi):
        t = extend_vector(q, v)
        if not _nilpotent_loop(t):
            rejected.append(("kernel_z2", v))
            labels.append(-1)
            continue
        labels.append(index.add(_Entry(t, "kernel_z2", v)))
    return labels, index.reps, rejected


_SHARED_INDEX: _IsoIndex | None = None


def _isotopy_chunk(bounds):
    lo, hi = bounds
    index = _SHARED_INDEX
    pairs = []
    for r in range(lo, hi):
        table = index.reps[r].table
        for a in range(table.n):
            for b in range(table.n):
                s, _, _ = index.locate(principal_isotope(table, a, b))
                if s is None:
                    raise AssertionError(f"principal isotope ({a},{b}) of class {r} is not among the candidates")
                pairs.append((r, s))
    return pairs


def _chunks(total: int, parts: int):
    step = -(-total // parts)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def classify(q: int, progress=None, workers: int = 1) -> OracleResult:
    """Build, filter, and classify all candidate loops of order 2q.

    ``workers > 1`` splits both passes over forked processes; the merge goes
    through the same exact isomorphism tests, so the result is identical.
    """
    global _SHARED_INDEX
    check_odd_prime(q)
    if q not in ORACLE_PRIMES:
        raise QTooLarge(f"brute force is capped at q in {ORACLE_PRIMES}, got {q}")
    if workers == 0:
        workers = os.cpu_count() or 1
    size = 1 << dimension(q)
    pool = multiprocessing.get_context("fork").Pool(workers) if workers > 1 else None
    try:
        jobs = [(q, lo, hi) for lo, hi in _chunks(size, max(1, workers * 4))]
        results = pool.imap(_iso_chunk, jobs) if pool else map(_iso_chunk, jobs)
        index = _IsoIndex()
        iso_of_cocycle: list[int] = []
        rejected: list = []
        for (_, lo, hi), (labels, reps, rej) in zip(jobs, results):
            local = [index.add(rep) for rep in reps]
            iso_of_cocycle.extend(local[i] if i >= 0 else -1 for i in labels)
            rejected.extend(rej)
            if progress:
                progress(f"isomorphism pass: {hi}/{size} tables, {len(index.reps)} classes")
        iso_of_zq = []
        for c in range(q):
            t = kernel_zq_extension(q, c)
            if not _nilpotent_loop(t):
                rejected.append(("kernel_zq", c))
                continue
            iso_of_zq.append(index.add(_Entry(t, "kernel_zq", c)))

        # every isotope of a loop is isomorphic to a principal isotope
        _SHARED_INDEX = index
        bounds = _chunks(len(index.reps), max(1, workers * 4))
        if pool:
            pool.close()
            pool.join()
            pool = multiprocessing.get_context("fork").Pool(workers)
            results = pool.imap(_isotopy_chunk, bounds)
        else:
            results = map(_isotopy_chunk, bounds)
        uf = UnionFind(len(index.reps))
        for (_, hi), pairs in zip(bounds, results):
            for r, s in pairs:
                uf.union(r, s)
            if progress:
                progress(f"isotopy pass: {hi}/{len(index.reps)} classes")
    finally:
        _SHARED_INDEX = None
        if pool:
            pool.close()
            pool.join()
    roots = sorted(uf.groups())
    number = {root: i for i, root in enumerate(roots)}
    isotopy_of_iso = [number[uf.find(r)] for r in range(len(index.reps))]
    return OracleResult(q, size + q, iso_of_cocycle, iso_of_zq, index.reps, isotopy_of_iso, len(roots), rejected)


def _nilpotent_loop(t: CayleyTable) -> bool:
    return is_loop(t.table) and is_nilpotent(t)[0]


_CACHE: dict[int, OracleResult] = {}


def oracle_result(q: int, progress=None, workers: int = 1) -> OracleResult:
    """Memoized ``classify``; the partition does not depend on ``workers``."""
    if q not in _CACHE:
        _CACHE[q] = classify(q, progress, workers)
    return _CACHE[q]


def oracle_count(q: int, progress=None, workers: int = 1) -> CountReport:
    return oracle_result(q, progress, workers).report()


def audit(result: OracleResult, trials: int = 20, seed: int = 0) -> list[str]:
    """Spot-check the partition with direct isotopy searches; returns failures."""
    rng = random.Random(seed)
    reps = result.iso_reps
    failures = []
    for _ in range(trials):
        i, j, k = (rng.randrange(len(reps)) for _ in range(3))
        same = [result.isotopy_of_iso[x] == result.isotopy_of_iso[y] for x, y in ((i, j), (j, k), (i, k))]
        if same[0] and same[1] and not same[2]:
            failures.append(f"transitivity broken on {i}, {j}, {k}")
        found = find_isotopy(reps[i].table, reps[j].table)
        if (found is not None) != same[0]:
            failures.append(f"classes {i}, {j}: partition says {same[0]}, search says {found is not None}")
        elif found is not None and not found.verify(reps[i].table, reps[j].table):
            failures.append(f"isotopy witness for {i}, {j} does not verify")
    return failures


@dataclass
class Certificate:
    q: int
    passed: bool
    comparisons: list[dict]

    def to_dict(self) -> dict:
        return {"q": self.q, "passed": self.passed, "comparisons": self.comparisons}


def certify(q: int, reports: list[CountReport], truth: CountReport | None = None,
            workers: int = 1) -> Certificate:
    """Compare reports against the oracle (or an explicit ``truth``)."""
    if truth is None:
        truth = oracle_count(q, workers=workers)
    rows = []
    for rep in reports:
        if rep.q != q:
            rows.append({"method": rep.method, "field": "q", "expected": str(q), "got": str(rep.q), "ok": False})
            continue
        for fld in ("up_to_isotopy", "up_to_isomorphism"):
            got, want = getattr(rep, fld), getattr(truth, fld)
            if got is None or want is None:
                continue
            rows.append({"method": rep.method, "field": fld, "expected": str(want), "got": str(got), "ok": got == want})
    return Certificate(q, all(r["ok"] for r in rows) and bool(rows), rows)
