"""Finite loops as Cayley tables.

Element 0 is always the identity. Tables are stored as read-only numpy
arrays so they can be shared freely between workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from loopcount.errors import NotNormal, OrderMismatch


class CayleyTable:
    """An n x n multiplication table on 0..n-1 with identity 0."""

    __slots__ = ("table", "_hash")

    def __init__(self, table, *, check=True):
        arr = np.array(table, dtype=np.int16)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError("Cayley table must be a non-empty square array")
        if check and not is_loop(arr):
            raise ValueError("table is not a loop with identity 0")
        arr.setflags(write=False)
        self.table = arr
        self._hash = None

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def __call__(self, x, y):
        return int(self.table[x, y])

    def __eq__(self, other):
        if not isinstance(other, CayleyTable):
            return NotImplemented
        return np.array_equal(self.table, other.table)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.table.tobytes()))
        return self._hash

    def __repr__(self):
        return f"CayleyTable(n={self.n})"

    def rows(self) -> list[list[int]]:
        return self.table.tolist()

    def relabel(self, perm) -> "CayleyTable":
        """Table of the same loop with element ``x`` renamed ``perm[x]``."""
        perm = np.asarray(perm, dtype=np.int16)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm), dtype=np.int16)
        new = perm[self.table[np.ix_(inv, inv)]]
        return CayleyTable(new, check=False)

    # serialization

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "table": self.rows()})

    @classmethod
    def from_json(cls, text: str) -> "CayleyTable":
        data = json.loads(text)
        t = cls(data["table"])
        if t.n != data["n"]:
            raise ValueError(f"declared n={data['n']} but table has order {t.n}")
        return t

    def to_text(self) -> str:
        return "".join(" ".join(map(str, row)) + "\n" for row in self.rows())

    @classmethod
    def from_text(cls, text: str) -> "CayleyTable":
        return cls([[int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()])


def cyclic_group(n: int) -> CayleyTable:
    i = np.arange(n)
    return CayleyTable((i[:, None] + i[None, :]) % n, check=False)


def direct_product(a: CayleyTable, b: CayleyTable) -> CayleyTable:
    """Product loop with pair (x, y) encoded as ``x * b.n + y``."""
    n, m = a.n, b.n
    x = np.repeat(np.arange(n), m)
    y = np.tile(np.arange(m), n)
    tab = a.table[x[:, None], x[None, :]] * m + b.table[y[:, None], y[None, :]]
    return CayleyTable(tab, check=False)


def is_loop(t) -> bool:
    arr = np.asarray(t)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    n = arr.shape[0]
    if n == 0 or arr.min() < 0 or arr.max() >= n:
        return False
    ident = np.arange(n)
    if not (np.array_equal(arr[0], ident) and np.array_equal(arr[:, 0], ident)):
        return False
    srt = np.sort(arr, axis=1)
    if not (srt == ident).all():
        return False
    return bool((np.sort(arr, axis=0) == ident[:, None]).all())


def associator_mask(q: CayleyTable) -> np.ndarray:
    """Boolean array A with A[x, y, z] true iff (xy)z = x(yz)."""
    t = q.table
    return t[t] == t[:, t]


def center(q: CayleyTable) -> frozenset[int]:
    t = q.table
    comm = (t == t.T).all(axis=1)
    a = associator_mask(q)
    left = a.all(axis=(1, 2))
    mid = a.all(axis=(0, 2))
    right = a.all(axis=(0, 1))
    return frozenset(int(x) for x in np.flatnonzero(comm & left & mid & right))


def left_division(q: CayleyTable) -> np.ndarray:
    """``ld[a, y]`` is the unique w with a*w = y."""
    t = q.table
    ld = np.empty_like(t)
    rows = np.arange(q.n)[:, None]
    ld[rows, t] = np.arange(q.n)[None, :]
    return ld


def right_division(q: CayleyTable) -> np.ndarray:
    """``rd[x, b]`` is the unique w with w*b = x."""
    t = q.table
    rd = np.empty_like(t)
    cols = np.arange(q.n)[None, :]
    rd[t, cols] = np.arange(q.n)[:, None]
    return rd


def subloop_closure(q: CayleyTable, gens) -> frozenset[int]:
    """Smallest subset containing 0 and ``gens`` closed under multiplication.

    In a finite quasigroup, closure under multiplication already gives closure
    under both divisions.
    """
    t = q.table
    elems = {0, *gens}
    frontier = list(elems)
    while frontier:
        new = set()
        cur = list(elems)
        for x in frontier:
            for y in cur:
                for z in (int(t[x, y]), int(t[y, x])):
                    if z not in elems:
                        new.add(z)
        elems |= new
        frontier = list(new)
    return frozenset(elems)


def quotient(q: CayleyTable, normal) -> CayleyTable:
    """Loop of cosets ``xN``; raises NotNormal if the product is ill-defined."""
    t = q.table
    normal = sorted(set(int(x) for x in normal))
    if 0 not in normal:
        raise NotNormal("subset does not contain the identity")
    coset_of = [-1] * q.n
    cosets: list[list[int]] = []
    for x in range(q.n):
        if coset_of[x] >= 0:
            continue
        members = sorted({int(t[x, m]) for m in normal})
        if len(members) != len(normal) or any(coset_of[y] >= 0 for y in members):
            raise NotNormal("cosets do not partition the loop")
        for y in members:
            coset_of[y] = len(cosets)
        cosets.append(members)
    k = len(cosets)
    coset_of = np.array(coset_of)
    table = np.empty((k, k), dtype=np.int16)
    for i, ci in enumerate(cosets):
        for j, cj in enumerate(cosets):
            prods = np.unique(coset_of[t[np.ix_(ci, cj)]])
            if len(prods) != 1:
                raise NotNormal("coset multiplication is not well defined")
            table[i, j] = prods[0]
    return CayleyTable(table)


def is_nilpotent(q: CayleyTable) -> tuple[bool, int]:
    """Walk the upper central series down to the trivial loop.

    Returns ``(True, class)`` when it gets there, else ``(False, steps)`` with
    the number of quotients taken before the center became trivial.
    """
    steps = 0
    while q.n > 1:
        z = center(q)
        if len(z) == 1:
            return False, steps
        q = quotient(q, z)
        steps += 1
    return True, steps


# --- isomorphism ---------------------------------------------------------


def element_invariants(q: CayleyTable) -> list[tuple]:
    """Per-element data preserved by every isomorphism (pruning only)."""
    t = q.table
    n = q.n
    a = associator_mask(q)
    comm = (t == t.T).sum(axis=1)
    left = a.sum(axis=(1, 2))
    mid = a.sum(axis=(0, 2))
    right = a.sum(axis=(0, 1))
    sq = t[np.arange(n), np.arange(n)]
    out = []
    for x in range(n):
        # order of x under left powers x, x*x, x*(x*x), ...
        p, k = x, 1
        while p != 0 and k <= n:
            p = int(t[x, p])
            k += 1
        out.append((k if p == 0 else 0, int(comm[x]), int(left[x]), int(mid[x]), int(right[x]),
                    int(sq[x] == 0)))
    # refine once by the invariants of the square
    return [(inv, out[int(sq[x])]) for x, inv in enumerate(out)]


def loop_signature(q: CayleyTable) -> tuple:
    return (q.n, tuple(sorted(element_invariants(q))))


def _generating_sequence(q: CayleyTable, order_key) -> list[int]:
    gens: list[int] = []
    span = frozenset({0})
    for x in sorted(range(1, q.n), key=order_key):
        if x not in span:
            gens.append(x)
            span = subloop_closure(q, gens)
            if len(span) == q.n:
                break
    return gens


def are_isomorphic(q1: CayleyTable, q2: CayleyTable, *, inv1=None, inv2=None):
    """Return an isomorphism ``phi`` (a list, phi[0] = 0) from q1 onto q2, or None.

    Candidate images are filtered by element invariants; the answer is decided
    by backtracking over images of a generating sequence, so it is exact.
    """
    if q1.n != q2.n:
        raise OrderMismatch(f"orders differ: {q1.n} != {q2.n}")
    n = q1.n
    inv1 = inv1 if inv1 is not None else element_invariants(q1)
    inv2 = inv2 if inv2 is not None else element_invariants(q2)
    if sorted(inv1) != sorted(inv2):
        return None
    by_inv: dict = {}
    for y, key in enumerate(inv2):
        by_inv.setdefault(key, []).append(y)
    cand = [by_inv[inv1[x]] for x in range(n)]
    gens = _generating_sequence(q1, lambda x: (len(cand[x]), x))
    t1, t2 = q1.table.tolist(), q2.table.tolist()

    def extend(phi, used, new_pairs):
        # propagate products until closed; return False on conflict
        domain = [x for x in range(n) if phi[x] >= 0]
        queue = list(new_pairs)
        while queue:
            x = queue.pop()
            fx = phi[x]
            for y in list(domain):
                fy = phi[y]
                for z, fz in ((t1[x][y], t2[fx][fy]), (t1[y][x], t2[fy][fx])):
                    if phi[z] < 0:
                        if used[fz] or inv1[z] != inv2[fz]:
                            return False
                        phi[z] = fz
                        used[fz] = True
                        domain.append(z)
                        queue.append(z)
                    elif phi[z] != fz:
                        return False
        return True

    def search(i, phi, used):
        if i == len(gens):
            return phi
        g = gens[i]
        if phi[g] >= 0:
            return search(i + 1, phi, used)
        for img in cand[g]:
            if used[img]:
                continue
            phi2, used2 = phi[:], used[:]
            phi2[g] = img
            used2[img] = True
            if extend(phi2, used2, [g]):
                res = search(i + 1, phi2, used2)
                if res is not None:
                    return res
        return None

    phi0 = [-1] * n
    used0 = [False] * n
    phi0[0] = 0
    used0[0] = True
    if not extend(phi0, used0, [0]):
        return None
    phi = search(0, phi0, used0)
    if phi is None or min(phi) < 0:
        return None
    p = np.array(phi)
    if not np.array_equal(p[q1.table], q2.table[np.ix_(p, p)]):
        return None
    return phi


# --- isotopy -------------------------------------------------------------


@dataclass(frozen=True)
class Isotopy:
    """Triple of bijections with gamma(x*y) = alpha(x) o beta(y)."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]

    def verify(self, q1: CayleyTable, q2: CayleyTable) -> bool:
        a, b, g = (np.array(p) for p in (self.alpha, self.beta, self.gamma))
        n = q1.n
        if q2.n != n or any(sorted(p.tolist()) != list(range(n)) for p in (a, b, g)):
            return False
        return np.array_equal(g[q1.table], q2.table[np.ix_(a, b)])


def principal_isotope_raw(q: CayleyTable, a: int, b: int) -> tuple[np.ndarray, int]:
    """The operation x o y = (x/b)(a\\y) on the original labels, and its identity."""
    rd = right_division(q)
    ld = left_division(q)
    t = q.table
    op = t[np.ix_(rd[:, b], ld[a, :])]
    ident = np.arange(q.n)
    units = [e for e in range(q.n) if np.array_equal(op[e], ident) and np.array_equal(op[:, e], ident)]
    if len(units) != 1:
        raise AssertionError("principal isotope of a loop must have a unique identity")
    return op, units[0]


def principal_isotope(q: CayleyTable, a: int, b: int) -> CayleyTable:
    """Principal isotope at (a, b), with its identity (a*b) swapped into 0."""
    op, e = principal_isotope_raw(q, a, b)
    perm = list(range(q.n))
    perm[0], perm[e] = e, 0
    return CayleyTable(op, check=False).relabel(perm)


def _principal_isotopy(q: CayleyTable, a: int, b: int) -> Isotopy:
    # (R_b, L_a, id) maps q onto the raw isotope; compose with the swap to 0
    op, e = principal_isotope_raw(q, a, b)
    t = q.table
    swap = list(range(q.n))
    swap[0], swap[e] = e, 0
    s = np.array(swap)
    return Isotopy(tuple(s[t[:, b]].tolist()), tuple(s[t[a, :]].tolist()), tuple(swap))


def find_isotopy(q1: CayleyTable, q2: CayleyTable):
    """An Isotopy from q1 onto q2, or None. Tries all n^2 principal isotopes."""
    if q1.n != q2.n:
        raise OrderMismatch(f"orders differ: {q1.n} != {q2.n}")
    inv2 = element_invariants(q2)
    sig2 = sorted(inv2)
    for a, b in product(range(q1.n), repeat=2):
        p = principal_isotope(q1, a, b)
        inv_p = element_invariants(p)
        if sorted(inv_p) != sig2:
            continue
        phi = are_isomorphic(p, q2, inv1=inv_p, inv2=inv2)
        if phi is not None:
            base = _principal_isotopy(q1, a, b)
            f = np.array(phi)
            return Isotopy(*(tuple(f[np.array(m)].tolist()) for m in (base.alpha, base.beta, base.gamma)))
    return None


def are_isotopic(q1: CayleyTable, q2: CayleyTable) -> bool:
    return find_isotopy(q1, q2) is not None
