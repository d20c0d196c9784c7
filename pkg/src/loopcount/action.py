"""Group action on the cocycle space whose orbits are isotopy classes.

Generators come in four kinds and all compile to invertible affine maps
``v -> M v + c`` on cocycle vectors. ``isotope_renorm`` is defined by what it
does to the loop (build, take a principal isotope, relabel, extract) and its
affineness is certified when compiled.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from loopcount import gf2
from loopcount.cocycles import (
    Cocycle,
    CocycleVector,
    as_cocycle,
    coboundary,
    dimension,
    extend,
    extract,
    indicator,
)
from loopcount.errors import (
    GroupTooLarge,
    NotAffine,
    NotAnExtension,
    NonIntegral,
    NotExtensionAfterIsotopy,
    SpaceTooLarge,
    Undecided,
)
from loopcount.loops import CayleyTable, principal_isotope_raw
from loopcount.ntheory import check_odd_prime, smallest_primitive_root

MAX_ENUMERABLE_BITS = 16
DEFAULT_GROUP_CAP = 10**7
KINDS = ("automorphism", "coboundary_shift", "isotope_renorm", "linear")


@dataclass(frozen=True)
class ActionGenerator:
    kind: str
    u: int | None = None
    f: tuple[int, ...] | None = None
    a: int | None = None
    b: int | None = None
    matrix: tuple[int, ...] | None = None  # columns by bit position
    shift: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def to_config(self, q: int) -> dict:
        if self.kind == "automorphism":
            return {"kind": self.kind, "u": self.u}
        if self.kind == "coboundary_shift":
            return {"kind": self.kind, "f": list(self.f)}
        if self.kind == "isotope_renorm":
            return {"kind": self.kind, "a": self.a, "b": self.b}
        n = dimension(q)
        w = -(-n // 4)
        return {
            "kind": "linear",
            "M": [format(self.matrix[n - 1 - i], f"0{w}x") for i in range(n)],
            "c": format(self.shift, f"0{w}x"),
        }


def automorphism(u: int) -> ActionGenerator:
    return ActionGenerator("automorphism", u=u)


def coboundary_shift(f: Sequence[int]) -> ActionGenerator:
    return ActionGenerator("coboundary_shift", f=tuple(int(v) & 1 for v in f))


def isotope_renorm(a: int, b: int) -> ActionGenerator:
    return ActionGenerator("isotope_renorm", a=a, b=b)


def linear(matrix: Sequence[int], shift: int = 0) -> ActionGenerator:
    return ActionGenerator("linear", matrix=tuple(matrix), shift=shift)


# --- config loading ------------------------------------------------------


def generators_from_config(config, q: int) -> list[ActionGenerator]:
    """Expand a JSON generator config for a concrete q.

    ``"u": "primitive_root"`` and ``"f": "indicators"`` are accepted so one
    file serves every q.
    """
    check_odd_prime(q)
    if isinstance(config, (str, Path)):
        config = json.loads(Path(config).read_text())
    if isinstance(config, dict):
        config = config["generators"]
    gens: list[ActionGenerator] = []
    for entry in config:
        kind = entry["kind"]
        if kind == "automorphism":
            u = entry["u"]
            u = smallest_primitive_root(q) if u == "primitive_root" else int(u) % q
            if u == 0:
                raise ValueError("automorphism multiplier must be a unit mod q")
            gens.append(automorphism(u))
        elif kind == "coboundary_shift":
            f = entry["f"]
            if f == "indicators":
                gens.extend(coboundary_shift(indicator(q, k)) for k in range(1, q))
            else:
                if len(f) != q or f[0]:
                    raise ValueError(f"coboundary_shift needs {q} values with f(0)=0")
                gens.append(coboundary_shift(f))
        elif kind == "isotope_renorm":
            a, b = int(entry["a"]), int(entry["b"])
            if not (0 <= a < 2 * q and 0 <= b < 2 * q):
                raise ValueError(f"isotope parameters must lie in 0..{2 * q - 1}")
            gens.append(isotope_renorm(a, b))
        elif kind == "linear":
            n = dimension(q)
            cols_by_coord = [int(h, 16) for h in entry["M"]]
            if len(cols_by_coord) != n:
                raise ValueError(f"linear generator needs {n} columns")
            matrix = tuple(cols_by_coord[n - 1 - p] for p in range(n))
            gens.append(linear(matrix, int(entry.get("c", "0"), 16)))
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    return gens


def generators_to_config(gens: Iterable[ActionGenerator], q: int) -> list[dict]:
    return [g.to_config(q) for g in gens]


# --- semantic action -----------------------------------------------------


def canonicalize_isotope(op: np.ndarray, identity: int, q: int) -> CayleyTable:
    """Relabel an isotope of an extension back to the (a, x) -> a*q + x form.

    The new label of (c, x) is (c + c0, x - x0) where (c0, x0) is the
    identity; ``extract`` then checks that the result really is canonical.
    """
    c0, x0 = divmod(identity, q)
    idx = np.arange(2 * q)
    c, x = idx // q, idx % q
    perm = ((c + c0) % 2) * q + (x - x0) % q
    inv = np.empty_like(perm)
    inv[perm] = idx
    return CayleyTable(perm[op[np.ix_(inv, inv)]], check=False)


def apply(g: ActionGenerator, theta, q: int | None = None) -> Cocycle:
    if q is None:
        q = theta.q
    theta = as_cocycle(q, theta)
    if g.kind == "automorphism":
        u = g.u % q
        return Cocycle.from_matrix(q, [[theta.bits[u * x % q][u * y % q] for y in range(q)] for x in range(q)])
    if g.kind == "coboundary_shift":
        return theta + coboundary(q, g.f)
    if g.kind == "isotope_renorm":
        op, e = principal_isotope_raw(extend(q, theta), g.a, g.b)
        try:
            return extract(canonicalize_isotope(op, e, q), q)
        except NotAnExtension as exc:
            raise NotExtensionAfterIsotopy(
                f"isotope at (a={g.a}, b={g.b}) is not a canonical extension: {exc}"
            ) from exc
    v = gf2.matvec(g.matrix, theta.value) ^ g.shift
    return Cocycle.from_vector(q, v)


# --- compiled affine maps ------------------------------------------------


class AffineMap:
    """``v -> M v + c`` on ``nbits``-bit vectors, hashable by content."""

    __slots__ = ("cols", "shift", "_tables", "_hash")

    def __init__(self, cols: Sequence[int], shift: int = 0):
        self.cols = tuple(cols)
        self.shift = shift
        self._tables = None
        self._hash = None

    @property
    def nbits(self) -> int:
        return len(self.cols)

    @classmethod
    def identity(cls, nbits: int) -> "AffineMap":
        return cls(gf2.identity(nbits), 0)

    def __call__(self, v: int) -> int:
        return gf2.matvec(self.cols, v) ^ self.shift

    def key(self):
        return (self.cols, self.shift)

    def __eq__(self, other):
        return isinstance(other, AffineMap) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"AffineMap(nbits={self.nbits}, shift={self.shift:#x})"

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self o other``."""
        return AffineMap(gf2.matmul(self.cols, other.cols), gf2.matvec(self.cols, other.shift) ^ self.shift)

    def is_invertible(self) -> bool:
        return gf2.rank(self.cols) == self.nbits

    def inverse(self) -> "AffineMap":
        inv = gf2.inverse(self.cols)
        return AffineMap(inv, gf2.matvec(inv, self.shift))

    def as_generator(self) -> ActionGenerator:
        return linear(self.cols, self.shift)

    def images(self, values: np.ndarray) -> np.ndarray:
        """Vectorized image of an array of vectors (nbits <= 62)."""
        if self._tables is None:
            tabs = []
            for start in range(0, self.nbits, 8):
                chunk = self.cols[start:start + 8]
                tab = np.zeros(256, dtype=np.int64)
                for byte in range(256):
                    acc = 0
                    for p, col in enumerate(chunk):
                        if (byte >> p) & 1:
                            acc ^= col
                    tab[byte] = acc
                tabs.append(tab)
            self._tables = tabs
        values = np.asarray(values, dtype=np.int64)
        out = np.full(values.shape, self.shift, dtype=np.int64)
        for k, tab in enumerate(self._tables):
            out ^= tab[(values >> (8 * k)) & 255]
        return out

    def fixed_dim(self):
        """Dimension of the fixed-point set, or None when it is empty."""
        lin = gf2.add(self.cols, gf2.identity(self.nbits))
        z, kdim = gf2.solve(lin, self.shift)
        return None if z is None else kdim


def compile_generator(g: ActionGenerator, q: int, *, samples: int = 200, seed: int = 0) -> AffineMap:
    """Compile ``g`` to an AffineMap and certify that it reproduces ``apply``.

    Verification is exhaustive when the space has at most 2^16 vectors and
    ``samples`` seeded random vectors otherwise.
    """
    check_odd_prime(q)
    n = dimension(q)
    if g.kind == "linear":
        m = AffineMap(g.matrix, g.shift)
    else:
        def ap(v):
            return apply(g, Cocycle.from_vector(q, v), q).value

        shift = ap(0)
        cols = [ap(1 << p) ^ shift for p in range(n)]
        m = AffineMap(cols, shift)
        if n <= 4:
            checks = range(1 << n)
        else:
            rng = random.Random(seed)
            checks = [rng.getrandbits(n) for _ in range(samples)]
        for v in checks:
            if m(v) != ap(v):
                raise NotAffine(f"{g.kind} generator is not affine on the cocycle space (q={q})")
    if not m.is_invertible():
        raise NotAffine(f"{g.kind} generator does not act bijectively (q={q})")
    return m


def compile_all(gens: Iterable, q: int) -> list[AffineMap]:
    return [g if isinstance(g, AffineMap) else compile_generator(g, q) for g in gens]


# --- orbits ----------------------------------------------------------------


def _value(theta) -> int:
    if isinstance(theta, (CocycleVector, Cocycle)):
        return theta.value
    return int(theta)


def orbit(theta, gens, q: int) -> set[int]:
    """Orbit of one vector by breadth-first closure.

    Each generator is a permutation of a finite set, so forward images
    already give closure under inverses.
    """
    maps = compile_all(gens, q)
    start = _value(theta)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for m in maps:
                w = m(v)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


@dataclass
class OrbitPartition:
    q: int
    representatives: list[int]
    sizes: list[int]
    class_of: np.ndarray | None = None

    def __len__(self):
        return len(self.representatives)

    def to_jsonl(self) -> str:
        w = -(-dimension(self.q) // 4)
        return "".join(
            json.dumps({"rep": format(r, f"0{w}x"), "size": s}) + "\n"
            for r, s in zip(self.representatives, self.sizes)
        )

    @classmethod
    def from_jsonl(cls, q: int, text: str) -> "OrbitPartition":
        reps, sizes = [], []
        for line in text.splitlines():
            if line.strip():
                rec = json.loads(line)
                reps.append(int(rec["rep"], 16))
                sizes.append(int(rec["size"]))
        return cls(q, reps, sizes)

    def classes(self) -> list[set[int]]:
        if self.class_of is None:
            raise ValueError("class map not materialized")
        out = [set() for _ in self.representatives]
        for v, c in enumerate(self.class_of.tolist()):
            out[c].add(v)
        return out


def partition_orbits(q: int, gens, *, max_bits: int = MAX_ENUMERABLE_BITS) -> OrbitPartition:
    """Partition all 2^((q-1)^2) vectors into orbits.

    Representatives are the lexicographically least vector of each orbit and
    classes are listed in increasing order of representative.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    check_odd_prime(q)
    n = dimension(q)
    if n > max_bits:
        raise SpaceTooLarge(f"2^{n} cocycles exceed the enumeration cap 2^{max_bits}")
    maps = compile_all(gens, q)
    size = 1 << n
    verts = np.arange(size, dtype=np.int64)
    if maps:
        src = np.concatenate([verts] * len(maps))
        dst = np.concatenate([m.images(verts) for m in maps])
    else:
        src = dst = verts
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")
    mins = np.full(labels.max() + 1, size, dtype=np.int64)
    np.minimum.at(mins, labels, verts)
    order = np.argsort(mins)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    class_of = rank[labels]
    sizes = np.bincount(class_of)
    return OrbitPartition(q, mins[order].tolist(), sizes.tolist(), class_of)


# --- group closure and Burnside ----------------------------------------


def group_closure(gens, q: int, *, cap: int = DEFAULT_GROUP_CAP) -> list[AffineMap]:
    """All elements of the group generated by ``gens``, identity first.

    Each new element is multiplied on the right by every generator; elements
    are hash-consed, so the result has no duplicates.
    """
    maps = compile_all(gens, q)
    ident = AffineMap.identity(dimension(q))
    seen = {ident}
    out = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in maps:
                hg = h.compose(g)
                if hg not in seen:
                    seen.add(hg)
                    out.append(hg)
                    nxt.append(hg)
                    if len(out) > cap:
                        raise GroupTooLarge(f"group closure exceeds {cap} elements")
        frontier = nxt
    return out


def burnside_count(q: int, group_elements: Iterable[AffineMap]) -> int:
    """Number of orbits as the average fixed-point count, exactly."""
    n = dimension(q)
    ident = gf2.identity(n)
    solvers: dict = {}
    total = 0
    order = 0
    for g in group_elements:
        order += 1
        s = solvers.get(g.cols)
        if s is None:
            s = solvers[g.cols] = gf2.LinearSolver(gf2.add(g.cols, ident))
        if s.solve(g.shift) is not None:
            total += 1 << len(s.kernel)
    if order == 0 or total % order:
        raise NonIntegral(f"fixed-point sum {total} is not divisible by group order {order}")
    return total // order


# --- separability -----------------------------------------------------------


def _basis_values(space) -> list[int]:
    basis = getattr(space, "basis", space)
    return [_value(v) for v in basis]


def _maps_into(g: AffineMap, a_basis: list[int], b_echelon: dict[int, int]):
    """A nonzero v in span(A) with g(v) nonzero in span(B), or None."""
    k = len(a_basis)
    images = [gf2.reduce_vector(b_echelon, g(v) ^ g.shift) for v in a_basis]
    target = gf2.reduce_vector(b_echelon, g.shift)
    # coefficient vectors lam with sum lam_i images_i == target
    solver = gf2.LinearSolver(images)
    lam0 = solver.solve(target)
    if lam0 is None:
        return None
    kern = solver.kernel
    candidates = [lam0]
    for kv in kern[:2]:
        candidates.append(lam0 ^ kv)
    if len(kern) >= 2:
        candidates.append(lam0 ^ kern[0] ^ kern[1])
    for lam in candidates:
        v = 0
        for i in range(k):
            if (lam >> i) & 1:
                v ^= a_basis[i]
        if v and g(v):
            return v
    return None


def are_separable(a, b, gens, q: int, *, group_cap: int = 10**5, samples: int = 2000, seed: int = 0) -> bool:
    """True iff no group element sends a nonzero vector of span(A) to a nonzero vector of span(B).

    Decided exactly over the enumerated group when it has at most
    ``group_cap`` elements. Otherwise random group words are searched for a
    witness; failing to find one raises Undecided rather than guessing.
    """
    a_basis = list(gf2.echelon(_basis_values(a)).values())
    b_ech = gf2.echelon(_basis_values(b))
    ident = AffineMap.identity(dimension(q))
    if _maps_into(ident, a_basis, b_ech) is not None:
        return False
    maps = compile_all(gens, q)
    try:
        elements = group_closure(maps, q, cap=group_cap)
    except GroupTooLarge:
        elements = None
    if elements is not None:
        return all(_maps_into(g, a_basis, b_ech) is None for g in elements)
    rng = random.Random(seed)
    for _ in range(samples):
        g = ident
        for _ in range(rng.randint(1, 4 * len(maps))):
            g = g.compose(rng.choice(maps))
        if _maps_into(g, a_basis, b_ech) is not None:
            return False
    raise Undecided(f"no witness found in {samples} sampled group elements and the group is too large to enumerate")
