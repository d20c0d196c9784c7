"""Normalized GF(2) cocycles on Zq and the central extensions they define.

An extension of Z2 by Zq lives on pairs (a, x) encoded as ``a*q + x``, with
product ``(a, x)(b, y) = (a + b + theta[x][y], x + y)``.

Flattening order of a cocycle is row-major over x = 1..q-1, y = 1..q-1.
Coordinate ``i`` of a vector of length L = (q-1)^2 is stored at bit
``L - 1 - i`` of an int, so integer order equals lexicographic order and the
hex form reads most-significant-first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from loopcount import gf2
from loopcount.errors import NotAnExtension, NotNormalized
from loopcount.loops import CayleyTable
from loopcount.ntheory import check_odd_prime


def dimension(q: int) -> int:
    return (q - 1) ** 2


def bit_of(q: int, x: int, y: int) -> int:
    """Bit position of the free entry theta[x][y] (x, y nonzero)."""
    return dimension(q) - 1 - ((x - 1) * (q - 1) + (y - 1))


def hex_width(q: int) -> int:
    return -(-dimension(q) // 4)


@dataclass(frozen=True)
class CocycleVector:
    q: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < 1 << dimension(self.q):
            raise ValueError(f"vector does not fit in {dimension(self.q)} bits")

    @property
    def bits(self) -> list[int]:
        n = dimension(self.q)
        return [(self.value >> (n - 1 - i)) & 1 for i in range(n)]

    @classmethod
    def from_bits(cls, q: int, bits: Sequence[int]) -> "CocycleVector":
        if len(bits) != dimension(q):
            raise ValueError(f"expected {dimension(q)} bits, got {len(bits)}")
        v = 0
        for b in bits:
            v = (v << 1) | (int(b) & 1)
        return cls(q, v)

    def hex(self) -> str:
        return format(self.value, f"0{hex_width(self.q)}x")

    @classmethod
    def from_hex(cls, q: int, text: str) -> "CocycleVector":
        text = text.strip().lower()
        if len(text) != hex_width(q):
            raise ValueError(f"expected {hex_width(q)} hex digits for q={q}, got {len(text)}")
        return cls(q, int(text, 16))

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "vector": self.hex()})

    @classmethod
    def from_json(cls, text: str) -> "CocycleVector":
        data = json.loads(text)
        return cls.from_hex(data["q"], data["vector"])

    def unflatten(self) -> "Cocycle":
        return Cocycle.from_vector(self.q, self.value)


@dataclass(frozen=True)
class Cocycle:
    q: int
    bits: tuple[tuple[int, ...], ...]

    @classmethod
    def from_matrix(cls, q: int, rows) -> "Cocycle":
        bits = tuple(tuple(int(v) & 1 for v in row) for row in rows)
        if len(bits) != q or any(len(r) != q for r in bits):
            raise ValueError(f"cocycle must be {q}x{q}")
        return cls(q, bits)

    @classmethod
    def zero(cls, q: int) -> "Cocycle":
        return cls(q, tuple((0,) * q for _ in range(q)))

    @classmethod
    def from_vector(cls, q: int, value: int) -> "Cocycle":
        rows = [[0] * q for _ in range(q)]
        for x in range(1, q):
            for y in range(1, q):
                rows[x][y] = (value >> bit_of(q, x, y)) & 1
        return cls.from_matrix(q, rows)

    def is_normalized(self) -> bool:
        return not any(self.bits[0]) and not any(row[0] for row in self.bits)

    def flatten(self) -> CocycleVector:
        if not self.is_normalized():
            raise NotNormalized("cocycle has a nonzero entry in row or column 0")
        return CocycleVector(self.q, self.value)

    @property
    def value(self) -> int:
        q = self.q
        v = 0
        for x in range(1, q):
            for y in range(1, q):
                if self.bits[x][y]:
                    v |= 1 << bit_of(q, x, y)
        return v

    def __add__(self, other: "Cocycle") -> "Cocycle":
        if other.q != self.q:
            raise ValueError("cocycles over different q")
        return Cocycle(self.q, tuple(tuple(a ^ b for a, b in zip(r, s)) for r, s in zip(self.bits, other.bits)))

    def matrix(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int16)


def as_cocycle(q: int, theta) -> Cocycle:
    if isinstance(theta, Cocycle):
        return theta
    if isinstance(theta, CocycleVector):
        return theta.unflatten()
    if isinstance(theta, int):
        return Cocycle.from_vector(q, theta)
    return Cocycle.from_matrix(q, theta)


def extend(q: int, theta) -> CayleyTable:
    """Central extension of Z2 by Zq defined by a normalized cocycle."""
    check_odd_prime(q)
    theta = as_cocycle(q, theta)
    if theta.q != q:
        raise ValueError(f"cocycle is for q={theta.q}, not {q}")
    if not theta.is_normalized():
        raise NotNormalized("cocycle has a nonzero entry in row or column 0")
    th = theta.matrix()
    idx = np.arange(2 * q)
    a, x = idx // q, idx % q
    top = (a[:, None] + a[None, :] + th[x[:, None], x[None, :]]) % 2
    bottom = (x[:, None] + x[None, :]) % q
    return CayleyTable(top * q + bottom, check=False)


def extend_vector(q: int, value: int) -> CayleyTable:
    return extend(q, Cocycle.from_vector(q, value))


def extract(table: CayleyTable, q: int) -> Cocycle:
    """Inverse of ``extend`` for tables already in canonical labeling."""
    check_odd_prime(q)
    if table.n != 2 * q:
        raise NotAnExtension(f"expected order {2 * q}, got {table.n}")
    t = table.table
    idx = np.arange(2 * q)
    a, x = idx // q, idx % q
    if not np.array_equal(t % q, (x[:, None] + x[None, :]) % q):
        raise NotAnExtension("quotient by {0, q} is not the canonical Zq table")
    th = t[:q, :q] // q
    expected = (a[:, None] + a[None, :] + th[x[:, None], x[None, :]]) % 2
    if not np.array_equal(t // q, expected):
        raise NotAnExtension("kernel {0, q} does not act centrally in canonical form")
    theta = Cocycle.from_matrix(q, th.tolist())
    if not theta.is_normalized():
        raise NotAnExtension("induced cocycle is not normalized")
    return theta


def coboundary(q: int, f: Sequence[int]) -> Cocycle:
    """theta[x][y] = f(x) + f(y) + f(x+y) over GF(2)."""
    if len(f) != q:
        raise ValueError(f"f must have {q} values")
    if f[0] & 1:
        raise ValueError("f(0) must be 0")
    f = [int(v) & 1 for v in f]
    return Cocycle.from_matrix(q, [[f[x] ^ f[y] ^ f[(x + y) % q] for y in range(q)] for x in range(q)])


def indicator(q: int, k: int) -> list[int]:
    f = [0] * q
    f[k] = 1
    return f


def coboundary_basis(q: int) -> list[CocycleVector]:
    check_odd_prime(q)
    return [coboundary(q, indicator(q, k)).flatten() for k in range(1, q)]


def gf2_rank(vectors) -> int:
    """Rank over GF(2) of ints, CocycleVectors, or 0/1 sequences of equal length."""
    packed = []
    for v in vectors:
        if isinstance(v, CocycleVector):
            packed.append(v.value)
        elif isinstance(v, int):
            packed.append(v)
        else:
            packed.append(int("".join(str(int(b) & 1) for b in v) or "0", 2))
    return gf2.rank(packed)


def enumerate_vectors(q: int):
    """All cocycle vectors in lexicographic order."""
    for v in range(1 << dimension(q)):
        yield CocycleVector(q, v)
