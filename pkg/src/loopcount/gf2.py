"""Bit-packed linear algebra over GF(2).

Vectors are Python ints; bit ``p`` is one coordinate. A linear map on
``nbits``-bit vectors is a tuple ``cols`` with ``cols[p]`` the image of
``1 << p``.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def iter_bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def echelon(vectors: Iterable[int]) -> dict[int, int]:
    """Reduced echelon basis keyed by leading bit. Input is not modified."""
    basis: dict[int, int] = {}
    for v in vectors:
        v = reduce_vector(basis, v)
        if not v:
            continue
        lead = v.bit_length() - 1
        for k, w in basis.items():
            if (w >> lead) & 1:
                basis[k] = w ^ v
        basis[lead] = v
    return basis


def reduce_vector(basis: dict[int, int], v: int) -> int:
    for lead in sorted(basis, reverse=True):
        if (v >> lead) & 1:
            v ^= basis[lead]
    return v


def rank(vectors: Iterable[int]) -> int:
    return len(echelon(vectors))


def in_span(basis: dict[int, int], v: int) -> bool:
    return reduce_vector(basis, v) == 0


def matvec(cols: Sequence[int], v: int) -> int:
    out = 0
    for p in iter_bits(v):
        out ^= cols[p]
    return out


def matmul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Columns of the composite ``a o b``."""
    return tuple(matvec(a, col) for col in b)


def identity(nbits: int) -> tuple[int, ...]:
    return tuple(1 << p for p in range(nbits))


def add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x ^ y for x, y in zip(a, b))


def transpose(cols: Sequence[int], nrows: int) -> list[int]:
    rows = [0] * nrows
    for p, col in enumerate(cols):
        for r in iter_bits(col):
            rows[r] |= 1 << p
    return rows


def kernel(cols: Sequence[int]) -> list[int]:
    """Basis of ``{v : M v = 0}``.

    Eliminates on the augmented pairs (image, preimage) so the preimages of
    the zero rows form the kernel.
    """
    pivots: dict[int, tuple[int, int]] = {}
    out = []
    for p, col in enumerate(cols):
        img, pre = col, 1 << p
        while img:
            lead = img.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (img, pre)
                break
            pimg, ppre = pivots[lead]
            img ^= pimg
            pre ^= ppre
        if not img:
            out.append(pre)
    return out


class LinearSolver:
    """Precomputed elimination of ``M`` for repeated solves of ``M z = c``."""

    def __init__(self, cols: Sequence[int]):
        self.pivots: dict[int, tuple[int, int]] = {}
        self.kernel: list[int] = []
        for p, col in enumerate(cols):
            img, pre = col, 1 << p
            while img:
                lead = img.bit_length() - 1
                if lead not in self.pivots:
                    self.pivots[lead] = (img, pre)
                    break
                pimg, ppre = self.pivots[lead]
                img ^= pimg
                pre ^= ppre
            if not img:
                self.kernel.append(pre)
        self._order = sorted(self.pivots, reverse=True)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def solve(self, c: int):
        """A particular solution, or None when ``c`` is outside the image."""
        z = 0
        for lead in self._order:
            if (c >> lead) & 1:
                img, pre = self.pivots[lead]
                c ^= img
                z ^= pre
        return None if c else z


def solve(cols: Sequence[int], c: int):
    """Return ``(z, kernel_dim)`` with ``M z = c``, or ``(None, kernel_dim)``."""
    s = LinearSolver(cols)
    return s.solve(c), len(s.kernel)


def inverse(cols: Sequence[int]) -> tuple[int, ...]:
    s = LinearSolver(cols)
    if s.kernel:
        raise ValueError("matrix is singular")
    return tuple(s.solve(1 << p) for p in range(len(cols)))


def matpow(cols: Sequence[int], k: int) -> tuple[int, ...]:
    result = identity(len(cols))
    base = tuple(cols)
    while k:
        if k & 1:
            result = matmul(base, result)
        base = matmul(base, base)
        k >>= 1
    return result
