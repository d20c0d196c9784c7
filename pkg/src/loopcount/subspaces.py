"""Invariant subspaces of the cocycle space under an order-q cyclic map.

x^q - 1 is squarefree over GF(2) for odd q, so the space splits as the
direct sum of the kernels ker p(M) over its irreducible factors p.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from loopcount import gf2
from loopcount.errors import NotInvariant, OrderCheckFailed
from loopcount.ntheory import check_odd_prime


@dataclass(frozen=True, order=True)
class Gf2Poly:
    """Polynomial over GF(2); bit i of ``coeffs`` is the coefficient of x^i."""

    coeffs: int

    @classmethod
    def from_bits(cls, bits) -> "Gf2Poly":
        return cls(sum((int(b) & 1) << i for i, b in enumerate(bits)))

    @classmethod
    def x_pow_minus_one(cls, n: int) -> "Gf2Poly":
        return cls((1 << n) | 1)

    @property
    def degree(self) -> int:
        return self.coeffs.bit_length() - 1

    def bits(self) -> list[int]:
        return [(self.coeffs >> i) & 1 for i in range(max(self.degree + 1, 1))]

    def bitstring(self) -> str:
        """Coefficients lowest degree first, e.g. x^2+x+1 -> '111'."""
        return "".join(map(str, self.bits()))

    def __bool__(self):
        return self.coeffs != 0

    def __add__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(self.coeffs ^ other.coeffs)

    def __mul__(self, other: "Gf2Poly") -> "Gf2Poly":
        a, b, out = self.coeffs, other.coeffs, 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return Gf2Poly(out)

    def __divmod__(self, other: "Gf2Poly"):
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        r, qt = self.coeffs, 0
        d = other.degree
        while r and r.bit_length() - 1 >= d:
            shift = r.bit_length() - 1 - d
            qt |= 1 << shift
            r ^= other.coeffs << shift
        return Gf2Poly(qt), Gf2Poly(r)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def gcd(self, other: "Gf2Poly") -> "Gf2Poly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            if (self.coeffs >> i) & 1:
                terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
        return "+".join(terms)

    def sort_key(self):
        return (self.degree, self.bits())


def cyclotomic_cosets(q: int) -> list[list[int]]:
    """Orbits of multiplication by 2 on Zq, each sorted, ordered by least element."""
    seen: set[int] = set()
    out = []
    for s in range(q):
        if s in seen:
            continue
        coset, x = [], s
        while x not in coset:
            coset.append(x)
            x = 2 * x % q
        seen.update(coset)
        out.append(sorted(coset))
    return out


def factor_cyclotomic(q: int) -> list[Gf2Poly]:
    """Irreducible factors of x^q - 1 over GF(2).

    Each cyclotomic coset C gives the Frobenius-stable element sum_{i in C} x^i
    of GF(2)[x]/(x^q - 1). These span the Berlekamp subalgebra, so splitting
    by gcds with them (and with them plus 1) refines the factorization all the
    way to irreducibles.
    """
    check_odd_prime(q)
    f = Gf2Poly.x_pow_minus_one(q)
    factors = [f]
    for coset in cyclotomic_cosets(q):
        h = Gf2Poly(sum(1 << i for i in coset))
        refined = []
        for p in factors:
            for c in (0, 1):
                g = p.gcd(h + Gf2Poly(c))
                if g.degree > 0:
                    refined.append(g)
        factors = refined
    return sorted(factors, key=Gf2Poly.sort_key)


def is_irreducible(p: Gf2Poly) -> bool:
    """Trial division by every polynomial of degree <= deg/2."""
    if p.degree < 1:
        return False
    for d in range(1, p.degree // 2 + 1):
        for c in range(1 << d, 1 << (d + 1)):
            if not p % Gf2Poly(c):
                return False
    return True


def poly_of_matrix(p: Gf2Poly, cols) -> tuple[int, ...]:
    """p(M) by Horner's rule."""
    n = len(cols)
    ident = gf2.identity(n)
    acc = tuple(0 for _ in range(n))
    for i in range(p.degree, -1, -1):
        acc = gf2.matmul(cols, acc)
        if (p.coeffs >> i) & 1:
            acc = gf2.add(acc, ident)
    return acc


@dataclass
class Component:
    label: Gf2Poly
    multiplicity: int
    basis: list[int]

    @property
    def rank(self) -> int:
        return len(self.basis)


@dataclass
class Decomposition:
    q: int
    components: list[Component] = field(default_factory=list)
    _solver: gf2.LinearSolver | None = field(default=None, repr=False, compare=False)
    _coords: list = field(default_factory=list, repr=False, compare=False)

    @property
    def total_rank(self) -> int:
        return sum(c.rank for c in self.components)

    def project(self, v: int) -> list[int]:
        """Split ``v`` as a sum of one vector per component."""
        if self._solver is None:
            self._coords = [(i, b) for i, comp in enumerate(self.components) for b in comp.basis]
            self._solver = gf2.LinearSolver([b for _, b in self._coords])
        coords = self._coords
        lam = self._solver.solve(v)
        if lam is None:
            raise ValueError("vector is outside the decomposed space")
        parts = [0] * len(self.components)
        for j, (i, b) in enumerate(coords):
            if (lam >> j) & 1:
                parts[i] ^= b
        return parts

    def to_json(self) -> str:
        n = (self.q - 1) ** 2
        w = -(-n // 4)
        return json.dumps(
            {
                "q": self.q,
                "components": [
                    {
                        "factor": c.label.bitstring(),
                        "degree": c.label.degree,
                        "multiplicity": c.multiplicity,
                        "rank": c.rank,
                        "basis": [format(b, f"0{w}x") for b in c.basis],
                    }
                    for c in self.components
                ],
            },
            indent=2,
        )


def _linear_cols(cyclic_generator):
    if getattr(cyclic_generator, "shift", 0):
        raise ValueError("cyclic generator must be linear (zero translation part)")
    return tuple(getattr(cyclic_generator, "cols", cyclic_generator))


def decompose(q: int, cyclic_generator) -> Decomposition:
    """Kernels of p(M) for each irreducible factor p of x^q - 1."""
    check_odd_prime(q)
    cols = _linear_cols(cyclic_generator)
    n = len(cols)
    ident = gf2.identity(n)
    if gf2.matpow(cols, q) != ident or cols == ident:
        raise OrderCheckFailed(f"generator does not have multiplicative order {q}")
    comps = []
    for p in factor_cyclotomic(q):
        basis = sorted(gf2.echelon(gf2.kernel(poly_of_matrix(p, cols))).values())
        for b in basis:
            if not gf2.in_span(gf2.echelon(basis), gf2.matvec(cols, b)):
                raise NotInvariant(f"ker {p} is not invariant")
        mult = len(basis) // p.degree
        if basis:
            comps.append(Component(p, mult, basis))
    dec = Decomposition(q, comps)
    if dec.total_rank != n or gf2.rank(b for c in comps for b in c.basis) != n:
        raise AssertionError("component kernels do not span the space")
    return dec


def preserves(cols, basis) -> bool:
    ech = gf2.echelon(basis)
    return all(gf2.in_span(ech, gf2.matvec(cols, b)) for b in basis)


def fixed_space_dim(affine_map, basis, shift: int | None = None):
    """Dimension of ``{z in span(basis) : M z + c = z}``, or None if empty.

    ``shift`` overrides the map's own translation part, which is how callers
    pass a component's share of it.
    """
    cols = affine_map.cols
    c = affine_map.shift if shift is None else shift
    basis = list(gf2.echelon(basis).values())
    if not preserves(cols, basis):
        raise NotInvariant("subspace is not invariant under the map's linear part")
    # (M - I) restricted to the subspace, in basis coordinates
    images = [gf2.matvec(cols, b) ^ b for b in basis]
    solver = gf2.LinearSolver(images)
    lam = solver.solve(c)
    if lam is None:
        return None
    return len(solver.kernel)
