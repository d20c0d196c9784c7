import random
from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcount import gf2
from loopcount.action import AffineMap, automorphism, compile_generator
from loopcount.counting import cyclic_generator
from loopcount.errors import NotInvariant, NotOddPrime, OrderCheckFailed
from loopcount.ntheory import order_of_two
from loopcount.subspaces import (
    Gf2Poly,
    cyclotomic_cosets,
    decompose,
    factor_cyclotomic,
    fixed_space_dim,
    is_irreducible,
)

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


def poly(text):
    """Parse 'x^4+x+1' style strings."""
    c = 0
    for term in text.split("+"):
        term = term.strip()
        c |= 1 if term == "1" else 2 if term == "x" else 1 << int(term[2:])
    return Gf2Poly(c)


def test_factor_examples():
    assert factor_cyclotomic(3) == [poly("x+1"), poly("x^2+x+1")]
    assert factor_cyclotomic(5) == [poly("x+1"), poly("x^4+x^3+x^2+x+1")]
    f7 = factor_cyclotomic(7)
    assert [f.degree for f in f7] == [1, 3, 3]
    assert set(f7[1:]) == {poly("x^3+x+1"), poly("x^3+x^2+1")}
    with pytest.raises(NotOddPrime):
        factor_cyclotomic(9)
    with pytest.raises(NotOddPrime):
        factor_cyclotomic(2)


@pytest.mark.parametrize("q", SMALL_PRIMES)
def test_factorization_laws(q):
    factors = factor_cyclotomic(q)
    assert reduce(lambda a, b: a * b, factors) == Gf2Poly.x_pow_minus_one(q)
    assert all(is_irreducible(f) for f in factors)
    d = order_of_two(q)
    assert sorted(f.degree for f in factors) == [1] + [d] * ((q - 1) // d)
    assert len(set(factors)) == len(factors)


def test_cyclotomic_cosets():
    assert cyclotomic_cosets(7) == [[0], [1, 2, 4], [3, 5, 6]]
    assert cyclotomic_cosets(5) == [[0], [1, 2, 3, 4]]


def test_irreducibility_check():
    assert is_irreducible(poly("x^2+x+1"))
    assert not is_irreducible(poly("x^2+1"))
    assert not is_irreducible(Gf2Poly(1))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 1 << 12), st.integers(1, 1 << 8))
def test_poly_division(a, b):
    pa, pb = Gf2Poly(a), Gf2Poly(b)
    qt, r = divmod(pa, pb)
    assert qt * pb + r == pa
    assert r.coeffs == 0 or r.degree < pb.degree


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 1 << 8), st.integers(1, 1 << 8))
def test_poly_gcd_divides(a, b):
    g = Gf2Poly(a).gcd(Gf2Poly(b))
    assert not Gf2Poly(a) % g and not Gf2Poly(b) % g


def test_poly_formatting():
    p = poly("x^4+x+1")
    assert str(p) == "x^4+x+1"
    assert p.bitstring() == "11001"
    assert Gf2Poly.from_bits([1, 1, 0, 0, 1]) == p


def test_decompose_q3():
    dec = decompose(3, cyclic_generator(3))
    assert dec.total_rank == 4
    assert gf2.rank(b for c in dec.components for b in c.basis) == 4
    assert [str(c.label) for c in dec.components] == ["x+1", "x^2+x+1"]


@pytest.mark.parametrize("q", [3, 5, 7])
def test_components_are_invariant(q):
    m = cyclic_generator(q)
    dec = decompose(q, m)
    assert dec.total_rank == (q - 1) ** 2
    for comp in dec.components:
        ech = gf2.echelon(comp.basis)
        assert all(gf2.in_span(ech, m(b)) for b in comp.basis)
        assert comp.rank == comp.multiplicity * comp.label.degree


def test_decompose_rejects_wrong_order():
    with pytest.raises(OrderCheckFailed):
        decompose(5, compile_generator(automorphism(2), 5))
    with pytest.raises(OrderCheckFailed):
        decompose(3, AffineMap.identity(4))


def test_ranks_are_similarity_invariant():
    rng = random.Random(11)
    q = 5
    m = cyclic_generator(q)
    base = [c.rank for c in decompose(q, m).components]
    for _ in range(5):
        while True:
            p = tuple(rng.getrandbits(16) for _ in range(16))
            if gf2.rank(p) == 16:
                break
        conj = gf2.matmul(p, gf2.matmul(m.cols, gf2.inverse(p)))
        assert [c.rank for c in decompose(q, AffineMap(conj)).components] == base


def test_project_splits_vectors():
    dec = decompose(7, cyclic_generator(7))
    rng = random.Random(2)
    for _ in range(20):
        v = rng.getrandbits(36)
        parts = dec.project(v)
        assert reduce(lambda a, b: a ^ b, parts) == v
        for part, comp in zip(parts, dec.components):
            assert gf2.in_span(gf2.echelon(comp.basis), part)


def test_fixed_space_dim_examples():
    basis = [0b0011, 0b0100]
    ident = AffineMap.identity(4)
    assert fixed_space_dim(ident, basis) == 2
    assert fixed_space_dim(AffineMap(ident.cols, 0b1000), basis) is None
    dec = decompose(3, cyclic_generator(3))
    trivial = dec.components[0]
    assert str(trivial.label) == "x+1"
    assert fixed_space_dim(cyclic_generator(3), trivial.basis) == trivial.rank
    with pytest.raises(NotInvariant):
        fixed_space_dim(compile_generator(automorphism(2), 5), [1])


def test_fixed_space_dim_matches_enumeration():
    q = 5
    dec = decompose(q, cyclic_generator(q))
    m = cyclic_generator(q)
    for comp in dec.components:
        span = {0}
        for b in comp.basis:
            span |= {s ^ b for s in span}
        fixed = sum(1 for v in span if m(v) == v)
        assert 1 << fixed_space_dim(m, comp.basis) == fixed


def test_decomposition_json():
    import json

    data = json.loads(decompose(7, cyclic_generator(7)).to_json())
    assert [c["degree"] for c in data["components"]] == [1, 3, 3]
    assert sum(c["rank"] for c in data["components"]) == 36
    assert all(len(h) == 9 for c in data["components"] for h in c["basis"])
