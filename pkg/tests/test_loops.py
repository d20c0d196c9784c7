import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import klein_four, random_relabel
from loopcount.cocycles import extend_vector
from loopcount.errors import NotNormal, OrderMismatch
from loopcount.loops import (
    CayleyTable,
    are_isomorphic,
    are_isotopic,
    center,
    cyclic_group,
    find_isotopy,
    is_loop,
    is_nilpotent,
    principal_isotope,
    quotient,
)


def test_is_loop_examples():
    z6 = [[(i + j) % 6 for j in range(6)] for i in range(6)]
    assert is_loop(z6)
    assert is_loop([[0, 1], [1, 0]])
    assert not is_loop([[0, 1], [1, 1]])


def test_is_loop_rejects_misplaced_identity():
    assert not is_loop([[1, 0], [0, 1]])
    assert not is_loop([[0, 1, 2], [1, 2, 0]])


def test_center_of_abelian_group(z6):
    assert center(z6) == frozenset(range(6))


def test_center_of_extensions_contains_kernel(q3_extensions):
    for t in q3_extensions:
        z = center(t)
        assert {0, 3} <= z


def test_nonassociative_extension_has_center_of_order_two(q3_extensions):
    # computed by definition: a q=3 extension is nonassociative iff its center is {0, 3}
    nonassoc = [t for t in q3_extensions if not (t.table[t.table] == t.table[:, t.table]).all()]
    assert nonassoc
    for t in nonassoc:
        assert center(t) == {0, 3}


def test_center_is_subloop(q3_extensions):
    for t in q3_extensions:
        z = sorted(center(t))
        for x, y in itertools.product(z, repeat=2):
            assert t(x, y) in z


def test_is_nilpotent_trivial_and_abelian(z6):
    assert is_nilpotent(CayleyTable([[0]])) == (True, 0)
    assert is_nilpotent(z6) == (True, 1)


def test_extensions_are_nilpotent_of_class_at_most_two(q3_extensions):
    for t in q3_extensions:
        ok, cls = is_nilpotent(t)
        assert ok and cls <= 2


def test_non_nilpotent_loop():
    # S3 has trivial center
    perms = list(itertools.permutations(range(3)))
    perms.sort(key=lambda p: p != (0, 1, 2))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(a[b[k]] for k in range(3))] for b in perms] for a in perms]
    assert is_nilpotent(CayleyTable(table)) == (False, 0)


def test_quotient_examples(z6):
    z3 = quotient(z6, {0, 3})
    assert z3.n == 3
    assert are_isomorphic(z3, cyclic_group(3)) is not None
    assert quotient(z6, range(6)) == CayleyTable([[0]])
    assert are_isomorphic(quotient(z6, {0}), z6) is not None


def test_quotient_rejects_non_normal():
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(a[b[k]] for k in range(3))] for b in perms] for a in perms]
    s3 = CayleyTable(table)
    transposition = next(i for i, p in enumerate(perms) if p == (1, 0, 2))
    with pytest.raises(NotNormal):
        quotient(s3, {0, transposition})


def test_isomorphism_examples(z6):
    rng = np.random.default_rng(1)
    other = random_relabel(z6, rng)
    phi = are_isomorphic(z6, other)
    assert phi is not None and phi[0] == 0
    p = np.array(phi)
    assert np.array_equal(p[z6.table], other.table[np.ix_(p, p)])
    assert are_isomorphic(cyclic_group(4), klein_four()) is None
    with pytest.raises(OrderMismatch):
        are_isomorphic(cyclic_group(4), z6)


def _brute_isomorphic(t1, t2):
    n = t1.n
    for rest in itertools.permutations(range(1, n)):
        p = np.array((0,) + rest)
        if np.array_equal(p[t1.table], t2.table[np.ix_(p, p)]):
            return True
    return False


def test_isomorphism_matches_brute_force_on_q3_extensions(q3_extensions):
    for t1, t2 in itertools.combinations(q3_extensions, 2):
        assert (are_isomorphic(t1, t2) is not None) == _brute_isomorphic(t1, t2)


def test_isomorphism_partition_of_q3_extensions(q3_extensions):
    classes = []
    for t in q3_extensions:
        for c in classes:
            if are_isomorphic(c[0], t) is not None:
                c.append(t)
                break
        else:
            classes.append([t])
    # frozen from the brute-force permutation search above
    assert sorted(len(c) for c in classes) == [4, 4, 8]


def test_principal_isotope_identity(q3_extensions):
    for t in q3_extensions:
        assert principal_isotope(t, 0, 0) == t


def test_principal_isotopes_are_loops(q3_extensions):
    for t in q3_extensions[:6]:
        for a, b in itertools.product(range(6), repeat=2):
            assert is_loop(principal_isotope(t, a, b).table)


def test_principal_isotopes_of_group_are_isomorphic(z6):
    for a, b in itertools.product(range(6), repeat=2):
        assert are_isomorphic(principal_isotope(z6, a, b), z6) is not None


def test_isotopy_is_reflexive_and_groups_follow_albert(z6):
    assert are_isotopic(z6, z6)
    s3 = _s3()
    assert not are_isotopic(z6, s3)
    with pytest.raises(OrderMismatch):
        are_isotopic(z6, cyclic_group(4))


def test_isotopy_witness_verifies(q3_extensions):
    t1, t2 = q3_extensions[1], q3_extensions[2]
    iso = find_isotopy(t1, t2)
    assert iso is not None and iso.verify(t1, t2)


def test_isotopy_partition_is_equivalence_and_coarser(q3_extensions):
    n = len(q3_extensions)
    rel = [[are_isotopic(a, b) for b in q3_extensions] for a in q3_extensions]
    for i in range(n):
        assert rel[i][i]
        for j in range(n):
            assert rel[i][j] == rel[j][i]
            if are_isomorphic(q3_extensions[i], q3_extensions[j]) is not None:
                assert rel[i][j]
            for k in range(n):
                if rel[i][j] and rel[j][k]:
                    assert rel[i][k]


def test_serialization_round_trip(q3_extensions):
    for t in q3_extensions:
        assert CayleyTable.from_json(t.to_json()) == t
        assert CayleyTable.from_text(t.to_text()) == t
    assert q3_extensions[5].to_json().startswith('{"n": 6, "table": [[0, 1, 2, 3, 4, 5]')


def _s3():
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    return CayleyTable([[idx[tuple(a[b[k]] for k in range(3))] for b in perms] for a in perms])


@settings(max_examples=60, deadline=None)
@given(v=st.integers(0, (1 << 16) - 1), seed=st.integers(0, 2**32 - 1))
def test_nilpotency_invariant_under_relabeling(v, seed):
    t = extend_vector(5, v)
    r = random_relabel(t, np.random.default_rng(seed))
    assert is_nilpotent(r) == is_nilpotent(t)
    assert are_isomorphic(t, r) is not None


@settings(max_examples=60, deadline=None)
@given(v=st.integers(0, (1 << 16) - 1), a=st.integers(0, 9), b=st.integers(0, 9))
def test_principal_isotope_is_loop_and_isotopic(v, a, b):
    t = extend_vector(5, v)
    p = principal_isotope(t, a, b)
    assert is_loop(p.table)
    z = sorted(center(t))
    for x, y in itertools.product(z, repeat=2):
        assert t(x, y) in z
