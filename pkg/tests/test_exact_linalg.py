from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicpowers.core_matrix import build_magic_matrix
from magicpowers.exact_linalg import (
    ExactMatrix,
    IncrementalBasis,
    as_integer_rows,
    bareiss_rank,
    is_independent_columns,
    lemma_first_system,
    nullspace,
    nullspace_dim,
    rank,
)
from oracles import fraction_rank

small_ints = st.integers(-4, 4)
matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(matrices)
def test_three_routes_agree(m):
    expected = fraction_rank(m)
    assert rank(m) == expected
    assert rank(m, method="bareiss") == expected


@given(matrices, st.randoms(use_true_random=False))
def test_rank_invariant_under_permutation_and_transpose(m, rnd):
    r = rank(m)
    rows = list(m)
    rnd.shuffle(rows)
    perm = list(range(len(m[0])))
    rnd.shuffle(perm)
    permuted = [[row[k] for k in perm] for row in rows]
    assert rank(permuted) == r
    assert rank([list(c) for c in zip(*m)]) == r


@given(matrices)
def test_nullspace_is_kernel(m):
    basis = nullspace(m)
    assert len(basis) == nullspace_dim(m) == len(m[0]) - fraction_rank(m)
    for v in basis:
        assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in m)


def test_fraction_rows_are_scaled():
    rows = [[Fraction(1, 2), Fraction(1, 3)], [3, 2]]
    assert as_integer_rows(rows) == [[3, 2], [3, 2]]
    assert rank(rows) == 1
    assert ExactMatrix.from_rows(rows).entries == ((3, 2), (3, 2))


def test_unknown_method():
    with pytest.raises(ValueError):
        rank([[1]], method="float")


@pytest.mark.parametrize("n", [3, 4, 5, 6, 9])
def test_m0_rank_against_oracle(n):
    m = build_magic_matrix(n)
    assert rank(m) == bareiss_rank(m) == fraction_rank(m.entries) == 2 * n + 1


def test_incremental_basis_express():
    b = IncrementalBasis(track=True)
    assert b.add({0: 2, 1: 1}, "u")
    assert b.add({1: 3, 2: 1}, "v")
    assert not b.add({0: 4, 1: 5, 2: 1}, "w")
    coeffs = b.express({0: 4, 1: 5, 2: 1})
    assert coeffs == {"u": 2, "v": 1}
    assert b.express({2: 1}) is None
    assert b.in_span({0: 2, 1: 4, 2: 1})
    with pytest.raises(ValueError):
        IncrementalBasis().express({0: 1})


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=7))
def test_express_reconstructs(vectors):
    b = IncrementalBasis(track=True)
    dense = {}
    for k, v in enumerate(vectors):
        sparse = {i: x for i, x in enumerate(v) if x}
        if b.add(sparse, k):
            dense[k] = v
            continue
        coeffs = b.express(sparse)
        assert coeffs is not None
        recon = [sum(c * dense[lab][i] for lab, c in coeffs.items()) for i in range(5)]
        assert recon == v


def test_independence_queries():
    m = build_magic_matrix(4)
    refs = m.refs()
    assert is_independent_columns(m, refs[:4])
    assert not is_independent_columns(m, refs[:10])  # more columns than rows
    rnd = random.Random(3)
    for _ in range(20):
        idx = rnd.sample(range(16), 5)
        sub = [[row[k] for k in idx] for row in m.entries]
        assert is_independent_columns(m.entries, idx) == (fraction_rank(sub) == 5)
    with pytest.raises(ValueError):
        is_independent_columns(m.entries, [0, 0])


def test_pairing_system_shape_and_validation():
    rows = lemma_first_system(8, 2, 4, 7)
    assert len(rows) == 16 and all(len(r) == 16 for r in rows)
    assert all(sum(r) == 2 for r in rows[:-1]) and sum(rows[-1]) == 1
    with pytest.raises(ValueError):
        lemma_first_system(8, 3, 4, 5)
    with pytest.raises(ValueError):
        lemma_first_system(8, 1, 3, 8)  # i1 - 1 wraps onto i2


def test_pairing_system_trivial_kernel():
    assert nullspace_dim(lemma_first_system(8, 2, 4, 7)) == 0
