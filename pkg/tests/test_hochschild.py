import random

import pytest
from hypothesis import given, settings, strategies as st

from ncgeom.algebra import commutator_lie, matrix_algebra, regular_bimodule, truncated_poly
from ncgeom.exact import rank
from ncgeom.hochschild import (SizeError, antisymmetrizer, basic_cohomology_A, cup, cyclic_cohomology,
                               hochschild_cohomology, hochschild_d, hochschild_matrix, intertwining_residual,
                               invariant_cohomology_A, random_cochain, scalar_cochain_gda, tensor_reassociation)
from ncgeom.lie_weil import invariant_polynomials


def test_hochschild_of_dual_numbers():
    # periodic resolution: maps alternate 0 and 2x, so HH = (2, 1, 1, 1)
    res = hochschild_cohomology(truncated_poly(2), None, 3)
    assert res.dims == [2, 1, 1, 1]
    assert res.normalized_dims == res.dims


def test_hochschild_of_ground_field():
    assert hochschild_cohomology(truncated_poly(1), None, 3).dims == [1, 0, 0, 0]


def test_cyclic_cohomology_values():
    assert cyclic_cohomology(truncated_poly(1), 4) == [1, 0, 1, 0, 1]
    # Morita invariance: M_2 has the cyclic cohomology of C
    assert cyclic_cohomology(matrix_algebra(2), 3) == [1, 0, 1, 0]
    # reduced part of C[x]/(x^2) is one-dimensional in each even degree
    assert cyclic_cohomology(truncated_poly(2), 3) == [2, 0, 2, 0]


def test_invariant_cohomology_is_trivial():
    assert invariant_cohomology_A(matrix_algebra(2), 3) == [1, 0, 0, 0]


def test_basic_cohomology_of_ground_field_matches_polynomials():
    dims = basic_cohomology_A(truncated_poly(1), 4)
    lie = commutator_lie(truncated_poly(1))
    assert dims == [invariant_polynomials(lie, n // 2).dim if n % 2 == 0 else 0 for n in range(5)]


def test_image_of_antisymmetrizer_is_alternating_forms():
    a = matrix_algebra(2)
    assert [rank(antisymmetrizer(a, n)) for n in range(4)] == [1, 4, 6, 4]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_cyclic_intertwining(seed, n):
    rng = random.Random(seed)
    a = truncated_poly(2) if seed % 2 else matrix_algebra(2)
    w = random_cochain(rng, n, a.dim, 1)
    assert intertwining_residual(a, w).is_zero()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 2), st.integers(0, 1))
def test_hochschild_d_squared(seed, n, which):
    a = [truncated_poly(2), matrix_algebra(2)][which]
    m = regular_bimodule(a)
    assert (hochschild_matrix(a, m, n + 1) @ hochschild_matrix(a, m, n)).is_zero()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 2), st.integers(0, 1))
def test_cup_product_leibniz(seed, p, q):
    rng = random.Random(seed)
    a = truncated_poly(2)
    m = regular_bimodule(a)
    w1, w2 = random_cochain(rng, p, a.dim, m.dim), random_cochain(rng, q, a.dim, m.dim)
    c, t = cup(a, w1, m, w2, m)
    lhs = hochschild_d(a, t.module, c)
    r1, _ = cup(a, hochschild_d(a, m, w1), m, w2, m, t)
    r2, _ = cup(a, w1, m, hochschild_d(a, m, w2), m, t)
    rhs = r1 + r2.scale(-1 if p % 2 else 1)
    assert (lhs - rhs).is_zero()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cup_product_associative(seed):
    rng = random.Random(seed)
    a = truncated_poly(2)
    m = regular_bimodule(a)
    w = [random_cochain(rng, k, a.dim, m.dim) for k in (1, 1, 0)]
    mn, mn_p, np_, m_np, reassoc = tensor_reassociation(m, m, m)
    left, _ = cup(a, cup(a, w[0], m, w[1], m, mn)[0], mn.module, w[2], m, mn_p)
    right, _ = cup(a, w[0], m, cup(a, w[1], m, w[2], m, np_)[0], np_.module, m_np)
    assert reassoc @ left.as_matrix() == right.as_matrix()


def test_size_cap(monkeypatch):
    monkeypatch.setenv("NC_MAX_DIM", "100")
    with pytest.raises(SizeError):
        scalar_cochain_gda(matrix_algebra(2), 4)
