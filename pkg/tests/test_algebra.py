import random

import pytest
from hypothesis import given, settings, strategies as st

from ncgeom.algebra import (Bimodule, FiniteAlgebra, StarBimodule, associative_direct, associative_dsquared, center,
                            change_basis, check_algebra, check_bimodule, check_lie, commutator_lie, derivations,
                            direct_sum, free_bimodule, gl, is_derivation, jacobi_direct, lie_dsquared, matrix_algebra,
                            octonions, outer_bimodule, perturb, random_algebra, random_invertible, regular_bimodule,
                            sl2, tensor_over, tensor_product, truncated_poly, upper_triangular)
from ncgeom.exact import QI, ExactMatrix


def test_matrix_algebra_passes_all_checks():
    rep = check_algebra(matrix_algebra(2))
    assert rep.ok and rep.routes_agree and rep.star is True


def test_octonions_fail_associativity_by_both_routes():
    o = octonions()
    assert not associative_direct(o)
    assert not associative_dsquared(o)


def test_unit_axiom_detects_wrong_unit():
    a = matrix_algebra(2)
    bad = FiniteAlgebra(4, a.mul, [QI(1), QI(0), QI(0), QI(0)])
    assert not check_algebra(bad).unit


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_associativity_routes_agree_on_random_tables(seed):
    rng = random.Random(seed)
    a = random_algebra(rng)
    assert associative_direct(a) and associative_dsquared(a)
    b = perturb(a, rng)
    assert associative_direct(b) == associative_dsquared(b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_basis_change_preserves_associativity(seed):
    rng = random.Random(seed)
    a = matrix_algebra(2)
    b = change_basis(a, random_invertible(4, rng))
    assert check_algebra(b).associative and check_algebra(b).unit


def test_sl2_and_gl2_are_lie_algebras():
    for g in (sl2(), gl(2), commutator_lie(upper_triangular(2))):
        rep = check_lie(g)
        assert rep.routes_agree and rep.ok
        assert jacobi_direct(g) == lie_dsquared(g)


def test_center_dimensions():
    assert center(matrix_algebra(2)).dim == 1
    assert center(truncated_poly(3)).dim == 3
    assert center(direct_sum(matrix_algebra(2), truncated_poly(1))).dim == 2
    assert center(upper_triangular(2)).dim == 1


def test_derivations_of_small_algebras():
    d = derivations(matrix_algebra(2))
    assert d.der.dim == 3 and d.out_dim == 0
    d = derivations(truncated_poly(2))
    assert d.der.dim == 1 and d.out_dim == 1
    d = derivations(truncated_poly(3))
    assert d.der.dim == 2
    for x in d.der_mats():
        assert is_derivation(truncated_poly(3), x)


def test_tensor_product_of_algebras():
    t = tensor_product(truncated_poly(2), matrix_algebra(2))
    assert t.dim == 8 and check_algebra(t).ok


def test_bimodule_axioms_and_failure():
    a = matrix_algebra(2)
    for m in (regular_bimodule(a), free_bimodule(a, 2), outer_bimodule(a)):
        assert all(check_bimodule(m).values())
    reg = regular_bimodule(a)
    bad = Bimodule(a, a, 4, reg.left, reg.left)
    assert not all(check_bimodule(bad).values())


def test_tensor_over_a_with_regular_is_identity():
    a = truncated_poly(3)
    reg = regular_bimodule(a)
    t = tensor_over(reg, reg)
    assert t.module.dim == a.dim


def test_tensor_over_m2_of_outer_products():
    # (A (x) A) (x)_A (A (x) A) = A (x) A (x) A
    a = matrix_algebra(2)
    o = outer_bimodule(a)
    assert tensor_over(o, o).module.dim == 64


def test_regular_star_bimodule():
    a = matrix_algebra(2)
    sb = StarBimodule(regular_bimodule(a), a.star)
    assert sb.check()


def test_bad_shapes_rejected():
    a = matrix_algebra(2)
    with pytest.raises(ValueError):
        Bimodule(a, a, 3, [ExactMatrix.identity(2)] * 4, [ExactMatrix.identity(3)] * 4)
