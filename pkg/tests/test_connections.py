import random

import pytest

from ncgeom.algebra import derivations, mat_vec, matrix_algebra, regular_bimodule, truncated_poly
from ncgeom.calculi import DerCalculus, UniversalCalculus, derivation_lie
from ncgeom.connections import (ConnectionData, bimodule_sigma, casimir, casimir_partition, cayley_unitary,
                                classify_connection, connection_curvature, derivation_connection_check,
                                dual_connection, expected_mkn_curvature, first_order_space, first_order_symbols,
                                first_order_test, flat_classify, free_left_module, hermitian_checks, is_flat,
                                is_psd_exact, matrix_module, mkn_connection, mn_presentation, partition_representative,
                                partitions, pauli_structure, random_antihermitian, sl2_irrep, symplectic_mn)
from ncgeom.connections import _unvec
from ncgeom.exact import QI, ExactMatrix, kron


def test_m2_presentation_checks():
    pres = mn_presentation(2)
    assert pres.ok, pres.checks


def test_m3_has_no_normalized_rational_basis():
    with pytest.raises(ValueError, match="normalization failure"):
        mn_presentation(3)
    pres = mn_presentation(3, normalized=False, samples=2)
    assert pres.ok, pres.checks


@pytest.fixture(scope="module")
def pres2():
    return mn_presentation(2)


def _curvature(pres, A, K):
    conn = ConnectionData(K, 2, A)
    g = pres.calc.full
    rep = connection_curvature(g, matrix_module(K, 2), mkn_connection(pres, conn))
    return rep, conn


def test_curvature_matches_closed_form(pres2):
    rng = random.Random(1)
    for K in (1, 2):
        A = [random_antihermitian(K, rng) for _ in range(3)]
        rep, conn = _curvature(pres2, A, K)
        assert rep.leibniz_ok and rep.well_defined and rep.is_module_map
        assert rep.curvature == expected_mkn_curvature(pres2, conn, rep.forms2)
        assert rep.flat == is_flat(A, pres2.C)


def test_flat_representatives_have_zero_curvature(pres2):
    for p in ((2,), (1, 1), (2, 1)):
        A = partition_representative(p)
        rep, _ = _curvature(pres2, A, sum(p))
        assert rep.flat


def test_perturbed_representative_is_curved(pres2):
    A = partition_representative((2,))
    A[0] = A[0] + ExactMatrix.from_rows([[QI(0, 1), 0], [0, 0]])
    rep, _ = _curvature(pres2, A, 2)
    assert not rep.flat and not is_flat(A, pres2.C)


def test_hermitian_structure(pres2):
    good = hermitian_checks(pres2, ConnectionData(2, 2, partition_representative((2,))))
    assert good.sesquilinear and good.positive and good.compatible and good.antihermitian_potential
    bad_A = [ExactMatrix.identity(2)] * 3
    bad = hermitian_checks(pres2, ConnectionData(2, 2, bad_A))
    assert not bad.compatible and not bad.antihermitian_potential


def test_psd():
    assert is_psd_exact(ExactMatrix.from_rows([[2, QI(0, 1)], [QI(0, -1), 1]]))
    assert not is_psd_exact(ExactMatrix.from_rows([[1, 2], [2, 1]]))
    assert not is_psd_exact(ExactMatrix.from_rows([[0, 1], [1, 0]]))


def test_gauge_invariance_of_flatness_and_label():
    rng = random.Random(4)
    C = pauli_structure()
    for p in ((3,), (2, 1), (1, 1, 1)):
        A = partition_representative(p)
        U = cayley_unitary(random_antihermitian(3, rng))
        assert U.H @ U == ExactMatrix.identity(3)
        B = [U @ x @ U.H for x in A]
        assert is_flat(B, C)
        assert casimir_partition(casimir(B, C)) == p


def test_irreps_are_antihermitian_and_flat():
    C = pauli_structure()
    for d in range(1, 6):
        A = sl2_irrep(d)
        assert all(x.H == -x for x in A)
        assert is_flat(A, C)
        assert casimir_partition(casimir(A, C)) == (d,)


@pytest.mark.parametrize("K,count", [(1, 1), (2, 2), (3, 3), (4, 5), (5, 7)])
def test_flat_class_counts(K, count):
    assert len(partitions(K)) == count
    rep = flat_classify(K)
    assert rep.count == count and rep.ok


def test_classify_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not hermitian"):
        classify_connection([ExactMatrix.identity(2)] * 3)
    cl = classify_connection([ExactMatrix.identity(2)] * 3, require_hermitian=False)
    assert not cl.flat and cl.label is None


def test_flat_classify_only_for_n2():
    with pytest.raises(ValueError):
        flat_classify(2, n=3)


def test_symplectic_m2():
    rep = symplectic_mn(2, quadruples=10, triples=10)
    assert rep.ok, rep.checks


def _free_d_connection(a, g):
    """nabla(x) = dx (x) 1 on the free left module A."""
    D = a.dim
    cols = [kron(g.d[0] @ a.basis_vec(i), a.unit_vec) for i in range(D)]
    return ExactMatrix.hstack(cols, rows=g.dims[1] * D)


def test_dual_connection_on_free_module():
    for a in (truncated_poly(2), matrix_algebra(2)):
        g = UniversalCalculus(a, 2).gda
        m = free_left_module(a)
        dc = dual_connection(g, m, _free_d_connection(a, g))
        assert dc.space.dim == a.dim
        assert dc.leibniz_ok


def test_dual_connection_requires_left_module():
    a = matrix_algebra(2)
    g = DerCalculus(a, 2).full
    with pytest.raises(ValueError):
        dual_connection(g, matrix_module(1, 2), ExactMatrix.zeros(g.dims[1] * 2, 2))


def test_free_connection_is_flat_and_bimodule():
    a = truncated_poly(2)
    g = UniversalCalculus(a, 2).gda
    nabla = _free_d_connection(a, g)
    assert connection_curvature(g, free_left_module(a), nabla).flat
    res = bimodule_sigma(g, regular_bimodule(a), nabla)
    assert res.leibniz_ok and res.exists and res.bimodule_map


def test_derivation_connection_on_algebra_itself():
    for a in (matrix_algebra(2), truncated_poly(3)):
        der = derivation_lie(a)
        rep = derivation_connection_check(regular_bimodule(a), der, list(der.mats))
        assert rep.z_linear and rep.leibniz and rep.flat and rep.curvature_bimodule_linear


def test_derivation_connection_with_wrong_count():
    a = truncated_poly(3)
    der = derivation_lie(a)
    with pytest.raises(ValueError):
        derivation_connection_check(regular_bimodule(a), der, [])


def test_square_of_derivation_first_order_or_not():
    a = truncated_poly(3)
    reg = regular_bimodule(a)
    mats = derivations(a).der_mats()
    squares = [X @ X for X in mats]
    flags = sorted(first_order_test(reg, reg, S) for S in squares)
    assert flags == [False, True]
    for X in mats:
        assert first_order_test(reg, reg, X)
        rep = first_order_symbols(reg, reg, X)
        assert rep.is_first_order and rep.reconstruction_zero


def test_one_sided_multiplications_are_first_order():
    a = truncated_poly(3)
    reg = regular_bimodule(a)
    D = reg.left[1] @ reg.left[2]
    assert first_order_test(reg, reg, D)


def test_first_order_space_contains_bimodule_maps():
    a = matrix_algebra(2)
    reg = regular_bimodule(a)
    sp = first_order_space(reg, reg)
    rng = random.Random(0)
    assert sp.contains(mat_vec(ExactMatrix.identity(4)))
    # first-order maps of M_2 are l_a + r_b: 4 + 4 - 1 (scalars counted twice)
    assert sp.dim == 7
    for x in (reg.left[1], reg.right[2]):
        assert sp.contains(mat_vec(x))
    # [[l_a r_b, l_c], r_d] = l_[a,c] r_[b,d]
    assert not sp.contains(mat_vec(reg.left[1] @ reg.right[1]))
    for _ in range(5):
        c = ExactMatrix.column([rng.randint(-2, 2) for _ in range(sp.dim)])
        D = _unvec(sp.matrix @ c, 4, 4)
        assert first_order_test(reg, reg, D)


def test_trivial_connection_is_flat_and_hermitian(pres2):
    for K in (1, 2):
        rep, conn = _curvature(pres2, [], K)
        assert rep.leibniz_ok and rep.flat
        h = hermitian_checks(pres2, conn, samples=3)
        assert h.compatible and h.positive


@pytest.mark.parametrize("seed", range(3))
def test_every_universal_connection_admits_sigma(seed):
    rng = random.Random(seed)
    for a in (truncated_poly(2), matrix_algebra(2)):
        g = UniversalCalculus(a, 1).gda
        # nabla(x) = dx (x) 1 + x alpha (x) 1, alpha a random 1-form
        alpha = ExactMatrix.column([rng.randint(-2, 2) for _ in range(g.dims[1])])
        P01 = g.product(0, 1)
        nabla = _free_d_connection(a, g) + ExactMatrix.hstack(
            [kron(P01 @ kron(a.basis_vec(i), alpha), a.unit_vec) for i in range(a.dim)], rows=g.dims[1] * a.dim)
        res = bimodule_sigma(g, regular_bimodule(a), nabla)
        assert res.leibniz_ok and res.exists and res.bimodule_map


def test_left_module_homomorphism_has_zero_left_symbol():
    a = matrix_algebra(2)
    reg = regular_bimodule(a)
    rep = first_order_symbols(reg, reg, reg.right[1])
    assert rep.is_first_order and rep.reconstruction_zero and rep.sigma_L.is_zero()
