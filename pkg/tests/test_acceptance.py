"""Acceptance gate: one test per criterion, each at its stated tolerance and time budget."""
import random

import numpy as np

from ncgeom.algebra import (associative_direct, associative_dsquared, gl, jacobi_direct, lie_dsquared,
                            matrix_algebra, perturb, perturb_lie, random_algebra, regular_bimodule, sl2,
                            truncated_poly)
from ncgeom.calculi import (UniversalCalculus, a_dual, bidual_map, diagram_check, kahler_check, contraction_check,
                            omega1_u, omega_diag, omega_Z)
from ncgeom.complexes import CochainComplex, check_gda, cohomology, kunneth_check, verify_homotopy_report, verify_operation
from ncgeom.connections import (first_order_symbols, first_order_test, flat_classify, is_flat, pauli_structure,
                                random_bimodule_pair, random_first_order, random_non_first_order, symplectic_mn)
from ncgeom.hochschild import basic_cohomology_A, hochschild_cohomology, scalar_cochain_gda, unit_homotopy
from ncgeom.lie_weil import ce_complex, exterior_gda, invariant_polynomials, random_lie, weil_build, weil_basic_cohomology, weil_cohomology
from ncgeom.ym import FloatConnection, census, finite_difference_error


def test_c01_associativity_and_jacobi_route_agreement(criterion):
    with criterion(1, "direct checks agree with d^2 = 0 on 200 algebra and 200 Lie tables", 30):
        rng = random.Random(2024)
        disagree, valid, broken = 0, 0, 0
        for k in range(200):
            a = random_algebra(rng)
            if k % 2:
                a = perturb(a, rng)
            x, y = associative_direct(a), associative_dsquared(a)
            disagree += x != y
            valid += x
            broken += not x
        for k in range(200):
            g = random_lie(rng)
            if k % 2 and g.dim > 1:
                g = perturb_lie(g, rng)
            x, y = jacobi_direct(g), lie_dsquared(g)
            disagree += x != y
            valid += x
            broken += not x
        assert disagree == 0
        # both outcomes actually occur
        assert valid >= 150 and broken >= 50


def test_c02_hochschild_m2(criterion):
    with criterion(2, "H(M_2, M_2) = (1,0,0,0), normalized = full", 60):
        a = matrix_algebra(2)
        res = hochschild_cohomology(a, regular_bimodule(a), 3)
        assert res.dims == [1, 0, 0, 0]
        assert res.normalized_dims == res.dims


def test_c03_triviality_homotopies(criterion):
    with criterion(3, "dh + hd = id on C(A) and kd + dk = id on Omega_u, degrees 1..4", 60):
        for a in (matrix_algebra(2), truncated_poly(2)):
            g = scalar_cochain_gda(a, 5)
            c = CochainComplex(g.dims, g.d)
            h = [None] + [unit_homotopy(a, n) for n in range(1, 6)]
            rep = verify_homotopy_report(c, h, 1)
            assert rep["ok"] and set(range(1, 5)) <= set(rep["checked_degrees"])
            rep = contraction_check(UniversalCalculus(a, 5), 4)
            assert rep["ok"] and set(range(1, 5)) <= set(rep["checked_degrees"])


def test_c04_chevalley_eilenberg(criterion):
    with criterion(4, "H(sl2) = (1,0,0,1), Kunneth for Lambda sl2* (x) Lambda sl2* to degree 4"):
        h = cohomology(ce_complex(sl2()))
        assert h.dims == [1, 0, 0, 1] and not h.truncated
        ext = exterior_gda(sl2())
        assert kunneth_check(ext, ext, 4)


def test_c05_basic_cohomology_m2(criterion):
    with criterion(5, "H_B(M_2) = (1,0,1,0,2), even degrees from invariant polynomials of gl(2)", 600):
        dims = basic_cohomology_A(matrix_algebra(2), 4)
        oracle = [invariant_polynomials(gl(2), n // 2).dim if n % 2 == 0 else 0 for n in range(5)]
        assert oracle == [1, 0, 1, 0, 2]
        assert dims == oracle


def test_c06_weil_sl2(criterion):
    with criterion(6, "W(sl2): gda and operation to degree 5, acyclic in 1..4, H_B = (1,0,0,0,1)"):
        w, op = weil_build(sl2(), 5)
        assert check_gda(w.gda).ok
        assert verify_operation(w.gda, op).ok
        assert weil_cohomology(sl2(), 4) == [1, 0, 0, 0, 0]
        rep = weil_basic_cohomology(sl2(), 4)
        assert rep.dims == [1, 0, 0, 0, 1]
        assert rep.expected == rep.dims


def test_c07_calculi(criterion):
    with criterion(7, "Omega_u(M_2) dims, Omega_u = Omega_Z = Omega_Diag, Kahler, dual identifications"):
        m2 = matrix_algebra(2)
        u = UniversalCalculus(m2, 3)
        assert u.dims == [4 * 3 ** n for n in range(4)]
        rep = diagram_check(m2, 2)
        assert rep.ok
        assert rep.dims["u"] == rep.dims["Z"] == rep.dims["Diag"] == [4, 12, 36]
        u2 = UniversalCalculus(m2, 2)
        for q in (omega_Z(u2), omega_diag(u2)):
            assert all(k.dim == 0 for k in q.killed)
        x3 = truncated_poly(3)
        assert omega_Z(x3, 2).dims[1] == 2
        assert kahler_check(x3, 2)
        om1 = omega1_u(m2)[0]
        bd = bidual_map(om1)
        assert om1.dim == bd.space.dim == 12
        assert bd.injective
        assert a_dual(om1).dim == 3


def test_c08_symplectic(criterion):
    with criterion(8, "symplectic structure of M_2 and M_3, exact"):
        for n in (2, 3):
            rep = symplectic_mn(n, quadruples=50)
            assert rep.ok, rep.checks


def test_c09_first_order_symbols(criterion):
    with criterion(9, "50 first-order operators recovered exactly, 50 non-first-order maps rejected"):
        rng = random.Random(7)
        recovered = rejected = 0
        while recovered < 50:
            m, n = random_bimodule_pair(rng)
            rep = first_order_symbols(m, n, random_first_order(m, n, rng))
            assert rep.is_first_order and rep.well_defined and rep.bimodule_homs
            assert rep.reconstruction_zero
            recovered += 1
        while rejected < 50:
            m, n = random_bimodule_pair(rng)
            D = random_non_first_order(m, n, rng)
            if D is None:
                continue
            assert not first_order_test(m, n, D)
            assert not first_order_symbols(m, n, D).is_first_order
            rejected += 1


def test_c10_flat_classification(criterion):
    with criterion(10, "flat classes for K = 1..4 are 1, 2, 3, 5 with distinct Casimir labels"):
        C = pauli_structure()
        for K, count in zip(range(1, 5), (1, 2, 3, 5)):
            rep = flat_classify(K)
            assert rep.count == count
            assert rep.labels_distinct
            for cl in rep.classes:
                assert is_flat(cl.A, C)
                assert cl.label == cl.partition


def test_c11_ym_flow(criterion):
    with criterion(11, "YM flow K = 3, 20 seeds: converged runs are flat and resolved, >= 2 classes", 120):
        rep = census(3, range(20), tol_grad=1e-9, tol_flat=1e-6)
        converged = [r for r in rep["runs"] if r["grad_norm"] < 1e-9]
        assert converged
        for r in converged:
            assert r["flat_residual"] < 1e-6
            assert r["class_label"] != "unresolved"
        labels = {tuple(r["class_label"]) for r in converged}
        assert len(labels) >= 2
        for seed in range(3):
            A = FloatConnection.random(3, 100 + seed).A
            assert finite_difference_error(A) < 1e-6
        assert np.isfinite(rep["runs"][0]["final_potential"])
