import pytest

from ncgeom.algebra import abelian_lie, matrix_algebra, sl2, truncated_poly
from ncgeom.complexes import (CochainComplex, StructuralError, check_gda, cohomology, kunneth_report, scalar_gda,
                              tensor_gda, verify_homotopy)
from ncgeom.exact import ExactMatrix
from ncgeom.hochschild import scalar_cochain_gda, unit_homotopy
from ncgeom.lie_weil import exterior_gda


def test_d_squared_nonzero_is_rejected():
    one = ExactMatrix.identity(1)
    with pytest.raises(StructuralError):
        CochainComplex([1, 1, 1], [one, one])


def test_top_degree_without_exit_map_is_a_lower_bound():
    z = ExactMatrix.zeros(1, 1)
    h = cohomology(CochainComplex([1, 1], [z]))
    assert h.dims == [1, 1]
    assert h.lower_bound == [False, True] and h.truncated


def test_complete_complex_is_not_truncated():
    h = cohomology(CochainComplex([1, 1], [ExactMatrix.zeros(1, 1)], complete=True))
    assert not h.truncated


def test_exterior_algebra_is_a_gda():
    for g in (sl2(), abelian_lie(2)):
        rep = check_gda(exterior_gda(g))
        assert rep.ok


def test_scalar_cochains_of_an_algebra_form_a_gda():
    rep = check_gda(scalar_cochain_gda(truncated_poly(2), 3))
    assert rep.ok


def test_kunneth_with_abelian_and_sl2():
    # H(Lambda R^1) = (1, 1); H(sl2) = (1, 0, 0, 1)
    rep = kunneth_report(exterior_gda(abelian_lie(1)), exterior_gda(sl2()), 4)
    assert rep["ok"] and rep["tensor"] == [1, 1, 0, 1, 1]


def test_tensor_with_ground_field_is_neutral():
    g = exterior_gda(sl2())
    t = tensor_gda(scalar_gda(), g)
    assert t.dims == g.dims
    assert cohomology(t.complex()).dims == cohomology(g.complex()).dims


def test_unit_insertion_sign():
    # hand computation in degree 1: h(w) = w(1) lies in C^0 where d = 0, and h(dw)(x) = dw(1, x) = -w(x)
    from ncgeom.hochschild import unit_insertion_map
    a = matrix_algebra(2)
    g = scalar_cochain_gda(a, 2)
    h1, h2 = unit_insertion_map(a, 1), unit_insertion_map(a, 2)
    assert g.d[0].is_zero()
    assert g.d[0] @ h1 + h2 @ g.d[1] == ExactMatrix.identity(4).scale(-1)
    c = CochainComplex(g.dims, g.d)
    assert verify_homotopy(c, [None, unit_homotopy(a, 1), unit_homotopy(a, 2)], 1)
