import random
from math import comb

from hypothesis import given, settings, strategies as st

from ncgeom.algebra import abelian_lie, gl, sl2
from ncgeom.complexes import check_gda, cohomology, verify_operation
from ncgeom.lie_weil import (adjoint_module, ce_complex, invariant_polynomials, random_lie, weil_basic_cohomology,
                             weil_build, weil_cohomology)


def test_ce_of_abelian_is_exterior():
    for n in (1, 2, 3):
        assert cohomology(ce_complex(abelian_lie(n))).dims == [comb(n, k) for k in range(n + 1)]


def test_ce_of_sl2_with_adjoint_coefficients_vanishes():
    assert cohomology(ce_complex(sl2(), adjoint_module(sl2()))).dims == [0, 0, 0, 0]


def test_ce_of_gl2():
    # gl(2) = sl(2) + centre: (1,0,0,1) times (1,1)
    assert cohomology(ce_complex(gl(2))).dims == [1, 1, 0, 1, 1]


def test_invariant_polynomials():
    assert [invariant_polynomials(sl2(), n).dim for n in range(5)] == [1, 0, 1, 0, 1]
    # gl(2): generated by tr and tr^2 (degrees 1 and 2)
    assert [invariant_polynomials(gl(2), n).dim for n in range(4)] == [1, 1, 2, 2]
    assert [invariant_polynomials(abelian_lie(2), n).dim for n in range(3)] == [1, 2, 3]


def test_weil_sl2_horizontal_and_basic_in_degree_two():
    rep = weil_basic_cohomology(sl2(), 2)
    assert rep.horizontal_dims[2] == 3
    assert rep.basic_space_dims[2] == 0


def test_weil_abelian_basic_cohomology():
    rep = weil_basic_cohomology(abelian_lie(1), 4)
    assert rep.dims == [1, 0, 1, 0, 1] and rep.ok


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_weil_algebra_is_acyclic_and_operated(seed):
    g = random_lie(random.Random(seed), max_dim=3)
    w, op = weil_build(g, 3)
    assert check_gda(w.gda).ok
    assert verify_operation(w.gda, op).ok
    assert weil_cohomology(g, 2) == [1, 0, 0]
