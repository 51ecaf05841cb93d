from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncgeom.exact import (QI, ExactMatrix, Subspace, charpoly_coeffs, intersect, kernel, kron, parse_rat, rank,
                          rat_str, rref, solve, span, sum_spaces)

small = st.integers(-4, 4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5, complex_entries=True):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = []
    for _ in range(r):
        row = []
        for _ in range(c):
            re = draw(small)
            im = draw(small) if complex_entries else 0
            row.append(QI(re, im))
        rows.append(row)
    return ExactMatrix.from_rows(rows)


def test_gaussian_rational_field_ops():
    x, y = QI(Fraction(1, 2), 3), QI(-2, Fraction(1, 3))
    assert (x * y) / y == x
    assert x - x == QI(0)
    assert (x * x.conj()).im == 0
    assert QI(0, 1) * QI(0, 1) == QI(-1)


def test_rational_strings_round_trip():
    for s in ["3/4", "-7/2", "0/1", "5/1"]:
        assert rat_str(parse_rat(s)) == s
    assert rat_str(parse_rat(6)) == "6/1"
    with pytest.raises(ValueError):
        parse_rat("1/0")
    with pytest.raises((ValueError, TypeError)):
        parse_rat(0.5)


def test_rref_of_known_matrix():
    m = ExactMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    r, piv = rref(m)
    assert piv == [0, 1]
    assert rank(m) == 2


def test_complex_rank_differs_from_real_rank():
    # rows (1, i) and (i, -1) are C-dependent
    m = ExactMatrix.from_rows([[QI(1), QI(0, 1)], [QI(0, 1), QI(-1)]])
    assert rank(m) == 1


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel(m).dim == m.cols


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_is_annihilated(m):
    k = kernel(m)
    if k.dim:
        assert (m @ k.matrix).is_zero()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_finds_solutions_of_consistent_systems(m, data):
    x = ExactMatrix.column([QI(data.draw(small), data.draw(small)) for _ in range(m.cols)])
    b = m @ x
    y = solve(m, b)
    assert y is not None and m @ y == b


@settings(max_examples=40, deadline=None)
@given(matrices(4, 4), matrices(4, 4))
def test_kron_mixed_product(a, b):
    # (A (x) B)(A^H (x) B^H) = (A A^H) (x) (B B^H)
    assert kron(a, b) @ kron(a.H, b.H) == kron(a @ a.H, b @ b.H)


@settings(max_examples=40, deadline=None)
@given(matrices(4, 3), matrices(4, 3))
def test_subspace_dimension_formula(a, b):
    if a.rows != b.rows:
        return
    U, V = span(a), span(b)
    assert sum_spaces(U, V).dim + intersect(U, V).dim == U.dim + V.dim


def test_inconsistent_system_has_no_solution():
    m = ExactMatrix.from_rows([[1, 1], [1, 1]])
    assert solve(m, ExactMatrix.column([1, 2])) is None


def test_charpoly_of_pauli_z():
    m = ExactMatrix.from_rows([[1, 0], [0, -1]])
    assert charpoly_coeffs(m) == [QI(1), QI(0), QI(-1)]


def test_subspace_coords():
    s = Subspace(3, ExactMatrix.from_rows([[1, 0], [1, 1], [0, 1]]))
    v = ExactMatrix.column([2, 5, 3])
    c = s.coords(v)
    assert s.matrix @ c == v
    assert s.coords(ExactMatrix.column([1, 0, 0])) is None
