from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, strategies as st

from caliber import linalg

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(rows=st.integers(1, 6), cols=st.integers(1, 6)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(rationals, min_size=rc[1], max_size=rc[1]),
                            min_size=rc[0], max_size=rc[0]))


@given(matrices())
def test_rank_matches_sympy(m):
    assert linalg.rank(m) == sympy.Matrix(m).rank()


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 6), st.data())
def test_rank_of_products(r, inner, c, data):
    # products force rank deficiency, which random dense matrices rarely show
    a = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=inner, max_size=inner), min_size=r, max_size=r))
    b = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=inner, max_size=inner))
    prod = (sympy.Matrix(a) * sympy.Matrix(b)).tolist()
    assert linalg.rank(prod) == sympy.Matrix(prod).rank()


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(m):
    ncols = len(m[0])
    kernel = linalg.nullspace(m, ncols)
    assert len(kernel) == ncols - linalg.rank(m)
    for vec in kernel:
        assert all(sum(a * x for a, x in zip(row, vec)) == 0 for row in m)
    if kernel:
        assert linalg.rank(kernel) == len(kernel)


@given(st.integers(1, 5).flatmap(lambda n: matrices(st.just(n), st.just(n))))
def test_det_matches_sympy(m):
    assert linalg.det(m) == sympy.Matrix(m).det()


def test_rref_pivots():
    r, piv = linalg.rref([[2, 4, 0], [1, 2, 1]])
    assert piv == [0, 2]
    assert r[0] == [1, 2, 0] and r[1] == [0, 0, 1]


def test_solve_roundtrip():
    m = [[2, 1], [1, 3]]
    x = linalg.solve(m, [[1, 0], [0, 1]])
    assert x == [[F(3, 5), F(-1, 5)], [F(-1, 5), F(2, 5)]]


def test_solve_singular_raises():
    with pytest.raises(ZeroDivisionError):
        linalg.solve([[1, 2], [2, 4]], [[1], [1]])


def test_rank_rejects_floats():
    with pytest.raises(TypeError):
        linalg.rank([[0.5, 1.0]])


def test_empty_matrix_rank():
    assert linalg.rank([]) == 0
