import json
from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix
from sympy.combinatorics import Permutation

from caliber.exterior import (
    GENERATOR_INDICES, GENERATORS, FormatError, KForm, basis, dumps_form, e, evaluate,
    from_span, from_vector, hodge, inner, is_self_dual, loads_form, norm2, self_dual_completion,
    self_dual_project, to_span, to_vector, volume, wedge, wedge_all,
)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def forms(draw, k=None):
    k = draw(st.integers(0, 8)) if k is None else k
    idx = draw(st.lists(st.sampled_from(basis(k)), unique=True, max_size=8))
    return KForm(k, {i: draw(rationals) for i in idx})


def test_basis_sizes():
    assert [len(basis(k)) for k in range(9)] == [1, 8, 28, 56, 70, 56, 28, 8, 1]


def test_e_sorts_with_sign():
    assert e(2, 1) == -e(1, 2)
    assert e(3, 1, 2) == e(1, 2, 3)
    assert not e(1, 1)


@pytest.mark.parametrize("bad", [{(2, 1): 1}, {(1, 1): 1}, {(0, 1): 1}, {(1, 9): 1}])
def test_constructor_rejects_bad_indices(bad):
    with pytest.raises(ValueError):
        KForm(2, bad)


def test_wedge_degree_overflow():
    with pytest.raises(ValueError):
        wedge(volume(), e(1))


@given(st.lists(st.lists(rationals, min_size=8, max_size=8), min_size=4, max_size=4),
       st.lists(st.lists(st.integers(-3, 3), min_size=8, max_size=8), min_size=4, max_size=4))
def test_wedge_of_covectors_is_determinant(covs, vecs):
    # oracle: (a1 ^ ... ^ a4)(v1..v4) = det[a_i(v_j)]
    ones = [from_vector(c, 1) for c in covs]
    w = wedge_all(ones)
    pairing = [[sum(a * x for a, x in zip(c, v)) for v in vecs] for c in covs]
    assert evaluate(w, *vecs) == Matrix(pairing).det()


def test_hodge_against_levi_civita():
    for k in range(9):
        for idx in basis(k):
            comp = tuple(i for i in range(1, 9) if i not in idx)
            sign = Permutation([i - 1 for i in idx + comp]).signature()
            assert hodge(e(*idx)) == e(*comp) * sign


def test_generators_are_plus_completions():
    # every generator index has Hodge sign +1, so S_I = e_I + e_{I^c}
    for idx, s in zip(GENERATOR_INDICES, GENERATORS):
        comp = tuple(i for i in range(1, 9) if i not in idx)
        assert s == e(*idx) + e(*comp)
        assert is_self_dual(s) and norm2(s) == 2
    for a, b in combinations(GENERATORS, 2):
        assert inner(a, b) == 0


@given(st.integers(0, 8).flatmap(lambda k: st.tuples(forms(k), forms(8 - k))))
def test_pairing_with_complement(pair):
    a, b = pair
    # c is the preimage of b under the Hodge star
    k = a.degree
    c = hodge(b) * (-1) ** (k * (8 - k))
    assert hodge(c) == b
    assert wedge(a, b) == volume() * inner(a, c)


@given(forms(), forms())
def test_anticommutativity(a, b):
    if a.degree + b.degree <= 8:
        assert wedge(a, b) == wedge(b, a) * (-1) ** (a.degree * b.degree)


@given(forms())
def test_double_hodge(a):
    assert hodge(hodge(a)) == a * (-1) ** (a.degree * (8 - a.degree))


@given(forms(4), forms(4))
def test_inner_via_wedge(a, b):
    assert wedge(a, hodge(b)) == volume() * inner(a, b)


@given(forms(1), forms(2), forms(3))
def test_wedge_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(forms(4))
def test_self_dual_projection(a):
    p = self_dual_project(a)
    assert is_self_dual(p)
    coeffs, res = to_span(p)
    assert from_span(coeffs) + res == p
    assert all(inner(res, s) == 0 for s in GENERATORS)


@given(forms(4))
def test_vector_roundtrip(a):
    assert from_vector(to_vector(a), 4) == KForm(4, {i: float(c) for i, c in a})


def test_float_evaluate_matches_exact(rng):
    a = self_dual_completion(1, 2, 3, 4) + self_dual_completion(1, 3, 5, 7) * F(1, 3)
    vecs = [list(map(int, rng.integers(-3, 4, 8))) for _ in range(4)]
    exact = evaluate(a, *vecs)
    fl = evaluate(KForm(4, {i: float(c) for i, c in a}), *[np.array(v, float) for v in vecs])
    assert fl == pytest.approx(float(exact), abs=1e-9)


@given(forms())
def test_json_roundtrip(a):
    assert loads_form(dumps_form(a)) == a


def test_json_example_format():
    text = '{"n":8, "k":4, "terms":[{"index":[1,2,3,4], "coeff":"3/2"}, {"index":[5,6,7,8], "coeff":2}]}'
    a = loads_form(text)
    assert a == e(1, 2, 3, 4) * F(3, 2) + e(5, 6, 7, 8) * 2
    assert json.loads(dumps_form(a))["terms"][0]["coeff"] == "3/2"


@pytest.mark.parametrize("payload, where", [
    ({"n": 8, "k": 4, "terms": [{"index": [1, 2, 3, 4], "coeff": 1}, {"index": [1, 2, 3, 4], "coeff": 2}]},
     "terms[1].index"),
    ({"n": 8, "k": 4, "terms": [{"index": [2, 1, 3, 4], "coeff": 1}]}, "terms[0].index"),
    ({"n": 8, "k": 4, "terms": [{"index": [1, 2, 3], "coeff": 1}]}, "terms[0].index"),
    ({"n": 8, "k": 4, "terms": [{"index": [1, 2, 3, 4], "coeff": "x/2"}]}, "terms[0].coeff"),
    ({"n": 7, "k": 4, "terms": []}, "n"),
    ({"n": 8, "k": 9, "terms": []}, "k"),
])
def test_format_errors_report_position(payload, where):
    with pytest.raises(FormatError, match=where.replace("[", r"\[").replace("]", r"\]")):
        loads_form(json.dumps(payload))


def test_syntax_error_carries_line_and_column():
    with pytest.raises(json.JSONDecodeError) as info:
        loads_form('{"n": 8,\n "k": }')
    assert info.value.lineno == 2
