from fractions import Fraction as F

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, strategies as st

from caliber import catalog
from caliber.exterior import (
    GENERATORS, KForm, basis, e, from_span, hodge, inner, to_vector, wedge,
)
from caliber.liealg import (
    act_on_form, bracket, cayley_rotation, derivation_matrices, derive_on_form, exp_rotation,
    identity, infinitesimal_matrix, is_skew, lambda_matrix, mu_nu, random_quarter_turn,
    random_rational_rotation, random_rotation, skew_basis, stabilizer_basis, stabilizer_dim,
    torus, weight_constants,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def float_form(omega):
    return KForm(omega.degree, {i: float(c) for i, c in omega})


def test_skew_basis():
    sk = skew_basis()
    assert len(sk) == 28 and all(is_skew(X) for X in sk)


@given(st.lists(rationals, min_size=4, max_size=4))
def test_torus_brackets(x):
    wc = weight_constants()
    H = torus(x)
    for a in range(4):
        assert np.array_equal(bracket(H, wc.u[a]), wc.v[a] * (-2 * x[a]))
        assert np.array_equal(bracket(H, wc.v[a]), wc.u[a] * (2 * x[a]))
    for z in wc.z:
        assert not np.any(bracket(H, z))


def test_full_turn_is_identity():
    t1 = weight_constants().t[0]
    assert np.array_equal(exp_rotation(t1, quarter_turns=4), identity())
    assert np.allclose(exp_rotation(t1.astype(float) * 2 * np.pi), np.eye(8), atol=1e-12)


def test_quarter_turn_matches_float_expm():
    E1 = weight_constants().E1
    exact = exp_rotation(E1, quarter_turns=1).astype(float)
    assert np.allclose(exact, scipy.linalg.expm(E1.astype(float) * np.pi / 2), atol=1e-12)


def test_quarter_turn_requires_unit_eigen_angles():
    with pytest.raises(ValueError):
        exp_rotation(torus([1, 2, 0, 0]), quarter_turns=1)


def test_g1_swaps_generators():
    g1 = exp_rotation(weight_constants().E1, quarter_turns=1)
    s1234, s1256, s1278 = GENERATORS[:3]
    assert act_on_form(g1, s1234) == s1234
    assert act_on_form(g1, s1256) == s1278
    assert act_on_form(g1, s1278) == s1256


def test_torus_rotates_weight_plane():
    mu, nu = mu_nu()
    # quarter turn of t_1: s = pi/2
    g = exp_rotation(weight_constants().t[0], quarter_turns=1)
    assert act_on_form(g, mu[0]) == -nu[0]
    assert act_on_form(g, nu[0]) == mu[0]
    # generic angle: exp(s J) on (mu_1, nu_1), s = x1 + x2 + x3 + x4
    x = [0.3, -0.1, 0.7, 0.25]
    s = sum(x)
    g = exp_rotation(torus(x))
    got = to_vector(act_on_form(g, float_form(mu[0])))
    want = np.cos(s) * to_vector(mu[0]) - np.sin(s) * to_vector(nu[0])
    assert np.allclose(got, want, atol=1e-12)


def test_derivation_matches_finite_difference(rng):
    omega = from_span(catalog.omega(2)) + e(1, 2, 3, 5)
    for _ in range(5):
        X = rng.standard_normal((8, 8))
        X = X - X.T
        h = 1e-5
        plus = to_vector(act_on_form(scipy.linalg.expm(h * X), float_form(omega)))
        minus = to_vector(act_on_form(scipy.linalg.expm(-h * X), float_form(omega)))
        fd = (plus - minus) / (2 * h)
        assert np.allclose(to_vector(derive_on_form(X, float_form(omega))), fd, atol=1e-7)


def test_derivation_matrices_agree_with_derive(rng):
    D = derivation_matrices(4)
    omega = from_span(catalog.eta(3))
    for X, Dk in zip(skew_basis(), D):
        assert np.allclose(Dk @ to_vector(omega), to_vector(derive_on_form(X, omega)))


def test_lambda_matrix_matches_action(rng):
    g = random_rotation(rng)
    omega = float_form(from_span(catalog.cayley()) + e(1, 2, 3, 5))
    assert np.allclose(lambda_matrix(g) @ to_vector(omega), to_vector(act_on_form(g, omega)))


def test_action_is_homomorphism(rng):
    omega = e(1, 2, 3, 4) + e(2, 5, 6, 8) * F(1, 3)
    g, h = random_quarter_turn(rng), random_rational_rotation(rng)
    assert act_on_form(g @ h, omega) == act_on_form(g, act_on_form(h, omega))


def test_rational_rotation_is_special_orthogonal(rng):
    g = random_rational_rotation(rng)
    assert np.array_equal(g.T @ g, identity())
    assert sympy.Matrix(g.tolist()).det() == 1


def test_cayley_rotation_rejects_non_skew():
    with pytest.raises(ValueError):
        cayley_rotation(np.eye(8, dtype=int))


@given(st.integers(0, 4), st.data())
def test_leibniz(k, data):
    def small_form(deg):
        idx = data.draw(st.lists(st.sampled_from(basis(deg)), unique=True, max_size=4))
        return KForm(deg, {i: data.draw(rationals) for i in idx})

    a, b = small_form(k), small_form(4 - k)
    pairs = data.draw(st.lists(st.tuples(st.integers(0, 27), rationals), max_size=4))
    X = identity() * 0
    for p, c in pairs:
        X = X + skew_basis()[p] * c
    lhs = derive_on_form(X, wedge(a, b))
    assert lhs == wedge(derive_on_form(X, a), b) + wedge(a, derive_on_form(X, b))


def test_isometry_and_hodge_equivariance(rng):
    a = from_span(catalog.omega(3)) + e(1, 2, 3, 6) * F(2, 3)
    b = e(1, 4, 5, 7) - e(2, 3, 6, 8) * F(1, 2)
    for _ in range(5):
        g = random_rational_rotation(rng)
        assert inner(act_on_form(g, a), act_on_form(g, b)) == inner(a, b)
        assert act_on_form(g, hodge(a)) == hodge(act_on_form(g, a))


@pytest.mark.parametrize("form, dim", [
    (from_span(catalog.cayley()), 21),
    (wedge(catalog.kahler_form_complex(), catalog.kahler_form_complex()), 16),
    (e(1, 2, 3, 4), 12),
    (KForm(4), 28),
])
def test_stabilizer_dim_against_sympy(form, dim):
    assert stabilizer_dim(form) == dim
    assert 28 - sympy.Matrix(infinitesimal_matrix(form)).rank() == dim


def test_stabilizer_basis_annihilates():
    cay = from_span(catalog.cayley())
    basis_ = stabilizer_basis(cay)
    assert len(basis_) == 21
    for X in basis_:
        assert is_skew(X)
        assert not derive_on_form(X, cay)


def test_stabilizer_conjugation_invariant(rng):
    cay = from_span(catalog.cayley())
    for _ in range(3):
        assert stabilizer_dim(act_on_form(random_quarter_turn(rng), cay)) == 21
