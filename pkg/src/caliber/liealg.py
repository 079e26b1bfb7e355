"""so(8), its torus and weight vectors, and the induced action on forms.

Matrices are numpy arrays: ``float`` dtype for numerical work and ``object``
dtype holding ``Fraction`` entries for exact work.

Action convention: a rotation ``g`` acts on covectors by
``(g.e)(v) = e(g^{-1} v)``, i.e. ``g.e_i = sum_j g[j, i] e_j``, extended
multiplicatively to all degrees. This is a left action. With it, the torus
element ``exp(sum x_i t_i)`` multiplies ``Omega_J`` by ``exp(i(x1+x2+x3+x4))``,
so on the real weight plane it sends ``mu_1 -> cos(s) mu_1 - sin(s) nu_1``
and ``nu_1 -> sin(s) mu_1 + cos(s) nu_1`` with ``s = x1+x2+x3+x4``; in the
basis (mu_1, nu_1) that is the matrix ``exp(s J)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
import scipy.linalg

from caliber import linalg
from caliber.exterior import N, KForm, basis, sort_sign, _basis_position, self_dual_completion

J2 = np.array([[0, 1], [-1, 0]], dtype=object)


def exact_matrix(rows) -> np.ndarray:
    """Object-dtype matrix of Fractions."""
    a = np.array(rows, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for ij in np.ndindex(a.shape):
        out[ij] = linalg.as_fraction(a[ij])
    return out


def is_exact_matrix(m) -> bool:
    m = np.asarray(m)
    return m.dtype == object and all(linalg.is_exact(x) for x in m.flat)


def identity(exact: bool = True) -> np.ndarray:
    if exact:
        return exact_matrix(np.eye(N, dtype=int))
    return np.eye(N)


def block_diag(*blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = exact_matrix(np.zeros((n, n), dtype=int))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = exact_matrix(b)
        i += k
    return out


def diag(entries) -> np.ndarray:
    m = exact_matrix(np.zeros((len(entries), len(entries)), dtype=int))
    for i, x in enumerate(entries):
        m[i, i] = linalg.as_fraction(x)
    return m


def torus(x) -> np.ndarray:
    """``sum x_i t_i = blockdiag(x1 J, x2 J, x3 J, x4 J)``."""
    if len(x) != 4:
        raise ValueError("torus coordinates are 4 numbers")
    if all(linalg.is_exact(v) for v in x):
        return block_diag(*(J2 * linalg.as_fraction(v) for v in x))
    return scipy.linalg.block_diag(*(J2.astype(float) * float(v) for v in x))


@dataclass(frozen=True)
class WeightConstants:
    u: tuple          # u_1..u_4, weight 2 x_a
    v: tuple          # v_1..v_4
    z: tuple          # zero-weight basis z_1, z_2, z_3
    t: tuple          # Cartan basis t_1..t_4
    E1: np.ndarray    # real root vectors for x_3 - x_4
    E2: np.ndarray


@lru_cache(maxsize=None)
def weight_constants() -> WeightConstants:
    U = np.array([[1, 0], [0, -1]])
    V = np.array([[0, 1], [1, 0]])
    Z2 = np.zeros((2, 2), dtype=int)
    I2 = np.eye(2, dtype=int)

    def at_block(a, m):
        blocks = [Z2] * 4
        blocks[a] = m
        return block_diag(*blocks)

    u = tuple(at_block(a, U) for a in range(4))
    v = tuple(at_block(a, V) for a in range(4))
    z = (
        diag([1, 1, 1, 1, -1, -1, -1, -1]),
        diag([1, 1, -1, -1, -1, -1, 1, 1]),
        diag([1, 1, -1, -1, 1, 1, -1, -1]),
    )
    t = tuple(torus([int(i == a) for i in range(4)]) for a in range(4))
    E1 = exact_matrix(np.zeros((N, N), dtype=int))
    E1[4:6, 6:8] = exact_matrix(I2)
    E1[6:8, 4:6] = exact_matrix(-I2)
    E2 = exact_matrix(np.zeros((N, N), dtype=int))
    E2[4:6, 6:8] = exact_matrix(J2)
    E2[6:8, 4:6] = exact_matrix(J2)
    return WeightConstants(u=u, v=v, z=z, t=t, E1=E1, E2=E2)


def skew_basis(exact: bool = True) -> list[np.ndarray]:
    """``E_ab = e_a e_b^T - e_b e_a^T`` for a < b (28 matrices)."""
    out = []
    for a, b in itertools.combinations(range(N), 2):
        m = np.zeros((N, N), dtype=int)
        m[a, b], m[b, a] = 1, -1
        out.append(exact_matrix(m) if exact else m.astype(float))
    return out


def is_skew(X, tol: float = 0.0) -> bool:
    X = np.asarray(X)
    if X.shape != (N, N):
        return False
    d = X + X.T
    if X.dtype == object:
        return all(x == 0 for x in d.flat)
    return bool(np.max(np.abs(d)) <= tol)


def bracket(X, A) -> np.ndarray:
    return X @ A - A @ X


def exp_rotation(X, quarter_turns: int | None = None) -> np.ndarray:
    """Matrix exponential of a skew matrix.

    With ``quarter_turns=k`` this returns ``exp(k*pi/2 * X)`` exactly, which
    requires ``X^3 = -X`` (all eigen-angles 0 or +-1), e.g. ``t_a`` or ``E_1``:
    ``exp(theta X) = I + sin(theta) X + (1 - cos(theta)) X^2``.
    Otherwise the float exponential is computed by scaling and squaring.
    """
    if quarter_turns is not None:
        Xe = exact_matrix(X)
        X2 = Xe @ Xe
        if not all(v == 0 for v in (X2 @ Xe + Xe).flat):
            raise ValueError("exact quarter-turn exponential needs X^3 = -X")
        s, c = [(0, 1), (1, 0), (0, -1), (-1, 0)][quarter_turns % 4]
        return identity() + Xe * s + X2 * (1 - c)
    Xf = np.asarray(X, dtype=float)
    if not is_skew(Xf, tol=1e-12 * max(1.0, np.max(np.abs(Xf)))):
        raise ValueError("exp_rotation expects a skew-symmetric matrix")
    return scipy.linalg.expm(Xf)


def _column_forms(g) -> list[dict[int, object]]:
    """Images g.e_i as sparse 1-forms {j: g[j, i]}."""
    exact = g.dtype == object
    cols = []
    for i in range(N):
        col = {}
        for j in range(N):
            x = g[j, i]
            if x != 0:
                col[j + 1] = x if exact else float(x)
        cols.append(col)
    return cols


def lambda_matrix(g, k: int = 4) -> np.ndarray:
    """Float matrix of the induced action on k-forms: ``M[J, I] = det g[J, I]``."""
    g = np.asarray(g, dtype=float)
    idx = np.array(basis(k), dtype=int).reshape(-1, k) - 1
    if k == 0:
        return np.ones((1, 1))
    sub = g[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def act_on_form(g, omega: KForm) -> KForm:
    """Induced left action of a rotation (any square 8x8 matrix) on a form."""
    g = np.asarray(g)
    if g.shape != (N, N):
        raise ValueError("rotation must be 8x8")
    k = omega.degree
    if g.dtype == object and omega.is_exact():
        cols = _column_forms(g)
        out: dict = {}
        for idx, c in omega:
            partial = {(): c}
            for i in idx:
                nxt: dict = {}
                for word, a in partial.items():
                    for j, b in cols[i - 1].items():
                        if j in word:
                            continue
                        key = word + (j,)
                        nxt[key] = nxt.get(key, 0) + a * b
                partial = nxt
            for word, a in partial.items():
                sign, s = sort_sign(word)
                out[s] = out.get(s, 0) + sign * a
        return KForm._trusted(k, out)
    from caliber.exterior import from_vector, to_vector
    return from_vector(lambda_matrix(g, k) @ to_vector(omega), k)


def derive_on_form(X, omega: KForm) -> KForm:
    """Infinitesimal action ``d/dt exp(tX).omega`` at t = 0, a derivation.

    Defined for every degree so that the Leibniz rule can be stated on
    wedge products; X must be an 8x8 skew matrix.
    """
    X = np.asarray(X)
    if X.shape != (N, N):
        raise ValueError("generator must be 8x8")
    if not is_skew(X, tol=1e-12):
        raise ValueError("generator must be skew-symmetric")
    if not isinstance(omega, KForm):
        raise TypeError("derive_on_form acts on KForm values")
    cols = _column_forms(X)
    out: dict = {}
    for idx, c in omega:
        for slot, i in enumerate(idx):
            for j, x in cols[i - 1].items():
                if j in idx:
                    continue
                word = idx[:slot] + (j,) + idx[slot + 1:]
                sign, s = sort_sign(word)
                out[s] = out.get(s, 0) + sign * c * x
    return KForm._trusted(omega.degree, out)


@lru_cache(maxsize=None)
def derivation_matrices(k: int = 4) -> np.ndarray:
    """Float matrices of ``derive_on_form(E_ab, .)`` on k-forms, shape (28, C(8,k), C(8,k))."""
    b = basis(k)
    pos = _basis_position(k)
    mats = np.zeros((28, comb(N, k), comb(N, k)))
    for n, X in enumerate(skew_basis()):
        for col, idx in enumerate(b):
            for row_idx, c in derive_on_form(X, KForm(k, {idx: 1})):
                mats[n, pos[row_idx], col] = float(c)
    return mats


def infinitesimal_matrix(omega: KForm) -> list[list[Fraction]]:
    """Exact matrix of ``X -> X.omega`` with rows over the k-form basis."""
    b = basis(omega.degree)
    cols = [derive_on_form(X, omega) for X in skew_basis()]
    return [[col[idx] for col in cols] for idx in b]


def stabilizer_dim(omega: KForm) -> int:
    """Dimension of the stabilizer algebra ``{X in so(8) : X.omega = 0}``."""
    if not omega.is_exact():
        raise ValueError("stabilizer_dim needs exact rational coefficients")
    return 28 - linalg.rank(infinitesimal_matrix(omega))


def stabilizer_basis(omega: KForm) -> list[np.ndarray]:
    """Exact basis of the stabilizer algebra as skew matrices."""
    if not omega.is_exact():
        raise ValueError("stabilizer_basis needs exact rational coefficients")
    kernel = linalg.nullspace(infinitesimal_matrix(omega), 28)
    sk = skew_basis()
    out = []
    for vec in kernel:
        m = exact_matrix(np.zeros((N, N), dtype=int))
        for a, X in zip(vec, sk):
            if a:
                m = m + X * a
        out.append(m)
    return out


def random_quarter_turn(rng: np.random.Generator, steps: int = 6) -> np.ndarray:
    """Exact rotation: product of random quarter turns in coordinate planes."""
    g = np.eye(N, dtype=int)
    planes = list(itertools.combinations(range(N), 2))
    for _ in range(steps):
        a, b = planes[int(rng.integers(len(planes)))]
        s, c = [(1, 0), (0, -1), (-1, 0)][int(rng.integers(1, 4)) - 1]
        r = np.eye(N, dtype=int)
        # exp(theta E_ab) with E_ab = e_a e_b^T - e_b e_a^T
        r[a, a] = r[b, b] = c
        r[a, b], r[b, a] = s, -s
        g = r @ g
    return exact_matrix(g)


def cayley_rotation(A) -> np.ndarray:
    """Exact rational rotation ``(I - A)(I + A)^{-1}`` from a rational skew A."""
    A = exact_matrix(A)
    if not is_skew(A):
        raise ValueError("Cayley transform needs a skew matrix")
    I = identity()
    inv = exact_matrix(linalg.solve((I + A).tolist(), I.tolist()))
    return (I - A) @ inv


def random_rational_rotation(rng: np.random.Generator, scale: int = 3) -> np.ndarray:
    A = exact_matrix(np.zeros((N, N), dtype=int))
    for a, b in itertools.combinations(range(N), 2):
        x = Fraction(int(rng.integers(-scale, scale + 1)), int(rng.integers(1, scale + 1)))
        A[a, b], A[b, a] = x, -x
    return cayley_rotation(A)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed float rotation in SO(8)."""
    q, r = np.linalg.qr(rng.standard_normal((N, N)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def mu_nu() -> tuple[tuple[KForm, ...], tuple[KForm, ...]]:
    """The four real weight planes (mu_j, nu_j) of the highest-weight family."""
    sd = self_dual_completion
    mu = (
        sd(1, 3, 5, 7) - sd(1, 4, 6, 7) - sd(1, 3, 6, 8) - sd(1, 4, 5, 8),
        sd(1, 3, 5, 7) + sd(1, 4, 6, 7) - sd(1, 3, 6, 8) + sd(1, 4, 5, 8),
        sd(1, 3, 5, 7) + sd(1, 4, 6, 7) + sd(1, 3, 6, 8) - sd(1, 4, 5, 8),
        sd(1, 3, 5, 7) - sd(1, 4, 6, 7) + sd(1, 3, 6, 8) + sd(1, 4, 5, 8),
    )
    nu = (
        -sd(1, 4, 6, 8) + sd(1, 3, 5, 8) + sd(1, 4, 5, 7) + sd(1, 3, 6, 7),
        -sd(1, 4, 6, 8) - sd(1, 3, 5, 8) + sd(1, 4, 5, 7) - sd(1, 3, 6, 7),
        -sd(1, 4, 6, 8) - sd(1, 3, 5, 8) - sd(1, 4, 5, 7) + sd(1, 3, 6, 7),
        -sd(1, 4, 6, 8) + sd(1, 3, 5, 8) - sd(1, 4, 5, 7) - sd(1, 3, 6, 7),
    )
    return mu, nu


__all__ = [
    "WeightConstants", "weight_constants", "bracket", "exp_rotation", "act_on_form",
    "derive_on_form", "stabilizer_dim", "stabilizer_basis", "skew_basis", "torus",
    "lambda_matrix", "derivation_matrices", "random_quarter_turn", "random_rotation",
    "random_rational_rotation", "cayley_rotation", "exact_matrix", "identity", "mu_nu",
]
