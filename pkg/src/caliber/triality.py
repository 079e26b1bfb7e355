"""Triality transfer on the diagonal slice and the exact comass formula.

A self-dual form ``sum c_i S_i`` in the span of the seven generators is sent
to a traceless diagonal matrix by the intertwiner determined by

    psi(z_1) = 2 e^{1234},  psi(z_2) = 2 e^{1278},  psi(z_3) = 2 e^{1256},
    psi(u_j) = mu_j / 2,

where ``mu_j`` are the highest-weight family vectors written in the
``(e^{1357}, e^{1467}, e^{1368}, e^{1458})`` coordinates. The map is an
isometry (Frobenius norm on the matrix side) and the comass of the form
equals half the sum of the four largest diagonal entries of its image.

Diagonal matrices are represented by their 8 diagonal entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from caliber.linalg import is_exact

# sign vectors of mu_1..mu_4 over (e^{1357}, e^{1467}, e^{1368}, e^{1458})
MU_SIGNS = (
    (1, -1, -1, -1),
    (1, 1, -1, 1),
    (1, 1, 1, -1),
    (1, -1, 1, 1),
)
Z_DIAG = (
    (1, 1, 1, 1, -1, -1, -1, -1),
    (1, 1, -1, -1, -1, -1, 1, 1),
    (1, 1, -1, -1, 1, 1, -1, -1),
)
U_DIAG = tuple(
    tuple(1 if k == 2 * a else -1 if k == 2 * a + 1 else 0 for k in range(8)) for a in range(4)
)

VERTEX_LABELS = ("omega1", "omega2", "omega3", "omega4", "eta1", "eta2", "eta3", "eta4")

# Printed coefficient expansions of the eight vertex calibrations; omega1 is the Cayley form.
VERTEX_COEFFS = {
    "omega1": (1, 1, 1, 1, -1, -1, -1),
    "omega2": (1, 1, 1, -1, 1, 1, 1),
    "omega3": (1, -1, -1, 1, 1, -1, 1),
    "omega4": (1, -1, -1, -1, -1, 1, -1),
    "eta1": (1, -1, 1, 1, 1, 1, -1),
    "eta2": (1, -1, 1, -1, -1, -1, 1),
    "eta3": (1, 1, -1, 1, -1, 1, 1),
    "eta4": (1, 1, -1, -1, 1, -1, -1),
}


def _half(x):
    return x / 2 if is_exact(x) else x / 2.0


def _coerce(c: Sequence) -> tuple:
    if len(c) != 7:
        raise ValueError(f"span coefficients must have length 7, got {len(c)}")
    return tuple(Fraction(x) if isinstance(x, int) and not isinstance(x, bool) else x for x in c)


def psi_inv(c: Sequence) -> tuple:
    """Span coefficients -> diagonal of the corresponding traceless matrix."""
    c = _coerce(c)
    # e^{1234} -> z1/2, e^{1256} -> z3/2, e^{1278} -> z2/2
    zc = (_half(c[0]), _half(c[2]), _half(c[1]))
    a = c[3:]
    # mu_j components: (a . mu_j) / 4, and psi^{-1}(mu_j) = 2 u_j
    uc = [_half(sum(s * x for s, x in zip(signs, a))) for signs in MU_SIGNS]
    return tuple(
        sum(w * z[k] for w, z in zip(zc, Z_DIAG)) + sum(w * u[k] for w, u in zip(uc, U_DIAG))
        for k in range(8)
    )


def psi(d: Sequence) -> tuple:
    """Traceless diagonal -> span coefficients; exact inverse of ``psi_inv``."""
    if len(d) != 8:
        raise ValueError("diagonal must have 8 entries")
    d = tuple(Fraction(x) if isinstance(x, int) and not isinstance(x, bool) else x for x in d)
    tr = sum(d)
    if tr != 0 and not (not is_exact(tr) and abs(tr) < 1e-12 * max(1.0, max(abs(x) for x in d))):
        raise ValueError(f"diagonal has nonzero trace {tr}")
    exact = all(is_exact(x) for x in d)
    div = (lambda x, n: x / n) if exact else (lambda x, n: x / float(n))
    # orthogonal coordinates: alpha_i = <d, z_i>/8, beta_j = <d, u_j>/2
    alpha = [div(sum(z[k] * d[k] for k in range(8)), 8) for z in Z_DIAG]
    beta = [div(sum(u[k] * d[k] for k in range(8)), 2) for u in U_DIAG]
    tail = tuple(div(sum(b * signs[m] for b, signs in zip(beta, MU_SIGNS)), 2) for m in range(4))
    return (2 * alpha[0], 2 * alpha[2], 2 * alpha[1]) + tail


def comass_exact(c: Sequence):
    """Comass of ``sum c_i S_i``: half the sum of the 4 largest entries of psi_inv(c)."""
    d = sorted(psi_inv(c), reverse=True)
    return _half(sum(d[:4]))


def norm2_span(c: Sequence):
    """Euclidean norm squared of ``sum c_i S_i`` (each generator has norm^2 2)."""
    return 2 * sum(x * x for x in _coerce(c))


def wirtinger_ratio(c: Sequence):
    c = _coerce(c)
    if all(x == 0 for x in c):
        raise ValueError("Wirtinger ratio undefined for the zero form")
    m = comass_exact(c)
    return norm2_span(c) / (m * m)


def extremality_check(c: Sequence) -> bool:
    """True iff psi_inv(c) has eigenvalue pattern {7 l, -l x 7} for some l != 0.

    Equivalent to the Wirtinger ratio reaching its maximum 14.
    """
    c = _coerce(c)
    if all(x == 0 for x in c):
        raise ValueError("extremality undefined for the zero form")
    d = sorted(psi_inv(c))
    lo, hi = d[0], d[-1]
    # -l repeated 7 times with the remaining entry 7l
    if all(x == hi for x in d[1:]) and lo == -7 * hi:
        return True
    return all(x == lo for x in d[:-1]) and hi == -7 * lo


@dataclass(frozen=True)
class VertexForm:
    label: str
    coeffs: tuple
    matrix: tuple     # diagonal of +-A_k = psi_inv(coeffs) / 4
    position: int     # 0-based diagonal slot k of the +-7/8 entry
    sign: int         # +1 for A_k, -1 for -A_k


@lru_cache(maxsize=None)
def vertices() -> tuple[VertexForm, ...]:
    out = []
    for label in VERTEX_LABELS:
        coeffs = tuple(Fraction(x) for x in VERTEX_COEFFS[label])
        mat = tuple(x / 4 for x in psi_inv(coeffs))
        sign = 1 if max(mat) == Fraction(7, 8) else -1
        pos = mat.index(sign * Fraction(7, 8))
        expected = tuple(sign * (Fraction(int(k == pos)) - Fraction(1, 8)) for k in range(8))
        if mat != expected:
            raise AssertionError(f"vertex {label} is not +-A_k: {mat}")
        out.append(VertexForm(label, coeffs, mat, pos, sign))
    return tuple(out)


def vertex(label: str) -> VertexForm:
    return vertices()[VERTEX_LABELS.index(label)]


def combine(weights: Sequence) -> tuple:
    """Span coefficients of ``sum w_i * vertex_i``."""
    if len(weights) != 8:
        raise ValueError("need 8 weights")
    vs = vertices()
    return tuple(sum(w * v.coeffs[i] for w, v in zip(weights, vs)) for i in range(7))


def decompose_convex(c: Sequence):
    """Convex weights over the 8 vertex forms reproducing c, or None.

    The vertices span a 6-dimensional affine slice with a single affine
    relation, so the solution set is a segment; an endpoint of minimal
    support is returned, ties going to the lexicographically smallest
    support in the order omega1..omega4, eta1..eta4.
    """
    c = _coerce(c)
    if not all(is_exact(x) for x in c):
        raise TypeError("decompose_convex needs exact rational coefficients")
    d = psi_inv(c)
    vs = vertices()
    slot_sign = [0] * 8
    for v in vs:
        slot_sign[v.position] = v.sign
    # D = sum_i w_i s_i (4 D_{p_i} - I/2), so w_i = s_i (d_{p_i} + h) / 4 with
    # h = (sum_i s_i w_i) / 2 free, subject to sum_k s_k d_k = 4 and w >= 0.
    if sum(s * x for s, x in zip(slot_sign, d)) != 4:
        return None
    lo = max(-d[k] for k in range(8) if slot_sign[k] > 0)
    hi = min(-d[k] for k in range(8) if slot_sign[k] < 0)
    if lo > hi:
        return None

    def weights(h):
        return tuple(v.sign * (d[v.position] + h) / 4 for v in vs)

    candidates = [weights(lo)] if lo == hi else [weights(lo), weights(hi)]

    def key(w):
        support = tuple(i for i, x in enumerate(w) if x != 0)
        return (len(support), support)

    best = min(candidates, key=key)
    if combine(best) != tuple(c):
        raise AssertionError("convex decomposition failed to reconstruct its input")
    return best


def conjugate_to_face(c: Sequence) -> tuple[tuple, tuple[int, ...]]:
    """A conjugate of c whose diagonal image is sorted in decreasing order.

    Permuting the diagonal entries is induced by signed permutation matrices
    in SO(8), so the result lies in the same orbit. For comass-1 forms the
    result satisfies the face condition and admits a convex decomposition.
    Returns the new span coefficients and the permutation (new slot -> old slot).
    """
    d = psi_inv(c)
    perm = tuple(sorted(range(8), key=lambda k: (-d[k], k)))
    return psi(tuple(d[k] for k in perm)), perm


def decompose_up_to_conjugacy(c: Sequence):
    """Convex decomposition of a conjugate of c; returns (weights, conjugate) or None."""
    conj, _ = conjugate_to_face(c)
    w = decompose_convex(conj)
    return None if w is None else (w, conj)


def frobenius2(d: Sequence):
    return sum(x * x for x in d)
