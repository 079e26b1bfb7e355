"""Numerical comass of arbitrary 4-forms and rotation into the generator span.

The comass is the maximum of ``omega(q1, q2, q3, q4)`` over orthonormal
4-frames. We run Riemannian gradient ascent on the Stiefel manifold
V(8, 4) with Armijo backtracking and a QR retraction, from many
rotation-invariant random starts processed as one vectorized batch.

``normal_form`` searches for a rotation carrying a self-dual form into the
span of the seven generators by Levenberg-Marquardt on the off-span
residual, with left-trivialized updates ``g <- exp(X) g``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import scipy.linalg

from caliber.exterior import (
    GENERATORS, N, KForm, basis, evaluate, from_vector, is_self_dual,
    self_dual_project, to_span, to_vector,
)
from caliber.liealg import derivation_matrices, lambda_matrix, random_rotation

log = logging.getLogger(__name__)

DEFAULT_SEED = 20100513


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 200
    max_iters: int = 5000
    step: float = 0.1
    grad_tol: float = 1e-12
    value_tol: float = 1e-15
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.step > 0 and self.grad_tol > 0 and self.value_tol > 0):
            raise ValueError("step and tolerances must be positive")


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    value: float
    iterations: int
    converged: bool
    grad_norm: float


@dataclass
class ComassResult:
    value: float
    frame: np.ndarray               # 8 x 4, orthonormal columns
    per_restart: list[RestartOutcome] = field(default_factory=list)
    converged: bool = True
    best_restart: int = 0
    history: np.ndarray | None = None


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one restart, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def random_frame(rng: np.random.Generator) -> np.ndarray:
    """Haar-random point of V(8, 4)."""
    q, r = np.linalg.qr(rng.standard_normal((N, 4)))
    return q * np.sign(np.diag(r))


def alternating_tensor(omega: KForm) -> np.ndarray:
    """Full antisymmetric (8,8,8,8) array T with omega(v1..v4) = T[v1,v2,v3,v4]."""
    if omega.degree != 4:
        raise ValueError("alternating_tensor needs a 4-form")
    T = np.zeros((N,) * 4)
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(4))]
    for idx, c in omega:
        i = np.array(idx) - 1
        for p, s in perms:
            T[tuple(i[list(p)])] = s * float(c)
    return T


def _perm_sign(p) -> int:
    inv = sum(1 for a, b in itertools.combinations(p, 2) if a > b)
    return -1 if inv % 2 else 1


def _values_and_grads(T: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched objective and Euclidean gradient; Q has shape (n, 8, 4)."""
    q1, q2, q3, q4 = (Q[:, :, j] for j in range(4))
    t4 = np.einsum("abcd,nd->nabc", T, q4)
    t43 = np.einsum("nabc,nc->nab", t4, q3)
    g1 = np.einsum("nab,nb->na", t43, q2)
    g2 = np.einsum("nab,na->nb", t43, q1)
    t12 = np.einsum("abcd,na,nb->ncd", T, q1, q2)
    g3 = np.einsum("ncd,nd->nc", t12, q4)
    g4 = np.einsum("ncd,nc->nd", t12, q3)
    f = np.einsum("na,na->n", g1, q1)
    return f, np.stack([g1, g2, g3, g4], axis=2)


def _values(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.einsum("abcd,na,nb,nc,nd->n", T, Q[:, :, 0], Q[:, :, 1], Q[:, :, 2], Q[:, :, 3],
                     optimize=True)


def _retract(Q: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(Q)
    s = np.sign(np.diagonal(r, axis1=1, axis2=2))
    s[s == 0] = 1.0
    return q * s[:, None, :]


def _project(Q: np.ndarray, G: np.ndarray) -> np.ndarray:
    QtG = np.einsum("nai,naj->nij", Q, G)
    sym = 0.5 * (QtG + np.swapaxes(QtG, 1, 2))
    return G - Q @ sym


def comass_numeric(omega: KForm, cfg: SolverConfig | None = None, trace: bool = False) -> ComassResult:
    """Maximize |omega| over orthonormal 4-frames by batched Riemannian ascent.

    Each restart keeps its own step size; a step is accepted only when the
    Armijo condition holds, so every restart's objective is non-decreasing.
    With ``trace=True`` the per-iteration values are kept on the result
    as ``result.history`` (array of shape (iterations + 1, restarts)).
    """
    cfg = cfg or SolverConfig()
    if omega.degree != 4:
        raise ValueError("comass_numeric needs a 4-form")
    if not omega:
        raise ValueError("comass of the zero form is not searched numerically")
    T = alternating_tensor(omega)
    scale = float(np.max(np.abs(T)))
    n = cfg.restarts
    Q = np.stack([random_frame(restart_rng(cfg.seed, i)) for i in range(n)])
    f0 = _values(T, Q)
    Q[f0 < 0, :, 3] *= -1.0   # orient every start so the objective is >= 0

    f, G = _values_and_grads(T, Q)
    xi = _project(Q, G)
    gn2 = np.einsum("nai,nai->n", xi, xi)
    step = np.full(n, cfg.step)
    active = np.ones(n, dtype=bool)
    converged = np.zeros(n, dtype=bool)
    iters = np.zeros(n, dtype=int)
    sy_prev = np.zeros(n)
    ss_prev = np.zeros(n)
    history = [f.copy()] if trace else None
    armijo = 1e-4
    for _ in range(cfg.max_iters):
        done = np.sqrt(gn2) <= cfg.grad_tol * max(1.0, scale)
        converged |= active & done
        active &= ~done
        if not active.any():
            break
        idx = np.flatnonzero(active)
        # Barzilai-Borwein trial step where the last move saw negative curvature,
        # otherwise double the last accepted step; Armijo keeps the ascent monotone
        t = step[idx] * 2.0
        sy, ss = sy_prev[idx], ss_prev[idx]
        bb = (sy < 0) & (ss > 0)
        t[bb] = np.clip(ss[bb] / -sy[bb], 1e-8, 1e4)
        accepted = np.zeros(idx.size, dtype=bool)
        Qn = Q[idx].copy()
        fn = f[idx].copy()
        for _bt in range(60):
            todo = ~accepted
            if not todo.any():
                break
            sub = idx[todo]
            cand = _retract(Q[sub] + t[todo, None, None] * xi[sub])
            fc = _values(T, cand)
            ok = fc >= f[sub] + armijo * t[todo] * gn2[sub]
            pos = np.flatnonzero(todo)
            Qn[pos[ok]] = cand[ok]
            fn[pos[ok]] = fc[ok]
            accepted[pos[ok]] = True
            t[pos[~ok]] *= 0.5
        gain = fn - f[idx]
        stalled = ~accepted | (gain <= cfg.value_tol * np.maximum(1.0, np.abs(f[idx])))
        Q_old = Q[idx].copy()
        Q[idx[accepted]] = Qn[accepted]
        step[idx] = np.where(accepted, t, step[idx])
        iters[idx] += 1
        fa, Ga = _values_and_grads(T, Q[idx])
        f[idx] = np.where(accepted, fa, f[idx])
        xi_new = _project(Q[idx], Ga)
        dq = np.where(accepted[:, None, None], Qn - Q_old, 0.0)
        sy_prev[idx] = np.einsum("nai,nai->n", dq, xi_new - xi[idx])
        ss_prev[idx] = np.einsum("nai,nai->n", dq, dq)
        xi[idx] = xi_new
        gn2[idx] = np.einsum("nai,nai->n", xi[idx], xi[idx])
        converged[idx[stalled]] = True
        active[idx[stalled]] = False
        if trace:
            history.append(f.copy())

    outcomes = [
        RestartOutcome(i, float(f[i]), int(iters[i]), bool(converged[i]), float(np.sqrt(gn2[i])))
        for i in range(n)
    ]
    top = float(np.max(f))
    best = int(np.flatnonzero(f >= top - 1e-12)[0])
    result = ComassResult(
        value=float(f[best]), frame=Q[best].copy(), per_restart=outcomes,
        converged=bool(converged.any()), best_restart=best,
    )
    if trace:
        result.history = np.array(history)
    if not result.converged:
        log.warning("comass_numeric: no restart converged within %d iterations", cfg.max_iters)
    return result


@dataclass(frozen=True)
class FrameReport:
    frame: np.ndarray          # 8 x 4 orthonormal
    value: float               # omega evaluated on the frame
    plucker: KForm             # unit decomposable 4-vector q1 ^ q2 ^ q3 ^ q4 (as a form)
    projector: np.ndarray      # orthogonal projector onto the 4-plane
    consistent: bool           # value agrees with the solver's reported value


def calibrated_frame(omega: KForm, result: ComassResult, tol: float = 1e-12) -> FrameReport:
    """Report the maximizing 4-plane of a converged comass search."""
    if not result.converged:
        raise ValueError("calibrated_frame requires a converged result")
    Q = np.asarray(result.frame, dtype=float)
    value = evaluate(omega, *Q.T)
    idx = np.array(basis(4)) - 1
    plucker = from_vector(np.linalg.det(Q[idx]), 4)
    return FrameReport(
        frame=Q, value=float(value), plucker=plucker, projector=Q @ Q.T,
        consistent=abs(value - result.value) <= tol * max(1.0, abs(result.value)),
    )


# -- normal form -------------------------------------------------------------

@dataclass
class NormalFormResult:
    rotation: np.ndarray
    coeffs: tuple
    residual_norm: float
    success: bool
    attempts: int


_SPAN = None


def _span_projector() -> np.ndarray:
    global _SPAN
    if _SPAN is None:
        S = np.array([to_vector(s) for s in GENERATORS]) / np.sqrt(2.0)
        _SPAN = S.T @ S
    return _SPAN


def _skew_from_coords(x: np.ndarray) -> np.ndarray:
    X = np.zeros((N, N))
    iu = np.triu_indices(N, 1)
    X[iu] = x
    return X - X.T


def normal_form(omega: KForm, cfg: SolverConfig | None = None, rel_tol: float = 1e-8,
                lm_iters: int = 200) -> NormalFormResult:
    """Best-effort rotation of a self-dual form into the generator span.

    Returns the rotation g, the span coefficients of g.omega, the norm of its
    off-span component and a success flag (residual below ``rel_tol * |omega|``).
    Failure is a reported outcome carrying the best attempt.
    """
    cfg = cfg or SolverConfig(restarts=20)
    if omega.degree != 4:
        raise ValueError("normal_form needs a 4-form")
    if not is_self_dual(omega, tol=1e-10):
        raise ValueError("normal_form needs a self-dual form")
    w = to_vector(omega)
    wn = float(np.linalg.norm(w))
    if wn == 0:
        return NormalFormResult(np.eye(N), (0.0,) * 7, 0.0, True, 0)
    coeffs, residual = to_span(omega)
    if not residual:
        return NormalFormResult(np.eye(N), tuple(coeffs), 0.0, True, 0)

    P = _span_projector()
    Pperp = np.eye(len(w)) - P
    D = derivation_matrices(4)
    target = rel_tol * wn
    best = None
    for attempt in range(cfg.restarts):
        g = random_rotation(restart_rng(cfg.seed, attempt))
        eta = lambda_matrix(g) @ w
        r = Pperp @ eta
        cost = float(r @ r)
        lam = 1e-3
        for _ in range(lm_iters):
            # keep polishing past the success threshold down to round-off
            if np.sqrt(cost) <= 1e-13 * wn:
                break
            Jm = Pperp @ np.einsum("kij,j->ik", D, eta)   # 70 x 28
            JtJ = Jm.T @ Jm
            Jtr = Jm.T @ r
            improved = False
            while lam < 1e12:
                delta = np.linalg.solve(JtJ + lam * np.eye(28), -Jtr)
                gn = scipy.linalg.expm(_skew_from_coords(delta)) @ g
                eta_n = lambda_matrix(gn) @ w
                rn = Pperp @ eta_n
                cn = float(rn @ rn)
                if cn < cost:
                    g, eta, r, cost = gn, eta_n, rn, cn
                    lam = max(lam / 3.0, 1e-12)
                    improved = True
                    break
                lam *= 4.0
            if not improved:
                break
        res = float(np.sqrt(cost))
        if best is None or res < best[2]:
            best = (g, eta, res)
        if res <= target:
            break
    g, eta, res = best
    a = tuple(float(x) for x in np.array([to_vector(s) for s in GENERATORS]) @ eta / 2.0)
    return NormalFormResult(g, a, res, res <= target, attempt + 1)


# -- random forms --------------------------------------------------------------

FORM_CLASSES = ("span", "self_dual", "general")


def _random_rational(rng: np.random.Generator, size: int, num: int = 9, den: int = 6) -> list[Fraction]:
    nums = rng.integers(-num, num + 1, size=size)
    dens = rng.integers(1, den + 1, size=size)
    return [Fraction(int(a), int(b)) for a, b in zip(nums, dens)]


def random_span_coeffs(rng: np.random.Generator) -> tuple[Fraction, ...]:
    while True:
        c = tuple(_random_rational(rng, 7))
        if any(c):
            return c


def random_form(seed: int, kind: str = "self_dual") -> KForm:
    """Reproducible pseudo-random exact 4-form of the requested class."""
    from caliber.exterior import from_span
    rng = np.random.default_rng(seed)
    if kind == "span":
        return from_span(random_span_coeffs(rng))
    if kind not in FORM_CLASSES:
        raise ValueError(f"unknown form class {kind!r}; expected one of {FORM_CLASSES}")
    general = from_vector(_random_rational(rng, comb(N, 4)), 4)
    if kind == "general":
        return general
    return self_dual_project(general)
