"""Replays every reproducible claim as a pass/fail report.

Each ``check_*`` function implements one acceptance criterion at its fixed
tolerance and returns a :class:`Check`. ``verify_all`` runs them in a stable
order (optionally on a thread pool capped by ``CALIBER_THREADS``).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from caliber import catalog
from caliber.exterior import (
    KForm, basis, e, evaluate, from_span, hodge, inner, scalar_to_json, volume, wedge,
)
from caliber.liealg import (
    act_on_form, bracket, derive_on_form, exp_rotation, random_quarter_turn,
    random_rational_rotation, random_rotation, stabilizer_dim, torus, weight_constants,
)
from caliber.optimize import (
    DEFAULT_SEED, SolverConfig, comass_numeric, normal_form, random_form, random_span_coeffs,
)
from caliber.triality import (
    comass_exact, decompose_convex, extremality_check, frobenius2, norm2_span, psi,
    psi_inv, vertices, wirtinger_ratio,
)

F = Fraction


@dataclass
class VerifyConfig:
    seed: int = DEFAULT_SEED
    ratio_samples: int = 100_000
    table_samples: int = 10_000
    bracket_samples: int = 1_000
    property_samples: int = 1_000
    conjugations: int = 10
    numeric_forms: int = 100
    robustness_samples: int = 10_000
    rotations: int = 25
    self_dual_forms: int = 100
    solver: SolverConfig = field(default_factory=SolverConfig)

    @classmethod
    def quick(cls, seed: int = DEFAULT_SEED) -> "VerifyConfig":
        """Reduced sample sizes for smoke runs; tolerances are unchanged."""
        return cls(seed=seed, ratio_samples=2_000, table_samples=500, bracket_samples=100,
                   property_samples=100, conjugations=3, numeric_forms=5,
                   robustness_samples=1_000, rotations=3, self_dual_forms=5,
                   solver=SolverConfig(restarts=50, seed=seed))


@dataclass
class Check:
    claim_id: str
    claim: str               # the statement being replayed
    expected: object
    computed: object
    passed: bool
    tol: float | None = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tol = "" if self.tol is None else f" (tol {self.tol:g})"
        return f"[{status}] {self.claim_id}: {self.claim}: expected {self.expected}, computed {self.computed}{tol}"


@dataclass
class VerifyReport:
    checks: list[Check]
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self, timing: bool = False) -> dict:
        out = {
            "total": len(self.checks),
            "passed": sum(c.passed for c in self.checks),
            "failed": sum(not c.passed for c in self.checks),
        }
        if timing:
            out["wall_time_s"] = round(self.wall_time, 3)
        return out

    def to_dict(self, timing: bool = False) -> dict:
        return {"checks": [asdict(c) for c in self.checks], "summary": self.summary(timing)}


def _s(x):
    """Exact scalars as rational strings, everything else unchanged."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return scalar_to_json(x)
    if isinstance(x, (list, tuple)):
        return [_s(v) for v in x]
    return x


def _rng(cfg: VerifyConfig | None, salt: int) -> np.random.Generator:
    seed = (cfg or VerifyConfig()).seed
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1000 + salt,)))


# -- criterion 1 ---------------------------------------------------------------

def check_comass(cfg: VerifyConfig | None = None) -> Check:
    cay = catalog.cayley()
    cx = catalog.counterexamples()
    computed = {
        "cay": comass_exact(cay),
        "omega_plus": comass_exact(cx["omega_plus"].coeffs),
        "mu": comass_exact(cx["mu"].coeffs),
    }
    for v in vertices():
        computed[v.label] = comass_exact(v.coeffs)
    expected = {k: F(2) if k in ("omega_plus", "mu") else F(1) for k in computed}
    return Check(
        "C1-comass", "exact comass: Cayley form 1, counterexamples 2, all vertex forms 1",
        {k: _s(v) for k, v in expected.items()}, {k: _s(v) for k, v in computed.items()},
        computed == expected,
    )


# -- criterion 2 ---------------------------------------------------------------

def _extremal_sample(rng: np.random.Generator) -> tuple:
    """A random multiple of a random diagonal conjugate of +-(Cayley form)."""
    d = [F(7, 2)] + [F(-1, 2)] * 7
    perm = rng.permutation(8)
    lam = F(int(rng.integers(1, 10)), int(rng.integers(1, 10))) * int(rng.choice([-1, 1]))
    return tuple(lam * x for x in psi(tuple(d[k] for k in perm)))


def check_norm_ratio(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 2)
    cay = catalog.cayley()
    cay_form = from_span(cay)
    n2 = inner(cay_form, cay_form)
    ratio = wirtinger_ratio(cay)
    max_ratio = F(0)
    violations = mismatches = extremal = 0
    for i in range(cfg.ratio_samples):
        c = _extremal_sample(rng) if i % 100 == 0 else random_span_coeffs(rng)
        r = wirtinger_ratio(c)
        ext = extremality_check(c)
        extremal += ext
        max_ratio = max(max_ratio, r)
        violations += r > 14
        mismatches += (r == 14) != ext
    ok = n2 == 14 and ratio == 14 and violations == 0 and mismatches == 0
    return Check(
        "C2-norm-ratio",
        "|cay|^2 = 14, Wirtinger ratio 14 is maximal and attained exactly on extremal forms",
        {"norm2": "14", "ratio": "14", "max_ratio": "<= 14", "mismatches": 0},
        {"norm2": _s(n2), "ratio": _s(ratio), "max_ratio": _s(max_ratio),
         "mismatches": mismatches, "violations": violations},
        ok, details={"samples": cfg.ratio_samples, "extremal_samples": extremal},
    )


# -- criterion 3 ---------------------------------------------------------------

def check_constructions(cfg: VerifyConfig | None = None) -> Check:
    cay = from_span(catalog.cayley())
    eta2 = from_span(catalog.eta(2))
    slag = from_span(tuple((a + b) / 2 for a, b in zip(catalog.cayley(), catalog.eta(4))))
    computed = {
        "complex": catalog.build_from_complex() == cay,
        "quaternionic": catalog.build_from_quaternionic() == eta2,
        "special_lagrangian": catalog.special_lagrangian_product() == slag,
    }
    return Check(
        "C3-constructions",
        "complex and quaternionic constructions and the special Lagrangian product agree exactly",
        {k: True for k in computed}, computed, all(computed.values()),
    )


# -- criterion 4 ---------------------------------------------------------------

def _random_traceless(rng) -> tuple:
    d = [F(int(a), int(b)) for a, b in zip(rng.integers(-9, 10, 7), rng.integers(1, 7, 7))]
    return tuple(d) + (-sum(d),)


def check_triality_table(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 4)
    bad_inverse = bad_isometry = 0
    for _ in range(cfg.table_samples):
        c = random_span_coeffs(rng)
        d = psi_inv(c)
        bad_inverse += psi(d) != c
        bad_isometry += frobenius2(d) != norm2_span(c)
        t = _random_traceless(rng)
        bad_inverse += psi_inv(psi(t)) != t
        bad_isometry += frobenius2(t) != norm2_span(psi(t))
    cay_image = psi_inv(catalog.cayley())
    expected_image = (F(7, 2),) + (F(-1, 2),) * 7
    ok = bad_inverse == 0 and bad_isometry == 0 and cay_image == expected_image
    return Check(
        "C4-triality-table",
        "psi and psi_inv are exact mutual inverse isometries; psi_inv(cay) = 4 A_1",
        {"psi_inv(cay)": _s(expected_image), "failures": 0},
        {"psi_inv(cay)": _s(cay_image), "inverse_failures": bad_inverse,
         "isometry_failures": bad_isometry},
        ok, details={"samples": cfg.table_samples},
    )


# -- criterion 5 ---------------------------------------------------------------

def check_weights(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 5)
    wc = weight_constants()
    failures = 0
    for _ in range(cfg.bracket_samples):
        x = [F(int(a), int(b)) for a, b in zip(rng.integers(-20, 21, 4), rng.integers(1, 9, 4))]
        H = torus(x)
        for a in range(4):
            failures += not np.array_equal(bracket(H, wc.u[a]), wc.v[a] * (-2 * x[a]))
            failures += not np.array_equal(bracket(H, wc.v[a]), wc.u[a] * (2 * x[a]))
    g1 = exp_rotation(wc.E1, quarter_turns=1)
    S = [from_span(tuple(F(int(i == j)) for j in range(7))) for i in range(3)]
    swap = {
        "fixes e1234": act_on_form(g1, S[0]) == S[0],
        "e1256 -> e1278": act_on_form(g1, S[1]) == S[2],
        "e1278 -> e1256": act_on_form(g1, S[2]) == S[1],
    }
    return Check(
        "C5-weights",
        "torus brackets on u_a, v_a hold exactly; exp((pi/2)E1) fixes e^1234 and swaps e^1256, e^1278",
        {"bracket_failures": 0, **{k: True for k in swap}},
        {"bracket_failures": failures, **swap},
        failures == 0 and all(swap.values()), details={"samples": cfg.bracket_samples},
    )


# -- criterion 6 ---------------------------------------------------------------

def check_stabilizer(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 6)
    cay = from_span(catalog.cayley())
    dim = stabilizer_dim(cay)
    conj = [stabilizer_dim(act_on_form(random_quarter_turn(rng), cay)) for _ in range(cfg.conjugations)]
    return Check(
        "C6-stabilizer",
        "stabilizer of the Cayley form has dimension 21 = dim Spin(7), conjugation invariant",
        {"dim": 21, "conjugates": [21] * len(conj)}, {"dim": dim, "conjugates": conj},
        dim == 21 and all(d == 21 for d in conj),
    )


# -- criterion 7 ---------------------------------------------------------------

def check_numeric_oracle(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 7)
    worst = 0.0
    for _ in range(cfg.numeric_forms):
        c = random_span_coeffs(rng)
        got = comass_numeric(from_span(c), cfg.solver).value
        worst = max(worst, abs(got - float(comass_exact(c))))
    cay = from_span(catalog.cayley())
    res = comass_numeric(cay, cfg.solver)
    # the hard upper side: no unit quadruple may beat the reported value
    vecs = rng.standard_normal((cfg.robustness_samples, 4, 8))
    vecs /= np.linalg.norm(vecs, axis=2, keepdims=True)
    idx = np.array(basis(4)) - 1
    coeffs = np.array([float(cay[i]) for i in basis(4)])
    vals = np.linalg.det(np.transpose(vecs, (0, 2, 1))[:, idx]) @ coeffs
    robust_max = float(np.max(np.abs(vals)))
    ok = (worst < 1e-6 and 1 - 1e-4 <= res.value <= 1 + 1e-6
          and robust_max <= res.value + 1e-6)
    return Check(
        "C7-numeric-oracle",
        "numerical comass agrees with the exact formula; comass_numeric(cay) within [1-1e-4, 1+1e-6]",
        {"max_abs_diff": "< 1e-6", "cay": "1"},
        {"max_abs_diff": worst, "cay": res.value, "max_unit_quadruple": robust_max},
        ok, tol=1e-6, details={"forms": cfg.numeric_forms, "restarts": cfg.solver.restarts},
    )


# -- criterion 8 ---------------------------------------------------------------

def check_normal_form(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 8)
    nf_cfg = SolverConfig(restarts=20, seed=cfg.seed)
    cay = from_span(catalog.cayley())
    worst_res = worst_ratio = 0.0
    all_ok = True
    for _ in range(cfg.rotations):
        g = random_rotation(rng)
        out = normal_form(act_on_form(g, cay), nf_cfg)
        dr = abs(float(wirtinger_ratio(out.coeffs)) - 14.0)
        worst_res = max(worst_res, out.residual_norm)
        worst_ratio = max(worst_ratio, dr)
        all_ok &= out.success and out.residual_norm < 1e-8 and dr < 1e-6
    failures = 0
    for i in range(cfg.self_dual_forms):
        form = random_form(int(rng.integers(2**31)), "self_dual")
        failures += not normal_form(form, nf_cfg).success
    rate = failures / max(1, cfg.self_dual_forms)
    return Check(
        "C8-normal-form",
        "rotated Cayley forms return to the span with ratio 14; random self-dual failure rate reported",
        {"residual": "< 1e-8", "ratio_error": "< 1e-6", "failure_rate_target": "<= 0.05"},
        {"max_residual": worst_res, "max_ratio_error": worst_ratio, "failure_rate": rate},
        bool(all_ok), tol=1e-8,
        details={"rotations": cfg.rotations, "self_dual_forms": cfg.self_dual_forms,
                 "failure_rate_within_target": rate <= 0.05},
    )


# -- criterion 9 ---------------------------------------------------------------

def check_catalog(cfg: VerifyConfig | None = None, compare_golden: bool = True) -> Check:
    entries = catalog.catalog_entries()
    comass = [e.comass for e in entries]
    decomp_ok = [decompose_convex(e.coeffs) == catalog.weights_from_combination(e.combination)
                 for e in entries]
    golden_ok = catalog.catalog_table() == catalog.load_golden() if compare_golden else True
    ok = all(c == 1 for c in comass) and all(decomp_ok) and golden_ok
    return Check(
        "C9-catalog",
        "all nine orbit-type representatives have comass 1, decompose as printed, match the golden file",
        {"comass": ["1"] * 9, "decompositions": [True] * 9, "golden": True},
        {"comass": _s(comass), "decompositions": decomp_ok, "golden": golden_ok},
        ok,
    )


# -- criterion 10 ----------------------------------------------------------------

def random_exact_form(rng: np.random.Generator, k: int, max_terms: int = 6) -> KForm:
    b = basis(k)
    n = int(rng.integers(0, min(max_terms, len(b)) + 1))
    picks = rng.choice(len(b), size=n, replace=False) if n else []
    return KForm(k, {b[i]: F(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for i in picks})


def check_properties(cfg: VerifyConfig | None = None) -> Check:
    cfg = cfg or VerifyConfig()
    rng = _rng(cfg, 10)
    n = cfg.property_samples
    fails = dict.fromkeys(
        ["anticommutativity", "double_hodge", "inner_via_wedge", "isometry", "hodge_equivariance",
         "leibniz"], 0)
    vol = volume()
    sk_count = 0
    for i in range(n):
        k = int(rng.integers(0, 9))
        l = int(rng.integers(0, 9 - k))
        a, b = random_exact_form(rng, k), random_exact_form(rng, l)
        fails["anticommutativity"] += wedge(a, b) != wedge(b, a) * (-1) ** (k * l)
        fails["double_hodge"] += hodge(hodge(a)) != a * (-1) ** (k * (8 - k))
        a4, b4 = random_exact_form(rng, 4, 10), random_exact_form(rng, 4, 10)
        fails["inner_via_wedge"] += wedge(a4, hodge(b4)) != vol * inner(a4, b4)
        # mostly signed permutations; every 20th draw a dense rational rotation
        g = random_rational_rotation(rng) if i % 20 == 0 else random_quarter_turn(rng)
        ga, gb = act_on_form(g, a4), act_on_form(g, b4)
        fails["isometry"] += inner(ga, gb) != inner(a4, b4)
        fails["hodge_equivariance"] += act_on_form(g, hodge(a4)) != hodge(ga)
        X = np.zeros((8, 8), dtype=object)
        for p in range(8):
            for q in range(p + 1, 8):
                x = F(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
                X[p, q], X[q, p] = x, -x
        k2 = int(rng.integers(0, 5))
        c, d = random_exact_form(rng, k2), random_exact_form(rng, 4 - k2)
        lhs = derive_on_form(X, wedge(c, d))
        rhs = wedge(derive_on_form(X, c), d) + wedge(c, derive_on_form(X, d))
        fails["leibniz"] += lhs != rhs
        sk_count += 1
    return Check(
        "C10-properties",
        "exterior algebra identities, action isometry and Hodge equivariance, Leibniz rule (exact)",
        {k: 0 for k in fails}, fails, all(v == 0 for v in fails.values()),
        details={"samples": n},
    )


CHECKS = (
    check_comass, check_norm_ratio, check_constructions, check_triality_table, check_weights,
    check_stabilizer, check_numeric_oracle, check_normal_form, check_catalog, check_properties,
)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("CALIBER_THREADS", "1")))
    except ValueError:
        return 1


def verify_all(cfg: VerifyConfig | None = None) -> VerifyReport:
    cfg = cfg or VerifyConfig()
    start = time.perf_counter()
    workers = thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(lambda f: f(cfg), CHECKS))
    else:
        checks = [f(cfg) for f in CHECKS]
    return VerifyReport(checks, time.perf_counter() - start)
