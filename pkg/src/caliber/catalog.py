"""Named forms: the Cayley form and its vertex siblings, the complex and
quaternionic constructions, the nine calibration orbit types and the two
comass-2 counterexamples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from caliber.exterior import KForm, e, from_span, scalar_to_json, to_span, wedge
from caliber.liealg import stabilizer_dim
from caliber.triality import (
    VERTEX_LABELS, combine, comass_exact, conjugate_to_face, decompose_convex,
    norm2_span, vertex, wirtinger_ratio,
)

F = Fraction


def cayley() -> tuple:
    return vertex("omega1").coeffs


def omega(j: int) -> tuple:
    if j not in (1, 2, 3, 4):
        raise IndexError(f"omega index {j} outside 1..4")
    return vertex(f"omega{j}").coeffs


def eta(j: int) -> tuple:
    if j not in (1, 2, 3, 4):
        raise IndexError(f"eta index {j} outside 1..4")
    return vertex(f"eta{j}").coeffs


# -- complex 1-forms as (real, imaginary) pairs -------------------------------

def _cwedge(a: tuple[KForm, KForm], b: tuple[KForm, KForm]) -> tuple[KForm, KForm]:
    (ar, ai), (br, bi) = a, b
    return wedge(ar, br) - wedge(ai, bi), wedge(ar, bi) + wedge(ai, br)


def _cproduct(factors) -> tuple[KForm, KForm]:
    out = factors[0]
    for f in factors[1:]:
        out = _cwedge(out, f)
    return out


def kahler_form_complex() -> KForm:
    """``omega_J = sum_a e_{2a-1} ^ e_{2a}``."""
    out = KForm(2)
    for a in range(1, 5):
        out = out + e(2 * a - 1, 2 * a)
    return out


def holomorphic_volume() -> tuple[KForm, KForm]:
    """``Omega_J = (e1 + i e2)(e3 + i e4)(e5 + i e6)(e7 + i e8)`` as (Re, Im)."""
    return _cproduct([(e(2 * a - 1), e(2 * a)) for a in range(1, 5)])


def build_from_complex() -> KForm:
    w = kahler_form_complex()
    re, _ = holomorphic_volume()
    return wedge(w, w) * F(1, 2) + re


def quaternionic_kahler_forms() -> tuple[KForm, KForm, KForm]:
    """Kahler forms of right multiplication by i, j, k on H + H."""
    w1 = e(1, 2) - e(3, 4) + e(5, 6) - e(7, 8)
    w2 = e(1, 3) - e(4, 2) + e(5, 7) - e(8, 6)
    w3 = e(1, 4) - e(2, 3) + e(5, 8) - e(6, 7)
    return w1, w2, w3


def build_from_quaternionic() -> KForm:
    w1, w2, w3 = quaternionic_kahler_forms()
    half = F(1, 2)
    return (wedge(w3, w3) - wedge(w1, w1) - wedge(w2, w2)) * half


def special_lagrangian_product() -> KForm:
    """``Re[(e1 + i e7)(e2 - i e8)(e3 + i e5)(e4 - i e6)]``."""
    re, _ = _cproduct([(e(1), e(7)), (e(2), -e(8)), (e(3), e(5)), (e(4), -e(6))])
    return re


def type22_product() -> KForm:
    """``(e12 + e78) ^ (e34 + e56)``."""
    return wedge(e(1, 2) + e(7, 8), e(3, 4) + e(5, 6))


# -- orbit-type catalog -----------------------------------------------------------

def _combo(**weights) -> dict[str, Fraction]:
    return {k: F(v) for k, v in weights.items()}


@dataclass(frozen=True)
class CatalogEntry:
    type_label: tuple[int, int]
    name: str
    combination: dict[str, Fraction]
    coeffs: tuple
    comass: Fraction
    norm2: Fraction
    ratio: Fraction
    stab_dim: int
    variants: dict[str, dict] = field(default_factory=dict)


_TYPES = [
    ((1, 0), "Cayley geometry", _combo(omega1=1)),
    ((2, 0), "Kahler 4-form", _combo(omega1=F(1, 2), omega2=F(1, 2))),
    ((3, 0), "Kraines form, quaternionic geometry",
     _combo(omega1=F(1, 3), omega2=F(1, 3), omega3=F(1, 3))),
    ((1, 1), "special Lagrangian geometry", _combo(omega1=F(1, 2), eta4=F(1, 2))),
    ((2, 1), "complex Lagrangian geometry",
     _combo(omega1=F(1, 4), omega2=F(1, 2), eta4=F(1, 4))),
    ((2, 2), "type (2,2)",
     _combo(omega1=F(1, 4), omega2=F(1, 4), eta3=F(1, 4), eta4=F(1, 4))),
    ((3, 1), "type (3,1)",
     _combo(omega1=F(1, 4), omega2=F(1, 4), omega3=F(1, 4), eta4=F(1, 4))),
    ((3, 2), "type (3,2)",
     _combo(omega1=F(1, 5), omega2=F(1, 5), omega3=F(1, 5), eta3=F(1, 5), eta4=F(1, 5))),
    ((3, 3), "type (3,3)",
     _combo(omega1=F(1, 6), omega2=F(1, 6), omega3=F(1, 6), eta2=F(1, 6), eta3=F(1, 6),
            eta4=F(1, 6))),
]

# The complex Lagrangian type has three representative expressions. The second
# one as printed repeats the Cayley term; it is kept as-is next to a normalized
# candidate without claiming which was intended.
_TYPE21_VARIANTS = {
    "phi": _combo(omega1=F(1, 4), omega2=F(1, 2), eta4=F(1, 4)),
    "mu": {
        "as_printed": [("omega1", F(1, 4)), ("omega1", F(1, 4)), ("eta4", F(1, 2))],
        "normalized": _combo(omega1=F(1, 4), omega2=F(1, 4), eta4=F(1, 2)),
    },
    "psi": _combo(omega1=F(1, 3), omega2=F(1, 3), eta4=F(1, 3)),
}


def weights_from_combination(combo) -> tuple[Fraction, ...]:
    """8-vector of vertex weights; accepts a dict or a list of (label, weight) pairs."""
    pairs = combo.items() if isinstance(combo, dict) else combo
    w = [F(0)] * 8
    for label, x in pairs:
        w[VERTEX_LABELS.index(label)] += x
    return tuple(w)


def coeffs_of(combo) -> tuple:
    return combine(weights_from_combination(combo))


def _summary(coeffs) -> dict:
    return {
        "coeffs": coeffs,
        "comass": comass_exact(coeffs),
        "norm2": norm2_span(coeffs),
        "ratio": wirtinger_ratio(coeffs),
        "decomposition": decompose_convex(coeffs),
    }


def catalog_entries() -> list[CatalogEntry]:
    out = []
    for label, name, combo in _TYPES:
        c = coeffs_of(combo)
        variants = {}
        if label == (2, 1):
            variants = {
                "phi": _summary(coeffs_of(_TYPE21_VARIANTS["phi"])),
                "mu_as_printed": _summary(coeffs_of(_TYPE21_VARIANTS["mu"]["as_printed"])),
                "mu_normalized": _summary(coeffs_of(_TYPE21_VARIANTS["mu"]["normalized"])),
                "psi": _summary(coeffs_of(_TYPE21_VARIANTS["psi"])),
            }
        out.append(CatalogEntry(
            type_label=label, name=name, combination=combo, coeffs=c,
            comass=comass_exact(c), norm2=norm2_span(c), ratio=wirtinger_ratio(c),
            stab_dim=stabilizer_dim(from_span(c)), variants=variants,
        ))
    return out


@dataclass(frozen=True)
class Counterexample:
    name: str
    coeffs: tuple
    combination: dict[str, Fraction]    # signed, not convex
    comass: Fraction
    half_conjugate: tuple               # conjugate of half the form on the comass-1 face
    half_weights: tuple                 # convex weights of that conjugate


def counterexamples() -> dict[str, Counterexample]:
    """The all-plus form and its sibling mu, both of comass 2.

    Each signed vertex identity is checked exactly; half of each form is
    conjugated (by a diagonal permutation on the matrix side) onto the
    comass-1 face and decomposed convexly there.
    """
    specs = {
        "omega_plus": ((1, 1, 1, 1, 1, 1, 1),
                       _combo(omega2=F(1, 2), omega4=F(-1, 2), eta1=F(1, 2), eta3=F(1, 2))),
        "mu": ((1, -1, 1, 1, 1, 1, 1),
               _combo(omega2=F(1, 2), omega3=F(1, 2), eta1=F(1, 2), eta4=F(-1, 2))),
    }
    out = {}
    for name, (raw, combo) in specs.items():
        c = tuple(F(x) for x in raw)
        if coeffs_of(combo) != c:
            raise AssertionError(f"vertex identity for {name} does not hold")
        half = tuple(x / 2 for x in c)
        conj, _ = conjugate_to_face(half)
        w = decompose_convex(conj)
        if w is None:
            raise AssertionError(f"half of {name} has no convex decomposition up to conjugacy")
        out[name] = Counterexample(name, c, combo, comass_exact(c), conj, w)
    return out


# -- golden file ------------------------------------------------------------------

GOLDEN_NAME = "catalog_golden.json"


def _jsonable(x):
    if isinstance(x, Fraction):
        return scalar_to_json(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def entry_to_dict(entry: CatalogEntry) -> dict:
    return _jsonable({
        "type": list(entry.type_label),
        "name": entry.name,
        "combination": entry.combination,
        "coeffs": entry.coeffs,
        "comass": entry.comass,
        "norm2": entry.norm2,
        "ratio": entry.ratio,
        "stab_dim": entry.stab_dim,
        "variants": {k: {kk: vv for kk, vv in v.items()} for k, v in entry.variants.items()},
    })


def catalog_table() -> list[dict]:
    return [entry_to_dict(x) for x in catalog_entries()]


def load_golden() -> list[dict]:
    text = resources.files("caliber").joinpath("data").joinpath(GOLDEN_NAME).read_text()
    return json.loads(text)


def write_golden(path: Path | None = None) -> Path:
    """Regenerate the golden file after re-checking the catalog invariants."""
    from caliber.verify import check_catalog, check_constructions, check_comass
    for result in (check_comass(), check_constructions(), check_catalog(compare_golden=False)):
        if not result.passed:
            raise RuntimeError(f"refusing to regenerate golden file: {result.claim_id} failed")
    path = path or Path(__file__).parent / "data" / GOLDEN_NAME
    table = catalog_table()
    path.write_text(json.dumps(table, indent=2) + "\n")
    return path


def markdown_table(entries: list[CatalogEntry] | None = None) -> str:
    entries = entries if entries is not None else catalog_entries()
    lines = [
        "| type | name | coefficients | comass | norm^2 | ratio | stabilizer dim |",
        "|---|---|---|---|---|---|---|",
    ]
    for x in entries:
        coeffs = ", ".join(scalar_to_json(c) for c in x.coeffs)
        lines.append(
            f"| ({x.type_label[0]},{x.type_label[1]}) | {x.name} | ({coeffs}) | "
            f"{scalar_to_json(x.comass)} | {scalar_to_json(x.norm2)} | "
            f"{scalar_to_json(x.ratio)} | {x.stab_dim} |"
        )
    return "\n".join(lines)


def as_form(coeffs) -> KForm:
    return from_span(coeffs)


def span_of(form: KForm) -> tuple:
    coeffs, residual = to_span(form)
    if residual:
        raise ValueError("form is not in the generator span")
    return coeffs


def kraines_candidate() -> KForm:
    """``(w1^2 + w2^2 + w3^2) / 6`` for the quaternionic Kahler forms."""
    w1, w2, w3 = quaternionic_kahler_forms()
    return (wedge(w1, w1) + wedge(w2, w2) + wedge(w3, w3)) * F(1, 6)

