"""Exterior algebra of R^8 with exact coefficients.

Forms are sparse maps from strictly increasing multi-indices (1-based) to
coefficients. Coefficients are ``Fraction`` whenever the inputs are exact;
floats are tolerated so that the same code paths serve the numerical
modules, but every identity here is meant to hold exactly on rationals.

Conventions, fixed globally:

* the increasing-index basis ``e_I`` of each exterior power is orthonormal
  (no 1/k! factor), so ``|e^{1234}|^2 = 2`` and ``|cay|^2 = 14``;
* the orientation is ``vol = e_1 ^ ... ^ e_8`` and ``a ^ *b = <a, b> vol``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Number
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from caliber.linalg import as_fraction, det, is_exact

N = 8

MultiIndex = tuple[int, ...]

# Self-dual generators of the maximal abelian slice, in the fixed order used
# for all span coefficient vectors.
GENERATOR_INDICES: tuple[MultiIndex, ...] = (
    (1, 2, 3, 4),
    (1, 2, 5, 6),
    (1, 2, 7, 8),
    (1, 3, 5, 7),
    (1, 4, 6, 7),
    (1, 3, 6, 8),
    (1, 4, 5, 8),
)

SpanCoeffs = tuple  # 7 scalars over GENERATOR_INDICES


class FormatError(ValueError):
    """Malformed serialized form; the message carries the offending position."""


def check_index(index: Sequence[int]) -> MultiIndex:
    idx = tuple(index)
    if len(idx) > N:
        raise ValueError(f"multi-index {idx} longer than {N}")
    for i in idx:
        if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= N:
            raise ValueError(f"index entry {i!r} outside 1..{N}")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError(f"multi-index {idx} not strictly increasing")
    return idx


def sort_sign(index: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sign of the sorting permutation and the sorted index; sign 0 on repeats."""
    idx = list(index)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(idx, 2) if a > b)
    return (-1) ** inversions, tuple(sorted(idx))


def basis(k: int) -> list[MultiIndex]:
    """Increasing multi-indices of length k in lexicographic order."""
    return list(itertools.combinations(range(1, N + 1), k))


@lru_cache(maxsize=None)
def _basis_position(k: int) -> dict[MultiIndex, int]:
    return {idx: i for i, idx in enumerate(basis(k))}


def _normalize_scalar(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, float)):
        return c
    if isinstance(c, np.floating):
        return float(c)
    if isinstance(c, np.integer):
        return Fraction(int(c))
    if isinstance(c, Number):
        return c
    raise TypeError(f"unsupported coefficient {c!r}")


class KForm:
    """An alternating k-form on R^8 in canonical sparse form.

    Instances are immutable; arithmetic returns new forms.
    """

    __slots__ = ("_degree", "_coeffs")

    def __init__(self, degree: int, coeffs: Mapping[Sequence[int], object] | None = None):
        if not 0 <= degree <= N:
            raise ValueError(f"degree {degree} outside 0..{N}")
        clean: dict[MultiIndex, object] = {}
        for idx, c in (coeffs or {}).items():
            idx = check_index(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} has length {len(idx)}, expected {degree}")
            c = _normalize_scalar(c)
            if c != 0:
                clean[idx] = c
        self._degree = degree
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def _trusted(cls, degree: int, coeffs: dict) -> "KForm":
        obj = cls.__new__(cls)
        obj._degree = degree
        obj._coeffs = dict(sorted((i, c) for i, c in coeffs.items() if c != 0))
        return obj

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def coeffs(self) -> Mapping[MultiIndex, object]:
        return dict(self._coeffs)

    def __getitem__(self, idx: Sequence[int]):
        return self._coeffs.get(tuple(idx), Fraction(0))

    def __iter__(self) -> Iterator[tuple[MultiIndex, object]]:
        return iter(self._coeffs.items())

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self._coeffs.values())

    def _check_same(self, other: "KForm"):
        if not isinstance(other, KForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return None

    def __add__(self, other: "KForm") -> "KForm":
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for idx, c in other:
            out[idx] = out.get(idx, 0) + c
        return KForm._trusted(self.degree, out)

    def __neg__(self) -> "KForm":
        return KForm._trusted(self.degree, {i: -c for i, c in self})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, scalar) -> "KForm":
        if isinstance(scalar, KForm):
            return NotImplemented
        s = _normalize_scalar(scalar)
        return KForm._trusted(self.degree, {i: s * c for i, c in self})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "KForm":
        s = _normalize_scalar(scalar)
        return KForm._trusted(self.degree, {i: c / s for i, c in self})

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        return self.degree == other.degree and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.degree, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"KForm({self.degree}, 0)"
        terms = " + ".join(f"{c}*e{''.join(map(str, i))}" for i, c in self)
        return f"KForm({self.degree}, {terms})"


def zero(k: int) -> KForm:
    return KForm(k)


def e(*index: int, coeff=1) -> KForm:
    """Simple form ``coeff * e_{i1} ^ ... ^ e_{ik}``; indices in any order."""
    for i in index:
        if not 1 <= i <= N:
            raise ValueError(f"index entry {i} outside 1..{N}")
    sign, idx = sort_sign(index)
    if sign == 0:
        return KForm(len(index))
    return KForm._trusted(len(idx), {idx: sign * _normalize_scalar(coeff)})


def volume() -> KForm:
    return e(*range(1, N + 1))


def wedge(alpha: KForm, beta: KForm) -> KForm:
    k = alpha.degree + beta.degree
    if k > N:
        raise ValueError(f"degree overflow: {alpha.degree} + {beta.degree} > {N}")
    out: dict[MultiIndex, object] = {}
    for i, a in alpha:
        si = set(i)
        for j, b in beta:
            if si.intersection(j):
                continue
            # sign of the shuffle merging i and j
            inv = sum(1 for x in i for y in j if x > y)
            idx = tuple(sorted(i + j))
            term = a * b if inv % 2 == 0 else -(a * b)
            out[idx] = out.get(idx, 0) + term
    return KForm._trusted(k, out)


def wedge_all(forms: Iterable[KForm]) -> KForm:
    result = KForm._trusted(0, {(): Fraction(1)})
    for f in forms:
        result = wedge(result, f)
    return result


@lru_cache(maxsize=None)
def _hodge_target(idx: MultiIndex) -> tuple[int, MultiIndex]:
    comp = tuple(i for i in range(1, N + 1) if i not in idx)
    sign, _ = sort_sign(idx + comp)
    return sign, comp


def hodge(alpha: KForm) -> KForm:
    out = {}
    for idx, c in alpha:
        sign, comp = _hodge_target(idx)
        out[comp] = c if sign > 0 else -c
    return KForm._trusted(N - alpha.degree, out)


def inner(alpha: KForm, beta: KForm):
    if alpha.degree != beta.degree:
        raise ValueError(f"degree mismatch: {alpha.degree} vs {beta.degree}")
    small, big = (alpha, beta) if len(alpha) <= len(beta) else (beta, alpha)
    total = Fraction(0)
    for idx, c in small:
        d = big[idx]
        if d:
            total += c * d
    return total


def norm2(alpha: KForm):
    return inner(alpha, alpha)


def self_dual_project(omega: KForm) -> KForm:
    if omega.degree != 4:
        raise ValueError("self-dual projection needs a 4-form")
    return (omega + hodge(omega)) * Fraction(1, 2)


def is_self_dual(omega: KForm, tol: float = 0.0) -> bool:
    diff = omega - hodge(omega)
    if tol == 0.0:
        return not diff
    return max((abs(c) for _, c in diff), default=0.0) <= tol


def self_dual_completion(*index: int) -> KForm:
    """``e_I + *e_I`` for a 4-index given in any order."""
    base = e(*index)
    return base + hodge(base)


GENERATORS: tuple[KForm, ...] = tuple(self_dual_completion(*i) for i in GENERATOR_INDICES)


def from_span(coeffs: Sequence) -> KForm:
    if len(coeffs) != 7:
        raise ValueError("span coefficients must have length 7")
    out = KForm(4)
    for a, s in zip(coeffs, GENERATORS):
        out = out + s * a
    return out


def to_span(omega: KForm) -> tuple[SpanCoeffs, KForm]:
    """Orthogonal split into span coefficients and a residual orthogonal to the span."""
    if omega.degree != 4:
        raise ValueError("to_span needs a 4-form")
    coeffs = []
    for s in GENERATORS:
        ip = inner(omega, s)
        coeffs.append(ip / 2 if is_exact(ip) else ip / 2.0)
    coeffs = tuple(coeffs)
    return coeffs, omega - from_span(coeffs)


def evaluate(omega: KForm, *vectors: Sequence):
    """Value of the form on k vectors: sum of coefficients times k x k minors."""
    k = omega.degree
    if len(vectors) != k:
        raise ValueError(f"{k}-form needs {k} vectors, got {len(vectors)}")
    exact = omega.is_exact() and all(is_exact(x) for v in vectors for x in v)
    if exact:
        cols = [[as_fraction(x) for x in v] for v in vectors]
        total = Fraction(0)
        for idx, c in omega:
            minor = [[cols[j][i - 1] for j in range(k)] for i in idx]
            total += c * det(minor)
        return total
    V = np.array(vectors, dtype=float).T  # 8 x k
    if k == 0:
        return float(omega[()])
    idxs = np.array([i for i, _ in omega], dtype=int).reshape(-1, k) - 1
    if idxs.size == 0:
        return 0.0
    coeffs = np.array([float(c) for _, c in omega])
    minors = V[idxs]  # (terms, k, k)
    return float(coeffs @ np.linalg.det(minors))


def to_vector(omega: KForm) -> np.ndarray:
    """Float coefficient vector in the lexicographic basis of the degree."""
    pos = _basis_position(omega.degree)
    v = np.zeros(comb(N, omega.degree))
    for idx, c in omega:
        v[pos[idx]] = float(c)
    return v


def from_vector(v: Sequence, k: int = 4) -> KForm:
    b = basis(k)
    if len(v) != len(b):
        raise ValueError(f"vector of length {len(v)} does not match degree {k}")
    return KForm._trusted(k, {idx: _normalize_scalar(c) for idx, c in zip(b, v)})


# -- serialization ---------------------------------------------------------

def scalar_to_json(c):
    if is_exact(c):
        c = as_fraction(c)
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return float(c)


def scalar_from_json(raw, where: str):
    if isinstance(raw, bool):
        raise FormatError(f"{where}: boolean is not a coefficient")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"{where}: cannot parse rational {raw!r}") from exc
    raise FormatError(f"{where}: expected rational string or number, got {type(raw).__name__}")


def form_to_dict(omega: KForm) -> dict:
    return {
        "n": N,
        "k": omega.degree,
        "terms": [{"index": list(i), "coeff": scalar_to_json(c)} for i, c in omega],
    }


def form_from_dict(data) -> KForm:
    if not isinstance(data, dict):
        raise FormatError("top level: expected an object")
    if data.get("n", N) != N:
        raise FormatError(f"n: only n={N} is supported, got {data.get('n')!r}")
    k = data.get("k")
    if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= N:
        raise FormatError(f"k: expected integer degree 0..{N}, got {k!r}")
    terms = data.get("terms")
    if not isinstance(terms, list):
        raise FormatError("terms: expected a list")
    coeffs: dict[MultiIndex, object] = {}
    for pos, term in enumerate(terms):
        where = f"terms[{pos}]"
        if not isinstance(term, dict) or "index" not in term or "coeff" not in term:
            raise FormatError(f"{where}: expected object with 'index' and 'coeff'")
        index = term["index"]
        if not isinstance(index, list):
            raise FormatError(f"{where}.index: expected a list")
        try:
            idx = check_index(index)
        except ValueError as exc:
            raise FormatError(f"{where}.index: {exc}") from exc
        if len(idx) != k:
            raise FormatError(f"{where}.index: length {len(idx)} does not match k={k}")
        if idx in coeffs:
            raise FormatError(f"{where}.index: duplicate multi-index {list(idx)}")
        coeffs[idx] = scalar_from_json(term["coeff"], f"{where}.coeff")
    return KForm(k, coeffs)


def dumps_form(omega: KForm, **kw) -> str:
    return json.dumps(form_to_dict(omega), **kw)


def loads_form(text: str) -> KForm:
    """Parse the canonical JSON form format.

    ``json.JSONDecodeError`` (which carries line and column) propagates for
    syntax errors; structural problems raise ``FormatError``.
    """
    return form_from_dict(json.loads(text))
