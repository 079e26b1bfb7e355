"""Exact linear algebra over the rationals.

Small dense routines used where floating-point rank decisions would be
ambiguous: rank by fraction-free (Bareiss) elimination, reduced row echelon
form, nullspace, determinant and linear solves with ``Fraction`` entries.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Sequence

Matrix = list[list[Fraction]]


def as_fraction(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators so entries are integers.

    Row scaling by nonzero constants leaves rank and nullspace unchanged.
    """
    out = []
    for row in rows:
        fr = [as_fraction(x) for x in row]
        m = 1
        for x in fr:
            m = lcm(m, x.denominator)
        out.append([int(x * m) for x in fr])
    return out


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by Bareiss fraction-free elimination."""
    a = integer_rows(rows)
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nrows):
            ai = a[i]
            f = ai[c]
            ar = a[r]
            for j in range(c + 1, ncols):
                # exact division is guaranteed by Sylvester's identity
                ai[j] = (p * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = p
        r += 1
    return r


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = [[as_fraction(x) for x in row] for row in rows]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of the right nullspace, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination over Fractions."""
    a = [[as_fraction(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        result *= p
        for i in range(c + 1, n):
            f = a[i][c] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def solve(m: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    """Solve ``m @ x = b`` exactly for square nonsingular ``m``."""
    n = len(m)
    k = len(b[0])
    aug = [list(m[i]) + list(b[i]) for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:n + k] for row in red[:n]]
