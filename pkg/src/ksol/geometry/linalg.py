"""Small exact linear algebra over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = list


def frac_vec(xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def det(m: Sequence[Sequence]) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(m[0][0])
    if n == 2:
        return Fraction(m[0][0]) * m[1][1] - Fraction(m[0][1]) * m[1][0]
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        pv = a[col][col]
        result *= pv
        for r in range(col + 1, n):
            f = a[r][col] / pv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return sign * result


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of {x : m x = 0}, one vector per free column, in column order."""
    if not m:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    a, pivots = rref(m)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(a, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(m: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Unique solution of the square system m x = b, or None if singular."""
    n = len(m)
    aug = [list(row) + [b_i] for row, b_i in zip(m, b)]
    a, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return tuple(a[i][n] for i in range(n))


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]] | None:
    n = len(m)
    aug = [list(row) + ident for row, ident in zip(m, identity(n))]
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in a]


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector with the same direction."""
    v = frac_vec(v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)
