"""Exact linear algebra over Fraction: RREF, rank, nullspace.

Pivot choice: within the current column take the entry maximizing
|numerator * denominator| (lowest row index on ties). Deterministic,
so reduced bases are reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

__all__ = ["rref", "rank", "nullspace", "integerize"]


def rref(rows):
    """Reduced row echelon form. Returns (new_rows, pivot_columns).

    rows: list of equal-length lists of Fraction. Input is not mutated.
    """
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        best, best_size = -1, -1
        for i in range(r, len(m)):
            if m[i][c]:
                size = abs(m[i][c].numerator * m[i][c].denominator)
                if size > best_size:
                    best, best_size = i, size
        if best < 0:
            continue
        m[r], m[best] = m[best], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int):
    """Basis of {x : rows @ x = 0} as primitive integer-scaled vectors.

    One basis vector per free column, in increasing column order; the
    free coordinate is set to 1 before integer scaling.
    """
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(integerize(v))
    return basis


def integerize(vec):
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    vec = [Fraction(x) for x in vec]
    denoms = [x.denominator for x in vec]
    mult = 1
    for d in denoms:
        mult = mult * d // gcd(mult, d)
    ints = [int(x * mult) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints
