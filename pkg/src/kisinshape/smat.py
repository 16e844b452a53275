"""Small dense matrices over k_E[u]/(u^N), stored as tuples of tuples of Series."""

from __future__ import annotations

import itertools
from typing import Sequence

from .field_core import GF, Series, phi_twist
from .errors import InvalidInput

SMatrix = tuple  # tuple[tuple[Series, ...], ...]


def zeros(F: GF, N: int, rows: int, cols: int) -> SMatrix:
    z = Series.zero(F, N)
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def identity(F: GF, N: int, d: int) -> SMatrix:
    z, one = Series.zero(F, N), Series.one(F, N)
    return tuple(tuple(one if i == j else z for j in range(d)) for i in range(d))


def shape(m: SMatrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def add(a: SMatrix, b: SMatrix) -> SMatrix:
    if shape(a) != shape(b):
        raise InvalidInput(f"cannot add {shape(a)} and {shape(b)} matrices")
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: SMatrix, b: SMatrix) -> SMatrix:
    if shape(a) != shape(b):
        raise InvalidInput(f"cannot subtract {shape(b)} from {shape(a)}")
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mul(a: SMatrix, b: SMatrix, F: GF | None = None, N: int | None = None) -> SMatrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise InvalidInput(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    if F is None:
        sample = a[0][0] if ra and ca else b[0][0]
        F, N = sample.field, sample.N
    out = []
    for i in range(ra):
        row = []
        for j in range(cb):
            acc = Series.zero(F, N)
            for k in range(ca):
                x, y = a[i][k], b[k][j]
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def phi(a: SMatrix) -> SMatrix:
    return tuple(tuple(phi_twist(x) for x in row) for row in a)


def scalar_matrix(F: GF, N: int, rows: Sequence[Sequence[int]]) -> SMatrix:
    return tuple(tuple(Series.monomial(F, N, 0, c) for c in row) for row in rows)


def det(a: SMatrix) -> Series:
    """Leibniz expansion; fine for the d <= 5 matrices used here."""
    d = len(a)
    F, N = a[0][0].field, a[0][0].N
    total = Series.zero(F, N)
    for perm in itertools.permutations(range(d)):
        term = Series.one(F, N)
        for i, j in enumerate(perm):
            term = term * a[i][j]
            if term.is_zero():
                break
        if term.is_zero():
            continue
        inversions = sum(1 for x, y in itertools.combinations(perm, 2) if x > y)
        total = total - term if inversions % 2 else total + term
    return total


def adjugate(a: SMatrix) -> SMatrix:
    d = len(a)
    F, N = a[0][0].field, a[0][0].N
    if d == 1:
        return ((Series.one(F, N),),)
    out = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = tuple(tuple(a[r][c] for c in range(d) if c != j) for r in range(d) if r != i)
            cof = det(minor)
            out[j][i] = -cof if (i + j) % 2 else cof
    return tuple(tuple(r) for r in out)


def is_upper_triangular(a: SMatrix) -> bool:
    return all(a[i][j].is_zero() for i in range(len(a)) for j in range(i))


def to_record(a: SMatrix) -> list:
    return [[x.to_record() for x in row] for row in a]


def from_record(F: GF, N: int, rec) -> SMatrix:
    from .field_core import series_from_record
    return tuple(tuple(series_from_record(F, N, x) for x in row) for row in rec)
