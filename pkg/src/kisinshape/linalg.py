"""Sparse linear algebra over a finite field.

Vectors are dicts ``{coordinate: nonzero field element}``.  The echelon basis
keeps one vector per pivot coordinate, normalised so the pivot entry is 1.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .errors import DomainError
from .field_core import GF

Vector = dict


def axpy(F: GF, c: int, x: Vector, y: Vector) -> Vector:
    """y + c*x as a new vector."""
    out = dict(y)
    add, mul = F.add, F.mul
    for k, v in x.items():
        w = add(out.get(k, 0), mul(c, v))
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


class Echelon:
    """Incrementally maintained row-echelon basis of a subspace."""

    def __init__(self, F: GF, key=None):
        self.F = F
        self.rows: dict[Hashable, Vector] = {}
        self._key = key or (lambda k: k)

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _first_pivot(self, v: Vector):
        hits = [k for k in v if k in self.rows]
        return min(hits, key=self._key) if hits else None

    def reduce(self, v: Vector) -> Vector:
        """Remainder of v after elimination against the basis."""
        F = self.F
        v = dict(v)
        # always clear the smallest pivot present: stored rows only carry keys
        # after their own pivot, so this terminates
        while True:
            hit = self._first_pivot(v)
            if hit is None:
                return v
            v = axpy(F, F.neg(v[hit]), self.rows[hit], v)

    def reduce_with_coeffs(self, v: Vector, tags: dict) -> tuple[Vector, dict]:
        """Like reduce, also tracking the combination of inserted tags used."""
        F = self.F
        v = dict(v)
        combo: dict = {}
        while True:
            hit = self._first_pivot(v)
            if hit is None:
                return v, combo
            c = F.neg(v[hit])
            v = axpy(F, c, self.rows[hit], v)
            combo = axpy(F, c, tags[hit], combo)

    def insert(self, v: Vector) -> Hashable | None:
        """Add v to the span; returns the new pivot or None if v was dependent."""
        r = self.reduce(v)
        if not r:
            return None
        pivot = min(r, key=self._key)
        inv = self.F.inv(r[pivot])
        self.rows[pivot] = {k: self.F.mul(inv, x) for k, x in r.items()}
        return pivot

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)


class TrackedEchelon(Echelon):
    """Echelon basis that remembers how each stored row combines the inputs.

    Inputs are labelled; ``solve`` expresses a target as a combination of labels.
    """

    def __init__(self, F: GF, key=None):
        super().__init__(F, key)
        self.tags: dict[Hashable, Vector] = {}

    def insert_labelled(self, v: Vector, label: Hashable) -> Hashable | None:
        r, combo = self.reduce_with_coeffs(v, self.tags)
        combo = axpy(self.F, 1, {label: 1}, combo)
        if not r:
            return None
        pivot = min(r, key=self._key)
        inv = self.F.inv(r[pivot])
        self.rows[pivot] = {k: self.F.mul(inv, x) for k, x in r.items()}
        self.tags[pivot] = {k: self.F.mul(inv, x) for k, x in combo.items()}
        return pivot

    def solve(self, target: Vector) -> dict | None:
        """Combination of labels summing to target, or None if target is outside the span."""
        r, combo = self.reduce_with_coeffs(target, self.tags)
        if r:
            return None
        return {k: self.F.neg(x) for k, x in combo.items()}


def rank(F: GF, vectors: Iterable[Vector]) -> int:
    ech = Echelon(F)
    for v in vectors:
        ech.insert(v)
    return ech.rank


def dense_to_sparse(row: Sequence[int]) -> Vector:
    return {k: x for k, x in enumerate(row) if x}


def nullspace(F: GF, vectors: Sequence[Vector]) -> list[dict]:
    """Basis of {c : sum c_i vectors[i] = 0}, as dicts index -> coefficient."""
    ech = TrackedEchelon(F)
    kernel = []
    for i, v in enumerate(vectors):
        r, combo = ech.reduce_with_coeffs(v, ech.tags)
        if not r:
            kernel.append(axpy(F, 1, {i: 1}, combo))
        else:
            ech.insert_labelled(v, i)
    return kernel


def mat_rank(F: GF, rows: Sequence[Sequence[int]]) -> int:
    return rank(F, (dense_to_sparse(r) for r in rows))


def det(F: GF, rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a small dense square matrix by elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    result = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = F.neg(result)
        result = F.mul(result, a[c][c])
        inv = F.inv(a[c][c])
        for r in range(c + 1, n):
            if a[r][c]:
                factor = F.mul(a[r][c], inv)
                a[r] = [F.sub(x, F.mul(factor, y)) for x, y in zip(a[r], a[c])]
    return result


def mat_inv(F: GF, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(rows)
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise DomainError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = F.inv(a[c][c])
        a[c] = [F.mul(inv, x) for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                factor = a[r][c]
                a[r] = [F.sub(x, F.mul(factor, y)) for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]
