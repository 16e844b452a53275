from __future__ import annotations

import random

import pytest
import sympy
from sympy.polys.matrices import DomainMatrix

from kisinshape import linalg, smat
from kisinshape.errors import DomainError
from kisinshape.field_core import Series, get_field


def _random_rows(rng, p, r, c):
    return [[rng.randrange(p) for _ in range(c)] for _ in range(r)]


def _sympy_rank(rows, p):
    return DomainMatrix([[sympy.GF(p)(x) for x in row] for row in rows], (len(rows), len(rows[0])),
                        sympy.GF(p)).rank()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_rank_matches_sympy(p):
    F = get_field(p)
    rng = random.Random(p)
    for _ in range(60):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = _random_rows(rng, p, r, c)
        if rng.random() < 0.5 and r > 1:
            rows[-1] = [(x + y) % p for x, y in zip(rows[0], rows[1 % r])]
        assert linalg.mat_rank(F, rows) == _sympy_rank(rows, p)


@pytest.mark.parametrize("p", [3, 5])
def test_det_and_inverse_match_sympy(p):
    F = get_field(p)
    rng = random.Random(10 + p)
    for _ in range(60):
        d = rng.randint(1, 4)
        rows = _random_rows(rng, p, d, d)
        assert linalg.det(F, rows) == int(sympy.Matrix(rows).det()) % p
        if linalg.det(F, rows):
            inv = linalg.mat_inv(F, rows)
            prod = [[sum(rows[i][k] * inv[k][j] for k in range(d)) % p for j in range(d)] for i in range(d)]
            assert prod == [[int(i == j) for j in range(d)] for i in range(d)]


def test_singular_inverse_raises():
    with pytest.raises(DomainError):
        linalg.mat_inv(get_field(3), [[1, 2], [2, 1]])


def test_nullspace_vectors_are_relations():
    F = get_field(5)
    rng = random.Random(3)
    for _ in range(40):
        vecs = [linalg.dense_to_sparse(row) for row in _random_rows(rng, 5, rng.randint(1, 6), 4)]
        kernel = linalg.nullspace(F, vecs)
        assert len(kernel) == len(vecs) - linalg.rank(F, vecs)
        for combo in kernel:
            total: dict = {}
            for idx, c in combo.items():
                total = linalg.axpy(F, c, vecs[idx], total)
            assert total == {}


def test_tracked_solve_returns_combination():
    F = get_field(3)
    ech = linalg.TrackedEchelon(F)
    basis = {"a": {0: 1, 1: 2}, "b": {1: 1, 2: 1}}
    for label, v in basis.items():
        ech.insert_labelled(v, label)
    target = linalg.axpy(F, 2, basis["a"], basis["b"])
    combo = ech.solve(target)
    rebuilt: dict = {}
    for label, c in combo.items():
        rebuilt = linalg.axpy(F, c, basis[label], rebuilt)
    assert rebuilt == target
    outside = {0: 1}
    assert linalg.rank(F, [*basis.values(), outside]) == 3
    assert ech.solve(outside) is None


def test_series_matrix_det_and_adjugate():
    F = get_field(3)
    rng = random.Random(1)
    M = tuple(tuple(Series.from_list(F, 6, [rng.randrange(3) for _ in range(3)]) for _ in range(3))
              for _ in range(3))
    prod = smat.mul(M, smat.adjugate(M))
    det = smat.det(M)
    for i in range(3):
        for j in range(3):
            assert prod[i][j] == (det if i == j else Series.zero(F, 6))
