from __future__ import annotations

import itertools
import random

import pytest

from kisinshape import smat
from kisinshape.errors import InvalidInput, InvalidMove, PrecisionError, ShapeError
from kisinshape.field_core import Series, get_field
from kisinshape.shape import (AllowableMove, TriangularKisin, allowable_procedure, classify_shape,
                              column_divisibility, diag_recovery_check, divisibility_subspaces,
                              general_linear_group, lemma_matrix_has_p, normalize_to_diagonal,
                              random_p_shape, random_unit_matrix, replay, shapelemma_verify,
                              transversal_exists, undo)
from kisinshape.shape import _deg_matrices, _lemma_matrix

F3 = get_field(3)


def _u(k, N=8, c=1):
    return Series.monomial(F3, N, k, c)


def test_diagonal_has_p_shape():
    M = TriangularKisin.build(F3, 8, [[0], [1], [3]], [1, 1, 1])
    assert classify_shape(M, 3).all_p
    assert normalize_to_diagonal(M, 3) == (M, [])


def test_shape_examples():
    M = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(1)})
    assert classify_shape(M, 3).p_shape[(0, 0, 1)]
    M1 = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(0)})
    cls = classify_shape(M1, 3)
    assert not cls.p_shape[(0, 0, 1)] and cls.deg_ok[(0, 0, 1)]
    M2 = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(2)})
    assert not classify_shape(M2, 3).deg_ok[(0, 0, 1)]


def test_allowable_example():
    M = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(1)})
    out = allowable_procedure(M, AllowableMove(0, 1, (1,)))
    assert out.A[0] == ((_u(1), _u(0) * 0), (_u(0) * 0, _u(2)))
    assert allowable_procedure(M, AllowableMove(0, 1, (0,))) == M
    mv = AllowableMove(0, 1, (2,))
    assert allowable_procedure(allowable_procedure(M, mv), mv.inverse(F3)) == M


def test_allowable_move_is_right_multiplication():
    rng = random.Random(5)
    M = random_p_shape(rng, F3, 10, 3, 2, 3)
    for i, j in itertools.combinations(range(3), 2):
        c = tuple(2 if M.t[i][s] < M.t[j][s] else 0 for s in range(2))
        out = allowable_procedure(M, AllowableMove(i, j, c))
        for s in range(2):
            E = [[(F3.neg(c[s]) if (r, k) == (i, j) else 0) + (1 if r == k else 0) for k in range(3)]
                 for r in range(3)]
            assert out.A[s] == smat.mul(M.A[s], smat.scalar_matrix(F3, 10, E))


def test_illegal_allowable_move():
    M = TriangularKisin.build(F3, 8, [[2], [1]], [1, 1])
    with pytest.raises(InvalidMove):
        allowable_procedure(M, AllowableMove(0, 1, (1,)))
    with pytest.raises(InvalidMove):
        allowable_procedure(M, AllowableMove(1, 0, (1,)))


def test_normalize_single_entry_takes_one_move():
    M = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(1)})
    D, moves = normalize_to_diagonal(M, 3)
    assert len(moves) == 1 and replay(M, moves) == D and undo(D, moves) == M


def test_normalize_three_entries():
    entries = {(0, 0, 1): _u(0), (0, 0, 2): _u(0, c=2), (0, 1, 2): _u(1)}
    M = TriangularKisin.build(F3, 8, [[0], [1], [2]], [1, 1, 1], entries)
    D, moves = normalize_to_diagonal(M, 3)
    assert len(moves) == 3
    assert all(D.A[0][i][j].is_zero() for i in range(3) for j in range(3) if i != j)
    assert undo(D, moves) == M


def test_normalize_rejects_non_p_shape():
    M = TriangularKisin.build(F3, 8, [[1], [2]], [1, 1], {(0, 0, 1): _u(0)})
    with pytest.raises(ShapeError):
        normalize_to_diagonal(M, 3)


def test_normalize_with_units_over_f9():
    F9 = get_field(3, 2)
    rng = random.Random(2)
    for _ in range(100):
        M = random_p_shape(rng, F9, 10, 3, 2, 3)
        D, moves = normalize_to_diagonal(M, 3)
        assert all(D.A[s][i][j].is_zero() for s in range(2) for i in range(3) for j in range(3) if i != j)
        assert undo(D, moves) == M


def test_column_divisibility_examples():
    t = (0, 2)
    X = _lemma_matrix(F3, 7, t, {})
    assert column_divisibility(X, [[1, 0], [0, 1]], t) == [True, True]
    assert column_divisibility(X, [[0, 1], [1, 0]], t) == [True, False]
    X0 = _lemma_matrix(F3, 7, (0, 0), {})
    with pytest.raises(InvalidInput):
        column_divisibility(X0, [[1, 1], [1, 1]], (0, 0))


def test_column_divisibility_trivial_weights():
    rng = random.Random(1)
    X = tuple(tuple(Series.from_list(F3, 5, [rng.randrange(3) for _ in range(5)]) for _ in range(2))
              for _ in range(2))
    for A in general_linear_group(F3, 2):
        assert column_divisibility(X, A, (0, 0)) == [True, True]


def test_gl2_order():
    assert sum(1 for _ in general_linear_group(F3, 2)) == 48
    assert sum(1 for _ in general_linear_group(get_field(5), 2)) == 480


def test_shapelemma_example():
    rep = shapelemma_verify(F3, (0, 2), "brute")
    assert rep.config["group_order"] == 48
    assert rep.trials == 9 and rep.ok
    assert rep.pairs_checked == 9 * 48


def test_shapelemma_single_row():
    rep = shapelemma_verify(F3, (1,), "exhaustive")
    assert rep.ok and rep.trials == 0


@pytest.mark.parametrize("q,t", [(3, t) for t in itertools.permutations(range(4), 2)]
                         + [(5, t) for t in itertools.permutations(range(3), 2)])
def test_subspace_criterion_matches_group_scan(q, t):
    """Some A in GL_d with every column divisible exists iff a transversal exists."""
    F = get_field(q)
    group = list(general_linear_group(F, 2))
    N = q * 2 + 1
    for coeffs in _deg_matrices(F, N, t):
        X = _lemma_matrix(F, N, t, coeffs)
        direct = any(all(column_divisibility(X, A, t)) for A in group)
        assert direct == transversal_exists(F, divisibility_subspaces(F, X, t))
        if direct:
            assert lemma_matrix_has_p(X, t)


def test_subspace_criterion_matches_group_scan_d3():
    t = (0, 1, 2)
    N = 7
    group = list(general_linear_group(F3, 3))
    assert len(group) == 11232
    rng = random.Random(9)
    coeff_sets = list(_deg_matrices(F3, N, t))
    for coeffs in [coeff_sets[0]] + rng.sample(coeff_sets, 5):
        X = _lemma_matrix(F3, N, t, coeffs)
        direct = any(all(column_divisibility(X, A, t)) for A in group)
        assert direct == transversal_exists(F3, divisibility_subspaces(F3, X, t))


def test_shapelemma_modes_agree():
    for t in [(0, 3), (2, 1), (3, 0)]:
        ex = shapelemma_verify(F3, t, "exhaustive")
        br = shapelemma_verify(F3, t, "brute")
        assert ex.ok and br.ok
        assert ex.hypothesis_hits == br.hypothesis_hits and ex.trials == br.trials


def test_shapelemma_random_d3():
    rep = shapelemma_verify(F3, (0, 1, 2), "random", trials=500, seed=3)
    assert rep.ok and rep.trials == 500 and rep.hypothesis_hits > 0


def test_shapelemma_tags():
    assert "last_weight_maximal" in shapelemma_verify(F3, (0, 2), "exhaustive").tags
    assert "first_weight_maximal" in shapelemma_verify(F3, (2, 0), "exhaustive").tags


def test_shapelemma_input_checks():
    with pytest.raises(InvalidInput):
        shapelemma_verify(F3, (1, 1))
    with pytest.raises(InvalidInput):
        shapelemma_verify(F3, (0, 4))
    with pytest.raises(InvalidInput):
        shapelemma_verify(F3, (0, 1), "sideways")


def test_diag_recovery_identity():
    I = smat.identity(F3, 8, 2)
    assert diag_recovery_check(I, (0, 2), I, 3)


def test_diag_recovery_permutation():
    B = smat.scalar_matrix(F3, 8, [[0, 1], [1, 0]])
    I = smat.identity(F3, 8, 2)
    assert diag_recovery_check(B, (0, 2), I, 3)


def test_diag_recovery_random():
    rng = random.Random(12)
    checked = 0
    for _ in range(300):
        B = random_unit_matrix(rng, F3, 8, 2)
        A = random_unit_matrix(rng, F3, 8, 2, p=3)
        r = tuple(sorted(rng.randint(0, 3) for _ in range(2)))
        try:
            assert diag_recovery_check(B, r, A, 3)
            checked += 1
        except PrecisionError:
            pass
    assert checked > 250


def test_diag_recovery_rejects_bad_inputs():
    I = smat.identity(F3, 8, 2)
    with pytest.raises(InvalidInput):
        diag_recovery_check(I, (2, 0), I, 3)
    A = smat.scalar_matrix(F3, 8, [[1, 0], [0, 1]])
    A = ((A[0][0], Series.monomial(F3, 8, 1)), A[1])
    with pytest.raises(InvalidInput):
        diag_recovery_check(I, (0, 1), A, 3)
