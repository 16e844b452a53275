from __future__ import annotations

import itertools
import math
import random

import pytest

from kisinshape import smat
from kisinshape.errors import HypothesisError, InvalidInput, ShapeError
from kisinshape.ext import (ExtClass, ExtProblem, block_basis_change, block_matrix, bound_instances,
                            check_upper_bound, conjugation_oracle, d_nek, decompose, equivalent,
                            ext_dim, image_map, random_matrices, random_triangular,
                            semilinear_solve, sub_quot_split, successive_ext_assemble)
from kisinshape.field_core import Series, get_field, phi_twist
from kisinshape.rank1 import Rank1Kisin
from kisinshape.shape import TriangularKisin

F3 = get_field(3)


def _rank1(t, a=1, N=24, F=F3):
    return TriangularKisin.build(F, N, [list(t)], [a])


def _problem(t_sub, a_sub, t_quot, a_quot, N=24):
    return ExtProblem(_rank1(t_sub, a_sub, N), _rank1(t_quot, a_quot, N))


def _one_by_one(x):
    return ((x,),)


def test_zero_w_leaves_class_unchanged():
    pb = _problem((0,), 1, (2,), 1)
    C = (_one_by_one(Series.from_list(F3, 24, [1, 2])),)
    W = (_one_by_one(Series.zero(F3, 24)),)
    assert block_basis_change(pb, C, W) == C


def test_basis_change_example():
    pb = _problem((0,), 1, (2,), 1)
    w = Series.from_list(F3, 24, [1, 1, 2])
    C = (_one_by_one(Series.zero(F3, 24)),)
    out = block_basis_change(pb, C, (_one_by_one(w),))
    assert out[0][0][0] == phi_twist(w) - w * Series.monomial(F3, 24, 2)


def test_basis_change_matches_conjugation():
    rng = random.Random(8)
    F9 = get_field(3, 2)
    for F in (F3, F9):
        for _ in range(30):
            f, k, k2 = rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 2)
            pb = ExtProblem(random_triangular(rng, F, 14, k, f, 3), random_triangular(rng, F, 14, k2, f, 3))
            C = random_matrices(rng, F, 14, f, k, k2, 3)
            W = random_matrices(rng, F, 14, f, k, k2, 3)
            assert block_basis_change(pb, C, W) == conjugation_oracle(pb, C, W)


def test_basis_change_dimension_mismatch():
    pb = _problem((0,), 1, (2,), 1)
    with pytest.raises(InvalidInput):
        block_basis_change(pb, (), ())


def test_image_map_is_difference_of_classes():
    rng = random.Random(4)
    pb = ExtProblem(random_triangular(rng, F3, 12, 1, 2, 3), random_triangular(rng, F3, 12, 2, 2, 3))
    C = random_matrices(rng, F3, 12, 2, 1, 2, 2)
    W = random_matrices(rng, F3, 12, 2, 1, 2, 2)
    moved = block_basis_change(pb, C, W)
    L = image_map(pb, W, 12)
    assert tuple(smat.sub(C[s], moved[s]) for s in range(2)) == L


def test_solve_zero_target():
    pb = _problem((0,), 1, (2,), 1)
    wit = semilinear_solve(pb, (_one_by_one(Series.zero(F3, 24)),), 6)
    assert wit is not None and all(x.is_zero() for X in wit.W for row in X for x in row)


def test_solve_fixed_point_example():
    pb = _problem((2,), 1, (0,), 1, N=8)
    for c in (1, 2):
        target = (_one_by_one(Series.monomial(F3, 8, 0, c)),)
        wit = semilinear_solve(pb, target, 3, N=8)
        assert wit.W[0][0][0] == Series.from_list(F3, 8, [c, 0, c])
        assert image_map(pb, wit.W, 8) == target


def test_solve_inconsistent_target():
    pb = _problem((0,), 1, (2,), 1)
    target = (_one_by_one(Series.monomial(F3, 24, 1)),)
    assert semilinear_solve(pb, target, 6) is None


def test_equivalent_classes_found_by_solver():
    rng = random.Random(6)
    pb = ExtProblem(random_triangular(rng, F3, 20, 1, 1, 3), random_triangular(rng, F3, 20, 1, 1, 3))
    C = random_matrices(rng, F3, 20, 1, 1, 1, 3)
    W = random_matrices(rng, F3, 20, 1, 1, 1, 2)
    C2 = block_basis_change(pb, C, W)
    wit = equivalent(pb, C, C2, W_degree_bound=6, N=20)
    assert wit is not None
    assert block_basis_change(pb, C, wit.W) == C2


# --- the exhaustive small-field oracle for extension dimensions --------------------

def _slot_classes(t_sub, t_quot, tag, r, p, F):
    """All C (1x1, f=1) allowed by the shape tag and the height bound, as coefficient tuples."""
    if tag == "phi_shape":
        degs = [t_sub] if t_quot > t_sub else []
    else:
        degs = list(range(t_quot))
    floor = t_sub + t_quot - r
    degs = [d for d in degs if d >= floor]
    out = set()
    for cs in itertools.product(range(F.q), repeat=len(degs)):
        poly = [0] * 24
        for d, c in zip(degs, cs):
            poly[d] = c
        out.add(tuple(poly))
    return out


def _oracle_dim(t_sub, a_sub, t_quot, a_quot, tag, p=3, F=F3):
    """q^dim = |S| / |S meet image|, with the image sampled over every W of degree < 6."""
    N = 24
    A = Series.monomial(F, N, t_sub, a_sub)
    A2 = Series.monomial(F, N, t_quot, a_quot)
    space = _slot_classes(t_sub, t_quot, tag, p, p, F)
    hits = set()
    for ws in itertools.product(range(F.q), repeat=6):
        W = Series.from_list(F, N, ws)
        L = W * A2 - A * phi_twist(W)
        if L.degree() < N - 1 and tuple(L.coeffs) in space:
            hits.add(tuple(L.coeffs))
    ratio = len(space) // len(hits)
    return round(math.log(ratio, F.q))


@pytest.mark.parametrize("t_sub,a_sub,t_quot,a_quot,tag", [
    (0, 1, 2, 1, "phi_shape"),
    (0, 1, 2, 2, "phi_shape"),
    (1, 1, 3, 2, "phi_shape"),
    (0, 1, 3, 1, "phi_shape"),
    (2, 1, 2, 1, "ext_shape"),
    (2, 1, 2, 1, "phi_shape"),
    (1, 2, 1, 2, "ext_shape"),
    (0, 1, 3, 2, "ext_shape"),
    (1, 1, 3, 1, "ext_shape"),
])
def test_ext_dim_matches_exhaustive_oracle(t_sub, a_sub, t_quot, a_quot, tag):
    pb = _problem((t_sub,), a_sub, (t_quot,), a_quot)
    assert ext_dim(pb, tag).dim == _oracle_dim(t_sub, a_sub, t_quot, a_quot, tag)


def test_ext_shape_contains_phi_shape():
    for ts, tq in itertools.product(range(4), repeat=2):
        pb = _problem((ts,), 1, (tq,), 1)
        assert ext_dim(pb, "ext_shape").dim >= ext_dim(pb, "phi_shape").dim


def test_smaller_quotient_weights_give_zero():
    pb = _problem((3, 2), 1, (1, 0), 2)
    assert ext_dim(pb, "phi_shape").dim == 0


def test_ext_dim_certificate():
    res = ext_dim(_problem((0,), 1, (2,), 2), "phi_shape", N=12, precision_step=12)
    assert res.stable and (res.N, res.N_check) == (12, 24)
    assert len(res.representatives) == res.dim == 1


def test_phi_shape_needs_p_shaped_blocks():
    sub = _rank1((0,))
    quot = TriangularKisin.build(F3, 24, [[1], [2]], [1, 1], {(0, 0, 1): [1]})
    with pytest.raises(ShapeError):
        ext_dim(ExtProblem(sub, quot), "phi_shape")


def test_d_nek_examples():
    assert d_nek((3, 3), [(1, 2), (3, 0)]) == 0
    assert d_nek((0,), [(2,)]) == 1
    assert d_nek((0, 2), [(1, 0), (2, 1)]) == 2


def test_upper_bound_examples():
    rep = check_upper_bound(_problem((0,), 1, (2,), 2))
    assert rep.holds and (rep.ext_dim, rep.d_nek) == (1, 1)
    zero = check_upper_bound(_problem((3,), 1, (1,), 2))
    assert zero.holds and (zero.ext_dim, zero.d_nek) == (0, 0)


def test_upper_bound_refuses_rows_with_homs():
    # quotient M(2;1) maps onto the sub M(0;1): the bound is not asserted
    with pytest.raises(HypothesisError):
        check_upper_bound(_problem((0,), 1, (2,), 1))


def test_upper_bound_needs_rank_one_sub():
    sub = TriangularKisin.build(F3, 24, [[0], [1]], [1, 2])
    with pytest.raises(InvalidInput):
        check_upper_bound(ExtProblem(sub, _rank1((3,), 1)))


def test_reduced_precision_matches_default():
    """The sweep precision p(p+1) gives the same dimension as the default on samples."""
    rng = random.Random(21)
    pool = list(bound_instances(F3, 3, 2, 3, 12))
    for pb in rng.sample(pool, 25):
        small = check_upper_bound(pb, N=12)
        assert small.certificate["stable"]
        assert small.ext_dim == ext_dim(pb, "phi_shape").dim


def test_assemble_zero_classes_is_block_diagonal():
    chain = [Rank1Kisin((0,), 1), Rank1Kisin((2,), 2), Rank1Kisin((3,), 1)]
    z = Series.zero(F3, 10)
    classes = [ExtClass(((( z,),),)), ExtClass((((z,), (z,)),))]
    M = successive_ext_assemble(F3, 10, chain, classes)
    assert M == TriangularKisin.build(F3, 10, [[0], [2], [3]], [1, 2, 1])


def test_assemble_rank_two_is_block_matrix():
    chain = [Rank1Kisin((0,), 1), Rank1Kisin((2,), 2)]
    C = (((Series.from_list(F3, 10, [1, 2]),),),)
    M = successive_ext_assemble(F3, 10, chain, [ExtClass(C)])
    pb = ExtProblem(_rank1((0,), 1, 10), _rank1((2,), 2, 10))
    assert M.A[0] == block_matrix(pb, C, 0, 10)


def test_assemble_decompose_round_trip():
    rng = random.Random(2)
    chain = [Rank1Kisin((0, 1), 1), Rank1Kisin((2, 0), 2), Rank1Kisin((3, 3), 1)]
    classes = []
    for n in range(2):
        C = tuple(tuple((Series.from_list(F3, 10, [rng.randrange(3) for _ in range(3)]),)
                        for _ in range(n + 1)) for _ in range(2))
        classes.append(ExtClass(C))
    M = successive_ext_assemble(F3, 10, chain, classes)
    got_chain, got_classes = decompose(M)
    assert got_chain == chain and got_classes == classes
    sub, quot, C = sub_quot_split(M, 1)
    assert sub.d == 1 and quot.d == 2 and C[0][0][0] == classes[0].C[0][0][0]


def test_assemble_rejects_wrong_class_count():
    with pytest.raises(InvalidInput):
        successive_ext_assemble(F3, 10, [Rank1Kisin((0,)), Rank1Kisin((1,))], [])
