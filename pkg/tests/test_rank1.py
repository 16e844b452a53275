from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy

from kisinshape.errors import ClassificationError, InvalidInput
from kisinshape.rank1 import (Rank1Kisin, admissible_diffs, alpha_invariant, chars_with_weight_string,
                              classify_gls, hom_exists, iso_as_Ginf, iso_via_alpha, weight_residue)


def _alpha_by_linear_solve(t, p):
    """Solve p*alpha_{s-1} - alpha_s = t_s as a rational linear system."""
    f = len(t)
    M = sympy.zeros(f, f)
    for s in range(f):
        M[s, (s - 1) % f] += p
        M[s, s] -= 1
    sol = M.LUsolve(sympy.Matrix(t))
    return tuple(Fraction(int(x.p), int(x.q)) for x in sol)


@pytest.mark.parametrize("p,f", [(3, 1), (3, 2), (3, 3), (5, 2)])
def test_alpha_matches_linear_solve(p, f):
    for t in itertools.product(range(p + 1), repeat=f):
        assert alpha_invariant(Rank1Kisin(t), p) == _alpha_by_linear_solve(t, p)


def test_alpha_examples():
    assert alpha_invariant(Rank1Kisin((0,)), 3) == (0,)
    assert alpha_invariant(Rank1Kisin((2, 2)), 3) == (1, 1)
    assert alpha_invariant(Rank1Kisin((1, 0)), 3) == (Fraction(1, 8), Fraction(3, 8))


def test_weight_residue_is_inertia_exponent():
    assert weight_residue((1, 0), 3) == 3
    assert weight_residue((3,), 3) == 1
    assert weight_residue((2, 2), 3) == 0


def test_iso_examples():
    n = Rank1Kisin((3,), 1)
    assert iso_as_Ginf(n, n, 3)
    assert iso_as_Ginf(Rank1Kisin((3,), 2), Rank1Kisin((1,), 2), 3)
    assert not iso_as_Ginf(Rank1Kisin((1, 2), 1), Rank1Kisin((1, 2), 2), 3)
    assert iso_via_alpha(Rank1Kisin((3,), 2), Rank1Kisin((1,), 2), 3)


def test_iso_different_f_rejected():
    with pytest.raises(InvalidInput):
        iso_as_Ginf(Rank1Kisin((1,)), Rank1Kisin((1, 1)), 3)


def test_hom_examples():
    n = Rank1Kisin((2,), 1)
    assert hom_exists(n, n, 3)
    assert hom_exists(Rank1Kisin((2,)), Rank1Kisin((0,)), 3)
    assert not hom_exists(Rank1Kisin((0,)), Rank1Kisin((2,)), 3)
    assert not hom_exists(Rank1Kisin((2,), 1), Rank1Kisin((0,), 2), 3)


def test_hom_in_both_directions_means_isomorphic():
    p = 3
    mods = [Rank1Kisin(t) for t in itertools.product(range(p + 1), repeat=2)]
    for n, m in itertools.product(mods, repeat=2):
        if hom_exists(n, m, p) and hom_exists(m, n, p):
            assert alpha_invariant(n, p) == alpha_invariant(m, p)


def _is_string(seg, p):
    if all(x == 0 for x in seg):
        return True
    if len(seg) < 2:
        return False
    body = (-1,) + (p - 1,) * (len(seg) - 2) + (p,)
    return tuple(seg) in (body, tuple(-x for x in body))


def _decomposable_by_brute_force(diff, p):
    """Try every cyclic cut set; each piece must be a zero run or a signed string."""
    f = len(diff)
    if diff in ((p - 1,) * f, (1 - p,) * f):
        return True
    for r in range(1, f + 1):
        for cuts in itertools.combinations(range(f), r):
            pieces = []
            for k, c in enumerate(cuts):
                end = cuts[(k + 1) % r] if r > 1 else c + f
                length = (end - c) % f or f
                pieces.append([diff[(c + i) % f] for i in range(length)])
            if all(_is_string(piece, p) for piece in pieces):
                return True
    return False


@pytest.mark.parametrize("p,f", [(3, 1), (3, 2), (3, 3), (5, 2)])
def test_decomposable_exactly_when_admissible(p, f):
    admissible = set(admissible_diffs(p, f))
    for diff in itertools.product(range(-p, p + 1), repeat=f):
        assert _decomposable_by_brute_force(diff, p) == (diff in admissible)


@pytest.mark.parametrize("p,f", [(3, 3), (5, 3), (3, 4)])
def test_classifier_reassembles(p, f):
    for diff in admissible_diffs(p, f):
        assert classify_gls(diff, p).reassemble(f, p) == diff


def test_classify_examples():
    assert classify_gls((2, 2), 3).kind == "all_p_minus_one+"
    dec = classify_gls((-1, 3), 3)
    assert dec.kind == "strings"
    assert [(s.start, s.length, s.sign) for s in dec.strings] == [(0, 2, 1)]
    zero = classify_gls((0, 0, 0, 0), 3)
    assert [(s.start, s.length, s.sign) for s in zero.strings] == [(0, 4, 0)]


def test_classify_rejects_inadmissible():
    with pytest.raises(InvalidInput):
        classify_gls((1, 0), 3)
    with pytest.raises(InvalidInput):
        classify_gls((4, 0), 3)


def test_classification_error_type_is_distinct():
    assert not issubclass(ClassificationError, InvalidInput)


def test_chars_with_weight_string_examples():
    assert chars_with_weight_string(0, 3, 3, 1) == [(0,), (2,)]
    assert chars_with_weight_string(1, 3, 3, 1) == [(1,), (3,)]
    assert chars_with_weight_string(0, 0, 3, 2) == [(0, 0)]
