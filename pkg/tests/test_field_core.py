from __future__ import annotations

import itertools
import random

import pytest
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from kisinshape.errors import DomainError, InvalidInput
from kisinshape.field_core import INF, GF, GlobalParams, Series, get_field, phi_twist, val_of


def _big_endian(F: GF, x: int) -> list[int]:
    cs = F.coords(x)
    while cs and cs[-1] == 0:
        cs.pop()
    return list(reversed(cs))


def _from_big_endian(F: GF, cs) -> int:
    return F.from_coords(reversed([int(c) for c in cs]))


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 2), (3, 3), (7, 2), (5, 4)])
def test_multiplication_matches_sympy_galois_tools(p, m):
    F = get_field(p, m)
    poly = list(reversed(F.poly))
    assert gf_irreducible_p(poly, p, ZZ)
    rng = random.Random(p * 100 + m)
    for _ in range(300):
        a, b = rng.randrange(F.q), rng.randrange(F.q)
        expected = gf_rem(gf_mul(_big_endian(F, a), _big_endian(F, b), p, ZZ), poly, p, ZZ)
        assert F.mul(a, b) == _from_big_endian(F, expected)


@pytest.mark.parametrize("p,m", [(3, 2), (5, 2), (3, 4), (5, 4)])
def test_field_axioms_on_samples(p, m):
    F = get_field(p, m)
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (rng.randrange(F.q) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1


def test_frobenius_examples():
    F3 = get_field(3)
    assert F3.frobenius(2) == 2
    assert F3.inv(2) == 2
    F9 = get_field(3, 2)
    x = F9.from_coords([0, 1])  # root of the defining polynomial
    assert F9.frobenius(F9.frobenius(x)) == x
    assert F9.frobenius(x) != x


def test_generator_has_full_order():
    F = get_field(5, 2)
    g = F.generator
    assert len({F.pow(g, k) for k in range(F.q - 1)}) == F.q - 1


def test_inverse_of_zero_raises():
    with pytest.raises(DomainError):
        get_field(3, 2).inv(0)


def test_reducible_polynomial_rejected():
    with pytest.raises(InvalidInput):
        GF(3, 2, (0, 0, 1))  # x^2
    with pytest.raises(InvalidInput):
        GF(3, 2, (2, 0, 1))  # x^2 - 1
    with pytest.raises(InvalidInput):
        GF(3, 2, (1, 0, 2))  # not monic


def test_default_poly_is_smallest_irreducible():
    F = get_field(3, 2)
    candidates = [(c0, c1, 1) for c1 in range(3) for c0 in range(3)]
    first = next(c for c in sorted(candidates, key=lambda c: (c[1], c[0]))
                 if gf_irreducible_p(list(reversed(c)), 3, ZZ))
    assert F.poly == first


def test_global_params_validation():
    gp = GlobalParams(3, 2)
    assert (gp.m, gp.N, gp.modulus) == (2, 4, 8)
    for bad in ({"p": 2, "f": 1}, {"p": 9, "f": 1}, {"p": 3, "f": 2, "m": 3}, {"p": 3, "f": 1, "N": 3}):
        with pytest.raises(InvalidInput):
            GlobalParams.from_record(bad)
    with pytest.raises(InvalidInput):
        GlobalParams.from_record({"p": 3, "f": 1, "extra": 0})
    rec = GlobalParams(5, 1, 2, 10).to_record()
    assert GlobalParams.from_record(rec) == GlobalParams(5, 1, 2, 10, tuple(rec["field_poly"]))


def _s(F, N, cs):
    return Series.from_list(F, N, [F(c) for c in cs])


def test_series_examples():
    F = get_field(3)
    assert _s(F, 4, [1, 1]) * _s(F, 4, [1, -1]) == _s(F, 4, [1, 0, -1])
    assert _s(F, 4, [1, 1]).inverse() == _s(F, 4, [1, -1, 1, -1])
    a = _s(F, 4, [2, 0, 1, 1])
    assert a * Series.one(F, 4) == a


def test_phi_twist_examples():
    F = get_field(3)
    assert phi_twist(_s(F, 4, [1, 1])) == _s(F, 4, [1, 0, 0, 1])
    assert phi_twist(Series.monomial(F, 10, 2)) == Series.monomial(F, 10, 6)
    assert phi_twist(_s(F, 5, [0, 0, 1, 0, 1])).is_zero()


def test_phi_twist_fixes_coefficients():
    F = get_field(3, 2)
    x = F.from_coords([1, 1])
    assert phi_twist(Series.monomial(F, 8, 1, x)) == Series.monomial(F, 8, 3, x)


def test_valuation_examples():
    F = get_field(3)
    assert val_of(_s(F, 5, [0, 0, 1, 1])) == 2
    assert val_of(Series.zero(F, 5)) == INF
    assert val_of(Series.one(F, 5)) == 0


def test_non_unit_inverse_raises():
    with pytest.raises(DomainError):
        Series.monomial(get_field(3), 4, 1).inverse()


def _naive_product(F, a, b, N):
    out = [0] * N
    for i, j in itertools.product(range(N), repeat=2):
        if i + j < N:
            out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]))
    return out


def test_multiplication_matches_convolution_over_f9():
    F = get_field(3, 2)
    rng = random.Random(3)
    for _ in range(50):
        a = [rng.randrange(9) for _ in range(6)]
        b = [rng.randrange(9) for _ in range(6)]
        prod = Series.from_list(F, 6, a) * Series.from_list(F, 6, b)
        assert list(prod.coeffs) == _naive_product(F, a, b, 6)
        if a[0]:
            inv = Series.from_list(F, 6, a).inverse()
            assert inv * Series.from_list(F, 6, a) == Series.one(F, 6)


def test_phi_is_ring_homomorphism():
    F = get_field(5)
    rng = random.Random(4)
    for _ in range(50):
        a = Series.from_list(F, 12, [rng.randrange(5) for _ in range(12)])
        b = Series.from_list(F, 12, [rng.randrange(5) for _ in range(12)])
        assert phi_twist(a * b) == phi_twist(a) * phi_twist(b)
        assert phi_twist(a + b) == phi_twist(a) + phi_twist(b)
