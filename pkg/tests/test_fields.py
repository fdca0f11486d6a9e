import pytest

from crcgrand.bits import Gf2Poly, poly_mul
from crcgrand.fields import DEFAULT_MODULI, Gf2mField, field_mul, minimal_polynomial


def test_field_mul_gf8():
    f = Gf2mField(3)
    assert field_mul(f, 2, 2) == 4
    assert field_mul(f, 4, 2) == 3
    for a in range(8):
        assert field_mul(f, a, 0) == 0


@pytest.mark.parametrize("m", sorted(DEFAULT_MODULI))
def test_default_moduli_primitive(m):
    f = Gf2mField(m)
    order = 2**m - 1
    assert f.alpha_pow(order) == 1
    assert all(f.alpha_pow(i) != 1 for i in range(1, order))
    for a in range(1, f.size):
        assert f.mul(a, f.inv(a)) == 1


def test_mul_matches_carryless_reduction():
    f = Gf2mField(5)
    for a in range(32):
        for b in range(32):
            prod = poly_mul(Gf2Poly(a), Gf2Poly(b)) % Gf2Poly(f.modulus)
            assert f.mul(a, b) == prod.coeffs


def test_non_primitive_modulus_rejected():
    # x^4+x^3+x^2+x+1 is irreducible but alpha has order 5
    with pytest.raises(ValueError, match="not primitive"):
        Gf2mField(4, 0b11111)


def test_minimal_polynomials():
    f8 = Gf2mField(3)
    assert minimal_polynomial(f8, 2) == Gf2Poly(0b1011)
    assert minimal_polynomial(f8, 1) == Gf2Poly(0b11)
    f16 = Gf2mField(4)
    a3 = f16.alpha_pow(3)
    mp = minimal_polynomial(f16, a3)
    assert mp == Gf2Poly(0b11111)
    assert sorted(f16.conjugates(a3)) == sorted(f16.alpha_pow(e) for e in (3, 6, 12, 9))
    with pytest.raises(ValueError):
        minimal_polynomial(f16, 0)


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_minimal_polynomial_properties(m):
    f = Gf2mField(m)
    seen = set()
    product = Gf2Poly(1)
    for e in range(1, f.size):
        mp = minimal_polynomial(f, e)
        assert f.eval_gf2(mp, e) == 0
        assert m % mp.degree == 0
        key = min(f.conjugates(e))
        if key not in seen:
            seen.add(key)
            product = poly_mul(product, mp)
    assert product == Gf2Poly((1 << f.order) | 1)
