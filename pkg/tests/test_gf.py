import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_irreducible_p, gf_mul, gf_rem

from nearpoly import gf
from nearpoly.gf import FieldElement, make_field

SMALL = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4)]
LARGER = [(3, 5), (2, 10), (5, 3), (2, 16), (7, 4), (2, 20)]


def oracle_mul(F, a, b):
    """Multiply element codes as polynomials mod the field modulus with sympy."""
    desc = lambda code: list(reversed(F.coeffs(code)))
    mod = list(reversed(F.modulus))
    r = gf_rem(gf_mul(desc(a), desc(b), F.p, ZZ), mod, F.p, ZZ)
    return F.from_coeffs(reversed(r))


def oracle_add(F, a, b):
    desc = lambda code: list(reversed(F.coeffs(code)))
    return F.from_coeffs(reversed(gf_add(desc(a), desc(b), F.p, ZZ)))


def test_prime_power_decomposition():
    assert gf.prime_power(8) == (2, 3)
    assert gf.prime_power(9) == (3, 2)
    assert gf.prime_power(7) == (7, 1)
    assert gf.prime_power(12) is None
    assert gf.prime_power(1) is None


@pytest.mark.parametrize("p,n,expected", [
    (2, 2, (1, 1, 1)),      # x^2 + x + 1
    (2, 3, (1, 1, 0, 1)),   # x^3 + x + 1
    (3, 2, (1, 0, 1)),      # x^2 + 1
    (2, 4, (1, 1, 0, 0, 1)),  # x^4 + x + 1
])
def test_lowest_irreducible_modulus(p, n, expected):
    assert make_field(p, n).modulus == expected


@pytest.mark.parametrize("p,n", [(2, 5), (3, 3), (5, 2), (2, 8)])
def test_modulus_irreducible_per_sympy(p, n):
    F = make_field(p, n)
    assert gf_irreducible_p(list(reversed(F.modulus)), p, ZZ)


@pytest.mark.parametrize("p,n", SMALL)
def test_tables_match_polynomial_oracle(p, n):
    F = make_field(p, n)
    add, mul, neg = F.tables()
    for a, b in itertools.product(range(F.order), repeat=2):
        assert add[a, b] == oracle_add(F, a, b)
        assert mul[a, b] == oracle_mul(F, a, b)
    assert all(add[a, neg[a]] == 0 for a in range(F.order))


@pytest.mark.parametrize("p,n", SMALL)
def test_field_axioms_exhaustive(p, n):
    F = make_field(p, n)
    q = F.order
    add, mul, _ = F.tables()
    r = np.arange(q)
    assert (add == add.T).all() and (mul == mul.T).all()
    assert (add[0] == r).all() and (mul[1] == r).all()
    # associativity and distributivity over all triples
    for a in range(q):
        assert (add[add[a][:, None], r[None, :]] == add[a][add]).all()
        assert (mul[mul[a][:, None], r[None, :]] == mul[a][mul]).all()
        assert (mul[a][add] == add[mul[a][:, None], mul[a][None, :]]).all()
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


@pytest.mark.parametrize("p,n", LARGER)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms_sampled(p, n, data):
    F = make_field(p, n)
    el = st.integers(0, F.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, b) == oracle_mul(F, a, b)
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.order - 1) == 1
    # Frobenius is additive
    assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 4), (5, 2), (2, 6)])
def test_conjugation_is_involutive_automorphism(p, n):
    F = make_field(p, n)
    fixed = 0
    for a in range(F.order):
        assert F.conj(F.conj(a)) == a
        fixed += F.conj(a) == a
    assert fixed == p ** (n // 2)  # the fixed field is the subfield GF(sqrt q)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, F.order, size=(200, 2)):
        a, b = int(a), int(b)
        assert F.conj(F.mul(a, b)) == F.mul(F.conj(a), F.conj(b))
        assert F.conj(F.add(a, b)) == F.add(F.conj(a), F.conj(b))


def test_no_conjugation_on_odd_degree():
    with pytest.raises(ValueError):
        make_field(2, 3).conj(3)


def test_field_element_wrapper():
    F = make_field(3, 2)
    x, y = F(4), F(7)
    assert isinstance(x + y, FieldElement)
    assert (x * y).value == F.mul(4, 7)
    assert (x / y) * y == x
    assert -x + x == F(0)
    assert x ** 8 == F(1)
    assert gf.conjugate(x) == F(F.conj(4))
    assert F((1, 2)).value == 1 + 2 * 3
    with pytest.raises(ValueError):
        x + make_field(3, 1)(1)
    with pytest.raises(ValueError):
        F(9)


@pytest.mark.parametrize("p,n", [(4, 1), (2, 0), (2, 21)])
def test_invalid_fields(p, n):
    with pytest.raises(ValueError):
        gf.FiniteField(p, n)
