from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dashchain.errors import BothZero
from dashchain.polynomial import (
    RationalPoly,
    format_poly,
    from_roots,
    poly_eval,
    poly_gcd,
    to_fraction,
)

small_fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 6))
polys = st.lists(small_fracs, max_size=5).map(RationalPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def test_trailing_zeros_trimmed():
    assert RationalPoly([1, 2, 0, 0]).coeffs == (1, 2)
    assert RationalPoly([0, 0]).is_zero()
    assert RationalPoly().degree == -1


@pytest.mark.parametrize("raw, expected", [
    ("3/2", Fraction(3, 2)),
    ("0.25", Fraction(1, 4)),
    (0.1, Fraction(1, 10)),
    (7, Fraction(7)),
])
def test_to_fraction(raw, expected):
    assert to_fraction(raw) == expected


def test_to_fraction_rejects_nan_and_bool():
    with pytest.raises(ValueError):
        to_fraction(float("nan"))
    with pytest.raises(TypeError):
        to_fraction(True)


def test_format_canonical():
    assert format_poly(RationalPoly([0, 0, 2, 2, 1])) == "z^4 + 2*z^3 + 2*z^2"
    assert format_poly(RationalPoly([Fraction(3, 2), Fraction(-1, 2)])) == "-1/2*z + 3/2"
    assert format_poly(RationalPoly()) == "0"


def test_gcd_textbook():
    assert poly_gcd(RationalPoly([-1, 0, 1]), RationalPoly([-1, 1])) == RationalPoly([-1, 1])


def test_gcd_p2_with_link_factor():
    # P_2 for unit parameters is z^4 + 2z^3 + 2z^2; at z = -1 it is 1
    p2 = RationalPoly([0, 0, 2, 2, 1])
    assert poly_eval(p2, -1) == 1
    assert poly_gcd(p2, RationalPoly([1, 1])) == RationalPoly([1])


def test_gcd_both_zero():
    with pytest.raises(BothZero):
        poly_gcd(RationalPoly(), RationalPoly())


def test_eval_examples():
    assert poly_eval(RationalPoly([0, 0, 2, 2, 1]), 0) == 0
    assert poly_eval(RationalPoly([1]), Fraction(17, 3)) == 1


@given(nonzero_polys)
def test_gcd_idempotent(p):
    assert poly_gcd(p, p) == p.monic()


@settings(max_examples=60)
@given(polys, polys)
def test_gcd_commutative_and_divides(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = poly_gcd(a, b)
    assert g == poly_gcd(b, a)
    assert g.leading == 1
    assert g.divides(a) and g.divides(b)


@settings(max_examples=40)
@given(nonzero_polys, nonzero_polys, nonzero_polys)
def test_gcd_associative(a, b, c):
    assert poly_gcd(poly_gcd(a, b), c) == poly_gcd(a, poly_gcd(b, c))


@settings(max_examples=40)
@given(st.lists(small_fracs, min_size=1, max_size=3), nonzero_polys, nonzero_polys)
def test_gcd_recovers_shared_factor(roots, a, b):
    shared = from_roots(roots)
    g = poly_gcd(shared * a, shared * b)
    assert shared.divides(g)


@given(polys, nonzero_polys)
def test_divmod_identity(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(polys, polys, small_fracs)
def test_eval_is_ring_homomorphism(a, b, x):
    assert poly_eval(a * b, x) == poly_eval(a, x) * poly_eval(b, x)
    assert poly_eval(a + b, x) == poly_eval(a, x) + poly_eval(b, x)


def test_exact_div_raises_on_remainder():
    with pytest.raises(ArithmeticError):
        RationalPoly([1, 0, 1]).exact_div(RationalPoly([1, 1]))
