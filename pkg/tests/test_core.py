import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfder.core import (
    BasisIndex,
    Element,
    Family,
    ParseError,
    as_scalar,
    bidx,
    element_combine,
    parse_element,
    render,
)


class _NaiveRational:
    """Independent p/q arithmetic oracle: cross-multiplication on raw ints."""

    def __init__(self, p, q=1):
        self.p, self.q = p, q

    def add(self, o):
        return _NaiveRational(self.p * o.q + o.p * self.q, self.q * o.q)

    def mul(self, o):
        return _NaiveRational(self.p * o.p, self.q * o.q)

    def eq(self, frac):
        return self.p * frac.denominator == frac.numerator * self.q


def test_scalar_matches_cross_multiplication_oracle():
    rng = random.Random(0)
    for _ in range(1000):
        a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        na = _NaiveRational(a.numerator, a.denominator)
        nb = _NaiveRational(b.numerator, b.denominator)
        assert na.add(nb).eq(a + b)
        assert na.mul(nb).eq(a * b)


def test_scalar_lowest_terms_invariant():
    s = as_scalar("6/4")
    assert (s.numerator, s.denominator) == (3, 2)
    assert as_scalar("-2/8") == Fraction(-1, 4)
    assert as_scalar(5) == Fraction(5)
    with pytest.raises(ValueError):
        as_scalar("1/0")
    with pytest.raises(TypeError):
        as_scalar(1.5)


def test_basis_index_invariants():
    assert bidx(Family.GPLUS, 1).parity == 1
    assert bidx(Family.GMINUS, -3).parity == 1
    assert bidx(Family.L, 4).parity == 0
    with pytest.raises(ValueError):
        BasisIndex(Family.C, 2)
    assert bidx(Family.E, 2) == bidx(Family.E, 2)
    assert bidx(Family.E, 2) < bidx(Family.L, -8)  # family order wins
    assert bidx(Family.L, -2) < bidx(Family.L, 0)


def e(i):
    return bidx(Family.E, 2 * i)


def test_element_combine_frozen_example():
    # (1/2)*(3 e_1) + (1/2)*(e_1) = 2 e_1
    out = element_combine(
        [(Fraction(1, 2), Element.single(e(1), 3)), (Fraction(1, 2), Element.basis(e(1)))]
    )
    assert out == Element.single(e(1), 2)


def test_element_cancellation():
    a = Element.single(e(0), Fraction(2, 3))
    b = Element.single(e(0), Fraction(-2, 3))
    assert (a + b).is_zero()
    assert element_combine([(1, a), (1, b)]).is_zero()
    assert (a - a).is_zero()


def test_render_canonical_order():
    el = Element({bidx(Family.I, 0): Fraction(-1, 2), bidx(Family.L, 2): Fraction(1)})
    assert render(el) == "L_1 - 1/2*I_0"
    assert render(Element.zero()) == "0"
    assert render(Element.single(e(5), -1)) == "-e_5"
    assert render(Element.basis(e(0)) + Element.single(e(3), 2)) == "e_0 + 2*e_3"


def test_parse_examples():
    assert parse_element("e_0 + 2*e_3") == Element.basis(e(0)) + Element.single(e(3), 2)
    assert parse_element("1/2 * G+_1/2") == Element.single(bidx(Family.GPLUS, 1), Fraction(1, 2))
    assert parse_element("G_-3/2") == Element.basis(bidx(Family.GPLUS, -3))
    assert parse_element("L_-2 - I_0") == Element.basis(bidx(Family.L, -4)) - Element.basis(
        bidx(Family.I, 0)
    )
    assert parse_element("c") == Element.basis(bidx(Family.C, 0))
    assert parse_element("0").is_zero()
    assert parse_element("e_1 + e_1") == Element.single(e(1), 2)
    assert parse_element("e_1 - e_1").is_zero()


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_element("e_x")
    assert err.value.position == 2
    with pytest.raises(ParseError):
        parse_element("2e_1")  # missing '*'
    with pytest.raises(ParseError):
        parse_element("e_1 +")
    with pytest.raises(ParseError):
        parse_element("")
    with pytest.raises(ParseError):
        parse_element("e_1 e_2")
    with pytest.raises(ParseError):
        parse_element("L_1/2")  # half-integer outside the G families
    with pytest.raises(ParseError):
        parse_element("e_1/3")


scalars = st.builds(Fraction, st.integers(-10**4, 10**4), st.integers(1, 10**3))
families = st.sampled_from([Family.E, Family.L, Family.I, Family.J])
indices = st.builds(lambda f, d: bidx(f, 2 * d), families, st.integers(-30, 30)) | st.builds(
    lambda f, d: bidx(f, d), st.sampled_from([Family.GPLUS, Family.GMINUS]), st.integers(-30, 30)
)
elements = st.dictionaries(indices, scalars, max_size=6).map(Element)


@settings(max_examples=200, deadline=None)
@given(elements)
def test_parse_render_round_trip(el):
    assert parse_element(render(el)) == el


@settings(max_examples=100, deadline=None)
@given(scalars, scalars, elements, elements)
def test_combine_is_bilinear(a, b, x, y):
    left = element_combine([(a, x), (b, y)])
    right = x.scale(a) + y.scale(b)
    assert left == right
    assert element_combine([(a + b, x)]) == x.scale(a) + x.scale(b)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_element_addition_laws(x, y, z):
    assert (x + y) - y == x
    assert (x + y) + z == x + (y + z)
    assert x + (-x) == Element.zero()
