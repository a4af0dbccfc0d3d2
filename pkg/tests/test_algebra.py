from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from folcalc._parse import ParseError
from folcalc.gaussian import ONE, ZERO, GaussianRational, I, format_gaussian, parse_gaussian
from folcalc.poly import MultiPoly, differentiate, divmod_poly, parse_poly

VARS = ("z1", "z2", "z3")

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(GaussianRational, fractions, fractions)


@st.composite
def polys(draw, nvars=3, maxdeg=3, maxterms=4):
    vars = VARS[:nvars]
    terms = {}
    for _ in range(draw(st.integers(0, maxterms))):
        exp = tuple(draw(st.integers(0, maxdeg)) for _ in range(nvars))
        terms[exp] = draw(gaussians)
    return MultiPoly(vars, terms)


class TestGaussian:
    def test_i_squared(self):
        assert I * I == -ONE

    def test_inverse(self):
        z = GaussianRational(Fraction(3, 2), -2)
        assert z * z.inverse() == ONE
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    @given(gaussians, gaussians, gaussians)
    def test_field_axioms(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        assert a * b == b * a
        if b:
            assert (a / b) * b == a

    @given(gaussians)
    def test_format_roundtrip(self, a):
        assert parse_gaussian(format_gaussian(a)) == a

    def test_conjugate_norm(self):
        z = GaussianRational(1, 2)
        assert z * z.conjugate() == GaussianRational(z.norm())
        assert complex(z) == 1 + 2j


class TestPoly:
    def test_parse_and_print(self):
        f = parse_poly("(1+i)*z1^2*z2 - 3/2*z2 + i", VARS)
        assert str(f) == "(1+i)*z1^2*z2 - 3/2*z2 + i"
        assert parse_poly(str(f), VARS) == f

    def test_parse_errors_located(self):
        with pytest.raises(ParseError) as exc:
            parse_poly("z1 + * z2", VARS)
        assert exc.value.col == 6
        with pytest.raises(ParseError):
            parse_poly("z4", VARS)
        with pytest.raises(ParseError):
            parse_poly("1/z1", VARS)

    @given(polys(), polys(), polys())
    @settings(max_examples=60, deadline=None)
    def test_ring_axioms(self, f, g, h):
        assert (f + g) * h == f * h + g * h
        assert f * g == g * f
        assert (f - f).is_zero()

    @given(polys())
    @settings(max_examples=60, deadline=None)
    def test_print_roundtrip(self, f):
        assert parse_poly(str(f), VARS) == f

    @given(polys(), polys())
    @settings(max_examples=40, deadline=None)
    def test_leibniz(self, f, g):
        for j in range(3):
            assert differentiate(f * g, j) == differentiate(f, j) * g + f * differentiate(g, j)

    @given(polys(maxterms=3), polys(maxterms=3))
    @settings(max_examples=40, deadline=None)
    def test_exact_division(self, f, g):
        if g.is_zero():
            return
        q, r = divmod_poly(f * g, g)
        assert r.is_zero() and q == f
        q, r = divmod_poly(f + 1, g)
        assert q * g + r == f + 1

    def test_evaluate(self):
        f = parse_poly("z1*z2 + i*z3^2", VARS)
        assert f.evaluate([2, 3, 1j]) == 6 - 1j
