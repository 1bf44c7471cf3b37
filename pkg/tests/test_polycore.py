from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from minorkit.polycore import (
    GF,
    QQ,
    PolynomialSyntaxError,
    PolyRing,
    RingMismatch,
    embed,
    field_for,
    format_polynomial,
    parse_linear_form,
    substitute_linear,
)

NAMES = ["a", "b", "c"]


def poly_strategy(ring, max_terms=5):
    coeff = st.integers(-6, 6) if ring.field is QQ else st.integers(0, ring.field.p - 1)
    exps = st.tuples(*[st.integers(0, 3) for _ in ring.names])
    return st.lists(st.tuples(coeff, exps), max_size=max_terms).map(
        lambda ts: sum((ring.monomial(e, c) for c, e in ts), ring.zero())
    )


RQ = PolyRing(NAMES, QQ)
R7 = PolyRing(NAMES, GF(7))


def to_sympy(f):
    syms = sympy.symbols(f.ring.names)
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s**k for s, k in zip(syms, e)]) for c, e in f.terms))


class TestFields:
    def test_prime_field_inverse(self):
        F = GF(13)
        assert all(F.mul(a, F.inv(a)) == 1 for a in range(1, 13))

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            GF(5).inv(0)
        with pytest.raises(ZeroDivisionError):
            QQ.inv(Fraction(0))

    def test_field_for_rejects_composites(self):
        with pytest.raises(ValueError):
            field_for(12)
        assert field_for(0) is QQ
        assert field_for(32003).p == 32003

    def test_negative_residues(self):
        F = GF(7)
        assert F(-1) == 6
        assert F(Fraction(1, 2)) == 4


class TestArithmetic:
    @given(poly_strategy(RQ), poly_strategy(RQ), poly_strategy(RQ))
    def test_ring_axioms_qq(self, f, g, h):
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h
        assert (f + g) - g == f

    @given(poly_strategy(R7), poly_strategy(R7))
    def test_ring_axioms_gf7(self, f, g):
        assert (f + g) * (f - g) == f * f - g * g
        assert f.scale(7) == R7.zero()

    @given(poly_strategy(RQ), poly_strategy(RQ))
    def test_product_matches_sympy(self, f, g):
        assert sympy.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0

    @given(poly_strategy(RQ), st.integers(0, 4))
    def test_power(self, f, k):
        expected = RQ.one()
        for _ in range(k):
            expected = expected * f
        assert f**k == expected

    @given(poly_strategy(RQ), poly_strategy(RQ), st.tuples(*[st.integers(-3, 3) for _ in NAMES]))
    def test_evaluation_is_a_homomorphism(self, f, g, pt):
        assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
        assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            RQ.var("a") + R7.var("a")

    def test_degrevlex_leading_term(self):
        f = RQ.parse("a*c^2 + b^3 + a^2")
        # same degree: degrevlex prefers the smaller power of the last variable
        assert f.leading_monomial() == (0, 3, 0)
        assert RQ.with_order("lex").parse("a*c^2 + b^3 + a^2").leading_monomial() == (2, 0, 0)

    def test_monic(self):
        f = RQ.parse("3*a*b - 6*c")
        assert f.monic() == RQ.parse("a*b - 2*c")


class TestParsing:
    @given(poly_strategy(RQ))
    def test_round_trip(self, f):
        assert RQ.parse(format_polynomial(f)) == f

    @given(poly_strategy(R7))
    def test_round_trip_gf7(self, f):
        assert R7.parse(format_polynomial(f)) == f

    def test_rational_coefficients(self):
        f = RQ.parse("1/2*a - 3/4*b^2")
        assert f.coefficient((1, 0, 0)) == Fraction(1, 2)
        assert format_polynomial(f) == "-3/4*b^2 + 1/2*a"

    def test_symmetric_residues_in_output(self):
        assert format_polynomial(R7.parse("a - b")) == "a - b"

    @pytest.mark.parametrize(
        "text,column",
        [("a + d", 5), ("a + ", 3), ("a $ b", 3), ("a^b", 1), ("2 * * a", 5)],
    )
    def test_syntax_errors_carry_columns(self, text, column):
        with pytest.raises(PolynomialSyntaxError) as info:
            RQ.parse(text)
        assert info.value.column == column

    def test_linear_form_rejects_products(self):
        with pytest.raises(PolynomialSyntaxError):
            parse_linear_form("a*b", RQ)
        assert parse_linear_form("a - 2*c", RQ).linear_coefficients() == [1, 0, -2]


class TestMaps:
    def test_substitute_linear(self):
        S = PolyRing(["u", "v"], QQ)
        f = RQ.parse("a*b - c^2")
        g = substitute_linear(f, {"a": S.parse("u + v"), "b": S.parse("u - v"), "c": S.parse("u")}, S)
        assert g == S.parse("-v^2")

    def test_substitute_needs_all_variables(self):
        S = PolyRing(["u"], QQ)
        with pytest.raises(KeyError):
            substitute_linear(RQ.parse("a*b"), {"a": S.var("u")}, S)

    def test_embed_by_name(self):
        big = PolyRing(["c", "x", "a", "b"], QQ)
        assert embed(RQ.parse("a*b + c"), big) == big.parse("a*b + c")

    def test_embed_rejects_other_fields(self):
        with pytest.raises(RingMismatch):
            embed(RQ.var("a"), R7)

    def test_fresh_name(self):
        ring = PolyRing(["t", "t1"], QQ)
        assert ring.fresh_name() == "t2"
