from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from minorkit.groebner import (
    IdealPresentation,
    ImproperIdeal,
    ResourceCapExceeded,
    buchberger,
    clear_cache,
    equal_radical,
    ideal_height,
    ideal_member,
    radical_member,
    zero_set,
)
from minorkit.polycore import GF, QQ, PolyRing, format_polynomial
from minorkit.radgen import generic_matrix, minors_ideal

NAMES = ["x", "y", "z"]


def small_poly(ring):
    coeff = st.integers(-3, 3) if ring.field is QQ else st.integers(0, ring.field.p - 1)
    exps = st.tuples(*[st.integers(0, 2) for _ in ring.names])
    return st.lists(st.tuples(coeff, exps), min_size=1, max_size=3).map(
        lambda ts: sum((ring.monomial(e, c) for c, e in ts), ring.zero())
    )


def sympy_basis(polys, ring):
    syms = sympy.symbols(ring.names)
    order = "grevlex" if ring.order == "degrevlex" else "lex"
    kw = {"domain": "QQ"} if ring.field is QQ else {"modulus": ring.field.p}
    G = sympy.groebner([sympy.sympify(format_polynomial(p).replace("^", "**")) for p in polys], *syms, order=order, **kw)
    out = set()
    for g in G.exprs:
        P = sympy.Poly(g, *syms, **kw)
        P = P.quo_ground(P.LC(order=order))
        out.add(_from_sympy(P, ring))
    return out


def _from_sympy(P, ring):
    f = ring.zero()
    for exps, c in P.terms():
        c = Fraction(int(c.p), int(c.q)) if ring.field is QQ else int(c) % ring.field.p
        f = f + ring.monomial(exps, c)
    return f


@pytest.mark.parametrize("field", [QQ, GF(32003), GF(7)])
@pytest.mark.parametrize("order", ["degrevlex", "lex"])
@pytest.mark.parametrize(
    "gens",
    [
        ["x^2 - y", "x*y - z", "y^2 - x*z"],
        ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"],
        ["x*y - z^2", "x*z - y^2", "y*z - x^2"],
        ["x + y + z", "x*y + y*z + x*z", "x*y*z - 1"],
    ],
)
def test_reduced_basis_matches_sympy(field, order, gens):
    ring = PolyRing(NAMES, field, order)
    polys = [ring.parse(g) for g in gens]
    gb = buchberger(IdealPresentation(ring, polys))
    assert set(gb.polys) == sympy_basis(polys, ring)


@settings(max_examples=30)
@given(st.data())
def test_random_bases_match_sympy(data):
    ring = PolyRing(NAMES, GF(101))
    polys = data.draw(st.lists(small_poly(ring), min_size=1, max_size=3))
    polys = [p for p in polys if p]
    if not polys:
        return
    assert set(buchberger(IdealPresentation(ring, polys)).polys) == sympy_basis(polys, ring)


@settings(max_examples=30)
@given(st.data())
def test_combinations_are_members(data):
    ring = PolyRing(NAMES, QQ)
    gens = data.draw(st.lists(small_poly(ring), min_size=1, max_size=3))
    mults = data.draw(st.lists(small_poly(ring), min_size=len(gens), max_size=len(gens)))
    f = sum((a * g for a, g in zip(mults, gens)), ring.zero())
    assert ideal_member(f, gens)
    # every basis element reduces to zero and the normal form is idempotent
    gb = buchberger(gens)
    assert all(gb.contains(g) for g in gens)
    h = ring.parse("x^3*y + z")
    assert gb.normal_form(gb.normal_form(h)) == gb.normal_form(h)


def test_non_member():
    ring = PolyRing(NAMES, QQ)
    assert not ideal_member(ring.parse("x"), [ring.parse("x^2"), ring.parse("y")])


class TestRadical:
    def test_power_path(self):
        ring = PolyRing(NAMES, QQ)
        assert radical_member(ring.parse("x*y"), [ring.parse("x^2*y^2")])
        assert not ideal_member(ring.parse("x*y"), [ring.parse("x^2*y^2")])

    def test_auxiliary_variable_path(self):
        # x^7 is the first power in the ideal, beyond the cheap power checks
        ring = PolyRing(NAMES, QQ)
        I = [ring.parse("x^7"), ring.parse("y")]
        assert radical_member(ring.parse("x + y"), I, max_power=2)
        assert not radical_member(ring.parse("x + z"), I)

    def test_auxiliary_name_avoids_clashes(self):
        ring = PolyRing(["t", "t1"], QQ)
        assert radical_member(ring.parse("t"), [ring.parse("t^5 + t1^5"), ring.parse("t1")], max_power=1)

    def test_constants(self):
        ring = PolyRing(NAMES, QQ)
        assert radical_member(ring.one(), [ring.parse("x"), ring.parse("1 - x")])
        assert not radical_member(ring.one(), [ring.parse("x")])
        assert radical_member(ring.zero(), [ring.parse("x")])

    def test_generic_minors_vs_bruns_count(self):
        M = generic_matrix(4)
        I = minors_ideal(M)
        assert not equal_radical(I, IdealPresentation(M.ring, [M.minor(1, 2), M.minor(3, 4)]))

    def test_equal_radical_needs_one_ring(self):
        a = PolyRing(["x"], QQ)
        b = PolyRing(["y"], QQ)
        with pytest.raises(ValueError):
            equal_radical([a.var("x")], [b.var("y")])

    @settings(max_examples=20)
    @given(st.data())
    def test_radical_equality_implies_equal_zero_sets(self, data):
        ring = PolyRing(["x", "y"], GF(3))
        I = data.draw(st.lists(small_poly(ring), min_size=1, max_size=2))
        J = [p**2 for p in I] + [p * q for p, q in combinations(I, 2)]
        I = [p for p in I if p]
        J = [p for p in J if p]
        if not I or not J:
            return
        assert equal_radical(I, J)
        assert zero_set(I, 3) == zero_set(J, 3)


def _height_oracle(polys, ring):
    """n minus the largest variable set free of every sympy leading monomial."""
    syms = sympy.symbols(ring.names)
    G = sympy.groebner([sympy.sympify(format_polynomial(p).replace("^", "**")) for p in polys], *syms, order="grevlex")
    leads = [frozenset(i for i, e in enumerate(sympy.Poly(g, *syms).monoms(order="grevlex")[0]) if e) for g in G.exprs]
    n = ring.nvars
    for size in range(n, -1, -1):
        for U in combinations(range(n), size):
            if not any(L <= set(U) for L in leads):
                return n - size
    return n


class TestHeight:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_generic_minors(self, n):
        assert ideal_height(minors_ideal(generic_matrix(n))) == n - 1

    @pytest.mark.parametrize(
        "gens",
        [["x*y", "y*z"], ["x^2", "y^3", "x*z"], ["x*y - z^2"], ["x*y", "x*z", "y*z"], ["x - y^2", "z^3"]],
    )
    def test_against_sympy_oracle(self, gens):
        ring = PolyRing(NAMES, QQ)
        polys = [ring.parse(g) for g in gens]
        assert ideal_height(polys) == _height_oracle(polys, ring)

    def test_unit_ideal(self):
        ring = PolyRing(NAMES, QQ)
        with pytest.raises(ImproperIdeal):
            ideal_height([ring.parse("x"), ring.parse("x - 1")])

    def test_variable_cap(self):
        M = generic_matrix(11)
        with pytest.raises(ResourceCapExceeded):
            ideal_height(minors_ideal(M))


class TestCaps:
    def test_pair_cap(self):
        clear_cache()
        M = generic_matrix(4)
        with pytest.raises(ResourceCapExceeded):
            buchberger(minors_ideal(M), order="lex", pair_cap=2)

    def test_degree_cap(self):
        clear_cache()
        ring = PolyRing(NAMES, QQ)
        with pytest.raises(ResourceCapExceeded):
            buchberger([ring.parse("x^3 - y"), ring.parse("x*y^2 - z")], degree_cap=2)

    def test_cache_returns_same_basis(self):
        ring = PolyRing(NAMES, QQ)
        I = IdealPresentation(ring, [ring.parse("x^2 - y")])
        assert buchberger(I) is buchberger(I)
