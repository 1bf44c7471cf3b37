import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minorkit.cli import parse_block_spec
from minorkit.groebner import IdealPresentation, equal_radical, radical_member
from minorkit.pencil import Block
from minorkit.polycore import GF, QQ, PolyRing
from minorkit.radgen import (
    ConditionViolated,
    MinorPoset,
    PowerNotInSyzygyIdeal,
    SVPartition,
    SyzygyInvalid,
    WitnessSet,
    an_generators,
    an_matrix,
    bruns_delta,
    bruns_index_sets,
    bruns_poset_polys,
    generic_matrix,
    jordan_generators,
    koszul_syzygy,
    minors_ideal,
    nilpotent_extend,
    plucker_syzygy,
    schmitt_vogel,
    scroll_sci,
    syzygy_reduce,
)


class TestBrunsPoset:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_closed_form_matches_enumeration(self, n):
        levels = bruns_index_sets(n)
        assert [sorted(lv) for lv in levels] == MinorPoset(n).rank_levels()
        assert len(levels) == 2 * n - 3
        assert sorted(x for lv in levels for x in lv) == MinorPoset(n).elements()

    def test_delta(self):
        assert [bruns_delta(j, 5) for j in range(1, 8)] == [0, 0, 0, 0, 1, 2, 3]

    def test_levels_of_four(self):
        assert bruns_index_sets(4) == [[(1, 2)], [(1, 3)], [(1, 4), (2, 3)], [(2, 4)], [(3, 4)]]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("field", [QQ, GF(7)])
    def test_witness_verifies(self, n, field):
        w = bruns_poset_polys(M=generic_matrix(n, field))
        assert w.count == 2 * n - 3
        assert w.verify()

    def test_needs_two_columns(self):
        with pytest.raises(ValueError):
            bruns_index_sets(1)


class TestSchmittVogel:
    R = PolyRing(list("abcd"), QQ)

    def test_sums_with_exponents(self):
        a, b, c, d = self.R.gens()
        part = SVPartition([[a * b], [a * c, b * d]], exponents={b * d: 2})
        w = schmitt_vogel(part)
        assert w.polys == (a * b, a * c + (b * d) ** 2)
        assert w.verify()

    def test_empty_subset(self):
        a = self.R.var("a")
        with pytest.raises(ConditionViolated) as info:
            SVPartition([[a], []]).validate()
        assert info.value.condition == "i"

    def test_cover_of_ground_set(self):
        a, b, c, _ = self.R.gens()
        with pytest.raises(ConditionViolated) as info:
            SVPartition([[a], [a * b]], ground=(a, a * b, c)).validate()
        assert info.value.condition == "i"

    def test_first_subset_is_a_singleton(self):
        a, b, _, _ = self.R.gens()
        with pytest.raises(ConditionViolated) as info:
            SVPartition([[a, b]]).validate()
        assert info.value.condition == "ii"

    def test_non_positive_exponent(self):
        a, b, _, _ = self.R.gens()
        with pytest.raises(ConditionViolated):
            SVPartition([[a], [b]], exponents={b: 0}).validate()

    def test_polynomial_divisor(self):
        a, b, c, d = self.R.gens()
        q = a * b - c * d
        part = SVPartition([[q], [q * a, q * c + b]])
        part.validate()
        assert schmitt_vogel(part).verify()


class TestScroll:
    def test_second_polynomial(self):
        w = scroll_sci(2)
        assert w.polys[1] == w.ring.parse("z0*z3^2 - 2*z1*z2*z3 + z2^3")

    def test_explicit_names(self):
        ring = PolyRing(["p", "q", "r"], QQ)
        from minorkit.pencil import LinMatrix

        M = LinMatrix(ring, ((ring.var("p"), ring.var("q")), (ring.var("q"), ring.var("r"))), 0)
        w = scroll_sci(1, M)
        assert w.polys == (ring.parse("p*r - q^2"),)

    def test_wrong_variable_count(self):
        with pytest.raises(ValueError):
            scroll_sci(2, names=["z0", "z1"])


class TestAn:
    def test_k4_explicit(self):
        w = an_generators(4)
        assert list(w.polys) == [w.ring.parse(t) for t in ["x3*x4 - x2*x5 + x1*x6", "x1*x4 + x3*x5", "x2*x4 + x3*x6"]]

    def test_matrix_shape(self):
        M = an_matrix(4)
        assert str(M.rows[0][0]) == "0" and str(M.rows[1][3]) == "0"
        assert M.ring.nvars == 6

    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_counts(self, n):
        assert an_generators(n).count == 2 * n - 5

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            an_generators(3)

    def test_fewer_polynomials_fail(self):
        M = an_matrix(5)
        w = an_generators(5, M)
        assert not equal_radical(minors_ideal(M), IdealPresentation(M.ring, w.polys[:-1]))


class TestJordan:
    @pytest.mark.parametrize(
        "spec,count",
        [("J(0,3)", 2), ("J(0,2) J(0,2)", 2), ("J(0,1) J(1,1)", 1), ("J(0,2) J(1,1) J(2,2)", 4), ("J(0,1) J(0,1) J(1,1)", 2)],
    )
    def test_counts_and_verification(self, spec, count):
        w = jordan_generators(parse_block_spec(spec))
        assert w.count == count
        assert w.verify()

    def test_rejects_other_blocks(self):
        with pytest.raises(ValueError):
            jordan_generators(parse_block_spec("J(0,1) B(1)"))


class TestSyzygyReduce:
    R = PolyRing(["x", "y", "z"], QQ)

    def test_basic_step(self):
        x, y, z = self.R.gens()
        # f = (x, y, x + y): syzygy (y, -x) of (x, y) and x + y = 1*y + (-1)*(-x)
        w = syzygy_reduce([x, y, x + y], [y, -x], [1, -1], 1)
        assert w.polys == ((x + y) + x, -(x + y) + y)
        assert w.verify()

    def test_invalid_syzygy(self):
        x, y, _ = self.R.gens()
        with pytest.raises(SyzygyInvalid):
            syzygy_reduce([x, y, x], [x, y], [1, 1], 1)

    def test_power_not_in_ideal(self):
        x, y, z = self.R.gens()
        with pytest.raises(PowerNotInSyzygyIdeal):
            syzygy_reduce([x, y, z], [y, -x], [1, 0], 1)

    def test_argument_shapes(self):
        x, y, _ = self.R.gens()
        with pytest.raises(ValueError):
            syzygy_reduce([x], [], [], 1)
        with pytest.raises(ValueError):
            syzygy_reduce([x, y], [y], [1], 0)

    def test_koszul(self):
        x, y, _ = self.R.gens()
        g = koszul_syzygy(x * y, y - x)
        assert g[0] * (x * y) + g[1] * (y - x) == 0

    @settings(max_examples=15)
    @given(st.integers(0, 10**6))
    def test_plucker_syzygy(self, seed):
        import random

        rng = random.Random(seed)
        F = GF(101)
        ring = PolyRing(["u", "v", "w"], F)
        from minorkit.pencil import LinMatrix

        lf = lambda: ring.linear_form({n: rng.randrange(101) for n in ring.names})  # noqa: E731
        M = LinMatrix.from_rows(ring, [lf() for _ in range(4)], [lf() for _ in range(4)])
        f, g = plucker_syzygy(M, 4, 1, 2, 3)
        assert sum((a * b for a, b in zip(f, g)), ring.zero()) == 0


class TestNilpotentExtend:
    def test_appends_variables(self):
        form = parse_block_spec("B(1) B(1) N(2)")
        ring = form.ring
        base = bruns_poset_polys(M=parse_block_spec("B(1) B(1)").matrix)
        nil = form.blocks[-1]
        w = nilpotent_extend(WitnessSet(base.polys, None, "BrunsPoset"), nil, ring, minors_ideal(form.matrix))
        assert w.count == base.count + 2
        assert w.verify()

    def test_collision(self):
        ring = PolyRing(["a", "b"], QQ)
        base = WitnessSet((ring.var("a"),), None, "BrunsPoset")
        with pytest.raises(ValueError):
            nilpotent_extend(base, Block("N", 1, variables=("a",)), ring)

    def test_unnamed_block(self):
        with pytest.raises(ValueError):
            nilpotent_extend(None, Block("N", 2))

    def test_pure_nilpotent_radical(self):
        form = parse_block_spec("N(3)")
        w = nilpotent_extend(None, form.blocks[0], form.ring, minors_ideal(form.matrix))
        assert w.verify()


class TestWitnessSet:
    def test_round_trip(self):
        w = an_generators(4)
        w.verify()
        back = WitnessSet.from_dict(w.to_dict(), w.ring, w.target)
        assert back.polys == w.polys and back.tag == "AnKn" and back.verified is True

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            WitnessSet((), None, "Mystery")

    def test_count_mismatch(self):
        ring = PolyRing(["a"], QQ)
        with pytest.raises(ValueError):
            WitnessSet.from_dict({"construction": "BrunsPoset", "count": 2, "polynomials": ["a"]}, ring)

    def test_failed_verification_is_recorded(self):
        M = generic_matrix(3)
        w = WitnessSet((M.minor(1, 2),), minors_ideal(M), "BrunsPoset")
        assert not w.verify()
        assert w.verified is False

    def test_verification_needs_target(self):
        ring = PolyRing(["a"], QQ)
        with pytest.raises(ValueError):
            WitnessSet((ring.var("a"),), None, "BrunsPoset").verify()

    def test_each_witness_lies_in_the_radical(self):
        w = scroll_sci(3)
        assert all(radical_member(f, w.target) for f in w.polys)
