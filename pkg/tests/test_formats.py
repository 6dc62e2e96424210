import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from omlogic.derive import derive_measurement
from omlogic.formats import (
    ParseError,
    parse_derivation,
    parse_formula,
    parse_lattice,
    parse_map,
    parse_sequent,
    serialize,
)
from omlogic.kernel import check_derivation
from omlogic.lattice import boolean, hexagon, mo
from omlogic.propagation import perfect_measurement_map
from omlogic.syntax import (
    Actual,
    Const,
    Plus,
    Reachable,
    Sequent,
    Tensor,
    Var,
)


def In(x):
    return Actual(Const(x))


def R(x):
    return Reachable(Const(x))


class TestLatticeFormat:
    def test_round_trip_families(self):
        for lat in (boolean(3), mo(4), hexagon()):
            assert parse_lattice(serialize(lat)) == lat

    def test_comments_and_whitespace(self):
        text = """
# a tiny lattice
lattice demo
elements 0 a a' 1   # four elements
leq 0 a
leq a 1
leq 0 a'
leq a' 1
ortho a a'          # 0 1 implied
end
"""
        lat = parse_lattice(text)
        assert lat.verify().ok
        assert lat.ortho("a") == "a'"

    def test_unknown_element_span(self):
        text = "lattice x\nelements 0 1\nleq 0 zz\nend\n"
        with pytest.raises(ParseError) as err:
            parse_lattice(text)
        assert err.value.span.line == 3
        assert err.value.span.column == 7
        assert err.value.span.length == 2

    def test_missing_end(self):
        with pytest.raises(ParseError, match="end"):
            parse_lattice("lattice x\nelements 0 1\n")

    def test_duplicate_element(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_lattice("lattice x\nelements 0 1 a a\nend\n")

    def test_unknown_directive_expected_set(self):
        with pytest.raises(ParseError) as err:
            parse_lattice("lattice x\nelements 0 1\nfoo 0 1\nend\n")
        assert "leq" in err.value.expected


class TestMapFormat:
    def test_measure_form_expands(self):
        lat = mo(2)
        f = parse_map("map blur over mo2\nmeasure a\nend\n", lat)
        assert f == perfect_measurement_map(lat, "a")
        assert f.kind == "measurement"

    def test_general_round_trip(self):
        lat = mo(2)
        rng = random.Random(3)
        for _ in range(20):
            f = gen.random_map(lat, rng)
            assert parse_map(serialize(f), lat) == f

    def test_lattice_name_mismatch(self):
        with pytest.raises(ParseError, match="over"):
            parse_map("map m over other\nmeasure a\nend\n", mo(2))

    def test_missing_row(self):
        lat = mo(2)
        with pytest.raises(ParseError, match="missing"):
            parse_map("map m over mo2\non a -> {a}\nend\n", lat)

    def test_empty_image_allowed(self):
        lat = mo(2)
        rows = "\n".join(f"on {e} -> {{}}" for e in lat.nonzero())
        f = parse_map(f"map dead over mo2\n{rows}\nend\n", lat)
        assert all(not img for _, img in f.items())


class TestFormulaGrammar:
    def test_smallest_composite(self):
        lat = mo(2)
        assert parse_formula("In(a) * R(a)", lat) == Tensor(In("a"), R("a"))

    def test_measurement_sequent(self):
        lat = mo(2)
        text = "M(b) * (In(a) * R(a)) |- (In(b)*R(b)) + (In(ortho(b))*R(ortho(b)))"
        seq = parse_sequent(text, lat)
        expected = derive_measurement(lat, "a", "b").conclusion
        assert seq == expected

    def test_triple_tensor_rejected(self):
        lat = mo(2)
        with pytest.raises(ParseError, match="non-associative"):
            parse_formula("In(a) * R(a) * In(b)", lat)

    def test_tensor_grouping_preserved(self):
        lat = boolean(3)
        left = parse_formula("(In(a) * In(b)) * In(c)", lat)
        right = parse_formula("In(a) * (In(b) * In(c))", lat)
        assert left != right

    def test_plus_left_associative(self):
        lat = boolean(3)
        f = parse_formula("In(a) + In(b) + In(c)", lat)
        assert f == Plus(Plus(In("a"), In("b")), In("c"))

    def test_lolli_right_associative(self):
        lat = boolean(3)
        f = parse_formula("In(a) -o In(b) -o In(c)", lat)
        assert f.consequent.consequent == In("c")

    def test_ortho_constant_normalizes(self):
        lat = mo(2)
        assert parse_formula("In(ortho(a))", lat) == In("a'")
        assert parse_formula("In(ortho(ortho(a)))", lat) == In("a")

    def test_measurement_canonical(self):
        lat = mo(2)
        assert parse_formula("M(b')", lat) == parse_formula("M(b)", lat)

    def test_forall_with_guard(self):
        lat = mo(2)
        f = parse_formula("forall v {!<= b, !<= ortho(b)} . In(v) -o R(v)", lat)
        assert f.var == "v"
        assert len(f.guard) == 2
        assert parse_formula(serialize(f), lat) == f

    def test_zero_atom_rejected(self):
        lat = mo(2)
        with pytest.raises(ParseError, match="absurd"):
            parse_formula("In(0)", lat)

    def test_error_span_inside_token(self):
        lat = mo(2)
        with pytest.raises(ParseError) as err:
            parse_formula("In(a) @ R(a)", lat)
        assert err.value.span.column == 7

    def test_expected_tokens_on_bad_unit(self):
        lat = mo(2)
        with pytest.raises(ParseError) as err:
            parse_formula("In(a) * + R(a)", lat)
        assert {"In", "R", "M", "IND", "(", "forall"} <= err.value.expected

    def test_empty_context_sequent(self):
        lat = mo(2)
        seq = parse_sequent("|- In(a)", lat)
        assert seq == Sequent((), In("a"))

    def test_free_variable_parses(self):
        lat = mo(2)
        f = parse_formula("In(v)", lat)
        assert f == Actual(Var("v"))


class TestDerivationFormat:
    def test_round_trip_measurement(self):
        lat = mo(2)
        d = derive_measurement(lat, "a", "b")
        text = serialize(d)
        parsed = parse_derivation(text, lat)
        assert parsed == d
        assert check_derivation(lat, parsed).valid

    def test_witness_round_trip(self):
        from omlogic.kernel import RuleApp
        from omlogic.syntax import Forall

        lat = mo(2)
        quantified = Forall("x", (), Actual(Var("x")))
        leaf = RuleApp("id", Sequent((In("a"),), In("a")), ())
        d = RuleApp(
            "forall_l", Sequent((quantified,), In("a")), (leaf,), witness=Const("a")
        )
        assert parse_derivation(serialize(d), lat) == d

    def test_unknown_rule_rejected(self):
        lat = mo(2)
        with pytest.raises(ParseError) as err:
            parse_derivation('(rule zap (seq "In(a) |- In(a)"))', lat)
        assert "cut" in err.value.expected

    def test_inner_sequent_error_positioned(self):
        lat = mo(2)
        with pytest.raises(ParseError) as err:
            parse_derivation('(rule id (seq "In(a) |-"))', lat)
        assert err.value.span.line == 1


class TestRoundTripCorpus:
    def test_seeded_corpus(self):
        rng = random.Random(20260810)
        for i in range(60):
            lat = gen.random_lattice(rng)
            assert parse_lattice(serialize(lat)) == lat
            f = gen.random_map(lat, rng)
            assert parse_map(serialize(f), lat) == f
            formula = gen.random_normal_formula(lat, rng, rng.randint(0, 4))
            assert parse_formula(serialize(formula), lat) == formula
            seq = gen.random_sequent(lat, rng)
            assert parse_sequent(serialize(seq), lat) == seq
        for i in range(20):
            lat, d = gen.random_derivation(rng)
            assert parse_derivation(serialize(d), lat) == d

    @given(data=st.data())
    @settings(max_examples=80, deadline=None)
    def test_formula_round_trip_property(self, data):
        seed = data.draw(st.integers(0, 2**32 - 1))
        rng = random.Random(seed)
        lat = mo(3)
        f = gen.random_normal_formula(lat, rng, 5)
        assert parse_formula(serialize(f), lat) == f

    def test_canonical_text_fixed_point(self):
        rng = random.Random(99)
        lat = gen.random_lattice(rng)
        text = serialize(lat)
        assert serialize(parse_lattice(text)) == text
        f = gen.random_normal_formula(lat, rng, 4)
        assert serialize(parse_formula(serialize(f), lat)) == serialize(f)
