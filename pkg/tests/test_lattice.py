import itertools

import pytest

from omlogic.lattice import (
    FiniteOrthoLattice,
    IncompleteLatticeError,
    LatticeError,
    UnknownElementError,
    boolean,
    build_family,
    distributivity_oracle,
    hexagon,
    mo,
)


def small_oml_families():
    return [boolean(n) for n in range(1, 5)] + [mo(n) for n in range(1, 5)]


class TestFamilies:
    def test_mo2_shape(self):
        lat = mo(2)
        assert lat.elements == ("0", "a", "a'", "b", "b'", "1")
        atoms = ["a", "a'", "b", "b'"]
        for x, y in itertools.combinations(atoms, 2):
            assert not lat.leq(x, y) and not lat.leq(y, x)

    def test_boolean3_shape(self):
        lat = boolean(3)
        assert len(lat) == 8
        for x, y in itertools.product(lat.elements, repeat=2):
            assert lat.compatible(x, y)

    def test_boolean_naming(self):
        lat = boolean(3)
        assert set(lat.elements) == {"0", "a", "b", "c", "ab", "ac", "bc", "1"}
        assert lat.ortho("a") == "bc"
        assert lat.join("a", "b") == "ab"

    def test_hexagon_breaks_orthomodularity(self):
        lat = hexagon()
        assert lat.leq("a", "b")
        assert lat.join("a", lat.meet(lat.ortho("a"), "b")) == "a"

    def test_size_bounds(self):
        with pytest.raises(ValueError):
            boolean(7)
        with pytest.raises(ValueError):
            mo(9)
        with pytest.raises(ValueError):
            boolean(0)

    def test_custom_names(self):
        lat = mo(2, names=["x", "y"])
        assert "x'" in lat.elements and "y'" in lat.elements

    def test_build_family_dispatch(self):
        assert build_family("mo", 2) == mo(2)
        assert build_family("hexagon") == hexagon()
        with pytest.raises(ValueError):
            build_family("chain", 3)


class TestConstruction:
    def test_duplicate_names_rejected(self):
        with pytest.raises(LatticeError):
            FiniteOrthoLattice("bad", ["0", "a", "a", "1"])

    def test_bounds_required(self):
        with pytest.raises(LatticeError):
            FiniteOrthoLattice("bad", ["a", "b"])

    def test_conflicting_ortho_rejected(self):
        with pytest.raises(LatticeError):
            FiniteOrthoLattice(
                "bad", ["0", "a", "b", "c", "1"], [], [("a", "b"), ("a", "c")]
            )

    def test_unknown_element(self):
        lat = mo(2)
        with pytest.raises(UnknownElementError):
            lat.leq("a", "zz")
        with pytest.raises(UnknownElementError):
            lat.index("q")


class TestVerify:
    @pytest.mark.parametrize("lat", small_oml_families(), ids=lambda l: l.name)
    def test_families_pass_all_laws(self, lat):
        report = lat.verify()
        assert report.ok, report.failed()

    def test_hexagon_fails_exactly_orthomodularity(self):
        report = hexagon().verify()
        failed = report.failed()
        assert [c.law for c in failed] == ["orthomodularity"]
        assert failed[0].witness == ("a", "b")

    def test_missing_ortho_is_structural(self):
        lat = FiniteOrthoLattice(
            "partial", ["0", "a", "b", "1"], [("0", "a"), ("a", "1"), ("0", "b"), ("b", "1")]
        )
        report = lat.verify()
        assert not report["structure"].passed
        assert report["structure"].witness == ("a",)

    def test_incomparable_pair_breaks_completeness(self):
        # two maximal elements below nothing: no join
        lat = FiniteOrthoLattice(
            "nolub",
            ["0", "a", "b", "c", "d", "1"],
            [("0", "a"), ("0", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"),
             ("c", "1"), ("d", "1")],
            [("a", "c"), ("b", "d")],
        )
        assert not lat.verify()["completeness"].passed

    def test_cycle_breaks_antisymmetry(self):
        lat = FiniteOrthoLattice(
            "cyc", ["0", "a", "b", "1"],
            [("0", "a"), ("a", "b"), ("b", "a"), ("b", "1")],
            [("a", "b")],
        )
        assert not lat.verify()["antisymmetry"].passed


class TestQueries:
    def test_join_of_mo2_atoms(self):
        lat = mo(2)
        assert lat.join("a", "b") == "1"
        assert lat.meet("a", "b") == "0"

    def test_complement_meet(self):
        for lat in small_oml_families():
            for x in lat.elements:
                assert lat.meet(x, lat.ortho(x)) == "0"

    def test_set_folds(self):
        lat = boolean(3)
        assert lat.join_set([]) == "0"
        assert lat.meet_set([]) == "1"
        assert lat.join_set(["a", "b", "c"]) == "1"
        assert lat.meet_set(["ab", "ac"]) == "a"

    def test_ortho_of_boolean_atom_set(self):
        lat = boolean(2)
        assert lat.ortho("a") == "b"
        assert lat.ortho("b") == "a"

    def test_incomplete_query_raises(self):
        lat = FiniteOrthoLattice(
            "nolub",
            ["0", "a", "b", "c", "d", "1"],
            [("0", "a"), ("0", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"),
             ("c", "1"), ("d", "1")],
        )
        with pytest.raises(IncompleteLatticeError):
            lat.join("a", "b")

    def test_covers_of_boolean2(self):
        lat = boolean(2)
        assert set(lat.covers()) == {("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")}


class TestCompatibility:
    def test_mo2_atoms_incompatible(self):
        lat = mo(2)
        assert not lat.compatible("a", "b")

    def test_ortho_pair_always_compatible(self):
        for lat in small_oml_families():
            for x in lat.elements:
                assert lat.compatible(x, lat.ortho(x))

    def test_boolean_all_compatible(self):
        lat = boolean(3)
        for x, y in itertools.product(lat.elements, repeat=2):
            assert lat.compatible(x, y)

    def test_criterion_agrees_with_oracle(self):
        # every generated family that passes verify, up to 16 elements
        families = [boolean(n) for n in range(1, 5)] + [mo(n) for n in range(1, 8)]
        for lat in families:
            for x, y in itertools.product(lat.elements, repeat=2):
                assert lat.compatible(x, y) == distributivity_oracle(lat, x, y), (
                    lat.name,
                    x,
                    y,
                )


class TestSasaki:
    def test_mo2_projection(self):
        lat = mo(2)
        assert lat.sasaki("a", "b") == "a"

    def test_projection_onto_orthocomplement_is_zero(self):
        for lat in small_oml_families():
            for x in lat.elements:
                assert lat.sasaki(x, lat.ortho(x)) == "0"

    @pytest.mark.parametrize("lat", small_oml_families(), ids=lambda l: l.name)
    def test_pointwise_laws_exhaustive(self, lat):
        for a, b in itertools.product(lat.elements, repeat=2):
            img = lat.sasaki(a, b)
            assert lat.leq(img, a)
            assert lat.sasaki(a, img) == img  # idempotent
            assert (img == "0") == lat.leq(b, lat.ortho(a))
            assert (img == b) == lat.leq(b, a)
            if lat.leq(b, a):
                assert img == b
            if lat.compatible(a, b):
                assert img == lat.meet(a, b)
