import json

import pytest
from hypothesis import given

from bpfgl.checks import J_N2_X4
from bpfgl.ideals import (
    IllFormedIdeal,
    I_ideal,
    TriangularIdeal,
    bpn2_obstruction,
    bpn_spec,
    check_dimensions,
    check_In_plus_J,
    construct_J,
    ideal_j_report,
    load_ideal_spec,
    nf,
    realisability_report,
    verify_pwk,
    vk_ideal,
)
from bpfgl.poly import F2, ParseError, Poly, parse_poly

from strategies import polys

NAMES = ("v1", "v2", "v3", "v4")
J2 = construct_J(2, 5).ideal


def p(text):
    return parse_poly(text, F2)


class TestNormalForm:
    def test_examples(self):
        ideal = vk_ideal([3, 4])
        assert nf(p("v1*v3 + v2"), ideal) == p("v2")
        assert not nf(p("v4^2 + v3*v1"), ideal)
        assert nf(parse_poly("3*v1 + 2*v2"), ideal) == p("v1")

    def test_rules_are_interreduced(self):
        ideal = TriangularIdeal.from_generators(["v3 + v1^4*v2", "v4 + v1^8*v3"])
        assert ideal.rules[4] == p("v1^12*v2")
        assert ideal.contains(p("v4 + v1^12*v2"))

    def test_unit_ideal_of_I(self):
        I3 = I_ideal(3)
        assert I3.contains_two
        assert nf(p("v1 + v2 + v3"), I3) == p("v3")

    @pytest.mark.parametrize("gens, message", [
        (["v1 + v2"], "not homogeneous"),
        (["v1^3"], "no bare linear variable"),
        (["v3", "v3 + v1^7"], "shared"),
        (["1"], "unit"),
        (["1/2*v1"], "not 2-integral"),
    ])
    def test_ill_formed(self, gens, message):
        with pytest.raises(IllFormedIdeal, match=message):
            TriangularIdeal.from_generators(gens)

    @given(polys(F2, NAMES))
    def test_idempotent(self, a):
        assert nf(nf(a, J2), J2) == nf(a, J2)

    @given(polys(F2, NAMES), polys(F2, NAMES))
    def test_linear_and_multiplicative(self, a, b):
        assert nf(a + b, J2) == nf(a, J2) + nf(b, J2)
        assert nf(a * b, J2) == nf(nf(a, J2) * nf(b, J2), J2)


class TestJ:
    def test_n1_is_bp1(self):
        res = construct_J(1, 5)
        assert res.ok
        assert res.generators == {k: Poly.v(k, F2) for k in range(2, 6)}

    def test_n2_generators(self):
        res = construct_J(2, 6)
        assert res.ok
        assert res.generators[3] == Poly.v(3, F2)
        assert res.generators[4] == p(J_N2_X4)
        assert res.generators[5] == p(
            "v1^25*v2^2 + v1^19*v2^4 + v1^16*v2^5 + v1^13*v2^6 + v1^10*v2^7 + v5")

    def test_report_checks(self):
        res = ideal_j_report(2, 5)
        assert res.ok
        names = [name for name, _ in res.checks]
        assert any(name.startswith("dimension") for name in names)
        assert any(name.startswith("I_n + J") for name in names)

    def test_dimension_check_detects_a_wrong_ideal(self):
        assert check_dimensions(2, J2, 30).ok
        assert not check_dimensions(2, vk_ideal([4, 5]), 30).ok
        assert not check_In_plus_J(2, vk_ideal([4, 5]), 30).ok

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            construct_J(0, 3)
        with pytest.raises(ValueError):
            construct_J(2, 2)


class TestQuadrics:
    def test_pwk(self):
        assert verify_pwk(4).ok

    def test_pwk_truncation(self):
        with pytest.raises(ValueError):
            verify_pwk(5, 32)


class TestRealisability:
    def test_bp2_has_an_obstruction(self):
        rep = realisability_report("specs/bp2.json")
        assert not rep.ok
        fails = [c for c in rep.checks if c.status == "fail"]
        assert fails[0].witness == "v1^12*v2 + v1^6*v2^3"
        assert bpn2_obstruction().witness == fails[0].witness

    def test_bp1_and_j(self):
        assert realisability_report("specs/bp1.json").ok
        assert realisability_report("specs/j_n2.json").ok

    def test_skip_rule(self):
        rep = realisability_report(bpn_spec(1, 6))
        skipped = [c for c in rep.checks if c.status == "skipped"]
        assert [c.statement.endswith("v6") for c in skipped] == [True]

    def test_two_inverted(self):
        rep = realisability_report({"name": "A", "generators": ["v3"], "inverted": ["2"]})
        assert rep.ok and rep.checks[0].status == "pass"

    def test_two_torsion(self):
        rep = realisability_report({"name": "A", "generators": ["2", "v2"]})
        assert not rep.ok and "2-torsion" in rep.verdict

    def test_json_shape(self):
        data = realisability_report("specs/bp1.json").to_json()
        assert set(data) == {"name", "generators", "contains_two", "inverted", "checks", "verdict"}
        assert data["checks"][0]["status"] == "n/a"

    def test_parse_errors_carry_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"generators": ["v1 + * v2"]}))
        with pytest.raises(ParseError) as info:
            load_ideal_spec(bad)
        assert info.value.pos == 5 and "generators[0]" in str(info.value)
        bad.write_text("{not json")
        with pytest.raises(ParseError):
            load_ideal_spec(bad)
        with pytest.raises(ParseError):
            load_ideal_spec({"name": "A"})
