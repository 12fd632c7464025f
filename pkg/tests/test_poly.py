from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bpfgl.poly import (
    F2,
    QQ,
    Z4,
    NonIntegralError,
    ParseError,
    Poly,
    Ring,
    RingMismatch,
    Variable,
    format_poly,
    grade,
    is_2_integral,
    pack,
    parse_poly,
    reduce_mod,
    unpack,
)

from strategies import integral_polys, monomials, polys

P2 = "v1^4*v2 + v1*v2^2 + v3"
P3 = "v1^12*v2 + v1^6*v2^3 + v1^2*v2^2*v3 + v1*v3^2 + v4"


def v(n, ring=F2, e=1):
    return Poly.v(n, ring, e)


class TestVariables:
    def test_degrees(self):
        assert [Variable("v", n).degree for n in range(1, 5)] == [2, 6, 14, 30]
        assert Variable.parse("u").degree == 2
        assert Variable.parse("w").degree == 0
        assert Variable.parse("m3").degree == 14

    def test_parse_round_trip(self):
        for name in ("v1", "v7", "u", "w", "m2"):
            assert Variable.parse(name).name == name
            assert Variable.from_slot(Variable.parse(name).slot) == Variable.parse(name)

    def test_bad_name(self):
        with pytest.raises(ValueError):
            Variable.parse("q1")

    def test_pack_unpack(self):
        e = {Variable("v", 1).slot: 12, Variable("v", 2).slot: 1}
        assert unpack(pack(e)) == e


class TestArithmetic:
    def test_char_two_cancellation(self):
        assert not (v(1) + v(1))
        assert v(1) + Poly.zero(F2) == v(1)

    def test_sum_gives_p2(self):
        assert (parse_poly("v1^4*v2 + v3", F2) + parse_poly("v1*v2^2", F2)
                == parse_poly(P2, F2))

    def test_product_term_of_u2(self):
        assert (v(1) * v(1)) ** 2 * v(2) == parse_poly("v1^4*v2", F2)
        a = parse_poly(P3, F2)
        assert Poly.one(F2) * a == a

    def test_cyclotomic_reduction(self):
        R3 = Ring(2, 3)
        w = Poly.var("w", R3)
        assert w * w ** 2 == Poly.one(R3)
        assert w ** 2 == -(Poly.one(R3) + w)
        assert 1 + w + w ** 2 == Poly.zero(R3)
        R5 = Ring(0, 5)
        w5 = Poly.var("w", R5)
        assert sum((w5 ** i for i in range(5)), Poly.zero(R5)) == Poly.zero(R5)

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            v(1, F2) + v(1, QQ)

    def test_frobenius_square(self):
        a = parse_poly(P2, F2)
        assert a.square() == a * a

    @given(polys(), polys(), polys())
    def test_ring_axioms_rational(self, a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == Poly.zero(QQ)

    @given(polys(F2), polys(F2), polys(F2))
    def test_ring_axioms_mod2(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a + b).square() == a.square() + b.square()

    @given(polys(Ring(2, 3), ("v1", "w")), polys(Ring(2, 3), ("v1", "w")))
    def test_cyclotomic_reduction_is_canonical(self, a, b):
        w_slot = Variable.parse("w").slot
        for m in (a * b).terms:
            assert unpack(m).get(w_slot, 0) < 2
        assert (a * b) * a == a * (b * a)


class TestGrade:
    def test_examples(self):
        assert grade(parse_poly("v1^12*v2").monomials()[0]) == 30
        assert grade(parse_poly("v1^2*v2^2*v3").monomials()[0]) == 30
        assert grade(Poly.one().monomials()[0]) == 0

    @given(monomials(), monomials())
    def test_additive(self, a, b):
        ma = Poly.monomial(a).monomials()[0]
        mb = Poly.monomial(b).monomials()[0]
        assert grade(ma + mb) == grade(ma) + grade(mb)

    def test_p3_is_homogeneous(self):
        p3 = parse_poly(P3, F2)
        assert p3.is_homogeneous() and p3.grades() == {30}


class TestReduction:
    def test_examples(self):
        assert not reduce_mod(parse_poly("2*v1"), 1)
        assert reduce_mod(parse_poly("3/5*v1"), 1) == v(1)
        with pytest.raises(NonIntegralError):
            reduce_mod(parse_poly("1/2*v1"), 1)
        assert reduce_mod(parse_poly("7*v1 + 2*v2"), 2) == parse_poly("3*v1 + 2*v2", Z4)

    def test_integrality(self):
        assert not is_2_integral(parse_poly("1/2*v1"))
        assert is_2_integral(parse_poly("3/7*v1"))
        assert is_2_integral(Poly.zero())

    @given(integral_polys(), integral_polys(), st.sampled_from([1, 2]))
    def test_reduction_is_a_ring_map(self, a, b, k):
        assert reduce_mod(a * b, k) == reduce_mod(a, k) * reduce_mod(b, k)
        assert reduce_mod(a + b, k) == reduce_mod(a, k) + reduce_mod(b, k)

    @given(polys(Z4))
    def test_lift_then_reduce(self, a):
        assert reduce_mod(a.lift(), 2) == a


class TestSubstitute:
    def test_drop_v3_from_p3(self):
        p3 = parse_poly(P3, F2)
        assert p3.substitute({"v3": Poly.zero(F2)}) == parse_poly("v1^12*v2 + v1^6*v2^3 + v4", F2)

    def test_trivial_bindings(self):
        a = parse_poly(P2, F2)
        assert a.substitute({}) == a
        assert a.substitute({"v1": v(1)}) == a

    def test_simultaneous(self):
        a = parse_poly("v1*v2", QQ)
        got = a.substitute({"v1": Poly.v(2), "v2": Poly.v(1)})
        assert got == a

    @given(polys(), polys(names=("v1",)), polys(names=("v1",)))
    def test_substitution_is_a_ring_map(self, b, a, c):
        binding = {"v2": b}
        assert (a * c).substitute(binding) == a.substitute(binding) * c.substitute(binding)
        assert (a + c).substitute(binding) == a.substitute(binding) + c.substitute(binding)


class TestText:
    def test_published_values_parse(self):
        p2 = parse_poly(P2, F2)
        assert p2 == v(1, F2, 4) * v(2) + v(1) * v(2, F2, 2) + v(3)
        assert format_poly(p2) == P2
        assert format_poly(parse_poly(P3, F2)) == P3
        assert not parse_poly("0")

    def test_canonical_order(self):
        assert format_poly(parse_poly("v3 + v1*v2^2 + v1^4*v2", F2)) == P2

    def test_rational_format(self):
        assert format_poly(parse_poly("-1/2*v1 + 3")) == "3 - 1/2*v1"

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as info:
            parse_poly("v1 + * v2")
        assert info.value.pos == 5
        with pytest.raises(ParseError):
            parse_poly("")

    @given(polys())
    def test_round_trip_rational(self, a):
        assert parse_poly(format_poly(a), QQ) == a

    @given(polys(F2))
    def test_round_trip_mod2(self, a):
        assert parse_poly(format_poly(a), F2) == a

    def test_fraction_coefficients(self):
        a = Poly.const(Fraction(3, 4), QQ)
        assert a.constant_term() == Fraction(3, 4)
