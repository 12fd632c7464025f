import pytest
from hypothesis import given
from hypothesis import strategies as st

from bpfgl.poly import F2, QQ, Poly, parse_poly
from bpfgl.series import (
    EpsSeries,
    SeriesMismatch,
    TruncSeries,
    check_homogeneous,
    compare,
    compose,
    format_series,
    inverse,
    revert,
    solve_composition,
    z_series,
)

from strategies import series


def x(N, ring=F2, arity=1):
    return TruncSeries.x(N, ring, arity)


def v1(e=1, ring=F2):
    return Poly.v(1, ring, e)


def shifted(s):
    """x + s*x^2, a series with leading term x."""
    return x(s.order, s.ring) + s.mul_monomial((2,))


class TestArithmetic:
    def test_z_squared(self):
        N = 8
        z = z_series(N)
        assert z * z == z + x(N).scale(v1())
        assert z * z + z + x(N).scale(v1()) == TruncSeries.zero(N, F2)

    def test_z_values(self):
        assert z_series(5) == TruncSeries.from_coeffs(5, F2, {1: v1(), 2: v1(2), 4: v1(4)})

    def test_unit(self):
        z = z_series(9)
        assert z * TruncSeries.const(1, 9, F2) == z

    def test_binomial(self):
        X, Y = x(3, QQ, 2), TruncSeries.y(3, QQ)
        s = (X + Y) ** 2
        assert s.coefficient(1, 1) == Poly.const(2)
        assert s.coefficient(2, 0) == Poly.one() and s.coefficient(0, 2) == Poly.one()

    def test_truncation_mismatch_is_an_error(self):
        with pytest.raises(SeriesMismatch):
            x(5) + x(6)
        with pytest.raises(SeriesMismatch):
            x(5).truncate(6)

    def test_z_over_v1x(self):
        N = 17
        z = z_series(N)
        # z / (v1 x) = sum_k v1^(2^k - 1) x^(2^k - 1)
        q = TruncSeries.from_coeffs(N, F2, {2 ** k - 1: v1(2 ** k - 1) for k in range(5)})
        assert q.mul_monomial((1,), v1()) == z
        assert q * (TruncSeries.const(1, N, F2) + z) == TruncSeries.const(1, N, F2)
        assert inverse(TruncSeries.const(1, N, F2) + z) == q

    @given(series(order=7), series(order=7))
    def test_frobenius_square(self, a, b):
        assert (a + b).square() == a * a + b * b

    @given(series(order=6, arity=2))
    def test_swap_is_an_involution(self, s):
        assert s.swap().swap() == s


class TestCompose:
    def test_identities(self):
        N = 9
        f = TruncSeries.from_coeffs(N, QQ, {1: 1, 2: Poly.v(1), 5: Poly.v(2)})
        assert compose(f, x(N, QQ)) == f
        assert compose(x(N, QQ), f) == f
        g = TruncSeries.from_coeffs(3, F2, {1: 1, 2: v1()})
        assert compose(g, x(3)) == g

    def test_two_variable_inner(self):
        N = 5
        f = TruncSeries.from_coeffs(N, QQ, {1: 1, 2: 1})
        X, Y = x(N, QQ, 2), TruncSeries.y(N, QQ)
        assert compose(f, X + Y) == (X + Y) + (X + Y) ** 2

    @given(series(order=7, valuation=1), series(order=7, valuation=1),
           series(order=7, valuation=1))
    def test_associative(self, f, g, h):
        assert compose(compose(f, g), h) == compose(f, compose(g, h))

    def test_nonzero_constant_inner_is_rejected(self):
        with pytest.raises(ValueError):
            compose(x(4), TruncSeries.const(1, 4, F2))


class TestRevert:
    def test_identity(self):
        assert revert(x(10, QQ)) == x(10, QQ)

    def test_mod2_example(self):
        N = 33
        f = TruncSeries.from_coeffs(N, F2, {1: 1, 2: v1()})
        want = TruncSeries.from_coeffs(N, F2, {2 ** k: v1(2 ** k - 1) for k in range(6)})
        assert revert(f) == want

    @given(series(order=8, ring=QQ, names=("v1",)))
    def test_two_sided_rational(self, s):
        f = shifted(s)
        g = revert(f)
        assert compose(f, g) == x(8, QQ)
        assert compose(g, f) == x(8, QQ)

    @given(series(order=9))
    def test_two_sided_mod2(self, s):
        f = shifted(s)
        g = revert(f)
        assert compose(f, g) == x(9) and compose(g, f) == x(9)

    def test_solve_composition(self):
        N = 8
        f = TruncSeries.from_coeffs(N, QQ, {1: 1, 3: Poly.v(1)})
        X, Y = x(N, QQ, 2), TruncSeries.y(N, QQ)
        rhs = compose(f, X) + compose(f, Y)
        s = solve_composition(f, rhs)
        assert compose(f, s) == rhs
        assert s.swap() == s

    def test_bad_leading_term(self):
        with pytest.raises(ValueError):
            revert(TruncSeries.from_coeffs(5, QQ, {1: 2}))


class TestDerivative:
    def test_examples(self):
        assert not TruncSeries.const(3, 5, QQ).derivative()
        assert (x(5, QQ) ** 2).derivative() == x(4, QQ).scale(2)

    @given(series(order=8, ring=QQ), series(order=8, ring=QQ))
    def test_leibniz(self, f, g):
        lhs = (f * g).derivative()
        rhs = f.derivative() * g.truncate(7) + f.truncate(7) * g.derivative()
        assert lhs == rhs


class TestEps:
    def test_product_rule(self):
        N = 6
        a = TruncSeries.from_coeffs(N, QQ, {1: 3, 2: Poly.v(1)})
        c = TruncSeries.from_coeffs(N, QQ, {0: 1, 1: 2})
        b = TruncSeries.from_coeffs(N, F2, {0: 1})
        d = TruncSeries.from_coeffs(N, F2, {3: v1()})
        got = EpsSeries(a, b) * EpsSeries(c, d)
        assert got.even == a * c
        assert got.eps == a.reduce_mod(1) * d + b * c.reduce_mod(1)

    def test_eps_part_is_mod2(self):
        with pytest.raises(SeriesMismatch):
            EpsSeries(x(4, QQ), x(4, QQ))

    def test_eps_squared_vanishes(self):
        N = 5
        e = EpsSeries(TruncSeries.zero(N, QQ), TruncSeries.const(1, N, F2))
        assert e * e == EpsSeries(TruncSeries.zero(N, QQ), TruncSeries.zero(N, F2))
        assert not (e + e).eps


class TestResiduals:
    def test_compare_names_first_difference(self):
        a = z_series(9)
        b = a + TruncSeries.from_coeffs(9, F2, {4: v1(3)})
        r = compare(a, b, "z")
        assert not r.ok and r.witness == "z: x^4: v1^3"
        assert compare(a, a).ok

    def test_homogeneity(self):
        assert check_homogeneous(z_series(17), 0).ok
        bad = z_series(5) + TruncSeries.from_coeffs(5, F2, {3: v1()})
        assert not check_homogeneous(bad).ok

    def test_format(self):
        s = TruncSeries.from_coeffs(4, QQ, {1: 1, 2: parse_poly("-1/2*v1"), 3: parse_poly("v1 + v2")})
        assert format_series(s) == "x + (-1/2*v1)*x^2 + (v1 + v2)*x^3"

    @given(st.integers(1, 40))
    def test_z_is_homogeneous_at_every_order(self, N):
        assert check_homogeneous(z_series(N), 0).ok
