import pytest
from hypothesis import given
from hypothesis import strategies as st

from bpfgl.poly import F2, QQ, Poly, parse_poly
from bpfgl.series import TruncSeries, z_series
from bpfgl.tring import (
    ContextMismatch,
    TContext,
    TElem,
    bp_context,
    check_degree_invariant,
    format_bracket,
    ku_context,
    qf_sum,
    t_compare,
    t_double,
    t_neg,
    t_pow,
    t_scalar,
    t_sum,
    z_elem,
)

from strategies import brackets, polys

BP = bp_context()
v1 = Poly.v(1, F2)


def el(a, b, ctx=BP):
    conv = lambda c: parse_poly(c, F2) if isinstance(c, str) else c
    return ctx.elem(conv(a), conv(b))


class TestExamples:
    def test_one_plus_one(self):
        assert el(1, 0) + el(1, 0) == el(0, "v1")
        assert t_sum([el(1, 0)] * 4).is_zero()

    def test_zero_is_neutral(self):
        p = el("v2", "v1^5")
        assert p + BP.zero() == p

    def test_products(self):
        assert (el(0, "v2") * el(0, "v3")).is_zero()
        p = el("v1 + v2", "v3")
        assert p * BP.one() == p

    def test_doubling(self):
        assert t_double(el(1, 0)) == el(0, "v1")
        assert t_double(el(0, "v2")).is_zero()
        assert t_double(t_double(el("v2", "v1"))).is_zero()

    def test_negation(self):
        assert -el(1, 0) == el(1, "v1")
        p = el("v2", "v3")
        assert (p + t_neg(p)).is_zero()

    def test_integer_images(self):
        assert t_scalar(BP, 2) == el(0, "v1")
        assert t_scalar(BP, 3) == el(1, "v1")
        assert t_scalar(BP, 4).is_zero()
        assert t_scalar(BP, -1) == -BP.one()

    def test_power_closed_form(self):
        p = el("v1 + v2", "v3")
        acc = BP.one()
        for n in range(7):
            assert t_pow(p, n) == acc
            acc = acc * p

    def test_format(self):
        assert format_bracket(el("v1", "v1^4*v2")) == "[v1, v1^4*v2]"


class TestContext:
    def test_twist_must_be_degree_two(self):
        with pytest.raises(ValueError):
            TContext("bad", Poly.v(2, F2))
        with pytest.raises(ValueError):
            TContext("bad", Poly.v(1, QQ))

    def test_contexts_do_not_mix(self):
        with pytest.raises(ContextMismatch):
            el(1, 0) + ku_context().one()

    def test_series_order_is_enforced(self):
        ctx = bp_context(5)
        with pytest.raises(ContextMismatch):
            ctx.elem(TruncSeries.x(6, F2), 0)


class TestZ:
    def test_bp(self):
        N = 17
        ctx = bp_context(N)
        one_z = TruncSeries.const(1, N, F2) + z_series(N)
        x = ctx.x()
        Z = z_elem(ctx, one_z)
        assert Z == ctx.elem(x, x * one_z)
        assert check_degree_invariant(Z).ok

    def test_ku(self):
        N = 9
        ctx = ku_context(N)
        u = Poly.var("u", F2)
        x = ctx.x()
        f2 = TruncSeries.from_coeffs(N, F2, {0: 1, 1: u})
        assert z_elem(ctx, f2) == ctx.elem(x, x + (x * x).scale(u))

    def test_zero_argument(self):
        ctx = bp_context(5)
        f2 = TruncSeries.const(1, 5, F2)
        assert z_elem(ctx, f2, TruncSeries.zero(5, F2)).is_zero()

    def test_constant_argument_rejected(self):
        ctx = bp_context(5)
        with pytest.raises(ValueError):
            z_elem(ctx, TruncSeries.const(1, 5, F2), TruncSeries.const(1, 5, F2))


class TestQfSum:
    def _additive_images(self, ctx):
        """Images of the additive law's coefficients: a_10 = a_01 = 1."""
        N = ctx.order
        out = {(i, j): ctx.elem(0, 0) for i in range(N) for j in range(N - i)}
        out[(1, 0)] = out[(0, 1)] = ctx.elem(1, 0)
        return out

    def test_unit(self):
        ctx = bp_context(6)
        x = ctx.x()
        X = ctx.elem(x, x * x)
        zero = ctx.elem(x * 0, x * 0)
        assert qf_sum(self._additive_images(ctx), [X, zero]) == X

    def test_missing_images_are_an_error(self):
        ctx = bp_context(4)
        x = ctx.x()
        with pytest.raises(KeyError):
            qf_sum({(1, 0): ctx.one()}, [ctx.elem(x, 0), ctx.elem(x, 0)])

    def test_compare_witness(self):
        ctx = bp_context(5)
        x = ctx.x()
        r = t_compare(ctx.elem(x, 0), ctx.elem(x, x * x), "demo")
        assert not r.ok and r.witness == "demo: b-part x^2: 1"


class TestPairs:
    def test_round_trip(self):
        p = el("v1 + v2", "v3")
        r, s_even, s_eps = p.to_pair()
        assert s_even == r * r
        assert TElem.from_pair(BP, r, s_even, s_eps) == p
        with pytest.raises(ValueError):
            TElem.from_pair(BP, r, r, s_eps)

    def test_eps_form_multiplies_like_brackets(self):
        N = 6
        ctx = bp_context(N)
        x = ctx.x()
        p = ctx.elem(x.scale(v1), x * x)
        q = ctx.elem(x + x * x, x)
        assert (p * q).to_eps() == p.to_eps() * q.to_eps()
        assert (p * q).to_eps().even == (x.scale(v1) * (x + x * x)).square()


class TestAxioms:
    @given(brackets(), brackets())
    def test_commutative(self, p, q):
        assert p + q == q + p
        assert p * q == q * p

    @given(brackets(), brackets(), brackets())
    def test_associative(self, p, q, r):
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)

    @given(brackets(), brackets(), brackets())
    def test_distributive(self, p, q, r):
        assert (p + q) * r == p * r + q * r

    @given(brackets())
    def test_torsion(self, p):
        assert p + p == t_double(p)
        assert (p + p + p + p).is_zero()
        assert (p + (-p)).is_zero()
        assert p - p == BP.zero()

    @given(st.integers(-20, 20), st.integers(-20, 20))
    def test_integer_images_form_a_ring_map(self, m, n):
        assert t_scalar(BP, m) + t_scalar(BP, n) == t_scalar(BP, m + n)
        assert t_scalar(BP, m) * t_scalar(BP, n) == t_scalar(BP, m * n)

    @given(polys(F2, ("v1", "v2")).filter(bool), st.integers(0, 6))
    def test_degree_invariant(self, a, n):
        # a homogeneous element [m, t m^2] stays homogeneous under sums and powers
        mono = Poly(F2, {a.monomials()[0]: 1})
        p = el(mono, v1 * mono * mono)
        assert check_degree_invariant(p).ok
        assert check_degree_invariant(t_pow(p, n)).ok
        assert check_degree_invariant(p + p).ok
