"""Hypothesis strategies for polynomials, series and brackets."""

from fractions import Fraction

from hypothesis import strategies as st

from bpfgl.poly import F2, QQ, Poly, Ring
from bpfgl.series import TruncSeries
from bpfgl.tring import TElem, bp_context

VARS = ("v1", "v2", "v3", "u")


@st.composite
def monomials(draw, names=VARS, max_exp=3):
    out = {}
    for name in names:
        e = draw(st.integers(0, max_exp))
        if e:
            out[name] = e
    return out


def coefficients(ring: Ring):
    if ring.char == 0:
        return st.builds(Fraction, st.integers(-9, 9), st.sampled_from([1, 1, 1, 3, 5]))
    return st.integers(0, ring.char - 1)


@st.composite
def polys(draw, ring: Ring = QQ, names=VARS, max_terms=4, max_exp=3):
    out = Poly.zero(ring)
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(coefficients(ring))
        out = out + Poly.monomial(draw(monomials(names, max_exp)), c, ring)
    return out


def integral_polys(names=("v1", "v2", "v3"), max_terms=4):
    return polys(QQ, names, max_terms).filter(
        lambda p: all(c.denominator == 1 for c in p.terms.values()))


@st.composite
def series(draw, order=6, ring: Ring = F2, arity=1, valuation=0, names=("v1", "v2")):
    coeffs = {}
    for k in range(valuation, order):
        if draw(st.booleans()):
            p = draw(polys(ring, names, max_terms=2, max_exp=2))
            if p:
                coeffs[k] = p
    if arity == 1:
        return TruncSeries.from_coeffs(order, ring, coeffs)
    out = TruncSeries.zero(order, ring, 2)
    x, y = TruncSeries.x(order, ring, 2), TruncSeries.y(order, ring)
    for k, c in coeffs.items():
        j = draw(st.integers(0, k))
        out = out + (x ** (k - j) * y ** j).scale(c)
    return out


@st.composite
def brackets(draw, names=("v1", "v2", "v3")):
    ctx = bp_context()
    return TElem(ctx, draw(polys(F2, names)), draw(polys(F2, names)))
