"""The twisted ring T(A) of brackets [a, b] over a mod-2 ring.

Addition and multiplication:

    [a, b] + [c, d] = [a + c, b + d + t a c]
    [a, b] * [c, d] = [a c, a^2 d + b c^2]

where t is a fixed degree-2 element (v1 for BP, u for kU).  The bracket
[a, b] stands for the pair (a, a^2 + eps b).  Components are polynomials or
truncated series over characteristic 2; both components of a series
element are truncated at the same order, which makes truncation a ring
map on T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .poly import F2, Poly, Ring, format_poly
from .series import (
    EpsSeries,
    Residual,
    TruncSeries,
    format_key,
    compose,
    format_series,
    homogeneity_offset,
)

Component = Union[Poly, TruncSeries]


class ContextMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TContext:
    """Twist element ``t`` plus, for series elements, the formal variables'
    arity and truncation order."""

    name: str
    t: Poly
    order: int | None = None
    arity: int = 1

    def __post_init__(self):
        if self.t.ring.char != 2:
            raise ValueError("twist element must live in a mod-2 ring")
        if not self.t.is_homogeneous() or self.t.grades() != {2}:
            raise ValueError("twist element must have degree 2")

    @property
    def ring(self) -> Ring:
        return self.t.ring

    def with_series(self, order: int, arity: int = 1) -> "TContext":
        return TContext(self.name, self.t, order, arity)

    def with_cyclo(self, p: int) -> "TContext":
        ring = self.ring.with_cyclo(p)
        return TContext(self.name, self.t.change_ring(ring), self.order, self.arity)

    def elem(self, a, b) -> "TElem":
        return TElem(self, self._coerce(a), self._coerce(b))

    def zero(self) -> "TElem":
        return self.elem(0, 0)

    def one(self) -> "TElem":
        return self.elem(1, 0)

    def x(self) -> TruncSeries:
        self._need_series()
        return TruncSeries.x(self.order, self.ring, self.arity)

    def y(self) -> TruncSeries:
        self._need_series()
        if self.arity != 2:
            raise ValueError("context has one formal variable")
        return TruncSeries.y(self.order, self.ring)

    def _need_series(self):
        if self.order is None:
            raise ValueError("context has no formal variables")

    def _coerce(self, c) -> Component:
        if isinstance(c, TruncSeries):
            if self.order is None:
                raise ContextMismatch("series component in a context without formal variables")
            if (c.order, c.arity) != (self.order, self.arity):
                raise ContextMismatch(
                    f"series order/arity {c.order}/{c.arity} vs context {self.order}/{self.arity}")
            if c.ring != self.ring:
                raise ContextMismatch(f"component ring {c.ring} vs {self.ring}")
            return c
        if isinstance(c, Poly):
            if c.ring != self.ring:
                raise ContextMismatch(f"component ring {c.ring} vs {self.ring}")
            return c
        if isinstance(c, int):
            return Poly.const(c, self.ring)
        raise TypeError(f"cannot use {type(c).__name__} as a bracket component")


def bp_context(order: int | None = None, arity: int = 1) -> TContext:
    return TContext("BP", Poly.v(1, F2), order, arity)


def ku_context(order: int | None = None, arity: int = 1) -> TContext:
    return TContext("kU", Poly.var("u", F2), order, arity)


def _is_zero(c: Component) -> bool:
    return not c


def _same(a: Component, b: Component) -> bool:
    return not (a - b)


class TElem:
    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx: TContext, a: Component, b: Component):
        self.ctx = ctx
        self.a = a
        self.b = b

    def _check(self, other: "TElem"):
        if not isinstance(other, TElem):
            raise TypeError("expected a bracket element")
        if other.ctx.t != self.ctx.t or other.ctx.ring != self.ctx.ring:
            raise ContextMismatch(f"contexts {self.ctx.name} and {other.ctx.name} differ")

    def __add__(self, other):
        return t_add(self, other)

    def __mul__(self, other):
        return t_mul(self, other)

    def __neg__(self):
        return t_neg(self)

    def __sub__(self, other):
        return t_add(self, t_neg(other))

    def __pow__(self, n: int):
        return t_pow(self, n)

    def __eq__(self, other):
        if not isinstance(other, TElem):
            return NotImplemented
        return (self.ctx.t == other.ctx.t and _same(self.a, other.a)
                and _same(self.b, other.b))

    __hash__ = None

    def is_zero(self) -> bool:
        return _is_zero(self.a) and _is_zero(self.b)

    def to_pair(self) -> tuple[Component, Component, Component]:
        """(r, s_even, s_eps) for the pair (r, s) with s = s_even + eps s_eps."""
        return self.a, _square(self.a), self.b

    @classmethod
    def from_pair(cls, ctx: TContext, r, s_even, s_eps) -> "TElem":
        if not _same(ctx._coerce(s_even), _square(ctx._coerce(r))):
            raise ValueError("pair does not satisfy s = r^2 mod eps")
        return ctx.elem(r, s_eps)

    def to_eps(self) -> EpsSeries:
        """The second pair component a^2 + eps b as an EpsSeries."""
        if not isinstance(self.a, TruncSeries) or not isinstance(self.b, TruncSeries):
            raise TypeError("needs series components")
        return EpsSeries(_square(self.a), self.b)

    def degree_offsets(self) -> tuple[set[int], set[int]]:
        return _offsets(self.a), _offsets(self.b)

    def __str__(self):
        return format_bracket(self)

    __repr__ = __str__


def _square(c: Component) -> Component:
    return c.square()


def _offsets(c: Component) -> set[int]:
    if isinstance(c, TruncSeries):
        return homogeneity_offset(c)
    return c.grades()


def t_add(p: TElem, q: TElem) -> TElem:
    p._check(q)
    twist = p.a * q.a
    return TElem(p.ctx, p.a + q.a, p.b + q.b + twist * p.ctx.t if twist else p.b + q.b)


def t_mul(p: TElem, q: TElem) -> TElem:
    p._check(q)
    a = p.a * q.a
    b = _square(p.a) * q.b + p.b * _square(q.a)
    return TElem(p.ctx, a, b)


def t_double(p: TElem) -> TElem:
    return TElem(p.ctx, p.a * 0, _square(p.a) * p.ctx.t)


def t_neg(p: TElem) -> TElem:
    return TElem(p.ctx, p.a, p.b + _square(p.a) * p.ctx.t)


def t_pow(p: TElem, n: int) -> TElem:
    """[a, b]^n = [a^n, n a^(2(n-1)) b]."""
    if n < 0:
        raise ValueError("negative power")
    if n == 0:
        return p.ctx.one() if isinstance(p.a, Poly) else TElem(p.ctx, p.a * 0 + 1, p.b * 0)
    a_n = p.a ** n
    b = p.b * (p.a ** (2 * (n - 1))) if n % 2 else p.b * 0
    return TElem(p.ctx, a_n, b)


def t_scalar(ctx: TContext, c: int) -> TElem:
    """The image of an integer c: [1, 0] added to itself c times,
    i.e. [c mod 2, C(c, 2) t]."""
    return ctx.elem(c % 2, ((c * (c - 1) // 2) % 2) * ctx.t)


def t_sum(terms) -> TElem:
    terms = list(terms)
    if not terms:
        raise ValueError("empty sum needs a context")
    acc = terms[0]
    for q in terms[1:]:
        acc = t_add(acc, q)
    return acc


def z_elem(ctx: TContext, f_partial2: TruncSeries, s: TruncSeries | None = None) -> TElem:
    """Z(s) = (s, s (s +_F eps)) = [s, s F_2(s)], with F_2 = dF/dy(x, 0) mod 2."""
    if s is None:
        s = ctx.x()
    s = ctx._coerce(s)
    if not isinstance(s, TruncSeries):
        raise TypeError("Z needs a series argument")
    if s.constant_term():
        raise ValueError("argument has a nonzero constant term")
    fp = f_partial2 if f_partial2.ring == ctx.ring else f_partial2.change_ring(ctx.ring)
    if fp.order != s.order:
        raise ContextMismatch("F_2 series and argument have different orders")
    return TElem(ctx, s, s * compose(fp, s))


def qf_sum(qbar: dict[tuple[int, int], TElem], terms: list[TElem]) -> TElem:
    """Left fold of X +_QF Y = sum_{i,j} qbar[i,j] X^i Y^j over ``terms``.

    ``qbar`` maps every (i, j) with i + j below the truncation order to the
    image of the law coefficient a_ij; missing keys are an error, so an
    incomplete table cannot pass silently.
    """
    if not terms:
        raise ValueError("empty formal sum")
    ctx = terms[0].ctx
    if ctx.order is None:
        raise ValueError("formal sums need a series context")
    acc = terms[0]
    for q in terms[1:]:
        acc = _qf_pair(qbar, acc, q)
    return acc


def _qf_pair(qbar, X: TElem, Y: TElem) -> TElem:
    X._check(Y)
    ctx = X.ctx
    N = ctx.order
    vx = _valuation(X)
    vy = _valuation(Y)
    zero = TElem(ctx, ctx.x() * 0, ctx.x() * 0)
    total = zero
    x_powers = {}
    y_powers = {}
    for i in range(N):
        if i and i * vx >= N:
            break
        for j in range(N - i):
            if j and j * vy >= N:
                break
            if i + j == 0:
                continue
            key = (i, j)
            if key not in qbar:
                raise KeyError(f"missing coefficient image for a_{i}{j}")
            c = qbar[key]
            if c.is_zero():
                continue
            if i not in x_powers:
                x_powers[i] = t_pow(X, i)
            if j not in y_powers:
                y_powers[j] = t_pow(Y, j)
            term = t_mul(t_mul(c, x_powers[i]), y_powers[j])
            total = t_add(total, term)
    return total


def _valuation(p: TElem) -> int:
    vals = [c.valuation() for c in (p.a, p.b) if isinstance(c, TruncSeries) and c]
    return min(vals) if vals else 10 ** 9


def t_compare(p: TElem, q: TElem, label: str = "") -> Residual:
    """Residual of p == q, reporting the first differing component term."""
    p._check(q)
    prefix = f"{label}: " if label else ""
    for name, u, w in (("a", p.a, q.a), ("b", p.b, q.b)):
        d = u - w
        if d:
            if isinstance(d, TruncSeries):
                key, c = d.items()[0]
                return Residual(False, f"{prefix}{name}-part {format_key(key)}: {format_poly(c)}")
            return Residual(False, f"{prefix}{name}-part: {format_poly(d)}")
    return Residual(True)


def check_degree_invariant(p: TElem) -> Residual:
    """grade(b) = 2 grade(a) + 2 for homogeneous elements."""
    da, db = p.degree_offsets()
    if len(da) > 1 or len(db) > 1:
        return Residual(False, f"inhomogeneous bracket {sorted(da)} / {sorted(db)}")
    if da and db and db != {2 * next(iter(da)) + 2}:
        return Residual(False, f"grade(b) {sorted(db)} vs 2*grade(a)+2 from {sorted(da)}")
    return Residual(True)


def _fmt(c: Component) -> str:
    return format_series(c) if isinstance(c, TruncSeries) else format_poly(c)


def format_bracket(p: TElem) -> str:
    return f"[{_fmt(p.a)}, {_fmt(p.b)}]"
