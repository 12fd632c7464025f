"""The induced power operation Qbar: A -> T(A) on BP and kU.

Qbar is a ring map, so it is fixed by its values on generators.  For BP
these are Qbar(v_n) = [v_n, p_n] with the closed form p_0 = v1, p_1 = v2,
p_n = v1 v_n^2 + u_n; an independent coefficient-extraction route
recomputes p_n from two expansions of [2](Z(x)).  P~(a) is the second
bracket component of Qbar(a).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .fgl import Fgl, build_bp_fgl, build_mult_fgl, f_partial, hazewinkel_log
from .poly import (
    F2,
    QQ,
    SLOT_BITS,
    NonIntegralError,
    SLOT_MASK,
    Poly,
    Ring,
    Variable,
    _slot_variable,
    reduce_mod,
    unpack,
)
from .series import (
    Residual,
    TruncSeries,
    check_homogeneous,
    compare,
    compose,
    inverse,
    revert,
    z_series,
)
from .tring import (
    TContext,
    TElem,
    bp_context,
    check_degree_invariant,
    ku_context,
    qf_sum,
    t_add,
    t_compare,
    t_mul,
    t_pow,
    z_elem,
)


class MissingGenerator(KeyError):
    pass


# u_n and p_n

@lru_cache(maxsize=None)
def u_n(n: int) -> Poly:
    """u_n = v_{n+1} + sum_{j=1}^{n-1} (v1 v_{n-j})^(2(2^j - 1)) u_{n-j} over F2."""
    if n < 1:
        raise ValueError("u_n needs n >= 1")
    acc = Poly.v(n + 1, F2)
    for j in range(1, n):
        acc = acc + (Poly.v(1, F2) * Poly.v(n - j, F2)) ** (2 * (2 ** j - 1)) * u_n(n - j)
    return acc


def u_n_subsets(n: int) -> Poly:
    """u_n as a sum over J = {j_1 < .. < j_r = n} of
    v_{j_1 + 1} prod_k (v1 v_{j_k})^(2(2^(j_{k+1} - j_k) - 1))."""
    if n < 1:
        raise ValueError("u_n needs n >= 1")
    acc = Poly.zero(F2)
    for r in range(n):
        for rest in combinations(range(1, n), r):
            J = rest + (n,)
            term = Poly.v(J[0] + 1, F2)
            for jk, jnext in zip(J, J[1:]):
                term = term * (Poly.v(1, F2) * Poly.v(jk, F2)) ** (2 * (2 ** (jnext - jk) - 1))
            acc = acc + term
    return acc


def p_n_closed(n: int) -> Poly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Poly.v(1, F2)
    if n == 1:
        return Poly.v(2, F2)
    return Poly.v(1, F2) * Poly.v(n, F2) ** 2 + u_n(n)


def zxqf_correction(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """w with [a, b] = [a, 0] +_QF [0, w]: w = sum_l (v1 a)^(2(2^l - 1)) b."""
    v1 = Poly.v(1, a.ring)
    va = a.scale(v1)
    total = TruncSeries.zero(a.order, a.ring, a.arity)
    power = TruncSeries.const(1, a.order, a.ring, a.arity)
    va2 = va.square()
    # (v1 a)^(2(2^l - 1)) for l = 0, 1, 2, ...: exponents 0, 2, 6, 14, ...
    while power:
        total = total + power
        power = (power.square() * va2)
    return total * b


def z_over_v1(N: int) -> TruncSeries:
    """sum_{k>=0} v1^(2^k - 1) x^(2^k) over F2."""
    out = {}
    k = 0
    while 2 ** k < N:
        out[2 ** k] = Poly.v(1, F2, 2 ** k - 1)
        k += 1
    return TruncSeries.from_coeffs(N, F2, out)


def p_n_extracted(n: int, N: int | None = None) -> dict[int, Poly]:
    """p_1..p_n by equating the x^(2^(m+1)) coefficients of the two
    expansions of [2]_QF(Z(x)), solved for m = 1..n in turn.

    Returns {m: p_m}.  Needs N > 2^(n+1).
    """
    if n < 1:
        raise ValueError("extraction starts at n = 1")
    N = N if N is not None else 2 ** (n + 1) + 1
    if N <= 2 ** (n + 1):
        raise ValueError(f"truncation {N} too small: need N > {2 ** (n + 1)}")
    zv = z_over_v1(N)
    x = TruncSeries.x(N, F2)
    # right-hand expansion: sum_k Z(v_k x^(2^k)) split with the [a, b] = [a, 0] + [0, w] decomposition
    rhs = TruncSeries.zero(N, F2)
    k = 1
    while 2 ** k < N:
        s = TruncSeries.from_coeffs(N, F2, {2 ** k: Poly.v(k, F2)})
        rhs = rhs + compose(zv, s)
        k += 1
    # left-hand expansion: exp_QF(2 Z(x)) plus the V_k Z(x)^(2^k) corrections
    lhs_fixed = zv - x
    found: dict[int, Poly] = {}
    for m in range(1, n + 1):
        lhs = lhs_fixed
        for kk, pk in found.items():
            a = TruncSeries.from_coeffs(N, F2, {2 ** kk: Poly.v(kk, F2)})
            b = TruncSeries.from_coeffs(N, F2, {2 ** (kk + 1): pk})
            lhs = lhs + zxqf_correction(a, b)
        # p_m enters only through the k = m term, at x^(2^(m+1)) with coefficient 1
        found[m] = (rhs - lhs).coefficient(2 ** (m + 1))
    return found


# the table and Qbar

@dataclass
class QbarTable:
    """Images of polynomial generators under Qbar, keyed by variable slot."""

    ctx: TContext
    images: dict[int, TElem]
    sources: dict[int, str] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def image(self, slot: int) -> TElem:
        try:
            return self.images[slot]
        except KeyError:
            raise MissingGenerator(f"no Qbar image for {_slot_variable(slot)}") from None

    def p(self, n: int) -> Poly:
        return self.image(Variable("v", n).slot).b

    def with_entry(self, var: str, b: Poly, source: str = "override") -> "QbarTable":
        v = Variable.parse(var)
        images = dict(self.images)
        images[v.slot] = self.ctx.elem(Poly.var(v, F2), b)
        sources = dict(self.sources)
        sources[v.slot] = source
        return QbarTable(self.ctx, images, sources)


def bp_table(nmax: int, source: str = "closed", N: int | None = None) -> QbarTable:
    """Qbar(v_n) = [v_n, p_n] for 1 <= n <= nmax."""
    ctx = bp_context()
    if source == "closed":
        ps = {n: p_n_closed(n) for n in range(1, nmax + 1)}
    elif source == "extracted":
        ps = p_n_extracted(nmax, N) if nmax >= 1 else {}
    else:
        raise ValueError(f"unknown source {source!r}")
    images = {}
    sources = {}
    for n, p in ps.items():
        slot = Variable("v", n).slot
        images[slot] = ctx.elem(Poly.v(n, F2), p)
        sources[slot] = "closed-form" if source == "closed" else "coefficient-extraction"
    return QbarTable(ctx, images, sources)


def ku_table(u_image: Poly | None = None) -> QbarTable:
    """Qbar(u) = [u, u^3] unless another second component is given."""
    ctx = ku_context()
    u = Poly.var("u", F2)
    b = u ** 3 if u_image is None else u_image
    slot = Variable.parse("u").slot
    return QbarTable(ctx, {slot: ctx.elem(u, b)}, {slot: "closed-form"})


def _to_z4(a: Poly) -> Poly:
    if a.ring.cyclo:
        raise ValueError("Qbar is evaluated on polynomials without omega")
    if a.ring.char == 4:
        return a
    if a.ring.char == 2:
        # integral representative with 0/1 coefficients
        return reduce_mod(a.lift(), 2)
    return reduce_mod(a, 2)


def _monomial_image(m: int, table: QbarTable) -> TElem:
    cached = table._cache.get(m)
    if cached is not None:
        return cached
    ctx = table.ctx
    out = ctx.one()
    for slot, e in sorted(unpack(m).items()):
        out = t_mul(out, t_pow(table.image(slot), e))
    table._cache[m] = out
    return out


def qbar_eval(a: Poly, table: QbarTable) -> TElem:
    """Qbar(a) for a 2-integral polynomial a (only a mod 4 matters).

    Each term c * m goes to Qbar(c) * prod Qbar(v_i)^(e_i); terms are
    combined with the twisted addition.
    """
    ctx = table.ctx
    a4 = _to_z4(a)
    t = ctx.t
    A = Poly.zero(F2)
    B = Poly.zero(F2)
    for m, c in a4.terms.items():
        img = _monomial_image(m, table)
        M, P = img.a, img.b
        if c % 2:
            # Qbar(c) = [1, C(c, 2) t]
            term_a = M
            term_b = P + t * M.square() if c == 3 else P
        else:
            term_a = Poly.zero(F2)
            term_b = t * M.square()
        if term_a:
            B = B + A * term_a * t
        A = A + term_a
        B = B + term_b
    return TElem(ctx, A, B)


def ptilde(a: Poly, table: QbarTable) -> Poly:
    """Second bracket component of Qbar(a)."""
    return qbar_eval(a, table).b


# verifications

def qbar_law(F: Fgl, table: QbarTable, ring: Ring | None = None) -> dict[tuple[int, int], TElem]:
    """(i, j) -> Qbar(a_ij) for all i + j below the law's order."""
    if F.law is None:
        raise ValueError("needs the two-variable law")
    out = {}
    ring = ring or table.ctx.ring
    for i in range(F.order):
        for j in range(F.order - i):
            c = F.law.coefficient(i, j)
            img = qbar_eval(c, table)
            if ring != img.ctx.ring:
                ctx = table.ctx.with_cyclo(ring.cyclo)
                img = TElem(ctx, img.a.change_ring(ring), img.b.change_ring(ring))
            out[(i, j)] = img
    return out


def exp2_mod4(N: int) -> Residual:
    """exp_F(2x) is 2-integral and equals 2 sum v1^(2^k - 1) x^(2^k) mod 4;
    also log_F(2x)/2 = x + v1 x^2 mod 2."""
    if N < 4:
        raise ValueError("need N >= 4")
    log = hazewinkel_log(N)
    exp = revert(log)
    two_x = TruncSeries.x(N, QQ).scale(2)
    e2 = compose(exp, two_x)
    try:
        e2_4 = e2.reduce_mod(2)
    except NonIntegralError as exc:
        return Residual(False, f"exp(2x) not 2-integral: {exc}")
    expected = z_over_v1(N).lift().reduce_mod(2).scale(2)
    half_log = compose(log, two_x).scale(Poly.const(Fraction(1, 2), QQ))
    lin = TruncSeries.from_coeffs(N, F2, {1: 1, 2: Poly.v(1, F2)})
    return Residual.first_failure([
        compare(half_log.reduce_mod(1), lin, "log(2x)/2 mod 2"),
        compare(e2_4, expected, "exp(2x) mod 4"),
        check_homogeneous(e2, -2, "exp(2x)"),
    ])


def exp_qf_2x(table: QbarTable, N: int, at: str = "Z") -> Residual:
    """Push exp_F(2x) through Qbar and evaluate at X = Z(x) (or X = [x, 0])."""
    if N < 4:
        raise ValueError("need N >= 4")
    long_log = hazewinkel_log(N + 1)
    exp = revert(long_log.truncate(N))
    e2 = compose(exp, TruncSeries.x(N, QQ).scale(2))
    ctx = table.ctx.with_series(N)
    x = ctx.x()
    if at == "Z":
        X = z_elem(ctx, inverse(long_log.derivative().reduce_mod(1)), x)
        expected_b = z_over_v1(N) - x
    else:
        X = TElem(ctx, x, x * 0)
        expected_b = (z_over_v1(N) - x)
    total = TElem(ctx, x * 0, x * 0)
    coeff_checks = []
    for (k,), c in e2.items():
        img = qbar_eval(c, table)
        # Qbar(c_k) = [0, v1^(2^(j+1) - 1)] when k = 2^j, else 0
        j = k.bit_length() - 1
        want = (ctx.elem(0, Poly.v(1, F2, 2 ** (j + 1) - 1)) if k == 2 ** j
                else ctx.elem(0, 0))
        coeff_checks.append(t_compare(TElem(ctx, img.a, img.b), want, f"Qbar(c_{k})"))
        total = t_add(total, t_mul(img, t_pow(X, k)))
    if at != "Z":
        # [0, c] [x, 0]^(2^k) = [0, c x^(2^(k+1))]
        expected_b = TruncSeries.from_coeffs(N, F2, {
            2 ** (j + 1): Poly.v(1, F2, 2 ** (j + 1) - 1)
            for j in range(N.bit_length()) if 2 ** (j + 1) < N})
    want = ctx.elem(x * 0, expected_b)
    return Residual.first_failure(coeff_checks + [
        t_compare(total, want, f"exp_QF(2X) at X={at}"),
        check_degree_invariant(total),
    ])


def verify_zxqf(N: int, F: Fgl | None = None, table: QbarTable | None = None) -> Residual:
    """The three identities of the Z(x) decomposition for BP at order N."""
    if N < 4:
        raise ValueError("need N >= 4")
    F = F or build_bp_fgl(N)
    table = table or bp_table(_table_bound(N))
    qb = qbar_law(F, table)
    ctx2 = table.ctx.with_series(N, 2)
    x, y = ctx2.x(), ctx2.y()
    zero = x * 0
    checks = []
    # [0, x] +_QF [0, y] = [0, x + y]
    s = qf_sum(qb, [TElem(ctx2, zero, x), TElem(ctx2, zero, y)])
    checks.append(t_compare(s, TElem(ctx2, zero, x + y), "[0,x] + [0,y]"))
    # Z(x) = [x, 0] +_QF [0, z/v1] with z/v1 both as a quotient and as a sum
    ctx1 = table.ctx.with_series(N, 1)
    x1 = ctx1.x()
    z = z_series(N)
    z_div = TruncSeries.from_coeffs(N, F2, {
        k - 1: c.div_monomial(Poly.v(1, F2).monomials()[0]) for (k,), c in z.coeffs.items()})
    z_div = z_div.mul_monomial((1,))
    checks.append(compare(z_div, z_over_v1(N), "z/v1 vs sum v1^(2^k-1) x^(2^k)"))
    Zx = z_elem(ctx1, f_partial(F.reduce_mod(1)), x1)
    checks.append(t_compare(Zx, TElem(ctx1, x1, x1 * (1 + z)), "Z(x) = [x, x(1+z)]"))
    qb1 = {k: v for k, v in qb.items() if k[0] + k[1] < N}
    dec = qf_sum(qb1, [TElem(ctx1, x1, x1 * 0), TElem(ctx1, x1 * 0, z_div)])
    checks.append(t_compare(dec, Zx, "Z(x) = [x,0] + [0, z/v1]"))
    # [x, y] = [x, 0] +_QF [0, w], w = sum (v1 x)^(2(2^k - 1)) y = y/(1+z)^2
    w = zxqf_correction(x, y)
    z2 = compose(z, x)
    w_closed = y * _inverse_square(1 + z2)
    checks.append(compare(w, w_closed, "w vs y/(1+z)^2"))
    rec = qf_sum(qb, [TElem(ctx2, x, zero), TElem(ctx2, zero, w)])
    checks.append(t_compare(rec, TElem(ctx2, x, y), "[x,y] = [x,0] + [0,w]"))
    return Residual.first_failure(checks)


def _inverse_square(s: TruncSeries) -> TruncSeries:
    if s.arity == 1:
        return inverse(s).square()
    # two-variable unit series with constant term 1, over F2: geometric sum
    d = s - 1
    acc = TruncSeries.const(1, s.order, s.ring, 2)
    power = acc
    while True:
        power = power * d
        if not power:
            break
        acc = acc + power
    return acc.square()


def _table_bound(N: int) -> int:
    n = 1
    while 2 ** (n + 1) <= N:
        n += 1
    return n


def verify_ipo(F: Fgl, table: QbarTable, N: int | None = None,
               f2: TruncSeries | None = None) -> Residual:
    """Z(x) +_QF Z(y) = Z(x +_F y) in T(A/2[[x, y]]) up to total degree N."""
    N = N or F.order
    if F.law is None:
        raise ValueError("needs the two-variable law")
    law = F.law if N == F.order else F.law.truncate(N)
    G = Fgl(F.name, F.ring, N, law=law)
    qb = qbar_law(G, table)
    ctx = table.ctx.with_series(N, 2)
    if f2 is None:
        lp = F.log_prime.truncate(N) if F.log_prime is not None else None
        f2 = f_partial(Fgl(F.name, F.ring, N, law=law, log_prime=lp).reduce_mod(1))
    x, y = ctx.x(), ctx.y()
    Zx = z_elem(ctx, f2, x)
    Zy = z_elem(ctx, f2, y)
    lhs = qf_sum(qb, [Zx, Zy])
    rhs = z_elem(ctx, f2, law.reduce_mod(1))
    return Residual.first_failure([
        t_compare(lhs, rhs, "Z(x) +_QF Z(y) vs Z(x +_F y)"),
        check_homogeneous(law, -2, "F(x,y)"),
        check_degree_invariant(lhs),
    ])


def verify_ipo_bp(N: int = 16, table: QbarTable | None = None) -> Residual:
    F = build_bp_fgl(N)
    table = table or bp_table(_table_bound(N))
    return verify_ipo(F, table, N)


def ku_intermediates(N: int, table: QbarTable | None = None) -> Residual:
    """The four displayed products and sums for kU with Qbar(u) = [u, u^3]."""
    table = table or ku_table()
    ctx = table.ctx.with_series(N, 2)
    u = Poly.var("u", F2)
    x, y = ctx.x(), ctx.y()
    f2 = TruncSeries.from_coeffs(N, F2, {0: 1, 1: u})
    Zx, Zy = z_elem(ctx, f2, x), z_elem(ctx, f2, y)
    U = table.image(Variable.parse("u").slot)
    s2 = x * x + x * y + y * y
    checks = [
        t_compare(t_add(Zx, Zy), TElem(ctx, x + y, x + y + s2.scale(u)), "Z(x)+Z(y)"),
        t_compare(t_mul(Zx, Zy), TElem(ctx, x * y, x * y * (x + y)), "Z(x)Z(y)"),
        t_compare(t_mul(U, t_mul(Zx, Zy)),
                  TElem(ctx, (x * y).scale(u),
                        (x * y * (x + y)).scale(u ** 2) + (x * x * y * y).scale(u ** 3)),
                  "U Z(x)Z(y)"),
        t_compare(z_elem(ctx, f2, x + y + (x * y).scale(u)),
                  TElem(ctx, x + y + (x * y).scale(u),
                        x + y + s2.scale(u) + (x * x * y * y).scale(u ** 3)),
                  "Z(x+y+uxy)"),
    ]
    return Residual.first_failure(checks)


def verify_ipo_ku(N: int = 16, table: QbarTable | None = None) -> Residual:
    table = table or ku_table()
    F = build_mult_fgl(N)
    u = Poly.var("u", F2)
    f2 = TruncSeries.from_coeffs(N, F2, {0: 1, 1: u})
    return Residual.first_failure([
        compare(f_partial(F).reduce_mod(1), f2, "dF/dy(x,0) = 1 + ux"),
        ku_intermediates(N, table),
        verify_ipo(F, table, N, f2),
    ])


def verify_qf_2_typical(p: int, table: QbarTable, N: int, terms: int | None = None,
                        F: Fgl | None = None) -> Residual:
    """sum_QF of [omega^i x, 0] for i < p vanishes over F2[v][omega]/Phi_p."""
    F = F or build_bp_fgl(N)
    ring = Ring(2, p)
    qb = qbar_law(F, table, ring)
    ctx = table.ctx.with_cyclo(p).with_series(N, 1)
    x = ctx.x()
    w = Poly.var("w", ring)
    count = p if terms is None else terms
    elems = [TElem(ctx, x.scale(w ** i), x * 0) for i in range(count)]
    total = qf_sum(qb, elems) if len(elems) > 1 else elems[0]
    return t_compare(total, TElem(ctx, x * 0, x * 0), f"sum_QF w^i X, p={p}")


def pn_oracle(nmax: int) -> Residual:
    """p_n closed form = coefficient extraction for 1 <= n <= nmax, plus
    grade(p_n) = grade(v_{n+1})."""
    extracted = p_n_extracted(nmax)
    checks = []
    if p_n_closed(0) != Poly.v(1, F2):
        checks.append(Residual(False, f"p_0 = {p_n_closed(0)}"))
    for n in range(1, nmax + 1):
        closed = p_n_closed(n)
        if closed != extracted[n]:
            diff = closed - extracted[n]
            checks.append(Residual(False, f"p_{n}: closed - extracted = {diff}"))
        want = Poly.v(n + 1, F2).degree()
        if closed.grades() != {want}:
            checks.append(Residual(False, f"p_{n}: grades {sorted(closed.grades())} != {want}"))
    return Residual.first_failure(checks)


def un_forms(nmax: int) -> Residual:
    """Recurrence = subset sum, and u_n = v_{n+1} mod v1^2, for n <= nmax."""
    checks = []
    v1sq = Poly.v(1, F2, 2).monomials()[0]
    for n in range(1, nmax + 1):
        a, b = u_n(n), u_n_subsets(n)
        if a != b:
            checks.append(Residual(False, f"u_{n}: recurrence - subsets = {a - b}"))
        rest = Poly(F2, {m: 1 for m in a.terms if not _divides(v1sq, m)})
        if rest != Poly.v(n + 1, F2):
            checks.append(Residual(False, f"u_{n} mod v1^2 = {rest}"))
    return Residual.first_failure(checks)


def _divides(d: int, m: int) -> bool:
    while d:
        if (d & SLOT_MASK) > (m & SLOT_MASK):
            return False
        d >>= SLOT_BITS
        m >>= SLOT_BITS
    return True
