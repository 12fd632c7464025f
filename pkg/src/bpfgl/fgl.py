"""Formal group laws: the 2-typical Hazewinkel law over BP, the
multiplicative law over kU, and the series derived from them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import F2, QQ, NonIntegralError, Poly, Ring, format_monomial, is_2_integral
from .series import (
    EpsSeries,
    Residual,
    SeriesMismatch,
    TruncSeries,
    compare,
    compose,
    inverse,
    revert,
    solve_composition,
    z_series,
)


class FglError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Fgl:
    """A formal group law truncated at total degree ``order``.

    ``law`` is the two-variable series F(x, y); it may be omitted for large
    rational laws, in which case formal sums go through the logarithm.
    ``log_prime`` is d log(x)/dx (order ``order``), kept even after
    reduction mod 2 because its coefficients are integral.
    """

    name: str
    ring: Ring
    order: int
    law: TruncSeries | None = None
    log: TruncSeries | None = None
    exp: TruncSeries | None = None
    log_prime: TruncSeries | None = None

    def __post_init__(self):
        if self.law is None and self.log is None and self.log_prime is None:
            raise FglError("need the law, its logarithm or log'")
        for s in (self.law, self.log, self.exp, self.log_prime):
            if s is not None and (s.order, s.ring) != (self.order, self.ring):
                raise SeriesMismatch(f"{self.name}: component order/ring mismatch")

    def coefficient(self, i: int, j: int) -> Poly:
        if self.law is None:
            raise FglError(f"{self.name}: two-variable law not built")
        return self.law.coefficient(i, j)

    def reduce_mod(self, k: int) -> "Fgl":
        """Reduce the law (and log') mod 2^k; the log itself is dropped."""
        law = self.law.reduce_mod(k) if self.law is not None else None
        lp = self.log_prime.reduce_mod(k) if self.log_prime is not None else None
        if law is None and lp is None:
            raise FglError(f"{self.name}: nothing integral to reduce")
        return Fgl(f"{self.name} mod {2 ** k}", law.ring if law else lp.ring,
                   self.order, law=law, log_prime=lp)

    def with_cyclo(self, p: int) -> "Fgl":
        ring = self.ring.with_cyclo(p)

        def ch(s):
            return None if s is None else s.change_ring(ring)

        return Fgl(self.name, ring, self.order, ch(self.law), ch(self.log),
                   ch(self.exp), ch(self.log_prime))

    def without_law(self) -> "Fgl":
        return Fgl(self.name, self.ring, self.order, None, self.log, self.exp, self.log_prime)


# logarithms

def hazewinkel_log_coefficients(nmax: int) -> dict[int, Poly]:
    """m_n with log(x) = sum m_n x^(2^n), from 2 m_n = sum_{i<n} m_i v_{n-i}^(2^i)."""
    m = {0: Poly.one(QQ)}
    for n in range(1, nmax + 1):
        acc = Poly.zero(QQ)
        for i in range(n):
            acc = acc + m[i] * Poly.v(n - i, QQ, 2 ** i)
        m[n] = acc * Fraction(1, 2)
    return m


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def ravenel_log_coefficients(nmax: int) -> dict[int, Poly]:
    """m_n as a sum over sequences I = (i_1..i_r) with i_1 + .. + i_r = n of
    v_I / 2^r, where v_I = prod v_{i_j}^(2^(i_1 + .. + i_{j-1}))."""
    out = {}
    for n in range(nmax + 1):
        acc = Poly.zero(QQ)
        for seq in _compositions(n):
            term = Poly.const(Fraction(1, 2 ** len(seq)), QQ)
            shift = 0
            for i in seq:
                term = term * Poly.v(i, QQ, 2 ** shift)
                shift += i
            acc = acc + term
        out[n] = acc
    return out


def _log_from(coeffs: dict[int, Poly], N: int) -> TruncSeries:
    return TruncSeries.from_coeffs(N, QQ, {2 ** n: c for n, c in coeffs.items() if 2 ** n < N})


def _nmax(N: int) -> int:
    n = 0
    while 2 ** (n + 1) < N:
        n += 1
    return n


def hazewinkel_log(N: int, check: bool = True) -> TruncSeries:
    """log_F over Q[v1, v2, ...] truncated at N, from the recursion; with
    ``check`` also from the sequence sum, and the two must agree."""
    if N < 2:
        raise ValueError("need N >= 2")
    nmax = _nmax(N)
    log = _log_from(hazewinkel_log_coefficients(nmax), N)
    if check:
        other = _log_from(ravenel_log_coefficients(nmax), N)
        r = compare(log, other, "recursion vs sequence sum")
        if not r:
            raise FglError(f"log constructions disagree: {r.witness}")
    return log


def log_agreement(N: int) -> Residual:
    nmax = _nmax(N)
    return compare(_log_from(hazewinkel_log_coefficients(nmax), N),
                   _log_from(ravenel_log_coefficients(nmax), N))


def _law_from_log(log: TruncSeries) -> TruncSeries:
    N = log.order
    x = TruncSeries.x(N, log.ring, 2)
    y = TruncSeries.y(N, log.ring)
    return solve_composition(log, compose(log, x) + compose(log, y))


def _check_integral(s: TruncSeries, what: str):
    for key, c in s.items():
        if not is_2_integral(c):
            for m, a in c.terms.items():
                if a.denominator % 2 == 0:
                    raise NonIntegralError(f"{what} {key}: {format_monomial(m)}", a)


# constructors

def build_bp_fgl(N: int, two_variable: bool = True, check_relation: bool = True) -> Fgl:
    """The Hazewinkel 2-typical law over Q[v1, v2, ...] truncated at N.

    Postconditions (raise on failure): both log constructions agree, F is
    2-integral, and [2](x) = exp(2x) + sum_F v_k x^(2^k).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    long_log = hazewinkel_log(N + 1)
    log = long_log.truncate(N)
    log_prime = long_log.derivative()
    exp = revert(log)
    law = None
    if two_variable:
        law = _law_from_log(log)
        _check_integral(law, "F coefficient")
    F = Fgl("hazewinkel-BP", QQ, N, law, log, exp, log_prime)
    if check_relation:
        r = defining_relation_residual(F)
        if not r:
            raise FglError(f"defining relation fails: {r.witness}")
    return F


def build_mult_fgl(N: int) -> Fgl:
    """x + y + u x y over Z[u] (coefficients held in Q)."""
    u = Poly.var("u", QQ)
    law = TruncSeries(2, N, QQ, {(1, 0): 1, (0, 1): 1, (1, 1): u})
    # log = sum (-u)^(k-1) x^k / k
    log = TruncSeries.from_coeffs(
        N, QQ, {k: (-u) ** (k - 1) * Fraction(1, k) for k in range(1, N)})
    log_prime = TruncSeries.from_coeffs(N, QQ, {k: (-u) ** k for k in range(N)})
    return Fgl("multiplicative-kU", QQ, N, law, log, revert(log), log_prime)


def build_additive_fgl(N: int, ring: Ring = QQ) -> Fgl:
    law = TruncSeries(2, N, ring, {(1, 0): 1, (0, 1): 1})
    x = TruncSeries.x(N, ring)
    log = x if ring.char == 0 else None
    return Fgl("additive", ring, N, law, log, log, TruncSeries.const(1, N, ring))


# formal sums

def _check_summand(F: Fgl, s: TruncSeries):
    if (s.order, s.ring) != (F.order, F.ring):
        raise SeriesMismatch(
            f"summand order/ring {s.order}/{s.ring} vs law {F.order}/{F.ring}")
    if s.constant_term():
        raise ValueError("summand has a nonzero constant term")


def _substitute_law(law: TruncSeries, s: TruncSeries, t: TruncSeries) -> TruncSeries:
    N = law.order
    rows: dict[int, dict[int, Poly]] = {}
    for (i, j), c in law.coeffs.items():
        rows.setdefault(i, {})[j] = c
    # F(s, t) = sum_i s^i * (sum_j a_ij t^j)
    t_powers = [TruncSeries.const(1, N, s.ring, s.arity)]
    s_pow = TruncSeries.const(1, N, s.ring, s.arity)
    vs = s.valuation() or N
    vt = t.valuation() or N
    total = TruncSeries.zero(N, s.ring, s.arity)
    for i in range(max(rows) + 1):
        if i:
            if i * vs >= N:
                break
            s_pow = s_pow * s
            if not s_pow:
                break
        row = rows.get(i)
        if not row:
            continue
        inner = TruncSeries.zero(N, s.ring, s.arity)
        for j in sorted(row):
            if j * vt >= N:
                break
            while len(t_powers) <= j:
                t_powers.append(t_powers[-1] * t)
            inner = inner + t_powers[j].scale(row[j])
        total = total + s_pow * inner
    return total


def formal_sum(F: Fgl, s: TruncSeries, t: TruncSeries, route: str = "auto") -> TruncSeries:
    """F(s, t).  ``route`` is "law" (substitute into F(x, y)), "log"
    (solve log(h) = log(s) + log(t)) or "auto" (law when available)."""
    _check_summand(F, s)
    _check_summand(F, t)
    if s.arity != t.arity:
        raise SeriesMismatch("summands must have the same arity")
    if route == "auto":
        route = "law" if F.law is not None else "log"
    if route == "law":
        if F.law is None:
            raise FglError(f"{F.name}: two-variable law not built")
        return _substitute_law(F.law, s, t)
    if route == "log":
        if F.log is None:
            raise FglError(f"{F.name}: no logarithm over this ring")
        return solve_composition(F.log, compose(F.log, s) + compose(F.log, t))
    raise ValueError(f"unknown route {route!r}")


def formal_sum_many(F: Fgl, terms, route: str = "auto") -> TruncSeries:
    """Left fold of formal_sum; the empty sum is 0."""
    terms = list(terms)
    if not terms:
        return TruncSeries.zero(F.order, F.ring)
    if route in ("auto", "log") and (route == "log" or F.law is None) and F.log is not None:
        total = TruncSeries.zero(F.order, F.ring, terms[0].arity)
        for s in terms:
            _check_summand(F, s)
            total = total + compose(F.log, s)
        return solve_composition(F.log, total)
    acc = terms[0]
    _check_summand(F, acc)
    for s in terms[1:]:
        acc = formal_sum(F, acc, s, route)
    return acc


def n_series(F: Fgl, n: int, route: str = "auto") -> TruncSeries:
    """[n]_F(x) by binary double-and-add with formal_sum."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = TruncSeries.x(F.order, F.ring)
    if n == 0:
        return TruncSeries.zero(F.order, F.ring)
    acc = x
    for bit in bin(n)[3:]:
        acc = formal_sum(F, acc, acc, route)
        if bit == "1":
            acc = formal_sum(F, acc, x, route)
    return acc


def f_partial(F: Fgl) -> TruncSeries:
    """dF/dy at y = 0, a series in x; equals 1/log'(x).

    From log' the result has the law's order; read off the law alone it
    has order one less.
    """
    if F.log_prime is not None:
        return inverse(F.log_prime)
    if F.law is not None:
        return F.law.y_linear_part()
    raise FglError(f"{F.name}: neither log' nor the law is available")


def f_partial_from_law(F: Fgl) -> TruncSeries:
    if F.law is None:
        raise FglError(f"{F.name}: two-variable law not built")
    return F.law.y_linear_part()


def formal_sum_eps(F: Fgl, s: TruncSeries) -> EpsSeries:
    """s +_F eps with 2 eps = eps^2 = 0, i.e. s + F_2(s) eps."""
    _check_summand(F, s)
    fp = f_partial(F)
    if fp.ring.char != 2:
        fp = fp.reduce_mod(1)
    if fp.order < s.order:
        s = s.truncate(fp.order)
    return EpsSeries(s, compose(fp, s if s.ring.char == 2 else s.reduce_mod(1)))


# checks on laws

def check_unit_commutative(F: Fgl) -> Residual:
    if F.law is None:
        return Residual(True)
    x = TruncSeries.x(F.order, F.ring)
    return Residual.first_failure([
        compare(F.law.at_y_zero(), x, "F(x,0)"),
        compare(F.law.swap().at_y_zero(), x, "F(0,y)"),
        compare(F.law, F.law.swap(), "F(x,y) - F(y,x)"),
    ])


def check_associativity(F: Fgl, order: int | None = None) -> Residual:
    """F(F(x,y),z) = F(x,F(y,z)) with z specialised to x and to y, at a
    reduced truncation (three-variable series are not stored)."""
    if F.law is None:
        raise FglError(f"{F.name}: two-variable law not built")
    order = order or max(2, F.order // 2)
    law = F.law.truncate(order)
    G = Fgl(F.name, F.ring, order, law=law)
    x = TruncSeries.x(order, F.ring, 2)
    y = TruncSeries.y(order, F.ring)
    checks = []
    for label, z in (("z=x", x), ("z=y", y)):
        left = formal_sum(G, law, z)
        right = formal_sum(G, x, formal_sum(G, y, z))
        checks.append(compare(left, right, f"associativity {label}"))
    return Residual.first_failure(checks)


def check_log_exp(F: Fgl) -> Residual:
    x = TruncSeries.x(F.order, F.ring)
    return Residual.first_failure([
        compare(compose(F.log, F.exp), x, "log(exp(x))"),
        compare(compose(F.exp, F.log), x, "exp(log(x))"),
    ])


def defining_relation_residual(F: Fgl, route: str = "auto") -> Residual:
    """[2]_F(x) against exp(2x) +_F v1 x^2 +_F v2 x^4 +_F ..."""
    N = F.order
    if F.exp is None:
        raise FglError(f"{F.name}: exp needed")
    lhs = n_series(F, 2, route)
    two_x = TruncSeries.x(N, F.ring).scale(2)
    terms = [compose(F.exp, two_x)]
    k = 1
    while 2 ** k < N:
        terms.append(TruncSeries.from_coeffs(N, F.ring, {2 ** k: Poly.v(k, F.ring)}))
        k += 1
    rhs = formal_sum_many(F, terms, route)
    return compare(lhs, rhs, "[2](x) - (exp(2x) + sum_F v_k x^(2^k))")


def w_series(F: Fgl) -> list[Poly]:
    """[W_1], ..., [W_{N-1}]: coefficients of [2]_F(x) * log'(x)."""
    if F.log_prime is None:
        raise FglError(f"{F.name}: log' needed")
    if F.order < 3:
        raise ValueError("need N >= 3")
    prod = n_series(F, 2) * F.log_prime
    out = []
    for m in range(1, F.order):
        c = prod.coefficient(m)
        if not is_2_integral(c):
            raise NonIntegralError(f"[W_{m}]", c)
        out.append(c)
    return out


def quadric_images(N: int, F: Fgl | None = None) -> dict[int, Poly]:
    """k -> q(w_k) = [W_(2^k)] for 2^k < N."""
    F = F or build_bp_fgl(N, two_variable=False, check_relation=False)
    ws = w_series(F)
    out = {}
    k = 0
    while 2 ** k < N:
        out[k] = ws[2 ** k - 1]
        k += 1
    return out


def verify_2_typical_classical(F: Fgl, p: int, N: int | None = None) -> Residual:
    """Sum_F of omega^i x over i < p vanishes in (ring[omega]/Phi_p)[[x]]."""
    N = N or F.order
    if N > F.order:
        raise SeriesMismatch("requested truncation exceeds the law's")
    G = F if N == F.order else _truncate_fgl(F, N)
    G = G.with_cyclo(p)
    w = Poly.var("w", G.ring)
    terms = [TruncSeries.x(N, G.ring).scale(w ** i) for i in range(p)]
    total = formal_sum_many(G, terms)
    return compare(total, TruncSeries.zero(N, G.ring), f"sum_F w^i x, p={p}")


def _truncate_fgl(F: Fgl, N: int) -> Fgl:
    def tr(s):
        return None if s is None else s.truncate(N)

    return Fgl(F.name, F.ring, N, tr(F.law), tr(F.log), tr(F.exp), tr(F.log_prime))


def law_coefficients(F: Fgl):
    """(i, j, a_ij) for i, j >= 1 in canonical order."""
    if F.law is None:
        raise FglError(f"{F.name}: two-variable law not built")
    return [(i, j, c) for (i, j), c in F.law.items() if i and j]


def invdif_residual(N: int) -> Residual:
    """F(x, eps) = x + (1 + z) eps mod 2 up to x^(N-1), from 1/log'(x)."""
    lp = hazewinkel_log(N + 1).derivative().reduce_mod(1)
    F = Fgl("hazewinkel-BP mod 2", F2, N, log_prime=lp)
    fp = f_partial(F)
    expected = TruncSeries.const(1, N, F2) + z_series(N)
    x = TruncSeries.x(N, F2)
    got = EpsSeries(x, fp)
    want = EpsSeries(x, expected)
    return compare(got.eps, want.eps, "eps-part of x +_F eps vs 1 + z")

