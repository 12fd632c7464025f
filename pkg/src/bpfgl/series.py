"""Truncated power series in x (or x, y) with polynomial coefficients.

A series of order N keeps every term of total degree < N in the formal
variables.  Operations between series of different order, arity or
coefficient ring raise ``SeriesMismatch``; truncation is never silently
lowered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .poly import F2, Poly, PolyAccumulator, Ring, format_poly, grade, reduce_mod

Key = tuple  # (i,) or (i, j)


class SeriesMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Residual:
    """Outcome of an identity check: ``ok`` plus the first failing term."""

    ok: bool
    witness: str | None = None

    def __bool__(self):
        return self.ok

    @staticmethod
    def first_failure(residuals: Iterable["Residual"]) -> "Residual":
        for r in residuals:
            if not r.ok:
                return r
        return Residual(True)


def _degree(key: Key) -> int:
    return key[0] if len(key) == 1 else key[0] + key[1]


def _key_add(a: Key, b: Key) -> Key:
    if len(a) == 1:
        return (a[0] + b[0],)
    return (a[0] + b[0], a[1] + b[1])


def _key_order(key: Key):
    return (_degree(key), tuple(-k for k in key))


class TruncSeries:
    __slots__ = ("arity", "order", "ring", "coeffs")

    def __init__(self, arity: int, order: int, ring: Ring,
                 coeffs: Mapping[Key, Poly] | None = None):
        if arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        if order < 1:
            raise ValueError("truncation order must be positive")
        self.arity = arity
        self.order = order
        self.ring = ring
        clean = {}
        for key, c in (coeffs or {}).items():
            if isinstance(key, int):
                key = (key,)
            if len(key) != arity or min(key) < 0:
                raise ValueError(f"bad exponent {key} for arity {arity}")
            if not isinstance(c, Poly):
                c = Poly.const(c, ring)
            if c.ring != ring:
                raise SeriesMismatch(f"coefficient ring {c.ring} vs {ring}")
            if c and _degree(key) < order:
                clean[key] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, arity, order, ring, coeffs):
        s = cls.__new__(cls)
        s.arity, s.order, s.ring, s.coeffs = arity, order, ring, coeffs
        return s

    # constructors

    @classmethod
    def zero(cls, order: int, ring: Ring, arity: int = 1) -> "TruncSeries":
        return cls._raw(arity, order, ring, {})

    @classmethod
    def const(cls, c, order: int, ring: Ring, arity: int = 1) -> "TruncSeries":
        return cls(arity, order, ring, {(0,) * arity: c})

    @classmethod
    def x(cls, order: int, ring: Ring, arity: int = 1) -> "TruncSeries":
        return cls(arity, order, ring, {(1,) + (0,) * (arity - 1): 1})

    @classmethod
    def y(cls, order: int, ring: Ring) -> "TruncSeries":
        return cls(2, order, ring, {(0, 1): 1})

    @classmethod
    def from_coeffs(cls, order: int, ring: Ring, coeffs: Mapping[int, Poly]) -> "TruncSeries":
        """One-variable series from {exponent: coefficient}."""
        return cls(1, order, ring, {(i,): c for i, c in coeffs.items()})

    # access

    def coefficient(self, *idx: int) -> Poly:
        if len(idx) != self.arity:
            raise ValueError(f"need {self.arity} exponents")
        return self.coeffs.get(tuple(idx), Poly.zero(self.ring))

    __getitem__ = lambda self, idx: self.coefficient(*(idx if isinstance(idx, tuple) else (idx,)))

    def items(self) -> list[tuple[Key, Poly]]:
        return sorted(self.coeffs.items(), key=lambda kv: _key_order(kv[0]))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def valuation(self) -> int | None:
        return min((_degree(k) for k in self.coeffs), default=None)

    def constant_term(self) -> Poly:
        return self.coefficient(*(0,) * self.arity)

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = TruncSeries.const(other, self.order, self.ring, self.arity)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.arity, self.order, self.ring, self.coeffs) == (
            other.arity, other.order, other.ring, other.coeffs)

    __hash__ = None

    def __repr__(self):
        return f"TruncSeries({format_series(self)!r}, order={self.order}, {self.ring})"

    def __str__(self):
        return format_series(self)

    # arithmetic

    def _check(self, other: "TruncSeries"):
        if (self.arity, self.order, self.ring) != (other.arity, other.order, other.ring):
            raise SeriesMismatch(
                f"arity/order/ring {self.arity}/{self.order}/{self.ring} vs "
                f"{other.arity}/{other.order}/{other.ring}")

    def _lift(self, other) -> "TruncSeries | None":
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise SeriesMismatch(f"coefficient ring {other.ring} vs {self.ring}")
            return TruncSeries.const(other, self.order, self.ring, self.arity)
        if isinstance(other, int):
            return TruncSeries.const(other, self.order, self.ring, self.arity)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for k, c in o.coeffs.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TruncSeries._raw(self.arity, self.order, self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.arity, self.order, self.ring,
                                {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (Poly, int)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return _mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (Poly, int)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "TruncSeries":
        if not isinstance(c, Poly):
            c = Poly.const(c, self.ring)
        if c.ring != self.ring:
            raise SeriesMismatch(f"coefficient ring {c.ring} vs {self.ring}")
        out = {}
        for k, v in self.coeffs.items():
            p = v * c
            if p:
                out[k] = p
        return TruncSeries._raw(self.arity, self.order, self.ring, out)

    def square(self) -> "TruncSeries":
        if self.ring.char == 2:
            out = {}
            for k, c in self.coeffs.items():
                k2 = tuple(2 * e for e in k)
                if _degree(k2) < self.order:
                    out[k2] = c.square()
            return TruncSeries._raw(self.arity, self.order, self.ring, out)
        return _mul(self, self)

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            raise ValueError("negative power")
        result = TruncSeries.const(1, self.order, self.ring, self.arity)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def mul_monomial(self, key: Key, c: Poly | int = 1) -> "TruncSeries":
        """Multiply by c * x^i [y^j]."""
        if isinstance(key, int):
            key = (key,)
        out = {}
        for k, v in self.coeffs.items():
            k2 = _key_add(k, key)
            if _degree(k2) < self.order:
                p = v * c
                if p:
                    out[k2] = p
        return TruncSeries._raw(self.arity, self.order, self.ring, out)

    # structural maps

    def map_coeffs(self, fn: Callable[[Poly], Poly], ring: Ring | None = None) -> "TruncSeries":
        return TruncSeries(self.arity, self.order, ring or self.ring,
                           {k: fn(c) for k, c in self.coeffs.items()})

    def reduce_mod(self, k: int) -> "TruncSeries":
        target = Ring(2 ** k, self.ring.cyclo)
        return self.map_coeffs(lambda c: reduce_mod(c, k), target)

    def lift(self) -> "TruncSeries":
        return self.map_coeffs(lambda c: c.lift(), Ring(0, self.ring.cyclo))

    def change_ring(self, ring: Ring) -> "TruncSeries":
        return self.map_coeffs(lambda c: c.change_ring(ring), ring)

    def substitute_coeffs(self, bindings) -> "TruncSeries":
        return self.map_coeffs(lambda c: c.substitute(bindings))

    def truncate(self, order: int) -> "TruncSeries":
        """Explicitly drop to a lower order."""
        if order > self.order:
            raise SeriesMismatch("cannot raise truncation order")
        return TruncSeries(self.arity, order, self.ring, self.coeffs)

    def swap(self) -> "TruncSeries":
        if self.arity != 2:
            raise ValueError("swap needs a two-variable series")
        return TruncSeries._raw(2, self.order, self.ring,
                                {(j, i): c for (i, j), c in self.coeffs.items()})

    def to_arity2(self) -> "TruncSeries":
        """View a series in x as a series in x, y."""
        if self.arity == 2:
            return self
        return TruncSeries._raw(2, self.order, self.ring,
                                {(k[0], 0): c for k, c in self.coeffs.items()})

    def at_y_zero(self) -> "TruncSeries":
        return TruncSeries._raw(1, self.order, self.ring,
                                {(i,): c for (i, j), c in self.coeffs.items() if j == 0})

    def y_linear_part(self) -> "TruncSeries":
        """Coefficient of y^1 as a series in x (i.e. dF/dy at y = 0).

        Terms x^i y with i + 1 < N only determine x-degrees below N - 1,
        so the result has order N - 1.
        """
        if self.order < 2:
            raise ValueError("order too small for a y-linear part")
        return TruncSeries(1, self.order - 1, self.ring,
                           {(i,): c for (i, j), c in self.coeffs.items() if j == 1})

    def derivative(self) -> "TruncSeries":
        if self.arity != 1:
            raise ValueError("derivative is defined for one-variable series")
        if self.order < 2:
            raise ValueError("derivative of an order-1 series has no terms")
        out = {}
        for (i,), c in self.coeffs.items():
            if i:
                p = c * i
                if p:
                    out[(i - 1,)] = p
        return TruncSeries._raw(1, self.order - 1, self.ring, out)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        return compose(self, inner)


def _by_degree(s: TruncSeries) -> dict[int, list[tuple[Key, Poly]]]:
    comps: dict[int, list] = {}
    for k, c in s.coeffs.items():
        comps.setdefault(_degree(k), []).append((k, c))
    return comps


def _mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    N = a.order
    ring = a.ring
    if not a.coeffs or not b.coeffs:
        return TruncSeries.zero(N, ring, a.arity)
    bsorted = sorted(((_degree(k), k, c) for k, c in b.coeffs.items()), key=lambda t: t[0])
    accs: dict[Key, PolyAccumulator] = {}
    for k1, c1 in a.coeffs.items():
        lim = N - _degree(k1)
        for d2, k2, c2 in bsorted:
            if d2 >= lim:
                break
            key = _key_add(k1, k2)
            acc = accs.get(key)
            if acc is None:
                acc = accs[key] = PolyAccumulator(ring)
            acc.addmul(c1, c2)
    out = {}
    for key, acc in accs.items():
        p = acc.result()
        if p:
            out[key] = p
    return TruncSeries._raw(a.arity, N, ring, out)


def ser_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check(b)
    return a + b


def ser_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._check(b)
    return a * b


def ser_pow(a: TruncSeries, n: int) -> TruncSeries:
    return a ** n


def compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    """outer(inner) for a one-variable ``outer``; ``inner`` must have no
    constant term."""
    if outer.arity != 1:
        raise ValueError("outer series must be in one variable")
    if outer.order != inner.order or outer.ring != inner.ring:
        raise SeriesMismatch("outer and inner must share order and ring")
    if inner.constant_term():
        raise ValueError("inner series has a nonzero constant term")
    N = outer.order
    ks = sorted(k for (k,) in outer.coeffs)
    result = TruncSeries.const(outer.coefficient(0), N, inner.ring, inner.arity)
    ks = [k for k in ks if k > 0]
    if not ks:
        return result
    if 2 * len(ks) >= N:
        # dense outer: Horner
        acc = TruncSeries.zero(N, inner.ring, inner.arity)
        for k in range(max(ks), 0, -1):
            acc = (acc + outer.coefficient(k)) * inner
        return result + acc
    powers = {1: inner}

    def power(k):
        if k not in powers:
            if k % 2 == 0:
                powers[k] = power(k // 2).square()
            else:
                powers[k] = power(k - 1) * inner
        return powers[k]

    val = inner.valuation() or N
    for k in ks:
        if k * val >= N:
            break
        result = result + power(k).scale(outer.coefficient(k))
    return result


def solve_composition(f: TruncSeries, rhs: TruncSeries) -> TruncSeries:
    """Find h with f(h) = rhs, where f = x + (higher terms) and rhs has no
    constant term.  Solved one total degree at a time; ``revert(f)`` is the
    case rhs = x.

    Powers h^k that f needs are built lazily from recipes h^k = h^a h^b with
    a, b < k, so degree d of every power only uses degrees < d of h.
    """
    if f.arity != 1:
        raise ValueError("f must be a one-variable series")
    if f.order != rhs.order or f.ring != rhs.ring:
        raise SeriesMismatch("f and rhs must share order and ring")
    if f.constant_term() or f.coefficient(1) != Poly.one(f.ring):
        raise ValueError("f must have the form x + higher order terms")
    if rhs.constant_term():
        raise ValueError("rhs has a nonzero constant term")
    N = f.order
    ring = f.ring
    arity = rhs.arity
    needed = sorted(k for (k,) in f.coeffs if k >= 2)
    recipes: dict[int, tuple[int, int]] = {}

    def add_recipe(k):
        if k == 1 or k in recipes:
            return
        if k % 2 == 0:
            recipes[k] = (k // 2, k // 2)
            add_recipe(k // 2)
        else:
            recipes[k] = (k - 1, 1)
            add_recipe(k - 1)

    for k in needed:
        if k < N:
            add_recipe(k)
    # comps[k][d] = degree-d homogeneous part of h^k, as {key: Poly}
    comps: dict[int, dict[int, dict[Key, Poly]]] = {k: {} for k in list(recipes) + [1]}
    rhs_comps = _by_degree(rhs)
    char2 = ring.char == 2

    def product(ca: dict, cb: dict, accs: dict, weight: int):
        for k1, c1 in ca.items():
            for k2, c2 in cb.items():
                key = _key_add(k1, k2)
                acc = accs.get(key)
                if acc is None:
                    acc = accs[key] = PolyAccumulator(ring)
                acc.addmul(c1, c2, weight)

    order_k = sorted(recipes)
    for d in range(1, N):
        for k in order_k:
            if k > d:
                continue
            a, b = recipes[k]
            ca, cb = comps[a], comps[b]
            accs: dict[Key, PolyAccumulator] = {}
            if a == b:
                for i in range(a, d - a + 1):
                    j = d - i
                    if i > j:
                        break
                    if i not in ca or j not in ca:
                        continue
                    if i == j:
                        if char2:
                            for k1, c1 in ca[i].items():
                                key = tuple(2 * e for e in k1)
                                acc = accs.get(key)
                                if acc is None:
                                    acc = accs[key] = PolyAccumulator(ring)
                                acc.add(c1.square())
                        else:
                            product(ca[i], ca[i], accs, 1)
                    elif not char2:
                        product(ca[i], ca[j], accs, 2)
            else:
                for i in range(a, d - b + 1):
                    if i in ca and (d - i) in cb:
                        product(ca[i], cb[d - i], accs, 1)
            comp = {}
            for key, acc in accs.items():
                p = acc.result()
                if p:
                    comp[key] = p
            if comp:
                comps[k][d] = comp
        # h_d = rhs_d - sum_k f_k (h^k)_d
        accs = {}
        for key, c in rhs_comps.get(d, []):
            accs.setdefault(key, PolyAccumulator(ring)).add(c)
        for k in needed:
            comp = comps.get(k, {}).get(d)
            if not comp:
                continue
            fk = f.coefficient(k)
            for key, c in comp.items():
                accs.setdefault(key, PolyAccumulator(ring)).addmul(fk, c, -1)
        comp = {}
        for key, acc in accs.items():
            p = acc.result()
            if p:
                comp[key] = p
        if comp:
            comps[1][d] = comp
    out = {}
    for comp in comps[1].values():
        out.update(comp)
    return TruncSeries._raw(arity, N, ring, out)


def revert(f: TruncSeries) -> TruncSeries:
    """Compositional inverse of f = x + higher order terms."""
    if f.arity != 1:
        raise ValueError("revert needs a one-variable series")
    if f.coefficient(1) != Poly.one(f.ring) or f.constant_term():
        raise ValueError("leading coefficient must be 1 and constant term 0")
    return solve_composition(f, TruncSeries.x(f.order, f.ring))


def derivative(f: TruncSeries) -> TruncSeries:
    return f.derivative()


def inverse(f: TruncSeries) -> TruncSeries:
    """Multiplicative inverse of a one-variable series with constant term +-1."""
    if f.arity != 1:
        raise ValueError("inverse is implemented for one-variable series")
    c0 = f.constant_term()
    one = Poly.one(f.ring)
    if c0 == one:
        sign = 1
    elif c0 == -one:
        sign = -1
    else:
        raise ValueError("constant term must be a unit +-1")
    N = f.order
    g: dict[int, Poly] = {0: c0}
    fc = {i: c for (i,), c in f.coeffs.items() if i}
    for d in range(1, N):
        acc = PolyAccumulator(f.ring)
        for i, c in fc.items():
            if i <= d and (d - i) in g:
                acc.addmul(c, g[d - i])
        p = acc.result()
        if p:
            g[d] = p * (-sign)
    return TruncSeries.from_coeffs(N, f.ring, g)


def z_series(order: int) -> TruncSeries:
    """z = sum_k v1^(2^k) x^(2^k) over F2[v1]."""
    if order < 1:
        raise ValueError("order must be positive")
    coeffs = {}
    k = 1
    while k < order:
        coeffs[k] = Poly.v(1, F2, k)
        k *= 2
    return TruncSeries.from_coeffs(order, F2, coeffs)


def compare(a: TruncSeries, b: TruncSeries, label: str = "") -> Residual:
    """Residual of a == b: the lowest-degree differing coefficient."""
    a._check(b)
    diff = a - b
    if not diff.coeffs:
        return Residual(True)
    key, c = diff.items()[0]
    prefix = f"{label}: " if label else ""
    return Residual(False, f"{prefix}{format_key(key)}: {format_poly(c)}")


def homogeneity_offset(s: TruncSeries) -> set[int]:
    """Set of values grade(coefficient) - 2 * (total degree) over all
    monomials; a homogeneous series gives at most one value."""
    out = set()
    for k, c in s.coeffs.items():
        d = _degree(k)
        out.update(grade(m) - 2 * d for m in c.terms)
    return out


def check_homogeneous(s: TruncSeries, expected: int | None = None, label: str = "") -> Residual:
    offs = homogeneity_offset(s)
    prefix = f"{label}: " if label else ""
    if len(offs) > 1:
        return Residual(False, f"{prefix}mixed degrees {sorted(offs)}")
    if expected is not None and offs and offs != {expected}:
        return Residual(False, f"{prefix}degree {offs.pop()} != {expected}")
    return Residual(True)


def format_key(key: Key) -> str:
    parts = []
    for name, e in zip("xy", key):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


def format_series(s: TruncSeries) -> str:
    if not s.coeffs:
        return "0"
    out = []
    for key, c in s.items():
        ptxt = format_poly(c)
        mono = format_key(key)
        if mono == "1":
            term = ptxt if len(c) == 1 else f"({ptxt})"
        elif ptxt == "1":
            term = mono
        elif len(c) == 1 and not ptxt.startswith("-"):
            term = f"{ptxt}*{mono}"
        else:
            term = f"({ptxt})*{mono}"
        out.append(term)
    return " + ".join(out)


class EpsSeries:
    """a + eps*b with 2*eps = 0 and eps^2 = 0; b lives over F2."""

    __slots__ = ("even", "eps")

    def __init__(self, even: TruncSeries, eps: TruncSeries):
        if eps.ring.char != 2:
            raise SeriesMismatch("eps-part must have coefficients mod 2")
        if (even.arity, even.order) != (eps.arity, eps.order):
            raise SeriesMismatch("even and eps parts must share arity and order")
        self.even = even
        self.eps = eps

    @staticmethod
    def _bar(s: TruncSeries, ring: Ring) -> TruncSeries:
        if s.ring == ring:
            return s
        return s.reduce_mod(1).change_ring(ring) if s.ring.char != 2 else s.change_ring(ring)

    def __add__(self, other: "EpsSeries") -> "EpsSeries":
        return EpsSeries(self.even + other.even, self.eps + other.eps)

    def __mul__(self, other: "EpsSeries") -> "EpsSeries":
        r = self.eps.ring
        eps = self._bar(self.even, r) * other.eps + self.eps * self._bar(other.even, r)
        return EpsSeries(self.even * other.even, eps)

    def __eq__(self, other):
        if not isinstance(other, EpsSeries):
            return NotImplemented
        return self.even == other.even and self.eps == other.eps

    __hash__ = None

    def __str__(self):
        return f"{format_series(self.even)} + eps*({format_series(self.eps)})"

    __repr__ = __str__
