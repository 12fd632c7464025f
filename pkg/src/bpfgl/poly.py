"""Sparse graded polynomials over Q, Z/2 and Z/4.

Monomials are packed into a single Python int with 16 bits per variable
slot, so multiplying monomials is integer addition.  Slot layout:

    0          u      (degree 2)
    1          w      (the cyclotomic unit omega, degree 0)
    1 + n      v_n    (degree 2(2^n - 1)), 1 <= n <= 62
    63 + n     m_n    (log coefficients, same degree as v_n)

Exponents must stay below 2**16; every computation in this package is
bounded far below that by degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from gmpy2 import mpq

SLOT_BITS = 16
SLOT_MASK = (1 << SLOT_BITS) - 1
MAX_V = 62


class RingMismatch(ValueError):
    pass


class NonIntegralError(ValueError):
    """A coefficient has an even denominator, so it has no image mod 2^k."""

    def __init__(self, monomial: str, coeff):
        super().__init__(f"coefficient {coeff} of {monomial} is not 2-integral")
        self.monomial = monomial
        self.coeff = coeff


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}" + (f": {text!r}" if text else ""))
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: ``char`` is 0 (Q), 2 or 4; ``cyclo`` an odd prime p
    when omega is adjoined subject to Phi_p(omega) = 0."""

    char: int = 0
    cyclo: int | None = None

    def __post_init__(self):
        if self.char not in (0, 2, 4):
            raise ValueError(f"unsupported characteristic {self.char}")
        if self.cyclo is not None and (self.cyclo < 3 or self.cyclo % 2 == 0):
            raise ValueError("cyclotomic prime must be odd")

    def __str__(self):
        base = {0: "Q", 2: "F2", 4: "Z/4"}[self.char]
        return base if self.cyclo is None else f"{base}[w]/Phi_{self.cyclo}"

    def with_cyclo(self, p: int | None) -> "Ring":
        return Ring(self.char, p)


QQ = Ring(0)
F2 = Ring(2)
Z4 = Ring(4)


@dataclass(frozen=True)
class Variable:
    kind: str  # 'v', 'u', 'w' or 'm'
    index: int = 0

    def __post_init__(self):
        if self.kind in ("v", "m"):
            if not 1 <= self.index <= MAX_V:
                raise ValueError(f"{self.kind}{self.index}: index out of range")
        elif self.kind not in ("u", "w"):
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @property
    def name(self) -> str:
        return self.kind + (str(self.index) if self.kind in ("v", "m") else "")

    @property
    def slot(self) -> int:
        if self.kind == "u":
            return 0
        if self.kind == "w":
            return 1
        return 1 + self.index if self.kind == "v" else 63 + self.index

    @property
    def degree(self) -> int:
        if self.kind == "u":
            return 2
        if self.kind == "w":
            return 0
        return 2 * (2 ** self.index - 1)

    @classmethod
    def parse(cls, name: str) -> "Variable":
        if name in ("u", "w"):
            return cls(name)
        m = re.fullmatch(r"([vm])(\d+)", name)
        if not m:
            raise ValueError(f"unknown variable {name!r}")
        return cls(m.group(1), int(m.group(2)))

    @classmethod
    def from_slot(cls, slot: int) -> "Variable":
        return _slot_variable(slot)

    def __str__(self):
        return self.name


def _slot_variable(slot: int) -> Variable:
    if slot == 0:
        return Variable("u")
    if slot == 1:
        return Variable("w")
    if slot <= 63:
        return Variable("v", slot - 1)
    return Variable("m", slot - 63)


def _slot_degree(slot: int) -> int:
    if slot == 0:
        return 2
    if slot == 1:
        return 0
    n = slot - 1 if slot <= 63 else slot - 63
    return 2 * (2 ** n - 1)


# Sort rank used for the lexicographic tie-break: v1, v2, ..., u, w, m1, ...
def _slot_rank(slot: int) -> int:
    if 2 <= slot <= 63:
        return slot - 2
    if slot == 0:
        return 62
    if slot == 1:
        return 63
    return slot


def unpack(m: int) -> dict[int, int]:
    """Exponents of a packed monomial, keyed by slot."""
    out = {}
    slot = 0
    while m:
        e = m & SLOT_MASK
        if e:
            out[slot] = e
        m >>= SLOT_BITS
        slot += 1
    return out


def pack(exps: Mapping[int, int]) -> int:
    m = 0
    for slot, e in exps.items():
        if e < 0 or e > SLOT_MASK:
            raise OverflowError(f"exponent {e} out of range")
        m |= e << (SLOT_BITS * slot)
    return m


def var_monomial(var: Variable, e: int = 1) -> int:
    return e << (SLOT_BITS * var.slot)


@lru_cache(maxsize=None)
def grade(m: int) -> int:
    """Homological degree of a packed monomial."""
    g = 0
    slot = 0
    while m:
        e = m & SLOT_MASK
        if e:
            g += e * _slot_degree(slot)
        m >>= SLOT_BITS
        slot += 1
    return g


def exponent(m: int, var: Variable) -> int:
    return (m >> (SLOT_BITS * var.slot)) & SLOT_MASK


def _to_coeff(c, ring: Ring):
    if ring.char == 0:
        if isinstance(c, Fraction):
            return mpq(c.numerator, c.denominator)
        return mpq(c)
    if isinstance(c, int):
        return c % ring.char
    q = mpq(c)
    num, den = int(q.numerator), int(q.denominator)
    if den % 2 == 0:
        raise NonIntegralError("1", c)
    return num * pow(den, -1, ring.char) % ring.char


def _cyclo_reduce(terms: dict, ring: Ring) -> dict:
    """Rewrite w^(p-1) = -(1 + w + ... + w^(p-2)); keeps w-exponents < p-1."""
    p = ring.cyclo
    shift = SLOT_BITS
    pending = [m for m in terms if ((m >> shift) & SLOT_MASK) >= p - 1]
    if not pending:
        return terms
    mod = ring.char
    for m in pending:
        c = terms.pop(m)
        e = (m >> shift) & SLOT_MASK
        rest = m - (e << shift)
        e %= p
        if e < p - 1:
            targets = [(rest + (e << shift), c)]
        else:
            targets = [(rest + (i << shift), -c) for i in range(p - 1)]
        for k, cc in targets:
            v = terms.get(k, 0) + cc
            if mod:
                v %= mod
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
    return terms


class Poly:
    """Immutable sparse polynomial.  ``terms`` maps packed monomials to
    nonzero coefficients (``mpq`` over Q, ints in range over Z/2, Z/4)."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring = QQ, terms: Mapping[int, object] | None = None):
        self.ring = ring
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _to_coeff(c, ring)
                if c:
                    clean[m] = c
            if ring.cyclo:
                clean = _cyclo_reduce(clean, ring)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def const(cls, c, ring: Ring = QQ) -> "Poly":
        return cls(ring, {0: c})

    @classmethod
    def zero(cls, ring: Ring = QQ) -> "Poly":
        return cls._raw(ring, {})

    @classmethod
    def one(cls, ring: Ring = QQ) -> "Poly":
        return cls(ring, {0: 1})

    @classmethod
    def var(cls, name: str | Variable, ring: Ring = QQ, e: int = 1) -> "Poly":
        v = name if isinstance(name, Variable) else Variable.parse(name)
        return cls(ring, {var_monomial(v, e): 1})

    @classmethod
    def v(cls, n: int, ring: Ring = QQ, e: int = 1) -> "Poly":
        return cls.var(Variable("v", n), ring, e)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff=1, ring: Ring = QQ) -> "Poly":
        packed = pack({Variable.parse(k).slot: e for k, e in exps.items() if e})
        return cls(ring, {packed: coeff})

    # basic protocol

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq()):
            return self == Poly.const(other, self.ring)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, {self.ring})"

    def __str__(self):
        return format_poly(self)

    def __len__(self):
        return len(self.terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq()):
            return Poly.const(other, self.ring)
        return None

    # arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_add(self, o)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.char
        if mod == 2:
            return self
        if mod:
            return Poly._raw(self.ring, {m: (-c) % mod for m, c in self.terms.items()})
        return Poly._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_add(self, -o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_add(o, -self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        if self.ring.char == 2 and len(self.terms) == 1 and not self.ring.cyclo:
            (m, c), = self.terms.items()
            return Poly._raw(self.ring, {m * n: 1})
        result = Poly.one(self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def square(self) -> "Poly":
        if self.ring.char == 2:
            # Frobenius: cross terms cancel in characteristic 2
            terms = dict.fromkeys((m << 1 for m in self.terms), 1)
            if self.ring.cyclo:
                return Poly(self.ring, terms)
            return Poly._raw(self.ring, terms)
        return self * self

    def scale(self, c) -> "Poly":
        return self * Poly.const(c, self.ring)

    def mul_monomial(self, m: int, c=1) -> "Poly":
        c = _to_coeff(c, self.ring)
        if not c:
            return Poly.zero(self.ring)
        mod = self.ring.char
        if mod:
            terms = {k + m: v * c % mod for k, v in self.terms.items()}
            terms = {k: v for k, v in terms.items() if v}
        else:
            terms = {k + m: v * c for k, v in self.terms.items()}
        if self.ring.cyclo and (m >> SLOT_BITS) & SLOT_MASK:
            return Poly(self.ring, terms)
        return Poly._raw(self.ring, terms)

    def div_monomial(self, m: int) -> "Poly":
        """Exact division by a monomial; raises if some term is not divisible."""
        need = unpack(m)
        out = {}
        for k, c in self.terms.items():
            ek = unpack(k)
            if any(ek.get(s, 0) < e for s, e in need.items()):
                raise ValueError(f"{format_monomial(k)} not divisible by {format_monomial(m)}")
            out[k - m] = c
        return Poly._raw(self.ring, out)

    # structure

    def coeff(self, m: int | Mapping[str, int] = 0):
        if not isinstance(m, int):
            m = pack({Variable.parse(k).slot: e for k, e in m.items() if e})
        return self.terms.get(m, _to_coeff(0, self.ring))

    def constant_term(self):
        return self.coeff(0)

    def monomials(self) -> list[int]:
        return sorted(self.terms, key=_sort_key)

    def variables(self) -> set[Variable]:
        out = set()
        for m in self.terms:
            out.update(_slot_variable(s) for s in unpack(m))
        return out

    def grades(self) -> set[int]:
        return {grade(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def degree(self) -> int | None:
        """Common grade of a homogeneous polynomial (None for zero)."""
        gs = self.grades()
        if not gs:
            return None
        if len(gs) > 1:
            raise ValueError(f"{self} is not homogeneous")
        return gs.pop()

    def change_ring(self, ring: Ring) -> "Poly":
        """Inclusion into a ring of the same characteristic (e.g. adjoin omega)."""
        if ring == self.ring:
            return self
        if ring.char != self.ring.char:
            raise RingMismatch("use reduce_mod/lift to change characteristic")
        if self.ring.cyclo and ring.cyclo != self.ring.cyclo:
            raise RingMismatch("cannot change cyclotomic prime")
        return Poly._raw(ring, dict(self.terms))

    def reduce_mod(self, k: int) -> "Poly":
        return reduce_mod(self, k)

    def lift(self) -> "Poly":
        """Integral representative over Q with coefficients in 0..char-1."""
        if self.ring.char == 0:
            return self
        return Poly._raw(Ring(0, self.ring.cyclo), {m: mpq(c) for m, c in self.terms.items()})

    def substitute(self, bindings) -> "Poly":
        return substitute(self, bindings)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.ring, {m: fn(c) for m, c in self.terms.items()})


def _check_rings(a: Poly, b: Poly):
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")


def poly_add(a: Poly, b: Poly) -> Poly:
    _check_rings(a, b)
    if not b.terms:
        return a
    if not a.terms:
        return b
    mod = a.ring.char
    if mod == 2:
        return Poly._raw(a.ring, dict.fromkeys(a.terms.keys() ^ b.terms.keys(), 1))
    terms = dict(a.terms)
    for m, c in b.terms.items():
        v = terms.get(m, 0) + c
        if mod:
            v %= mod
        if v:
            terms[m] = v
        else:
            del terms[m]
    return Poly._raw(a.ring, terms)


def poly_mul(a: Poly, b: Poly) -> Poly:
    _check_rings(a, b)
    if not a.terms or not b.terms:
        return Poly.zero(a.ring)
    if len(a.terms) > len(b.terms):
        a, b = b, a
    ring = a.ring
    mod = ring.char
    if mod == 2:
        acc: set[int] = set()
        bkeys = b.terms.keys()
        for m1 in a.terms:
            acc ^= {m1 + m2 for m2 in bkeys}
        terms = dict.fromkeys(acc, 1)
    else:
        terms = {}
        get = terms.get
        bitems = list(b.terms.items())
        for m1, c1 in a.terms.items():
            for m2, c2 in bitems:
                k = m1 + m2
                terms[k] = get(k, 0) + c1 * c2
        if mod:
            terms = {k: v % mod for k, v in terms.items() if v % mod}
        else:
            terms = {k: v for k, v in terms.items() if v}
    if ring.cyclo:
        terms = _cyclo_reduce(terms, ring)
    return Poly._raw(ring, terms)


def is_2_integral(a: Poly) -> bool:
    if a.ring.char:
        return True
    return all(int(c.denominator) % 2 for c in a.terms.values())


def reduce_mod(a: Poly, k: int) -> Poly:
    """Reduce coefficients modulo 2^k (k = 1 or 2)."""
    if k not in (1, 2):
        raise ValueError("only reductions mod 2 and mod 4 are supported")
    modulus = 2 ** k
    target = Ring(modulus, a.ring.cyclo)
    if a.ring.char == modulus:
        return a
    if a.ring.char == 2:
        raise ValueError("cannot lift F2 to Z/4 by reduction")
    terms = {}
    if a.ring.char == 4:
        terms = {m: c % 2 for m, c in a.terms.items() if c % 2}
        return Poly._raw(target, terms)
    for m, c in a.terms.items():
        num, den = int(c.numerator), int(c.denominator)
        if den % 2 == 0:
            raise NonIntegralError(format_monomial(m), c)
        r = num * pow(den, -1, modulus) % modulus
        if r:
            terms[m] = r
    out = Poly._raw(target, terms)
    return Poly(target, terms) if target.cyclo else out


def substitute(a: Poly, bindings) -> Poly:
    """Simultaneous substitution of variables by polynomials (same ring)."""
    if not bindings:
        return a
    slots = {}
    for var, value in bindings.items():
        v = var if isinstance(var, Variable) else Variable.parse(var)
        if not isinstance(value, Poly):
            value = Poly.const(value, a.ring)
        _check_rings(a, value)
        slots[v.slot] = value
    powers: dict[tuple[int, int], Poly] = {}

    def power(slot, e):
        key = (slot, e)
        if key not in powers:
            powers[key] = slots[slot] ** e
        return powers[key]

    acc = PolyAccumulator(a.ring)
    keep = {}
    for m, c in a.terms.items():
        exps = unpack(m)
        hit = [s for s in exps if s in slots]
        if not hit:
            keep[m] = c
            continue
        rest = m
        term = Poly.const(c, a.ring)
        for s in hit:
            rest -= exps[s] << (SLOT_BITS * s)
            term = term * power(s, exps[s])
        acc.add(term.mul_monomial(rest))
    acc.add(Poly(a.ring, keep))
    return acc.result()


# formatting and parsing

_RANKS = 64 + 63


def _sort_key(m: int):
    exps = unpack(m)
    vec = sorted((_slot_rank(s), e) for s, e in exps.items())
    # descending lexicographic on the exponent vector (v1, v2, ..., u, w, m1, ...)
    dense = [0] * _RANKS
    for r, e in vec:
        dense[r] = -e
    return (grade(m), dense)


def format_monomial(m: int) -> str:
    exps = unpack(m)
    if not exps:
        return "1"
    parts = []
    for s in sorted(exps, key=_slot_rank):
        name = _slot_variable(s).name
        parts.append(name if exps[s] == 1 else f"{name}^{exps[s]}")
    return "*".join(parts)


def _format_coeff(c) -> str:
    if isinstance(c, int):
        return str(c)
    num, den = int(c.numerator), int(c.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_poly(a: Poly) -> str:
    if not a.terms:
        return "0"
    out = []
    for m in a.monomials():
        c = a.terms[m]
        neg = a.ring.char == 0 and c < 0
        mag = -c if neg else c
        cs = _format_coeff(mag)
        if m == 0:
            body = cs
        elif cs == "1":
            body = format_monomial(m)
        else:
            body = f"{cs}*{format_monomial(m)}"
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z]\d*)|(\^)|(\*)|(\+)|(-)|(/))")


def _tokens(text: str):
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            return
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", pos, text)
        start = m.start(m.lastindex)
        kind = ("int", "name", "^", "*", "+", "-", "/")[m.lastindex - 1]
        yield kind, m.group(m.lastindex), start
        pos = m.end()


def parse_poly(text: str, ring: Ring = QQ) -> Poly:
    """Parse the text grammar: terms joined by +/-, each an optional
    coefficient and ``*``-separated powers like ``v1^4``."""
    toks = list(_tokens(text))
    if not toks:
        raise ParseError("empty polynomial", 0, text)
    i = 0
    acc: dict[int, Fraction] = {}

    def peek():
        return toks[i] if i < len(toks) else (None, None, len(text))

    def parse_term():
        nonlocal i
        coeff = Fraction(1)
        mono: dict[int, int] = {}
        expect_factor = True
        while True:
            kind, val, pos = peek()
            if expect_factor:
                if kind == "int":
                    i += 1
                    num = int(val)
                    if peek()[0] == "/":
                        i += 1
                        k2, v2, p2 = peek()
                        if k2 != "int":
                            raise ParseError("expected denominator", p2, text)
                        i += 1
                        if int(v2) == 0:
                            raise ParseError("zero denominator", p2, text)
                        coeff *= Fraction(num, int(v2))
                    else:
                        coeff *= num
                elif kind == "name":
                    i += 1
                    try:
                        var = Variable.parse(val)
                    except ValueError as exc:
                        raise ParseError(str(exc), pos, text) from None
                    e = 1
                    if peek()[0] == "^":
                        i += 1
                        k2, v2, p2 = peek()
                        if k2 != "int":
                            raise ParseError("expected exponent", p2, text)
                        i += 1
                        e = int(v2)
                    mono[var.slot] = mono.get(var.slot, 0) + e
                else:
                    raise ParseError("expected coefficient or variable", pos, text)
                expect_factor = False
            else:
                if kind == "*":
                    i += 1
                    expect_factor = True
                else:
                    return coeff, pack(mono)

    sign = 1
    if peek()[0] == "-":
        sign = -1
        i += 1
    while True:
        c, m = parse_term()
        acc[m] = acc.get(m, 0) + sign * c
        kind, val, pos = peek()
        if kind is None:
            break
        if kind == "+":
            sign = 1
        elif kind == "-":
            sign = -1
        else:
            raise ParseError(f"unexpected {val!r}", pos, text)
        i += 1
    if ring.char:
        terms = {}
        for m, c in acc.items():
            if c.denominator % 2 == 0:
                raise NonIntegralError(format_monomial(m), c)
            terms[m] = c.numerator * pow(c.denominator, -1, ring.char)
        return Poly(ring, terms)
    return Poly(ring, acc)


def v(n: int, ring: Ring = QQ) -> Poly:
    """Shorthand for the generator v_n."""
    return Poly.v(n, ring)


def sum_polys(polys: Iterable[Poly], ring: Ring) -> Poly:
    out = Poly.zero(ring)
    for p in polys:
        out = out + p
    return out


class PolyAccumulator:
    """Mutable running sum of polynomials and products of polynomials.

    Series products add many partial products into one coefficient; doing
    that through immutable ``Poly`` additions copies the term dict each time.
    """

    __slots__ = ("ring", "_acc")

    def __init__(self, ring: Ring):
        self.ring = ring
        self._acc = set() if ring.char == 2 else {}

    def add(self, p: Poly, c: int = 1):
        if p.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {p.ring}")
        if self.ring.char == 2:
            if c % 2:
                self._acc.symmetric_difference_update(p.terms)
            return
        acc = self._acc
        get = acc.get
        for m, v in p.terms.items():
            acc[m] = get(m, 0) + c * v

    def addmul(self, a: Poly, b: Poly, c: int = 1):
        if a.ring != self.ring or b.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {a.ring}/{b.ring}")
        if not a.terms or not b.terms:
            return
        if len(a.terms) > len(b.terms):
            a, b = b, a
        if self.ring.char == 2:
            if c % 2 == 0:
                return
            update = self._acc.symmetric_difference_update
            bkeys = b.terms.keys()
            for m1 in a.terms:
                update({m1 + m2 for m2 in bkeys})
            return
        acc = self._acc
        get = acc.get
        bitems = list(b.terms.items())
        for m1, c1 in a.terms.items():
            if c != 1:
                c1 = c1 * c
            for m2, c2 in bitems:
                k = m1 + m2
                acc[k] = get(k, 0) + c1 * c2

    def result(self) -> Poly:
        ring = self.ring
        if ring.char == 2:
            terms = dict.fromkeys(self._acc, 1)
        elif ring.char:
            terms = {k: v % ring.char for k, v in self._acc.items() if v % ring.char}
        else:
            terms = {k: v for k, v in self._acc.items() if v}
        if ring.cyclo:
            terms = _cyclo_reduce(terms, ring)
        return Poly._raw(ring, terms)
