"""Triangular ideals in F2[v1, v2, ...], the ideal J, and realisability
checks for quotients of BP.

A triangular ideal has generators v_k + r_k in which each leading variable
v_k occurs only in its own generator, and only as the bare linear term.
Normal forms are then a single simultaneous substitution v_k -> r_k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .fgl import quadric_images
from .poly import (
    F2,
    QQ,
    NonIntegralError,
    ParseError,
    Poly,
    Variable,
    format_poly,
    parse_poly,
    reduce_mod,
    unpack,
)
from .powerop import QbarTable, bp_table, p_n_closed, ptilde
from .series import Residual


class IllFormedIdeal(ValueError):
    pass


def _mod2(a: Poly) -> Poly:
    if a.ring.char == 2:
        return a
    return reduce_mod(a, 1)


def _leading_variable(g: Poly) -> int | None:
    """Index k of the highest v_k occurring in g only as the bare term v_k."""
    best = None
    for var in sorted(g.variables(), key=lambda v: (v.kind, v.index)):
        if var.kind != "v":
            continue
        bare = Poly.var(var, F2).monomials()[0]
        if bare not in g.terms:
            continue
        slot = var.slot
        if any(m != bare and unpack(m).get(slot) for m in g.terms):
            continue
        if best is None or var.index > best:
            best = var.index
    return best


@dataclass
class TriangularIdeal:
    """Generators are stored inter-reduced as {k: r_k} meaning v_k = r_k
    modulo the ideal.  ``integral`` keeps each input generator's integral
    form (0/1 lift for mod-2 input), which is what P~ is applied to."""

    name: str
    rules: dict[int, Poly]
    integral: list[Poly] = field(default_factory=list)
    contains_two: bool = False

    @classmethod
    def from_generators(cls, generators, name: str = "I") -> "TriangularIdeal":
        rules: dict[int, Poly] = {}
        integral = []
        contains_two = False
        seen: dict[int, str] = {}
        for g in generators:
            if isinstance(g, str):
                g = parse_poly(g, QQ)
            if g.ring.char == 0 and g.variables() == set() and g:
                c = g.constant_term()
                if c.denominator % 2 == 0:
                    raise IllFormedIdeal(f"generator {g} is not 2-integral")
                if c.numerator % 2 == 0 and (c.numerator // 2) % 2:
                    contains_two = True
                    continue
                if c.numerator % 2:
                    raise IllFormedIdeal(f"generator {g} is a unit")
            try:
                g2 = _mod2(g)
            except NonIntegralError:
                raise IllFormedIdeal(f"generator {format_poly(g)} is not 2-integral") from None
            if not g2:
                continue
            if not g2.is_homogeneous():
                raise IllFormedIdeal(f"generator {format_poly(g2)} is not homogeneous")
            k = _leading_variable(g2)
            if k is None:
                raise IllFormedIdeal(f"generator {format_poly(g2)} has no bare linear variable")
            if k in seen:
                raise IllFormedIdeal(
                    f"leading variable v{k} shared by {seen[k]} and {format_poly(g2)}")
            seen[k] = format_poly(g2)
            integral.append(g if g.ring.char == 0 else g.lift())
            rules[k] = g2 + Poly.v(k, F2)
        ideal = cls(name, {}, integral, contains_two)
        ideal._interreduce(rules)
        return ideal

    def _interreduce(self, rules: dict[int, Poly]):
        current = dict(rules)
        for _ in range(len(current) + 2):
            bindings = {Variable("v", k): r for k, r in current.items()}
            changed = False
            nxt = {}
            for k, r in current.items():
                others = {var: p for var, p in bindings.items() if var.index != k}
                r2 = r.substitute(others) if others else r
                if Variable("v", k) in r2.variables():
                    raise IllFormedIdeal(f"v{k} reappears in its own rule")
                changed |= r2 != r
                nxt[k] = r2
            current = nxt
            if not changed:
                self.rules = current
                return
        raise IllFormedIdeal("inter-reduction did not terminate")

    def leading(self) -> list[int]:
        return sorted(self.rules)

    def generators(self) -> list[Poly]:
        """Reduced generators v_k + r_k in increasing k."""
        return [Poly.v(k, F2) + r for k, r in sorted(self.rules.items())]

    def max_degree(self) -> int:
        return max((Poly.v(k, F2).degree() for k in self.rules), default=0)

    def nf(self, a: Poly) -> Poly:
        return nf(a, self)

    def contains(self, a: Poly) -> bool:
        return not nf(a, self)

    def extend(self, generators, name: str | None = None) -> "TriangularIdeal":
        gens = list(self.integral) + list(generators)
        out = TriangularIdeal.from_generators(gens, name or self.name)
        out.contains_two = out.contains_two or self.contains_two
        return out


def nf(a: Poly, ideal: TriangularIdeal) -> Poly:
    """Normal form of a mod (2, ideal); zero iff a lies in the ideal mod 2."""
    a = _mod2(a)
    if not ideal.rules:
        return a
    bindings = {Variable("v", k): r for k, r in ideal.rules.items()}
    used = {var for var in a.variables() if var in bindings}
    if not used:
        return a
    return a.substitute({var: bindings[var] for var in used})


def vk_ideal(ks, name: str = "I") -> TriangularIdeal:
    return TriangularIdeal.from_generators([Poly.v(k, F2) for k in ks], name)


def I_ideal(k: int) -> TriangularIdeal:
    """(2, v1, ..., v_{k-1})."""
    ideal = vk_ideal(range(1, k), f"I_{k}")
    ideal.contains_two = True
    return ideal


# the ideal J

@dataclass
class JResult:
    n: int
    kmax: int
    generators: dict[int, Poly]
    ideal: TriangularIdeal
    checks: list[tuple[str, Residual]]

    @property
    def ok(self) -> bool:
        return all(r.ok for _, r in self.checks)


def _v1_squared_multiple(d: Poly, n: int) -> bool:
    """d lies in v1^2 F2[v1..vn]."""
    for m in d.terms:
        e = unpack(m)
        if e.get(Variable("v", 1).slot, 0) < 2:
            return False
        if any(Variable.from_slot(s).kind != "v" or Variable.from_slot(s).index > n for s in e):
            return False
    return True


def construct_J(n: int, kmax: int, table: QbarTable | None = None) -> JResult:
    """x_{n+1} = v_{n+1}; x_{k+1} = nf(P~(x_k), (x_{n+1}, .., x_k)).

    Conditions checked for every step: the v_{k+1} coefficient is 1,
    x_{k+1} - v_{k+1} lies in v1^2 F2[v1..vn] (so x_{k+1} = v_{k+1}
    mod v1^2), and P~(x_k) lies in (x_{n+1}, .., x_{k+1}) mod 2.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if kmax < n + 1:
        raise ValueError("kmax must be at least n + 1")
    table = table or bp_table(kmax)
    gens = {n + 1: Poly.v(n + 1, F2)}
    ideal = TriangularIdeal.from_generators([gens[n + 1]], f"J(n={n})")
    checks: list[tuple[str, Residual]] = []
    allowed = {Variable("v", i) for i in range(1, n + 1)}
    for k in range(n + 1, kmax):
        xbar = nf(ptilde(gens[k], table), ideal)
        target = Variable("v", k + 1)
        stray = xbar.variables() - allowed - {target}
        if stray:
            raise IllFormedIdeal(
                f"step {k}: normal form involves {sorted(map(str, stray))}; "
                "the degree-wise isomorphism fails")
        lead = Poly.var(target, F2).monomials()[0]
        checks.append((f"x_{k + 1}: coefficient of v{k + 1} is 1",
                       Residual(xbar.coeff(lead) == 1, None if xbar.coeff(lead) == 1
                                else format_poly(xbar))))
        rest = xbar - Poly.v(k + 1, F2)
        ok_a = _v1_squared_multiple(rest, n)
        checks.append((f"x_{k + 1} in v{k + 1} + v1^2 F2[v1..v{n}]",
                       Residual(ok_a, None if ok_a else format_poly(rest))))
        gens[k + 1] = xbar
        ideal = TriangularIdeal.from_generators([gens[i] for i in sorted(gens)], f"J(n={n})")
        left = nf(ptilde(gens[k], table), ideal)
        checks.append((f"P~(x_{k}) in (x_{n + 1}..x_{k + 1})",
                       Residual(not left, None if not left else format_poly(left))))
    return JResult(n, kmax, gens, ideal, checks)


@lru_cache(maxsize=None)
def monomials_of_degree(d: int, nvars: int) -> tuple[Poly, ...]:
    """All monomials in v1..v_nvars of grade d over F2, in canonical order."""
    degs = [Poly.v(i, F2).degree() for i in range(1, nvars + 1)]
    out = []

    def rec(i, remaining, exps):
        if i < 0:
            if remaining == 0:
                m = Poly.one(F2)
                for idx, e in exps:
                    m = m * Poly.v(idx, F2, e)
                out.append(m)
            return
        for e in range(remaining // degs[i] + 1):
            rec(i - 1, remaining - e * degs[i], exps + ([(i + 1, e)] if e else []))

    rec(nvars - 1, d, [])
    out.sort(key=lambda p: format_poly(p))
    return tuple(out)


def _vars_up_to(bound: int) -> int:
    k = 0
    while Poly.v(k + 1, F2).degree() <= bound:
        k += 1
    return k


def check_In_plus_J(n: int, J: TriangularIdeal, degree_bound: int) -> Residual:
    """(v1..v_{n-1}) + J and (v_k : k != n) reduce every monomial of
    degree <= bound to the same normal form."""
    K = _vars_up_to(degree_bound)
    if K == 0:
        return Residual(True)
    lhs = J.extend([Poly.v(i, F2) for i in range(1, n)], "I_n + J")
    rhs = vk_ideal([k for k in range(1, K + 1) if k != n], "(v_k : k != n)")
    for d in range(0, degree_bound + 1, 2):
        for m in monomials_of_degree(d, K):
            a, b = nf(m, lhs), nf(m, rhs)
            if a != b:
                return Residual(False, f"{format_poly(m)}: {format_poly(a)} vs {format_poly(b)}")
    return Residual(True)


def _rank_f2(polys: list[Poly]) -> int:
    """Rank over F2 of a list of polynomials (Gaussian elimination on bitsets)."""
    index: dict[int, int] = {}
    rows = []
    for p in polys:
        bits = 0
        for m in p.terms:
            bits |= 1 << index.setdefault(m, len(index))
        rows.append(bits)
    rank = 0
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def check_dimensions(n: int, J: TriangularIdeal, degree_bound: int) -> Residual:
    """dim_F2 of (BP/(2, J)) in each degree <= bound equals that of F2[v1..vn]."""
    K = _vars_up_to(degree_bound)
    for d in range(0, degree_bound + 1, 2):
        images = [nf(m, J) for m in monomials_of_degree(d, K)]
        got = _rank_f2(images)
        want = len(monomials_of_degree(d, min(n, K)))
        if got != want:
            return Residual(False, f"degree {d}: dimension {got} != {want}")
    return Residual(True)


def ideal_j_report(n: int, kmax: int) -> JResult:
    res = construct_J(n, kmax)
    bound = Poly.v(kmax, F2).degree()
    res.checks.append(("dimension of BP/(2,J) = dimension of F2[v1..vn]",
                       check_dimensions(n, res.ideal, bound)))
    res.checks.append(("I_n + J = (v_k : k != n)", check_In_plus_J(n, res.ideal, bound)))
    return res


# quadric classes

def verify_pwk(kmax: int, N: int = 33, table: QbarTable | None = None) -> Residual:
    """For 1 <= k <= kmax: q(w_k) = v_k, P~(q(w_{k-1})) = q(w_k), and
    P~(q(w_i)) = 0 for i < k - 1, all modulo (2, v1, .., v_{k-1})."""
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if N <= 2 ** kmax:
        raise ValueError(f"truncation {N} too small: need N > {2 ** kmax}")
    q = quadric_images(N)
    table = table or bp_table(kmax)
    checks = []
    if q[0] != Poly.const(2, QQ):
        checks.append(Residual(False, f"q(w_0) = {format_poly(q[0])}"))
    pt = {i: ptilde(q[i], table) for i in range(kmax)}
    for k in range(1, kmax + 1):
        Ik = I_ideal(k)
        qk = nf(q[k], Ik)
        if qk != Poly.v(k, F2):
            checks.append(Residual(False, f"q(w_{k}) mod I_{k} = {format_poly(qk)}"))
        d = nf(pt[k - 1] - _mod2(q[k]), Ik)
        if d:
            checks.append(Residual(False, f"P~(q(w_{k - 1})) - q(w_{k}) mod I_{k} = {format_poly(d)}"))
        for i in range(k - 1):
            r = nf(pt[i], Ik)
            if r:
                checks.append(Residual(False, f"P~(q(w_{i})) mod I_{k} = {format_poly(r)}"))
    return Residual.first_failure(checks)


# realisability

@dataclass
class RealisabilityCheck:
    hypothesis: str
    statement: str
    status: str  # pass | fail | skipped | n/a
    witness: str | None = None


@dataclass
class RealisabilityReport:
    name: str
    ideal: TriangularIdeal
    inverted: list[Poly]
    checks: list[RealisabilityCheck]
    verdict: str

    @property
    def ok(self) -> bool:
        return self.verdict.startswith("realisable")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": [format_poly(g) for g in self.ideal.generators()],
            "contains_two": self.ideal.contains_two,
            "inverted": [format_poly(s) for s in self.inverted],
            "checks": [
                {"hypothesis": c.hypothesis, "statement": c.statement,
                 "status": c.status, "witness": c.witness}
                for c in self.checks
            ],
            "verdict": self.verdict,
        }


ODD_STATEMENT = "A is a localised regular quotient in which 2 is a unit"
TORSION_STATEMENT = "A has no 2-torsion"
PTILDE_STATEMENT = "P~(g) maps to 0 in A/2"


def load_ideal_spec(source: str | Path | dict) -> dict:
    """Read {name, generators: [poly-text], inverted: [poly-text]}."""
    if isinstance(source, dict):
        data = source
        text = json.dumps(source)
    else:
        text = Path(source).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos, text) from None
    if not isinstance(data, dict) or "generators" not in data:
        raise ParseError("spec needs a 'generators' list", 0, text)
    out = {"name": data.get("name", "A"), "generators": [], "inverted": []}
    for key in ("generators", "inverted"):
        items = data.get(key, [])
        if not isinstance(items, list):
            raise ParseError(f"'{key}' must be a list", 0, text)
        for i, item in enumerate(items):
            try:
                out[key].append(parse_poly(str(item), QQ))
            except ParseError as exc:
                raise ParseError(f"{key}[{i}]: {exc.message}", exc.pos, str(item)) from None
    return out


def realisability_report(spec, table: QbarTable | None = None) -> RealisabilityReport:
    data = spec if isinstance(spec, dict) and "generators" in spec and all(
        isinstance(g, Poly) for g in spec["generators"]) else load_ideal_spec(spec)
    ideal = TriangularIdeal.from_generators(data["generators"], data["name"])
    inverted = data["inverted"]
    checks: list[RealisabilityCheck] = []

    two_unit = any(
        s.variables() == set() and s.constant_term() and s.constant_term() % 2 == 0
        for s in inverted)
    checks.append(RealisabilityCheck(
        "odd", ODD_STATEMENT, "pass" if two_unit else "n/a",
        None if two_unit else "2 is not inverted"))
    if two_unit:
        return RealisabilityReport(data["name"], ideal, inverted, checks,
                                   "realisable (2 is a unit)")

    torsion_free = not ideal.contains_two
    checks.append(RealisabilityCheck(
        "even", TORSION_STATEMENT, "pass" if torsion_free else "fail",
        None if torsion_free else "2 lies in the ideal"))

    zero_ring = [s for s in inverted if s.ring.char == 0 and not nf(_mod2(s), ideal)]
    if zero_ring:
        checks.append(RealisabilityCheck(
            "even", "A/2 = 0 because an inverted element vanishes mod (2, I)", "pass",
            format_poly(zero_ring[0])))

    nmax = max([k for k in ideal.rules] + [1]) + 1
    table = table or bp_table(nmax)
    limit = ideal.max_degree()
    all_pass = True
    for g in ideal.integral:
        label = f"{PTILDE_STATEMENT} for g = {format_poly(g)}"
        deg = 2 * g.degree() + 2
        if deg > limit:
            checks.append(RealisabilityCheck(
                "even", label, "skipped",
                f"degree {deg} exceeds the largest listed generator degree {limit}"))
            continue
        if zero_ring:
            checks.append(RealisabilityCheck("even", label, "pass", None))
            continue
        r = nf(ptilde(g, table), ideal)
        status = "pass" if not r else "fail"
        all_pass &= not r
        checks.append(RealisabilityCheck("even", label, status, format_poly(r) if r else None))

    if torsion_free and all_pass:
        verdict = "realisable (no 2-torsion, P~(I) = 0 in A/2)"
    elif not torsion_free:
        verdict = "not established (2-torsion present)"
    else:
        verdict = "not established (P~ obstruction)"
    return RealisabilityReport(data["name"], ideal, inverted, checks, verdict)


def bpn_spec(n: int, kmax: int) -> dict:
    """BP<n> = BP/(v_k : n < k <= kmax)."""
    return {"name": f"BP<{n}>", "generators": [f"v{k}" for k in range(n + 1, kmax + 1)],
            "inverted": []}


def j_spec(n: int, kmax: int) -> dict:
    res = construct_J(n, kmax)
    return {"name": f"BP/J(n={n})",
            "generators": [format_poly(res.generators[k]) for k in sorted(res.generators)],
            "inverted": []}


def bpn2_obstruction() -> Residual:
    """p_3 does not lie in (v3, v4, ...): its normal form is the witness.
    Passing means the obstruction is present."""
    ideal = vk_ideal(range(3, 5), "(v_k : k >= 3)")
    r = nf(p_n_closed(3), ideal)
    expected = Poly.v(1, F2, 12) * Poly.v(2, F2) + Poly.v(1, F2, 6) * Poly.v(2, F2, 3)
    if not r:
        return Residual(False, "p_3 lies in (v_k : k >= 3)")
    if r != expected:
        return Residual(False, f"unexpected remainder {format_poly(r)}")
    return Residual(True, format_poly(r))
