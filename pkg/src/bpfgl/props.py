"""Seeded randomized property runs over the core algebra.

Each suite draws its cases from ``random.Random(seed)`` so a run is
reproducible from the seed alone.  The test suite covers the same laws
with hypothesis; this module is what ``bpfgl props`` executes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .checks import run_homogeneity
from .ideals import construct_J, nf, vk_ideal
from .poly import F2, QQ, Poly, Ring
from .powerop import bp_table, qbar_eval
from .series import Residual
from .tring import TElem, bp_context, check_degree_invariant, t_double, t_scalar

NVARS = 4


@dataclass
class PropertyResult:
    name: str
    cases: int
    failures: int
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {"name": self.name, "cases": self.cases, "failures": self.failures,
                "witness": self.witness}


def random_poly(rng: random.Random, ring: Ring, terms: int = 4, max_exp: int = 3,
                nvars: int = NVARS, coeff: int = 5) -> Poly:
    out = Poly.zero(ring)
    for _ in range(rng.randint(0, terms)):
        mono = Poly.const(rng.randint(-coeff, coeff) or 1, ring)
        for i in range(1, nvars + 1):
            e = rng.randint(0, max_exp)
            if e:
                mono = mono * Poly.v(i, ring, e)
        out = out + mono
    return out


def random_homogeneous(rng: random.Random, ring: Ring, grade: int, terms: int = 4) -> Poly:
    """Sum of random monomials in v1, v2, v3 of the given grade."""
    degs = [Poly.v(i, F2).degree() for i in range(1, 4)]
    out = Poly.zero(ring)
    for _ in range(terms):
        rest = grade
        mono = Poly.const(rng.randint(-3, 3) or 1, ring)
        for i in (3, 2):
            e = rng.randint(0, rest // degs[i - 1])
            rest -= e * degs[i - 1]
            if e:
                mono = mono * Poly.v(i, ring, e)
        if rest % degs[0]:
            continue
        if rest:
            mono = mono * Poly.v(1, ring, rest // degs[0])
        out = out + mono
    return out


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures = 0
        self.witness = None

    def record(self, ok: bool, witness):
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.witness is None:
                self.witness = witness() if callable(witness) else witness

    def result(self) -> PropertyResult:
        return PropertyResult(self.name, self.cases, self.failures, self.witness)


def tring_axioms(seed: int, count: int = 200) -> PropertyResult:
    """Twisted addition is commutative and associative, 4T = 0,
    2[a, b] = [0, t a^2], and multiplication distributes."""
    rng = random.Random(seed)
    ctx = bp_context()
    tally = _Tally("T-ring axioms")

    def elem():
        return TElem(ctx, random_poly(rng, F2), random_poly(rng, F2))

    for _ in range(count):
        p, q, r = elem(), elem(), elem()
        tally.record(p + q == q + p, lambda: f"p+q != q+p at p={p}, q={q}")
        tally.record((p + q) + r == p + (q + r), lambda: f"associativity at {p}, {q}, {r}")
        tally.record((p + p + p + p).is_zero(), lambda: f"4p != 0 at p={p}")
        tally.record(p + p == t_double(p), lambda: f"p+p != [0, t a^2] at p={p}")
        tally.record(p * q == q * p, lambda: f"pq != qp at {p}, {q}")
        tally.record(p * (q + r) == p * q + p * r, lambda: f"distributivity at {p}, {q}, {r}")
        tally.record((p - q) + q == p, lambda: f"(p-q)+q != p at {p}, {q}")
        n = rng.randint(-8, 8)
        tally.record(t_scalar(ctx, n) + t_scalar(ctx, 1) == t_scalar(ctx, n + 1),
                     lambda: f"integer image additivity at {n}")
    return tally.result()


def qbar_ring_map(seed: int, count: int = 200) -> PropertyResult:
    """Qbar(a + b) = Qbar(a) + Qbar(b), Qbar(ab) = Qbar(a) Qbar(b),
    Qbar(-a) = -Qbar(a) and Qbar(1) = [1, 0] on random integral pairs."""
    rng = random.Random(seed)
    table = bp_table(NVARS)
    tally = _Tally("Qbar ring-map laws")
    one = qbar_eval(Poly.one(QQ), table)
    tally.record(one == table.ctx.one(), lambda: f"Qbar(1) = {one}")
    for _ in range(count):
        a, b = random_poly(rng, QQ), random_poly(rng, QQ)
        qa, qb = qbar_eval(a, table), qbar_eval(b, table)
        tally.record(qbar_eval(a + b, table) == qa + qb, lambda: f"additivity at a={a}, b={b}")
        tally.record(qbar_eval(a * b, table) == qa * qb, lambda: f"multiplicativity at a={a}, b={b}")
        tally.record(qbar_eval(-a, table) == -qa, lambda: f"negation at a={a}")
    return tally.result()


def homogeneity(seed: int, count: int = 200) -> PropertyResult:
    """Every constructed series is homogeneous, and Qbar of a homogeneous
    element satisfies grade(b) = 2 grade(a) + 2."""
    rng = random.Random(seed)
    table = bp_table(3)
    tally = _Tally("homogeneity")
    r = run_homogeneity({"N": 16})
    tally.record(r.ok, r.witness)
    for _ in range(count):
        g = 2 * rng.randint(1, 20)
        a = random_homogeneous(rng, QQ, g)
        img = qbar_eval(a, table)
        res = check_degree_invariant(img)
        tally.record(res.ok, lambda: f"{a}: {res.witness}")
    return tally.result()


def nf_idempotence(seed: int, count: int = 200) -> PropertyResult:
    """nf(nf(a)) = nf(a), nf is additive, and multiples of generators
    reduce to zero, for random triangular ideals."""
    rng = random.Random(seed)
    tally = _Tally("nf idempotence")
    ideals = [vk_ideal(ks) for ks in ([1], [2, 3], [3, 4, 5], [1, 3])]
    ideals.append(construct_J(2, 6).ideal)
    ideals.append(construct_J(1, 5).ideal)
    for _ in range(count):
        ideal = rng.choice(ideals)
        a, b = random_poly(rng, F2, nvars=6), random_poly(rng, F2, nvars=6)
        na = nf(a, ideal)
        tally.record(nf(na, ideal) == na, lambda: f"nf not idempotent at {a} in {ideal.name}")
        tally.record(nf(a + b, ideal) == na + nf(b, ideal), lambda: f"nf not additive at {a}, {b}")
        g = rng.choice(ideal.generators())
        tally.record(not nf(a * g, ideal), lambda: f"{a} * {g} not reduced to 0")
    return tally.result()


SUITES = {
    "tring-axioms": tring_axioms,
    "qbar-ring-map": qbar_ring_map,
    "homogeneity": homogeneity,
    "nf-idempotence": nf_idempotence,
}


def run_properties(seed: int = 0, count: int = 200) -> list[PropertyResult]:
    return [fn(seed, count) for fn in SUITES.values()]


def as_residual(results: list[PropertyResult]) -> Residual:
    for r in results:
        if not r.ok:
            return Residual(False, f"{r.name}: {r.failures}/{r.cases} failed; {r.witness}")
    return Residual(True)
