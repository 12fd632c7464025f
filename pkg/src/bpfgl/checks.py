"""Registry of verification checks.

Each entry is data: an id, the statement it verifies, default parameters,
minimum parameters and a runner returning a Residual.  The CLI, the
golden files and the acceptance tests all go through this table.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .fgl import (
    build_bp_fgl,
    build_mult_fgl,
    check_unit_commutative,
    defining_relation_residual,
    f_partial_from_law,
    formal_sum_eps,
    hazewinkel_log,
    invdif_residual,
    log_agreement,
    n_series,
    w_series,
)
from .ideals import bpn2_obstruction, construct_J, ideal_j_report, verify_pwk
from .poly import F2, Poly, Ring, parse_poly
from .powerop import (
    bp_table,
    exp2_mod4,
    exp_qf_2x,
    ku_table,
    p_n_closed,
    pn_oracle,
    qbar_law,
    u_n,
    un_forms,
    verify_ipo,
    verify_ipo_ku,
    verify_qf_2_typical,
    verify_zxqf,
)
from .series import (
    Residual,
    TruncSeries,
    check_homogeneous,
    compare,
    compose,
    revert,
    z_series,
)
from .tring import TElem, bp_context, check_degree_invariant, qf_sum, t_compare, z_elem


class UnknownCheck(KeyError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    statement: str
    defaults: dict
    minimums: dict
    runner: Callable[[dict], Residual]


@dataclass
class CheckResult:
    check_id: str
    paper_ref: str
    truncation: dict
    status: str
    residual: str | None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "check_id": self.check_id,
            "paper_ref": self.paper_ref,
            "truncation": self.truncation,
            "status": self.status,
            "residual": self.residual,
        }
        if timings:
            out["wall_time"] = round(self.wall_time, 3)
        return out


# published values used as fixed expectations
PUBLISHED_PN = {
    0: "v1",
    1: "v2",
    2: "v1^4*v2 + v1*v2^2 + v3",
    3: "v1^12*v2 + v1^6*v2^3 + v1^2*v2^2*v3 + v1*v3^2 + v4",
}
J_N2_X4 = "v4 + v1^12*v2 + v1^6*v2^3"


def _must_fail(r: Residual, label: str) -> Residual:
    if r.ok:
        return Residual(False, f"control did not fail: {label}")
    return Residual(True)


def run_bp_defining_relation(p: dict) -> Residual:
    F = build_bp_fgl(p["N"], check_relation=False)
    return Residual.first_failure([
        defining_relation_residual(F, "law"),
        defining_relation_residual(F, "log"),
        check_unit_commutative(F),
        check_homogeneous(F.law, -2, "F(x,y)"),
    ])


def run_log_agreement(p: dict) -> Residual:
    N = p["N"]
    log = hazewinkel_log(N, check=False)
    # the inverse pair is rechecked at a smaller order to bound cost
    small = log.truncate(min(N, 34))
    exp = revert(small)
    x = TruncSeries.x(small.order, log.ring)
    return Residual.first_failure([
        log_agreement(N),
        compare(compose(small, exp), x, "log(exp(x))"),
        compare(compose(exp, small), x, "exp(log(x))"),
        check_homogeneous(log, -2, "log"),
    ])


def run_invdif(p: dict) -> Residual:
    N = p["N"]
    small = min(N, 16)
    F = build_bp_fgl(small, check_relation=False)
    one_z = TruncSeries.const(1, small, F2) + z_series(small)
    eps = formal_sum_eps(F.reduce_mod(1), TruncSeries.x(small, F2))
    return Residual.first_failure([
        invdif_residual(N),
        compare(f_partial_from_law(F).reduce_mod(1), one_z.truncate(small - 1),
                "dF/dy(x,0) mod 2 vs 1 + z"),
        compare(eps.eps, one_z, "eps-part of x +_F eps"),
    ])


def run_exp_f_mod4(p: dict) -> Residual:
    return exp2_mod4(p["N"])


def run_zxqf(p: dict) -> Residual:
    return verify_zxqf(p["N"])


def run_exp_qf(p: dict) -> Residual:
    table = bp_table(_table_bound(p["N"]))
    return Residual.first_failure([
        exp_qf_2x(table, p["N"], "Z"),
        exp_qf_2x(table, p["N"], "x"),
    ])


def _table_bound(N: int) -> int:
    n = 1
    while 2 ** (n + 1) <= N:
        n += 1
    return n


def run_ipo_bp(p: dict) -> Residual:
    N = p["N"]
    table = bp_table(_table_bound(N))
    bad = table.with_entry("v1", table.p(1) + Poly.v(1, F2, 3))
    F = build_bp_fgl(N)
    return Residual.first_failure([
        verify_ipo(F, table, N),
        _must_fail(verify_ipo(F, bad, N), "perturbed Qbar(v1)"),
    ])


def run_ipo_ku(p: dict) -> Residual:
    N = p["N"]
    return Residual.first_failure([
        verify_ipo_ku(N),
        _must_fail(verify_ipo_ku(N, ku_table(Poly.zero(F2))), "Qbar(u) = [u, 0]"),
    ])


def run_qf_2_typical(p: dict) -> Residual:
    N, prime = p["N"], p["p"]
    table = bp_table(_table_bound(N))
    F = build_bp_fgl(N)
    return Residual.first_failure([
        verify_qf_2_typical(prime, table, N, F=F),
        _must_fail(verify_qf_2_typical(prime, table, N, terms=1, F=F), "single term"),
        _must_fail(corrupted_law_typicality(prime, N, "a"), "Qbar(a_11) without first component"),
        _must_fail(corrupted_law_typicality(prime, N, "b"), "Qbar(a_13), Qbar(a_31) without second component"),
    ])


def corrupted_law_typicality(prime: int, N: int, mode: str) -> Residual:
    """The typicality sum after corrupting images of law coefficients:
    mode "a" drops the first component of Qbar(a_11), mode "b" drops the
    second components of Qbar(a_13) and Qbar(a_31)."""
    F = build_bp_fgl(N)
    table = bp_table(_table_bound(N))
    ring = Ring(2, prime)
    qb = qbar_law(F, table, ring)
    ctx = table.ctx.with_cyclo(prime).with_series(N, 1)
    if mode == "a":
        c = qb[(1, 1)]
        qb[(1, 1)] = TElem(c.ctx, c.a * 0, c.b)
    else:
        for key in ((1, 3), (3, 1)):
            c = qb[key]
            qb[key] = TElem(c.ctx, c.a, c.b * 0)
    x = ctx.x()
    w = Poly.var("w", ring)
    elems = [TElem(ctx, x.scale(w ** i), x * 0) for i in range(prime)]
    total = qf_sum(qb, elems)
    return t_compare(total, TElem(ctx, x * 0, x * 0), "corrupted typicality sum")


def run_pn_oracle(p: dict) -> Residual:
    checks = [pn_oracle(p["nmax"])]
    for n, text in PUBLISHED_PN.items():
        got = p_n_closed(n)
        want = parse_poly(text, F2)
        if got != want:
            checks.append(Residual(False, f"p_{n} = {got}, expected {text}"))
    return Residual.first_failure(checks)


def run_un_forms(p: dict) -> Residual:
    return un_forms(p["nmax"])


def run_pwk(p: dict) -> Residual:
    return verify_pwk(p["kmax"], p["N"])


def run_ideal_j_n2(p: dict) -> Residual:
    res = ideal_j_report(2, p["kmax"])
    checks = [r if r.ok else Residual(False, f"{label}: {r.witness}") for label, r in res.checks]
    if res.generators.get(4) != parse_poly(J_N2_X4, F2):
        checks.append(Residual(False, f"x_4 = {res.generators.get(4)}"))
    one = construct_J(1, p["kmax"])
    for k, g in one.generators.items():
        if g != Poly.v(k, F2):
            checks.append(Residual(False, f"n=1: x_{k} = {g}"))
    return Residual.first_failure(checks)


def run_bpn2_obstruction(p: dict) -> Residual:
    return bpn2_obstruction()


def run_homogeneity(p: dict) -> Residual:
    """Every series built from the formulas is homogeneous of the expected
    degree (x has degree -2)."""
    N = p["N"]
    F = build_bp_fgl(N)
    M = build_mult_fgl(N)
    checks = [
        check_homogeneous(F.law, -2, "BP law"),
        check_homogeneous(F.log, -2, "BP log"),
        check_homogeneous(F.exp, -2, "BP exp"),
        check_homogeneous(F.log_prime, 0, "BP log'"),
        check_homogeneous(n_series(F, 2), -2, "BP [2](x)"),
        check_homogeneous(M.law, -2, "kU law"),
        check_homogeneous(M.log, -2, "kU log"),
        check_homogeneous(z_series(N), 0, "z"),
    ]
    for m, c in enumerate(w_series(F), start=1):
        if c and c.grades() != {2 * (m - 1)}:
            checks.append(Residual(False, f"[W_{m}] grades {sorted(c.grades())}"))
    ctx = bp_context(N, 1)
    checks.append(check_degree_invariant(z_elem(ctx, TruncSeries.const(1, N, F2) + z_series(N))))
    for n in range(0, 6):
        want = Poly.v(n + 1, F2).degree()
        if p_n_closed(n).grades() != {want}:
            checks.append(Residual(False, f"p_{n} not of degree {want}"))
        if n and u_n(n).grades() != {want}:
            checks.append(Residual(False, f"u_{n} not of degree {want}"))
    for k, g in construct_J(2, 6).generators.items():
        if not g.is_homogeneous():
            checks.append(Residual(False, f"x_{k} not homogeneous"))
    return Residual.first_failure(checks)


REGISTRY: list[CheckSpec] = [
    CheckSpec("bp-defining-relation",
              "[2]_F(x) = exp_F(2x) +_F sum^F_{k>0} v_k x^(2^k) over BP",
              {"N": 34}, {"N": 4}, run_bp_defining_relation),
    CheckSpec("log-agreement",
              "log_F(x) = sum_I v_I x^(2^|I|)/2^len(I) equals the recursion 2 m_n = sum m_i v_{n-i}^(2^i)",
              {"N": 66}, {"N": 2}, run_log_agreement),
    CheckSpec("invdif",
              "x +_F eps = x + (1 + z) eps mod (2, eps^2), z = sum v1^(2^k) x^(2^k)",
              {"N": 66}, {"N": 4}, run_invdif),
    CheckSpec("exp-f-mod4",
              "exp_F(2x) = 2z/v1 mod 4",
              {"N": 34}, {"N": 4}, run_exp_f_mod4),
    CheckSpec("zxqf",
              "Z(x) = [x,0] +_QF [0, z/v1]; [0,x] +_QF [0,y] = [0,x+y]; [x,y] = [x,0] +_QF [0, y/(1+z)^2]",
              {"N": 16}, {"N": 4}, run_zxqf),
    CheckSpec("exp-qf",
              "exp_QF(2X) = sum_k [0, v1^(2^(k+1)-1)] X^(2^k); at X = Z(x) this is [0, z/v1 + x]",
              {"N": 16}, {"N": 4}, run_exp_qf),
    CheckSpec("ipo-bp",
              "Z(x) +_QF Z(y) = Z(x +_F y) over BP with Qbar(v_n) = [v_n, p_n]",
              {"N": 16}, {"N": 4}, run_ipo_bp),
    CheckSpec("ipo-ku",
              "Z(x) +_QF Z(y) = Z(x + y + uxy) over kU with Qbar(u) = [u, u^3]",
              {"N": 16}, {"N": 4}, run_ipo_ku),
    CheckSpec("qf-2-typical-p3",
              "sum^QF_{i<p} [w^i x, 0] = 0 in T(F2[v][w]/Phi_p)[[x]], p = 3",
              {"N": 9, "p": 3}, {"N": 4, "p": 3}, run_qf_2_typical),
    CheckSpec("pn-oracle",
              "p_n = v1 v_n^2 + u_n equals the value extracted from [2]_QF(Z(x))",
              {"nmax": 5}, {"nmax": 1}, run_pn_oracle),
    CheckSpec("un-forms",
              "u_n recurrence = sum over subsets J; u_n = v_{n+1} mod v1^2",
              {"nmax": 6}, {"nmax": 1}, run_un_forms),
    CheckSpec("pwk",
              "P~(q(w_{k-1})) = q(w_k) and q(w_k) = v_k mod (2, v1, .., v_{k-1})",
              {"kmax": 4, "N": 33}, {"kmax": 1, "N": 3}, run_pwk),
    CheckSpec("ideal-j-n2",
              "J = (x_3, x_4, ..): x_k = v_k mod v1^2, P~(J) in J mod 2, I_2 + J = (v_k : k != 2)",
              {"kmax": 6}, {"kmax": 3}, run_ideal_j_n2),
    CheckSpec("bpn2-obstruction",
              "p_3 is not in (v_k : k >= 3)",
              {}, {}, run_bpn2_obstruction),
    CheckSpec("homogeneity",
              "grade(coefficient of x^i y^j) - 2(i+j) is constant on every constructed series",
              {"N": 16}, {"N": 4}, run_homogeneity),
]

_BY_ID = {spec.check_id: spec for spec in REGISTRY}


def check_ids() -> list[str]:
    return [spec.check_id for spec in REGISTRY]


def get_check(check_id: str) -> CheckSpec:
    try:
        return _BY_ID[check_id]
    except KeyError:
        raise UnknownCheck(check_id) from None


def resolve_params(spec: CheckSpec, trunc: int | None = None,
                   overrides: dict | None = None) -> dict:
    params = dict(spec.defaults)
    if trunc is not None and "N" in params:
        params["N"] = trunc
    for key, value in (overrides or {}).items():
        if key not in spec.defaults:
            raise ConfigError(f"{spec.check_id}: unknown parameter {key!r}")
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{spec.check_id}: {key} must be an integer")
        params[key] = value
    for key, low in spec.minimums.items():
        if params[key] < low:
            raise ConfigError(f"{spec.check_id}: {key}={params[key]} below minimum {low}")
    if spec.check_id == "pwk" and params["N"] <= 2 ** params["kmax"]:
        raise ConfigError(f"pwk: N must exceed 2^kmax = {2 ** params['kmax']}")
    if spec.check_id == "qf-2-typical-p3" and params["p"] % 2 == 0:
        raise ConfigError("qf-2-typical-p3: p must be an odd prime")
    return params


def run_check(check_id: str, params: dict | None = None) -> CheckResult:
    spec = get_check(check_id)
    params = resolve_params(spec, overrides=params) if params is not None else dict(spec.defaults)
    start = time.perf_counter()
    try:
        r = spec.runner(params)
        status = "pass" if r.ok else "fail"
        residual = r.witness
    except Exception as exc:  # a crash is a failed check with its message as witness
        status = "fail"
        residual = f"{type(exc).__name__}: {exc}"
    return CheckResult(check_id, spec.statement, params, status, residual,
                       time.perf_counter() - start)


def _run_packed(args):
    return run_check(*args)


def run_checks(selection: list[str], params: dict[str, dict], jobs: int = 1) -> list[CheckResult]:
    """Run checks, returning results in the order of ``selection``."""
    for cid in selection:
        get_check(cid)
    work = [(cid, params.get(cid, dict(get_check(cid).defaults))) for cid in selection]
    if jobs <= 1 or len(work) <= 1:
        return [run_check(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_packed, work))
