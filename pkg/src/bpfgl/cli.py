"""Command-line interface: ``bpfgl <command> [options]``.

Settings come from, in increasing precedence: built-in defaults, a JSON
config file (``--config`` or BPFGL_CONFIG), BPFGL_* environment variables,
and command-line flags.  Exit codes: 0 all checks pass, 1 some check
fails, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import golden as golden_mod
from .checks import (
    ConfigError,
    UnknownCheck,
    check_ids,
    get_check,
    resolve_params,
    run_checks,
)
from .fgl import build_bp_fgl, w_series
from .ideals import ideal_j_report, load_ideal_spec, realisability_report
from .poly import ParseError, format_poly
from .powerop import p_n_closed, p_n_extracted, u_n, u_n_subsets
from .props import run_properties
from .report import FORMATS, dump_json, render_listing, render_realisability, render_results

ENV_PREFIX = "BPFGL_"
DEFAULTS = {"format": "text", "trunc": None, "jobs": 1, "seed": 0, "timings": False}
_INT_KEYS = ("trunc", "jobs", "seed")


class UsageError(ValueError):
    pass


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS lets the same flags appear before or after the command
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    g.add_argument("--trunc", "--N", dest="trunc", type=int, default=argparse.SUPPRESS,
                   metavar="N", help="truncation order for series computations")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS, metavar="K")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--config", default=argparse.SUPPRESS, metavar="FILE",
                   help="JSON file with the same keys as the flags, plus 'checks'")
    g.add_argument("--timings", action="store_true", default=argparse.SUPPRESS,
                   help="include wall times in reports")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="bpfgl", parents=[common],
        description="Formal group laws, power operations and ideal checks over BP.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pn", parents=[common], help="print p_0 .. p_nmax")
    p.add_argument("nmax", type=int)
    p.add_argument("--oracle", action="store_true",
                   help="also extract p_n from [2]_QF(Z(x)) and mark agreement")

    p = sub.add_parser("un", parents=[common], help="print u_1 .. u_nmax")
    p.add_argument("nmax", type=int)

    p = sub.add_parser("ideal-j", parents=[common], help="construct the ideal J")
    p.add_argument("n", type=int)
    p.add_argument("kmax", type=int)

    p = sub.add_parser("wseries", parents=[common],
                       help="coefficients [W_m] of [2](x) log'(x)")
    p.add_argument("--mod2", action="store_true", help="reduce coefficients mod 2")

    p = sub.add_parser("verify", parents=[common], help="run registered checks")
    p.add_argument("checks", nargs="*", metavar="CHECK", help="check-ids or 'all'")
    p.add_argument("--set", action="append", default=[], metavar="ID.KEY=VALUE",
                   help="override one check parameter")
    p.add_argument("--list", action="store_true", help="list check-ids and exit")

    p = sub.add_parser("realisability", parents=[common],
                       help="check realisability hypotheses for a quotient ring")
    p.add_argument("spec", help="JSON file {name, generators, inverted}")

    p = sub.add_parser("props", parents=[common], help="seeded property suites")
    p.add_argument("--count", type=int, default=200)

    p = sub.add_parser("golden", parents=[common], help="golden files")
    p.add_argument("action", choices=("init", "regen", "check"))
    p.add_argument("checks", nargs="*", metavar="CHECK")
    p.add_argument("--dir", default=str(golden_mod.DEFAULT_DIR))
    return parser


def _coerce_setting(key: str, value, source: str):
    if key in _INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise UsageError(f"{source}: {key} must be an integer, got {value!r}") from None
    if key == "format":
        if value not in FORMATS:
            raise UsageError(f"{source}: format must be one of {', '.join(FORMATS)}")
        return value
    if key == "timings":
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("1", "true", "yes", "on")
    return value


def resolve_settings(ns: argparse.Namespace, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    settings = dict(DEFAULTS)
    settings["checks"] = {}
    config_path = getattr(ns, "config", None) or environ.get(ENV_PREFIX + "CONFIG")
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config {config_path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{config_path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise UsageError(f"{config_path}: top level must be an object")
        for key, value in data.items():
            if key == "checks":
                if not isinstance(value, dict):
                    raise UsageError(f"{config_path}: 'checks' must map check-ids to objects")
                settings["checks"] = value
            elif key in DEFAULTS:
                settings[key] = _coerce_setting(key, value, config_path)
            else:
                raise UsageError(f"{config_path}: unknown key {key!r}")
    for key in DEFAULTS:
        env = environ.get(ENV_PREFIX + key.upper())
        if env is not None and env != "":
            settings[key] = _coerce_setting(key, env, ENV_PREFIX + key.upper())
    for key in DEFAULTS:
        if hasattr(ns, key):
            settings[key] = getattr(ns, key)
    if settings["jobs"] < 1:
        raise UsageError("jobs must be at least 1")
    return settings


# commands

def cmd_pn(ns, settings) -> tuple[str, int]:
    nmax = ns.nmax
    if nmax < 0:
        raise UsageError("nmax must be at least 0")
    rows = [{"name": f"p_{n}", "value": format_poly(p_n_closed(n))} for n in range(nmax + 1)]
    status = 0
    extra = None
    if ns.oracle:
        need = 2 ** (nmax + 1) + 1
        N = settings["trunc"] or need
        if N < need:
            raise UsageError(f"truncation {N} too small for p_{nmax}: need at least {need}")
        extracted = p_n_extracted(nmax, N) if nmax >= 1 else {}
        for n, row in enumerate(rows):
            # p_0 = v1 is the value on the degree-2 generator, not an extraction
            agrees = n == 0 or extracted[n] == p_n_closed(n)
            row["oracle_agrees"] = agrees
            status |= not agrees
        extra = {"oracle_truncation": N}
    return render_listing("p_n", rows, settings["format"], extra), status


def cmd_un(ns, settings) -> tuple[str, int]:
    if ns.nmax < 1:
        raise UsageError("nmax must be at least 1")
    rows = []
    status = 0
    for n in range(1, ns.nmax + 1):
        u = u_n(n)
        agrees = u == u_n_subsets(n)
        status |= not agrees
        rows.append({"name": f"u_{n}", "value": format_poly(u), "subset_sum_agrees": agrees})
    return render_listing("u_n", rows, settings["format"]), status


def cmd_ideal_j(ns, settings) -> tuple[str, int]:
    if ns.n < 1:
        raise UsageError("n must be at least 1")
    if ns.kmax < ns.n + 1:
        raise UsageError("kmax must be at least n + 1")
    res = ideal_j_report(ns.n, ns.kmax)
    rows = [{"name": f"x_{k}", "value": format_poly(g)} for k, g in sorted(res.generators.items())]
    checks = {label: "pass" if r.ok else f"fail: {r.witness}" for label, r in res.checks}
    return render_listing(f"J(n={ns.n})", rows, settings["format"], checks), int(not res.ok)


def cmd_wseries(ns, settings) -> tuple[str, int]:
    N = settings["trunc"] or 17
    if N < 3:
        raise UsageError("wseries needs truncation at least 3")
    F = build_bp_fgl(N, two_variable=False, check_relation=False)
    rows = []
    for m, c in enumerate(w_series(F), start=1):
        if ns.mod2:
            c = c.reduce_mod(1)
        k = m.bit_length() - 1 if m & (m - 1) == 0 else None
        rows.append({"name": f"[W_{m}]", "value": format_poly(c), "m": m, "k": k})
    return render_listing("[2](x) log'(x)", rows, settings["format"]), 0


def _parse_sets(items: list[str]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for item in items:
        target, sep, value = item.partition("=")
        cid, dot, key = target.partition(".")
        if not sep or not dot:
            raise UsageError(f"--set expects ID.KEY=VALUE, got {item!r}")
        try:
            out.setdefault(cid, {})[key] = int(value)
        except ValueError:
            raise UsageError(f"--set {item!r}: value must be an integer") from None
    return out


def cmd_verify(ns, settings) -> tuple[str, int]:
    if ns.list:
        rows = [{"name": cid, "value": get_check(cid).statement} for cid in check_ids()]
        return render_listing("checks", rows, settings["format"]), 0
    selection = ns.checks or ["all"]
    if "all" in selection:
        if selection != ["all"]:
            raise UsageError("'all' cannot be combined with other check-ids")
        selection = check_ids()
    overrides = {cid: dict(v) for cid, v in settings["checks"].items()}
    for cid, values in _parse_sets(ns.set).items():
        overrides.setdefault(cid, {}).update(values)
    for cid in overrides:
        get_check(cid)
    params = {}
    for cid in selection:
        params[cid] = resolve_params(get_check(cid), settings["trunc"], overrides.get(cid))
    results = run_checks(selection, params, settings["jobs"])
    out = render_results(results, settings["format"], settings["timings"])
    return out, int(not all(r.passed for r in results))


def cmd_realisability(ns, settings) -> tuple[str, int]:
    spec = load_ideal_spec(ns.spec)
    report = realisability_report(spec)
    return render_realisability(report, settings["format"]), int(not report.ok)


def cmd_props(ns, settings) -> tuple[str, int]:
    if ns.count < 1:
        raise UsageError("count must be at least 1")
    results = run_properties(settings["seed"], ns.count)
    fmt = settings["format"]
    if fmt == "json":
        out = dump_json({"seed": settings["seed"], "results": [r.to_json() for r in results]})
    else:
        rows = [{"name": r.name, "value": f"{r.failures} failures in {r.cases} cases",
                 "witness": r.witness} for r in results]
        out = render_listing(f"properties (seed {settings['seed']})", rows, fmt)
    return out, int(not all(r.ok for r in results))


def cmd_golden(ns, settings) -> tuple[str, int]:
    directory = Path(ns.dir)
    selection = ns.checks or check_ids()
    for cid in selection:
        get_check(cid)
    lines = []
    status = 0
    if ns.action == "init":
        made = golden_mod.init_golden(directory)
        lines = [f"created {p}" for p in made] or ["nothing to create"]
    elif ns.action == "regen":
        for cid in selection:
            try:
                golden_mod.regen_golden(cid, directory)
                lines.append(f"wrote {golden_mod.golden_path(cid, directory)}")
            except golden_mod.GoldenError as exc:
                lines.append(f"blocked {cid}: {exc}")
                status = 1
    else:
        for cid in selection:
            r = golden_mod.check_golden(cid, directory)
            lines.append(f"{'pass' if r.ok else 'fail':<5} {cid}" + ("" if r.ok else f"  {r.witness}"))
            status |= not r.ok
    return "\n".join(lines) + "\n", status


COMMANDS = {
    "pn": cmd_pn,
    "un": cmd_un,
    "ideal-j": cmd_ideal_j,
    "wseries": cmd_wseries,
    "verify": cmd_verify,
    "realisability": cmd_realisability,
    "props": cmd_props,
    "golden": cmd_golden,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = resolve_settings(ns)
        out, status = COMMANDS[ns.command](ns, settings)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnknownCheck as exc:
        print(f"error: unknown check-id {exc.args[0]!r}; known: {', '.join(check_ids())}",
              file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
