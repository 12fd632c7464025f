"""Golden files: one per check-id, holding canonical polynomial text.

Each value line reads ``name = value  # source`` where the source is
``published`` (fixed expected text), ``identity`` (holds by construction)
or ``computed: <oracle>`` (regenerated through an independent route that
must agree with the primary one).  Regeneration refuses to write when the
two routes disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .checks import J_N2_X4, PUBLISHED_PN, check_ids, get_check, run_check
from .fgl import build_bp_fgl, quadric_images
from .ideals import construct_J, nf, vk_ideal
from .poly import F2, Poly, Variable, format_poly, parse_poly
from .powerop import bp_table, ku_table, p_n_closed, p_n_extracted, u_n, u_n_subsets
from .series import Residual

DEFAULT_DIR = Path("golden")


class GoldenError(RuntimeError):
    pass


@dataclass(frozen=True)
class GoldenValue:
    name: str
    value: str
    source: str


@dataclass(frozen=True)
class GoldenFile:
    check_id: str
    values: tuple[GoldenValue, ...]

    def text(self) -> str:
        lines = [f"# golden values for check {self.check_id}",
                 f"# regenerate with: bpfgl golden regen {self.check_id}"]
        for v in self.values:
            lines.append(f"{v.name} = {v.value}  # {v.source}")
        return "\n".join(lines) + "\n"


def _agree(name: str, primary: Poly, oracle: Poly) -> Poly:
    if primary != oracle:
        raise GoldenError(f"{name}: primary {format_poly(primary)} vs oracle {format_poly(oracle)}")
    return primary


def _published(name: str, primary: Poly, text: str) -> GoldenValue:
    _agree(name, primary, parse_poly(text, primary.ring))
    return GoldenValue(name, format_poly(primary), "published")


# value builders, one per check with golden values

def _pn_values() -> list[GoldenValue]:
    nmax = get_check("pn-oracle").defaults["nmax"]
    extracted = p_n_extracted(nmax)
    out = [_published("p_0", p_n_closed(0), PUBLISHED_PN[0])]
    for n in range(1, nmax + 1):
        p = _agree(f"p_{n}", p_n_closed(n), extracted[n])
        if n in PUBLISHED_PN:
            out.append(_published(f"p_{n}", p, PUBLISHED_PN[n]))
        else:
            out.append(GoldenValue(f"p_{n}", format_poly(p),
                                   f"computed: p_n_extracted({nmax}) at N={2 ** (nmax + 1) + 1}"))
    return out


def _un_values() -> list[GoldenValue]:
    nmax = get_check("un-forms").defaults["nmax"]
    return [GoldenValue(f"u_{n}", format_poly(_agree(f"u_{n}", u_n(n), u_n_subsets(n))),
                        "computed: u_n_subsets (sum over subsets)")
            for n in range(1, nmax + 1)]


def _ideal_j_values() -> list[GoldenValue]:
    kmax = get_check("ideal-j-n2").defaults["kmax"]
    primary = construct_J(2, kmax).generators
    oracle = construct_J(2, kmax, bp_table(kmax, source="extracted")).generators
    # x_4 independently: v3 -> 0 in p_3
    x4 = p_n_closed(3).substitute({"v3": Poly.zero(F2)})
    out = []
    for k in sorted(primary):
        g = _agree(f"x_{k}", primary[k], oracle[k])
        if k == 4:
            _agree("x_4", g, x4)
            out.append(GoldenValue("x_4", format_poly(g),
                                   "computed: substitute v3 -> 0 in p_3"))
            _agree("x_4", g, parse_poly(J_N2_X4, F2))
        elif k == 3:
            out.append(GoldenValue("x_3", format_poly(g), "identity"))
        else:
            out.append(GoldenValue(f"x_{k}", format_poly(g),
                                   "computed: construct_J with the extracted p_n table"))
    return out


def _bpn2_values() -> list[GoldenValue]:
    r = nf(p_n_closed(3), vk_ideal(range(3, 5)))
    sub = p_n_closed(3).substitute({"v3": Poly.zero(F2), "v4": Poly.zero(F2)})
    return [GoldenValue("nf(p_3, (v3, v4, ...))", format_poly(_agree("remainder", r, sub)),
                        "computed: substitute v3, v4 -> 0 in p_3")]


def _pwk_values() -> list[GoldenValue]:
    N = get_check("pwk").defaults["N"]
    kmax = get_check("pwk").defaults["kmax"]
    primary = quadric_images(N)
    oracle = quadric_images(N, build_bp_fgl(N, check_relation=False))
    out = []
    for k in range(kmax + 1):
        a = primary[k].reduce_mod(1)
        b = oracle[k].reduce_mod(1)
        g = _agree(f"q(w_{k})", a, b)
        out.append(GoldenValue(f"q(w_{k}) mod 2", format_poly(g),
                               "computed: [2](x) log'(x) through the two-variable law"))
    return out


def _ipo_ku_values() -> list[GoldenValue]:
    img = ku_table().image(Variable.parse("u").slot)
    return [_published("P~(u)", img.b, "u^3")]


BUILDERS = {
    "pn-oracle": _pn_values,
    "un-forms": _un_values,
    "ideal-j-n2": _ideal_j_values,
    "bpn2-obstruction": _bpn2_values,
    "pwk": _pwk_values,
    "ipo-ku": _ipo_ku_values,
}


def golden_path(check_id: str, directory: Path = DEFAULT_DIR) -> Path:
    return Path(directory) / f"{check_id}.txt"


def build_golden(check_id: str) -> GoldenFile:
    """The golden file for a check: its status line plus any values."""
    get_check(check_id)
    result = run_check(check_id)
    if not result.passed:
        raise GoldenError(f"{check_id} fails: {result.residual}")
    values = [GoldenValue("status", "pass", "identity")]
    if check_id in BUILDERS:
        values += BUILDERS[check_id]()
    return GoldenFile(check_id, tuple(values))


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def regen_golden(check_id: str, directory: Path = DEFAULT_DIR) -> GoldenFile:
    gf = build_golden(check_id)
    _write(golden_path(check_id, directory), gf.text())
    return gf


def init_golden(directory: Path = DEFAULT_DIR) -> list[Path]:
    """Write header-only skeleton files for check-ids that have none."""
    made = []
    for cid in check_ids():
        path = golden_path(cid, directory)
        if not path.exists():
            _write(path, GoldenFile(cid, ()).text())
            made.append(path)
    return made


def check_golden(check_id: str, directory: Path = DEFAULT_DIR) -> Residual:
    """The stored file matches a fresh build line for line."""
    path = golden_path(check_id, directory)
    if not path.exists():
        return Residual(False, f"missing {path}")
    try:
        fresh = build_golden(check_id).text().splitlines()
    except GoldenError as exc:
        return Residual(False, str(exc))
    stored = path.read_text(encoding="utf-8").splitlines()
    for i, (a, b) in enumerate(zip(stored, fresh), start=1):
        if a != b:
            return Residual(False, f"{path.name} line {i}: stored {a!r}, computed {b!r}")
    if len(stored) != len(fresh):
        return Residual(False, f"{path.name}: {len(stored)} lines stored, {len(fresh)} computed")
    return Residual(True)


def parse_golden(text: str) -> list[GoldenValue]:
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        body, _, source = line.partition("  # ")
        name, sep, value = body.partition(" = ")
        if not sep or not source:
            raise GoldenError(f"malformed golden line {line!r}")
        out.append(GoldenValue(name, value, source))
    return out
