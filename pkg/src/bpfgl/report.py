"""Rendering of check results and realisability reports.

Every renderer works from the JSON form, so text and LaTeX output carry
exactly the same information.  Output is deterministic: keys and rows keep
their insertion order and nothing time-dependent is emitted unless asked.
"""

from __future__ import annotations

import json
from typing import Iterable

FORMATS = ("text", "json", "latex")


def dump_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _latex_escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in "&%$#_{}":
            out.append("\\" + ch)
        elif ch == "~":
            out.append(r"\textasciitilde{}")
        elif ch == "^":
            out.append(r"\textasciicircum{}")
        elif ch == "\\":
            out.append(r"\textbackslash{}")
        else:
            out.append(ch)
    return "".join(out)


def _latex_table(header: list[str], rows: list[list[str]]) -> str:
    cols = "l" * len(header)
    lines = [f"\\begin{{tabular}}{{{cols}}}", "\\hline",
             " & ".join(_latex_escape(h) for h in header) + r" \\", "\\hline"]
    for row in rows:
        lines.append(" & ".join(f"\\texttt{{{_latex_escape(c)}}}" for c in row) + r" \\")
    lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def _params(truncation: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in truncation.items()) or "-"


# check results

def results_json(results, timings: bool = False) -> dict:
    items = [r.to_json(timings) for r in results]
    passed = sum(1 for r in results if r.passed)
    return {"results": items, "summary": {"passed": passed, "failed": len(items) - passed}}


def render_results(results, fmt: str = "text", timings: bool = False) -> str:
    data = results_json(results, timings)
    if fmt == "json":
        return dump_json(data)
    rows = []
    for item in data["results"]:
        row = [item["status"], item["check_id"], _params(item["truncation"])]
        if timings:
            row.append(f"{item['wall_time']:.2f}s")
        row.append(item["residual"] or "")
        rows.append(row)
    s = data["summary"]
    if fmt == "latex":
        header = ["status", "check", "parameters"] + (["time"] if timings else []) + ["residual"]
        return _latex_table(header, rows) + f"% passed {s['passed']}, failed {s['failed']}\n"
    width = max(len(r[1]) for r in rows) if rows else 0
    lines = []
    for row in rows:
        text = f"{row[0]:<5} {row[1]:<{width}}  {row[2]}"
        rest = [c for c in row[3:] if c]
        if rest:
            text += "  " + "  ".join(rest)
        lines.append(text)
    lines.append(f"{s['passed']} passed, {s['failed']} failed")
    return "\n".join(lines) + "\n"


# realisability

def render_realisability(report, fmt: str = "text") -> str:
    data = report.to_json()
    if fmt == "json":
        return dump_json(data)
    rows = [[c["hypothesis"], c["status"], c["statement"], c["witness"] or ""]
            for c in data["checks"]]
    if fmt == "latex":
        head = (f"% {data['name']}: {data['verdict']}\n"
                f"% generators: {', '.join(data['generators']) or '-'}\n")
        return head + _latex_table(["hypothesis", "status", "statement", "witness"], rows)
    lines = [f"ring: {data['name']}",
             f"generators: {', '.join(data['generators']) or '-'}",
             f"inverted: {', '.join(data['inverted']) or '-'}"]
    for hyp, status, statement, witness in rows:
        line = f"  {status:<7} [{hyp}] {statement}"
        if witness:
            line += f"  ({witness})"
        lines.append(line)
    lines.append(f"verdict: {data['verdict']}")
    return "\n".join(lines) + "\n"


# simple named-value listings (pn, un, ideal-j, wseries)

def render_listing(title: str, rows: Iterable[dict], fmt: str = "text",
                   extra: dict | None = None) -> str:
    """``rows`` are dicts with at least 'name' and 'value' keys."""
    rows = list(rows)
    if fmt == "json":
        data = {"title": title, "rows": rows}
        if extra:
            data.update(extra)
        return dump_json(data)
    keys = [k for k in rows[0] if k not in ("name", "value")] if rows else []
    if fmt == "latex":
        body = [[r["name"], r["value"]] + [_cell(r[k]) for k in keys] for r in rows]
        out = f"% {title}\n" + _latex_table(["name", "value"] + keys, body)
        for k, v in (extra or {}).items():
            out += f"% {k}: {_cell(v)}\n"
        return out
    lines = []
    for r in rows:
        line = f"{r['name']} = {r['value']}"
        flags = [f"{k}={_cell(r[k])}" for k in keys]
        if flags:
            line += "  [" + ", ".join(flags) + "]"
        lines.append(line)
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {_cell(v)}")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    return str(v)
