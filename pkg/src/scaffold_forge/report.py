"""Job files and reports.

A job is one JSON object describing one command. Every command produces a
plain dict (numbers as ints or strings) so the JSON and text renderings carry
the same values.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra.laurent import LaurentFrac, laurent_series
from .algebra.prational import fmt_rational
from .pgroup import PFilteredGroup, frattini, load_group, rank, sigma_set
from .ramification import check_ramfilt, check_ramfiltcor, format_row, lower_from_upper
from .saltman import GenericTower, build_generic, tower_to_json, verify_level
from .scaffold import (
    HypothesesFailed,
    NotIntegral,
    ScaffoldInput,
    associated_order,
    build_report,
    search_breaks,
)

COMMANDS = ("group", "generic", "tower", "scaffold", "search")

EXIT_PASS = 0
EXIT_HYPOTHESES = 2
EXIT_INPUT = 3


class JobError(ValueError):
    """Malformed job file."""


def load_job(source: str | Path | dict) -> dict:
    if isinstance(source, dict):
        job = dict(source)
    else:
        path = Path(source)
        if not path.exists():
            raise JobError(f"job file {path} does not exist")
        try:
            job = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise JobError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(job, dict):
        raise JobError("a job must be a JSON object")
    if "group" not in job:
        raise JobError("job has no 'group' entry")
    field_p = job.get("field", {}).get("p")
    group_p = job["group"].get("p") if isinstance(job["group"], dict) else None
    if field_p is not None and group_p is not None and int(field_p) != int(group_p):
        raise JobError(f"field characteristic {field_p} differs from group prime {group_p}")
    return job


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) and math.isinf(x):
        return fmt_rational(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else fmt_rational(x)
    if isinstance(x, LaurentFrac):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    return str(x)


def _envelope(command: str, status: str, result: dict, warnings=(), error: str | None = None) -> dict:
    code = {"pass": EXIT_PASS, "hypotheses_fail": EXIT_HYPOTHESES, "input_error": EXIT_INPUT}[status]
    out = {
        "command": command,
        "status": status,
        "exit_code": code,
        "result": _jsonable(result),
        "warnings": list(warnings),
    }
    if error:
        out["error"] = error
    return out


def error_report(command: str, message: str) -> dict:
    return _envelope(command, "input_error", {}, error=message)


# --- pipeline pieces ---------------------------------------------------------------

def job_group(job: dict) -> PFilteredGroup:
    return load_group(job["group"])


def job_tower(job: dict, G: PFilteredGroup | None = None) -> GenericTower:
    G = G or job_group(job)
    params = job.get("tower", {})
    overrides = {int(k): v for k, v in params.get("D", {}).items()}
    return build_generic(G, ceiling=params.get("ceiling"), d_overrides=overrides)


def job_scaffold_input(job: dict, tower: GenericTower) -> ScaffoldInput:
    if "a" not in job or "omegas" not in job:
        raise JobError("scaffold job needs 'a' and 'omegas'")
    return ScaffoldInput.parse(tower, job["a"], job["omegas"])


def series_text(x: LaurentFrac, terms: int) -> str:
    v = x.valuation
    coeffs = laurent_series(x, v + terms - 1)
    parts = []
    for k, c in enumerate(coeffs):
        if c:
            e = v + k
            mono = "1" if e == 0 else f"pi^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    parts.append(f"O(pi^{v + terms})")
    return " + ".join(parts)


# --- commands ----------------------------------------------------------------------

def cmd_group(job: dict) -> dict:
    G = job_group(job)
    sig = sigma_set(G)
    phi = frattini(G)
    result = {
        "label": G.label,
        "p": G.p,
        "n": G.n,
        "order": G.order,
        "series_orders": [len(s) for s in G.series],
        "series": [[G.names[g] for g in sorted(s)] for s in G.series],
        "sigma": sorted(sig),
        "rank_profile": [rank(G, i) for i in range(G.n + 1)],
        "rank": rank(G),
        "frattini_order": len(phi),
        "frattini": [G.names[g] for g in sorted(phi)],
        "abelian": G.is_abelian(),
    }
    return _envelope("group", "pass", result)


def cmd_generic(job: dict) -> dict:
    tower = job_tower(job)
    data = tower_to_json(tower)
    checks = {}
    for lev in tower.levels[1:]:
        section = {q: e for q, e in enumerate(lev.section)}
        checks[str(lev.level)] = verify_level(tower, lev.level, section, lev.cochain, lev.d)
    data["verify"] = checks
    status = "pass" if all(all(v.values()) for v in checks.values()) else "hypotheses_fail"
    return _envelope("generic", status, data)


def _tower_u(job: dict, p: int) -> tuple[list[int], list[str]]:
    if "u" in job:
        return [int(x) for x in job["u"]], []
    if "a_values" in job:
        vals = [LaurentFrac.parse(a, p) for a in job["a_values"]]
        return [-v.valuation for v in vals], [str(v) for v in vals]
    raise JobError("tower job needs 'u' or 'a_values'")


def cmd_tower(job: dict) -> dict:
    tower = job_tower(job)
    u, a_text = _tower_u(job, tower.p)
    full = check_ramfilt(tower, u)
    cor = check_ramfiltcor(tower, u)
    result = {
        "u": u,
        "b": full["breaks"]["b"],
        "a_values": a_text,
        "M": full["M"],
        "degrees": {str(k): v for k, v in sorted(tower.degrees.items())},
        "ramfilt": {"pass": full["pass"], "per_level": [format_row(r) for r in full["per_level"]]},
        "ramfiltcor": {"pass": cor["pass"], "per_level": [format_row(r) for r in cor["per_level"]]},
        "conclusions": full.get("conclusions", []),
    }
    status = "pass" if full["pass"] else "hypotheses_fail"
    return _envelope("tower", status, result, full["warnings"])


def scaffold_result(inp: ScaffoldInput, generators=None, series_precision: int | None = None) -> tuple[dict, list[str], str | None]:
    rep = build_report(inp, generators)
    G = inp.tower.group
    result: dict[str, Any] = {
        "u": list(inp.u),
        "b": list(rep.breaks.b),
        "a": str(inp.a),
        "omegas": [str(w) for w in inp.omegas],
        "t": {f"{i},{j}": str(t) for (i, j), t in sorted(rep.t.items())},
        "mu": {f"{i},{j}": str(m) for (i, j), m in sorted(rep.mu.items())},
        "c": rep.precision_c if rep.precision_c is not None else "fail",
        "cprime": rep.precision_cprime if rep.precision_cprime is not None else "fail",
        "gaps": [format_row(r) for r in rep.gap_rows],
        "gms_free": rep.gms_free,
        "hopf": rep.hopf,
        "certificate": rep.certificate,
        "generators": [G.names[g] for g in rep.generators],
        "thetas": [th.to_json() for th in rep.thetas],
    }
    if series_precision:
        result["mu_series"] = {f"{i},{j}": series_text(m, series_precision) for (i, j), m in sorted(rep.mu.items())}
    if rep.M is not None:
        ao = associated_order(inp, rep.thetas)
        result["M"] = ao["M"]
        result["A0"] = [{"level": i, "element": el.to_json()} for i, el in ao["generators"]]
    else:
        result["M"] = None
        result["not_integral"] = rep.not_integral_level
    return result, rep.warnings, rep.failure


def cmd_scaffold(job: dict, series_precision: int | None = None) -> dict:
    tower = job_tower(job)
    inp = job_scaffold_input(job, tower)
    result, warnings, failure = scaffold_result(inp, job.get("generators"), series_precision)
    if failure:
        warnings = warnings + [failure]
    status = "hypotheses_fail" if failure else "pass"
    return _envelope("scaffold", status, result, warnings)


def cmd_search(job: dict) -> dict:
    tower = job_tower(job)
    mode = job.get("mode", "scaffold")
    c_min = int(job.get("c_min", 1))
    u = search_breaks(tower, mode, c_min, job.get("u1"))
    if mode == "hopf":
        c_min = max(c_min, tower.p ** tower.n - 1)
    inp = ScaffoldInput.from_upper(tower, u)
    result = {
        "mode": mode,
        "c_min": c_min,
        "u": list(u),
        "b": list(lower_from_upper(u, tower.p).b),
        "a": str(inp.a),
        "omegas": [str(w) for w in inp.omegas],
        "omega_exponents": [w.valuation for w in inp.omegas],
    }
    return _envelope("search", "pass", result)


RUNNERS = {
    "group": cmd_group,
    "generic": cmd_generic,
    "tower": cmd_tower,
    "scaffold": cmd_scaffold,
    "search": cmd_search,
}


# --- text rendering --------------------------------------------------------------

def _text_lines(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and not _is_flat_list(item):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines


def _is_flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_scalar(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    return str(v)


def render_text(report: dict) -> str:
    head = [f"command: {report['command']}", f"status: {report['status']} (exit {report['exit_code']})"]
    if report.get("error"):
        head.append(f"error: {report['error']}")
    for w in report.get("warnings", []):
        head.append(f"warning: {w}")
    return "\n".join(head + _text_lines(report["result"])) + "\n"


def render(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"unknown format {fmt!r}")


__all__ = [
    "COMMANDS", "EXIT_HYPOTHESES", "EXIT_INPUT", "EXIT_PASS", "HypothesesFailed", "JobError",
    "NotIntegral", "RUNNERS", "cmd_generic", "cmd_group", "cmd_scaffold", "cmd_search", "cmd_tower",
    "error_report", "job_scaffold_input", "job_tower", "load_job", "render", "scaffold_result",
]
