"""CPLEX LP-format export and a plain-text solution reader.

Solution files hold optional ``# objective <v>`` / ``# status <s>`` headers
followed by ``<name> <value>`` lines; absent variables read as zero.
"""

from __future__ import annotations

import math

import numpy as np

from ..model import BINARY, EQ, GE, INTEGER, LE, ModelSpec
from .base import FEASIBLE, INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, MilpSolution, SolverError

MAX_LINE = 200


def _num(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def _terms(ms: ModelSpec, terms) -> list[str]:
    out = []
    for j, c in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        out.append(f"{sign} {ms.variables[j].name}" if mag == 1 else f"{sign} {_num(mag)} {ms.variables[j].name}")
    return out


def _wrap(head: str, tokens: list[str]) -> list[str]:
    lines, cur = [], head
    for tok in tokens:
        if len(cur) + len(tok) + 1 > MAX_LINE:
            lines.append(cur)
            cur = "   "
        cur += " " + tok
    lines.append(cur)
    return lines


def export_lp(ms: ModelSpec) -> str:
    lines = ["\\ generated by mpcsp", "Minimize"]
    obj = _terms(ms, ms.objective)
    if ms.constant:
        obj.append(f"{'-' if ms.constant < 0 else '+'} {_num(abs(ms.constant))}")
    lines += _wrap(" obj:", obj or ["0 " + ms.variables[0].name] if ms.variables else ["0"])
    lines.append("Subject To")
    sense = {LE: "<=", GE: ">=", EQ: "="}
    for k, con in enumerate(ms.constraints):
        body = _terms(ms, con.terms) or [f"0 {ms.variables[0].name}"]
        lines += _wrap(f" {con.family or 'c'}_{k}:", body + [sense[con.sense], _num(con.rhs)])
    lines.append("Bounds")
    for v in ms.variables:
        if v.kind == BINARY and v.lower == 0 and v.upper == 1:
            continue
        lo = "-inf" if v.lower == -math.inf else _num(v.lower)
        hi = "+inf" if v.upper == math.inf else _num(v.upper)
        lines.append(f" {v.name} = {lo}" if v.lower == v.upper else f" {lo} <= {v.name} <= {hi}")
    for section, kind in (("Binary", BINARY), ("General", INTEGER)):
        names = [v.name for v in ms.variables if v.kind == kind]
        if names:
            lines.append(section)
            lines += _wrap("", names)
    lines.append("End")
    return "\n".join(lines) + "\n"


_STATUS = {"optimal": OPTIMAL, "feasible": FEASIBLE, "infeasible": INFEASIBLE,
           "unbounded": UNBOUNDED, "limit": LIMIT}


def import_solution(text: str, ms: ModelSpec) -> MilpSolution:
    x = np.zeros(len(ms.variables))
    objective = None
    status = OPTIMAL
    seen_values = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "objective":
                objective = float(parts[1])
            elif len(parts) == 2 and parts[0] == "status":
                if parts[1] not in _STATUS:
                    raise SolverError(f"line {lineno}: unknown status {parts[1]!r}")
                status = _STATUS[parts[1]]
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolverError(f"line {lineno}: expected '<name> <value>', got {line!r}")
        name, val = parts[0], float(parts[1])
        if name not in ms.index:
            raise SolverError(f"line {lineno}: unknown variable {name!r}")
        j = ms.index[name]
        var = ms.variables[j]
        if var.is_integral:
            near = round(val)
            if abs(val - near) > 1e-4:
                raise SolverError(f"line {lineno}: {name} = {val} is not integral")
            if abs(val - near) <= 1e-6 or var.kind == BINARY:
                val = float(near)
        x[j] = val
        seen_values = True
    if status in (INFEASIBLE, UNBOUNDED) and not seen_values:
        return MilpSolution(status, objective=objective)
    recomputed = ms.evaluate(x)
    if objective is not None and abs(recomputed - objective) > 1 - 1e-6:
        raise SolverError(f"objective header {objective} disagrees with recomputed value {recomputed}")
    return MilpSolution(status, x, recomputed if objective is None else objective)
