"""Experiment runner, comparison metrics and report emission."""

from __future__ import annotations

import csv
import io
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .instance import Instance
from .matheuristic import InfeasiblePeriod, TrainingConfig, run_forward_looking, run_myopic
from .model import build_full_model, full_model_decisions
from .oracle import assemble_plan, exact_multi_period
from .solver import INFEASIBLE, OPTIMAL, SolverConfig, solve

WIN, TIE, LOSS = "Win", "Tie", "Loss"
METHODS = ("myopic", "flook", "exact", "oracle")
SIGMA_CLAMP = 0.999


def gap_percent(fa: float, fb: float) -> float:
    """Relative difference of ``fa`` over ``fb`` in percent, 4 decimals."""
    if fb == 0:
        raise ZeroDivisionError("reference objective is zero")
    return round(100 * (fa - fb) / fb, 4)


def classify(cost_a, left_a, cost_b, left_b) -> str:
    """Outcome of A against B: cheaper wins, equal cost falls back to the
    more valuable final leftovers."""
    if (cost_a, left_a) == (cost_b, left_b):
        return TIE
    if cost_a < cost_b or (cost_a == cost_b and left_a > left_b):
        return WIN
    return LOSS


@dataclass(frozen=True)
class Outcome:
    cost_a: int
    left_a: int
    cost_b: int
    left_b: int
    label: str
    gap: float | None

    @classmethod
    def of(cls, a: "Row", b: "Row") -> "Outcome":
        gap = None if not b.objective else gap_percent(a.objective, b.objective)
        return cls(a.cost, a.leftover_value, b.cost, b.leftover_value,
                   classify(a.cost, a.leftover_value, b.cost, b.leftover_value), gap)


def wtl(labels) -> tuple[int, int, int]:
    labels = list(labels)
    return labels.count(WIN), labels.count(TIE), labels.count(LOSS)


# -- running methods -----------------------------------------------------------

def solve_exact(inst: Instance, solver_cfg: SolverConfig):
    """Full multi-period model through a MILP backend. Returns ``(plan, info)``;
    ``plan`` is None when the model is infeasible."""
    ms = build_full_model(inst)
    sol = solve(ms, solver_cfg)
    info = {"status": sol.status, "nodes": sol.nodes, "bound": sol.bound}
    if sol.status == INFEASIBLE or sol.x is None:
        return None, info
    plan = assemble_plan(inst, full_model_decisions(ms, inst, sol.x), "exact")
    if sol.status == OPTIMAL and abs(plan.objective - sol.objective) > 1 - 1e-6:
        raise RuntimeError(f"replayed plan objective {plan.objective} differs from solver {sol.objective}")
    return plan, info


def run_method(inst: Instance, method: str, train_cfg: TrainingConfig | None = None,
               solver_cfg: SolverConfig | None = None):
    """``(plan or None, info)`` for one method; infeasibility is reported in info."""
    solver_cfg = solver_cfg or SolverConfig()
    if method == "myopic":
        try:
            plan, report = run_myopic(inst, solver_cfg)
        except InfeasiblePeriod as err:
            return None, {"status": "infeasible", "failed_at": err.kappa}
        return plan, {"status": "ok"} | report
    if method == "flook":
        try:
            plan, report, trace = run_forward_looking(inst, train_cfg, solver_cfg)
        except InfeasiblePeriod as err:
            return None, {"status": "infeasible", "failed_at": err.kappa}
        return plan, {"status": "ok", "trace": trace} | report
    if method == "exact":
        return solve_exact(inst, solver_cfg)
    if method == "oracle":
        plan = exact_multi_period(inst)
        return plan, {"status": "ok" if plan else "infeasible"}
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


@dataclass
class Row:
    instance: str
    periods: int
    xi: int
    method: str
    status: str
    objective: int | None = None
    cost: int | None = None
    leftover_value: int | None = None
    seconds: float = 0.0
    cycles: int | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.cost is not None


FIELDS = ("instance", "periods", "xi", "method", "status", "objective", "cost", "leftover_value", "seconds",
          "cycles", "error")


def _run_one(args) -> Row:
    name, inst, method, train_cfg, solver_cfg = args
    start = time.perf_counter()
    row = Row(name, inst.periods, inst.xi, method, "ok")
    try:
        plan, info = run_method(inst, method, train_cfg, solver_cfg)
    except Exception as err:  # recorded, the run goes on
        row.status, row.error = "error", f"{type(err).__name__}: {err}"
    else:
        row.status = "ok" if plan is not None else info.get("status", "infeasible")
        if plan is not None:
            row.objective, row.cost, row.leftover_value = plan.objective, plan.cost, plan.leftover_value
        row.cycles = info.get("cycles")
        if "failed_at" in info:
            row.error = f"infeasible at instant {info['failed_at']}"
    row.seconds = time.perf_counter() - start
    return row


@dataclass
class Report:
    methods: list[str]
    rows: list[Row] = field(default_factory=list)

    def by_instance(self) -> dict[str, dict[str, Row]]:
        out: dict[str, dict[str, Row]] = {}
        for r in self.rows:
            out.setdefault(r.instance, {})[r.method] = r
        return out

    def outcomes(self, a: str, b: str) -> list[tuple[str, Outcome]]:
        """Outcomes of method ``a`` against ``b`` on instances where both succeeded."""
        res = []
        for name, rows in self.by_instance().items():
            if a in rows and b in rows and rows[a].ok and rows[b].ok:
                res.append((name, Outcome.of(rows[a], rows[b])))
        return res

    def summary(self) -> list[dict]:
        """Per ``(periods, xi)`` block: averages per method and W/T/L of each
        method against the first one. Leftover values are not averaged."""
        blocks = defaultdict(list)
        for r in self.rows:
            blocks[r.periods, r.xi].append(r)
        base = self.methods[0] if self.methods else None
        out = []
        for (periods, xi), rows in sorted(blocks.items()):
            names = {r.instance for r in rows}
            sub = Report(self.methods, rows)
            for m in self.methods:
                mine = [r for r in rows if r.method == m and r.ok]
                entry = {"periods": periods, "xi": xi, "method": m, "instances": len(names), "solved": len(mine),
                         "avg_objective": _mean(r.objective for r in mine),
                         "avg_cost": _mean(r.cost for r in mine),
                         "avg_seconds": _mean(r.seconds for r in rows if r.method == m)}
                if base and m != base:
                    oc = sub.outcomes(m, base)
                    w, t, l = wtl(o.label for _, o in oc)
                    entry["wtl"] = f"{w}/{t}/{l}"
                    gaps = [o.gap for _, o in oc if o.gap is not None]
                    entry["avg_gap"] = round(sum(gaps) / len(gaps), 4) if gaps else None
                out.append(entry)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for r in self.rows:
            w.writerow([_cell(getattr(r, f)) for f in FIELDS])
        return buf.getvalue()

    def to_text(self) -> str:
        cols = ("instance", "periods", "xi", "method", "status", "objective", "cost", "leftover_value", "seconds")
        table = [cols] + [tuple(_cell(getattr(r, c)) for c in cols) for r in self.rows]
        lines = _align(table)
        summ = self.summary()
        if summ:
            lines.append("")
            keys = ("periods", "xi", "method", "solved", "avg_objective", "avg_cost", "avg_seconds", "wtl", "avg_gap")
            lines.extend(_align([keys] + [tuple(_cell(e.get(k, "")) for k in keys) for e in summ]))
        return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> list[dict]:
    """Rows of a report CSV with numeric fields converted back."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        for k in ("periods", "xi", "objective", "cost", "leftover_value", "cycles"):
            rec[k] = int(rec[k]) if rec[k] else None
        rec["seconds"] = float(rec["seconds"])
        rows.append(rec)
    return rows


def _mean(values):
    values = list(values)
    return round(sum(values) / len(values), 4) if values else None


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _align(table) -> list[str]:
    widths = [max(len(str(row[k])) for row in table) for k in range(len(table[0]))]
    return ["  ".join(str(c).rjust(w) for c, w in zip(row, widths)) for row in table]


def run_experiment(instances, methods=("myopic", "flook"), train_cfg: TrainingConfig | None = None,
                   solver_cfg: SolverConfig | None = None, workers: int = 1) -> Report:
    """Run every method on every ``(name, Instance)`` pair. Rows come back in
    instance order whatever the number of workers."""
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    jobs = [(name, inst, m, train_cfg, solver_cfg) for name, inst in instances for m in methods]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    else:
        rows = [_run_one(j) for j in jobs]
    return Report(list(methods), rows)


# -- parameter sweep -------------------------------------------------------------

def sweep_grid(start: float = 0.5, stop: float = 1.0, step: float = 0.05) -> list[float]:
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


def clamp_sigma(sigma: float) -> float:
    return min(sigma, SIGMA_CLAMP)


def sweep(instances, deltas=None, sigmas=None, reference: str = "oracle", eps: float = 0.01,
          solver_cfg: SolverConfig | None = None, workers: int = 1) -> list[dict]:
    """Average gap to ``reference``, wall time and cycles of the
    forward-looking method over a ``(delta_ini, sigma)`` grid."""
    deltas = sweep_grid() if deltas is None else list(deltas)
    sigmas = sweep_grid() if sigmas is None else list(sigmas)
    ref = run_experiment(instances, [reference], solver_cfg=solver_cfg, workers=workers).by_instance()
    out = []
    for d in deltas:
        for s in sigmas:
            cfg = TrainingConfig(delta_ini=d, sigma=clamp_sigma(s), eps=eps)
            rep = run_experiment(instances, ["flook"], cfg, solver_cfg, workers)
            gaps, secs, cycles = [], [], []
            for r in rep.rows:
                base = ref[r.instance][reference]
                secs.append(r.seconds)
                if r.cycles is not None:
                    cycles.append(r.cycles)
                if r.ok and base.ok and base.objective:
                    gaps.append(gap_percent(r.objective, base.objective))
            out.append({"delta_ini": d, "sigma": s, "sigma_used": cfg.sigma,
                        "avg_gap": _mean(gaps), "avg_seconds": _mean(secs), "avg_cycles": _mean(cycles),
                        "instances": len(rep.rows), "compared": len(gaps)})
    return out


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()
