"""Rolling-horizon matheuristics.

The myopic method solves one single-period model per instant with
leftovers treated as free. The forward-looking method discounts each
purchasable object by the estimated future use of its leftovers and learns
those estimates over training cycles.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

from .genealogy import (UsageTracker, first_order_keys, initial_pool, purchasable_pool, record_item_usage,
                        slot_layout, spawn_pool, utilization_fractions)
from .instance import Instance
from .model import SubproblemState, build_flook_subproblem, build_myopic_subproblem, subproblem_decision
from .oracle import assemble_plan
from .solver import INFEASIBLE, LIMIT, OPTIMAL, SolverConfig, SolverError, solve

NO_IMPROVE_LIMIT = 10


class InfeasiblePeriod(RuntimeError):
    """A single-period model has no feasible solution."""

    def __init__(self, kappa: int, method: str = ""):
        super().__init__(f"{method or 'subproblem'} infeasible at instant {kappa}")
        self.kappa = kappa


@dataclass(frozen=True)
class TrainingConfig:
    delta_ini: float = 0.9
    sigma: float = 0.9
    eps: float = 0.01
    max_cycles: int = 100
    no_improve_limit: int = NO_IMPROVE_LIMIT

    def __post_init__(self):
        if not 0 <= self.delta_ini <= 1:
            raise ValueError(f"delta_ini must lie in [0, 1], got {self.delta_ini}")
        if not 0 < self.sigma < 1:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_cycles < 1 or self.no_improve_limit < 1:
            raise ValueError("max_cycles and no_improve_limit must be at least 1")

    @property
    def cycle_bound(self) -> int:
        """Largest cycle index training can reach: at this index the update
        weight ``sigma**eta`` is at most ``eps``, so the change is too."""
        return min(self.max_cycles - 1, math.ceil(math.log(self.eps) / math.log(self.sigma)))


@dataclass
class CycleRecord:
    cycle: int
    delta: dict
    f: dict
    cost: int | None
    leftover_value: int | None
    improved: bool
    max_delta_change: float
    failed_at: int | None = None  # instant of an infeasible subproblem


@dataclass
class TrainingTrace:
    cycles: list[CycleRecord] = field(default_factory=list)
    stop_reason: str = ""

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["cycle", "max_delta_change", "cost", "leftover_value", "improved"])
        for rec in self.cycles:
            w.writerow([rec.cycle, f"{rec.max_delta_change:.6f}", "" if rec.cost is None else rec.cost,
                        "" if rec.leftover_value is None else rec.leftover_value, int(rec.improved)])
        return out.getvalue()

    def best_keys(self) -> list[tuple]:
        """Best-so-far ``(cost, -value)`` after every cycle."""
        best, out = None, []
        for rec in self.cycles:
            if rec.cost is not None:
                key = (rec.cost, -rec.leftover_value)
                best = key if best is None or key < best else best
            out.append(best)
        return out


# -- single rollouts ---------------------------------------------------------

def _solve_period(ms, solver_cfg: SolverConfig, kappa: int, method: str):
    sol = solve(ms, solver_cfg)
    if sol.status == INFEASIBLE:
        raise InfeasiblePeriod(kappa, method)
    if sol.status not in (OPTIMAL, LIMIT) or sol.x is None:
        raise SolverError(f"{method} subproblem at instant {kappa} ended with status {sol.status}")
    return subproblem_decision(ms, sol.x), sol


def rollout(inst: Instance, solver_cfg: SolverConfig, delta: dict | None = None,
            tracker: UsageTracker | None = None, method: str = "myopic"):
    """Solve the single-period models in sequence and assemble the plan.

    With ``delta`` the forward-looking model is used. A ``tracker`` collects
    realized and used leftover areas. Returns ``(plan, stats)``.
    """
    pool = initial_pool(inst)
    decisions = []
    stats = {"solves": 0, "nodes": 0, "limit_hits": 0, "solver_time": 0.0}
    for s in inst.instants:
        st = SubproblemState.at(inst, pool)
        ms = build_myopic_subproblem(st) if delta is None else build_flook_subproblem(st, delta)
        dec, sol = _solve_period(ms, solver_cfg, s, method)
        stats["solves"] += 1
        stats["nodes"] += sol.nodes
        stats["solver_time"] += sol.wall_time
        stats["limit_hits"] += sol.status == LIMIT
        nxt = spawn_pool(pool, dec, purchasable_pool(inst, s + 1) if s + 1 < inst.P else [])
        if tracker is not None:
            tracker.register_children(nxt, inst.catalogue)
            items = inst.items_at(s)
            for pl in dec.placements:
                record_item_usage(tracker, pool, items[pl.item], pl.obj)
        decisions.append(dec)
        pool = nxt
    return assemble_plan(inst, decisions, method), stats


def run_myopic(inst: Instance, solver_cfg: SolverConfig | None = None):
    """Returns ``(plan, report)``; raises InfeasiblePeriod naming the instant."""
    start = time.perf_counter()
    plan, stats = rollout(inst, solver_cfg or SolverConfig(), None, None, "myopic")
    report = plan.summary() | stats | {"wall_time": time.perf_counter() - start}
    return plan, report


# -- training ----------------------------------------------------------------

def delta_keys(inst: Instance) -> list[tuple[int, int]]:
    """First-order leftover slots of every purchasable generator."""
    keys = []
    for pool in slot_layout(inst)[1:]:
        keys.extend(first_order_keys(pool))
    return keys


def update_delta(delta: dict, f: dict, eta: int, sigma: float) -> dict:
    """Convex step from ``delta`` toward the observed fractions ``f``."""
    w = sigma ** eta
    out = dict(delta)
    for k, fk in f.items():
        out[k] = (1 - w) * delta.get(k, fk) + w * fk
    return out


def max_change(old: dict, new: dict) -> float:
    keys = set(old) | set(new)
    return max((abs(new.get(k, 0.0) - old.get(k, 0.0)) for k in keys), default=0.0)


def should_stop(old: dict, new: dict, eps: float, no_improve: int, limit: int = NO_IMPROVE_LIMIT) -> bool:
    return max_change(old, new) <= eps or no_improve >= limit


def run_forward_looking(inst: Instance, train_cfg: TrainingConfig | None = None,
                        solver_cfg: SolverConfig | None = None):
    """Train utilization estimates over cycles and return the best plan.

    Returns ``(plan, report, trace)``. A cycle whose subproblem is infeasible
    is recorded and counts as non-improving; training then resumes from the
    estimates of the last complete cycle. If the very first cycle fails the
    error propagates.
    """
    train_cfg = train_cfg or TrainingConfig()
    solver_cfg = solver_cfg or SolverConfig()
    start = time.perf_counter()
    delta = {k: train_cfg.delta_ini for k in delta_keys(inst)}
    last_good = None
    best = None
    no_improve = 0
    trace = TrainingTrace()
    totals = {"solves": 0, "nodes": 0, "limit_hits": 0, "solver_time": 0.0}

    for eta in range(train_cfg.max_cycles):
        tracker = UsageTracker()
        try:
            plan, stats = rollout(inst, solver_cfg, delta, tracker, "flook")
        except InfeasiblePeriod as err:
            if last_good is None:
                raise
            no_improve += 1
            new = dict(last_good)
            trace.cycles.append(CycleRecord(eta, dict(delta), {}, None, None, False, max_change(delta, new),
                                            err.kappa))
            delta = new
            if no_improve >= train_cfg.no_improve_limit:
                trace.stop_reason = "no_improve"
                break
            continue
        for k in totals:
            totals[k] += stats[k]
        improved = best is None or plan.key < best.key
        if improved:
            best, no_improve = plan, 0
        else:
            no_improve += 1
        f = utilization_fractions(tracker)
        new = update_delta(delta, f, eta, train_cfg.sigma)
        change = max_change(delta, new)
        trace.cycles.append(CycleRecord(eta, dict(delta), f, plan.cost, plan.leftover_value, improved, change))
        last_good = delta
        stop = change <= train_cfg.eps
        delta = new
        if stop or no_improve >= train_cfg.no_improve_limit:
            trace.stop_reason = "converged" if stop else "no_improve"
            break
    else:
        trace.stop_reason = "cycle_cap"

    best.method = "flook"
    report = best.summary() | totals | {"cycles": len(trace.cycles), "stop_reason": trace.stop_reason,
                                        "wall_time": time.perf_counter() - start}
    return best, report, trace
