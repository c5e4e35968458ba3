"""Best-first branch-and-bound over LP relaxations.

Open nodes are ordered by LP bound (ties by creation order); from each
selected node the search plunges depth-first into the better child until
it is pruned, which finds incumbents early. The branching variable is the
most fractional integer variable, ties broken by lowest index. Bounds are
propagated at every node, including an objective cutoff row once an
incumbent exists. Because every feasible objective of the models built
here is an integer, a node is pruned once its bound cannot beat the
incumbent by a full unit.
"""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from .base import INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, MilpSolution, SolverConfig, relative_gap
from .propagate import Propagator
from .lp import INFEASIBLE as LP_INFEASIBLE, OPTIMAL as LP_OPTIMAL, UNBOUNDED as LP_UNBOUNDED, make_engine

INT_TOL = 1e-6


def _can_prune(bound: float, incumbent: float, cfg: SolverConfig) -> bool:
    if incumbent == math.inf:
        return False
    slack = 1e-9 * max(1.0, abs(bound)) + 1e-7
    if cfg.abs_gap >= 1 - 1e-6 and math.ceil(bound - slack) >= incumbent - slack:
        return True
    if incumbent - bound <= cfg.abs_gap:
        return True
    return relative_gap(incumbent, bound) <= cfg.rel_gap


def _fractional(x, integral_idx, priority=None):
    vals = x[integral_idx]
    frac = np.abs(vals - np.round(vals))
    is_frac = frac > INT_TOL
    if not is_frac.any():
        return None
    if priority is not None:
        top = priority[is_frac].max()
        is_frac &= priority == top
    # most fractional: distance from 0.5 smallest; argmin keeps the lowest index on ties
    score = np.where(is_frac, np.abs(vals - np.floor(vals) - 0.5), np.inf)
    return int(integral_idx[int(np.argmin(score))])


def branch_and_bound(ms, cfg: SolverConfig) -> MilpSolution:
    start = time.perf_counter()
    mf = ms.arrays
    engine = make_engine(cfg.lp_engine, mf.c, mf.A, mf.row_lo, mf.row_hi)
    integral_idx = np.flatnonzero(mf.integrality)
    const = ms.constant
    prio = ms.metadata.get("branch_priority") if cfg.priorities else None
    priority = None if prio is None else np.asarray(prio)[integral_idx]

    root_lb = mf.lb.copy()
    root_ub = mf.ub.copy()
    root_lb[integral_idx] = np.ceil(root_lb[integral_idx] - INT_TOL)
    root_ub[integral_idx] = np.floor(root_ub[integral_idx] + INT_TOL)
    prop = Propagator(mf.A, mf.row_lo, mf.row_hi, mf.integrality) if cfg.propagate else None

    incumbent, best_x = math.inf, None
    nodes = 0
    counter = 0
    heap: list = []

    def expired() -> bool:
        if cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit:
            return True
        return cfg.node_limit is not None and nodes >= cfg.node_limit

    def cutoff():
        if incumbent == math.inf:
            return None
        step = 1.0 if cfg.abs_gap >= 1 - 1e-6 else cfg.abs_gap
        return mf.c, incumbent - const - step + 1e-6 + 1e-9 * abs(incumbent)

    def evaluate(lb, ub):
        """Solve one node; returns an open node tuple, None, or "unbounded"."""
        nonlocal incumbent, best_x, nodes, counter
        nodes += 1
        if prop is not None:
            box = prop.run(lb, ub, cutoff())
            if box is None:
                return None
            lb, ub = box
        res = engine.solve(lb, ub)
        if res.status == LP_INFEASIBLE:
            return None
        if res.status == LP_UNBOUNDED:
            return "unbounded"
        if res.status != LP_OPTIMAL:
            raise RuntimeError(f"LP engine stopped with status {res.status}")
        bound = res.objective + const
        branch_var = _fractional(res.x, integral_idx, priority)
        if branch_var is None:
            x = res.x.copy()
            x[integral_idx] = np.round(x[integral_idx])
            value = float(mf.c @ x) + const
            if value < incumbent:
                incumbent, best_x = value, x
            return None
        if _can_prune(bound, incumbent, cfg):
            return None
        counter += 1
        return (bound, counter, lb, ub, res.x, branch_var)

    root = evaluate(root_lb, root_ub)
    if root == "unbounded":
        return MilpSolution(UNBOUNDED, wall_time=time.perf_counter() - start, nodes=nodes)
    if root is not None:
        heap.append(root)
    root_bound = root[0] if root is not None else incumbent

    hit_limit = False
    while heap and not hit_limit:
        node = heapq.heappop(heap)
        while node is not None:
            if expired():
                hit_limit = True
                heapq.heappush(heap, node)
                break
            bound, _, lb, ub, x, j = node
            if _can_prune(bound, incumbent, cfg):
                break
            v = x[j]
            down_ub = ub.copy()
            down_ub[j] = math.floor(v)
            up_lb = lb.copy()
            up_lb[j] = math.ceil(v)
            children = []
            for child_lb, child_ub in ((lb, down_ub), (up_lb, ub)):
                child = evaluate(child_lb, child_ub)
                if child == "unbounded":
                    return MilpSolution(UNBOUNDED, wall_time=time.perf_counter() - start, nodes=nodes)
                if child is not None:
                    children.append(child)
            children.sort()
            node = children[0] if children else None
            for other in children[1:]:
                heapq.heappush(heap, other)

    elapsed = time.perf_counter() - start
    open_bound = min((h[0] for h in heap), default=incumbent)
    best_bound = min(open_bound, incumbent)
    info = {"root_bound": root_bound}
    if best_x is None:
        return MilpSolution(LIMIT if hit_limit else INFEASIBLE, bound=None if not hit_limit else open_bound,
                            wall_time=elapsed, nodes=nodes, info=info)
    status = OPTIMAL
    if hit_limit and not _can_prune(open_bound, incumbent, cfg):
        status = LIMIT
    return MilpSolution(status, best_x, incumbent, best_bound, elapsed, nodes, info)
