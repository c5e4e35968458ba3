"""MILP backends for ``ModelSpec`` models.

``builtin`` runs the package's own branch-and-bound; ``highs`` calls HiGHS
in-process through ``scipy.optimize.milp``; ``external`` writes an LP file
and runs a command template.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
import time

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .base import (FEASIBLE, INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, MilpSolution, SolverConfig, SolverError,
                   relative_gap)
from .bnb import branch_and_bound
from .lpfile import export_lp, import_solution

DEFAULT_COMMAND = f"{shlex.quote(sys.executable)} -m mpcsp.solver.highs_bridge {{lp}} {{sol}}"

__all__ = ["FEASIBLE", "INFEASIBLE", "LIMIT", "OPTIMAL", "UNBOUNDED", "MilpSolution", "SolverConfig",
           "SolverError", "export_lp", "import_solution", "relative_gap", "solve"]


def solve(ms, cfg: SolverConfig | None = None) -> MilpSolution:
    cfg = cfg or SolverConfig()
    if not ms.variables:
        if any(con.sense == "<=" and con.rhs < 0 or con.sense == ">=" and con.rhs > 0
               or con.sense == "=" and con.rhs != 0 for con in ms.constraints):
            return MilpSolution(INFEASIBLE)
        return MilpSolution(OPTIMAL, np.zeros(0), ms.constant, ms.constant)
    if cfg.backend == "builtin":
        return branch_and_bound(ms, cfg)
    if cfg.backend == "highs":
        return _solve_highs(ms, cfg)
    return _solve_external(ms, cfg)


def _solve_highs(ms, cfg: SolverConfig) -> MilpSolution:
    start = time.perf_counter()
    mf = ms.arrays
    options = {"mip_rel_gap": cfg.rel_gap}
    if cfg.time_limit:
        options["time_limit"] = cfg.time_limit
    cons = [LinearConstraint(mf.A, mf.row_lo, mf.row_hi)] if mf.A.shape[0] else []
    res = milp(mf.c, constraints=cons, bounds=Bounds(mf.lb, mf.ub), integrality=mf.integrality, options=options)
    elapsed = time.perf_counter() - start
    if res.status == 0:
        x = np.array(res.x)
        x[mf.integrality == 1] = np.round(x[mf.integrality == 1])
        bound = getattr(res, "mip_dual_bound", None)
        return MilpSolution(OPTIMAL, x, float(mf.c @ x) + ms.constant,
                            None if bound is None else bound + ms.constant, elapsed)
    if res.status == 2:
        return MilpSolution(INFEASIBLE, wall_time=elapsed)
    if res.status == 3:
        return MilpSolution(UNBOUNDED, wall_time=elapsed)
    if res.status == 4 and "unbounded or infeasible" in res.message:
        # settle the ambiguity with a pure feasibility solve
        feas = milp(np.zeros_like(mf.c), constraints=cons, bounds=Bounds(mf.lb, mf.ub),
                    integrality=mf.integrality, options=options)
        status = UNBOUNDED if feas.status == 0 else INFEASIBLE
        return MilpSolution(status, wall_time=time.perf_counter() - start)
    x = None if res.x is None else np.array(res.x)
    obj = None if x is None else float(mf.c @ x) + ms.constant
    return MilpSolution(LIMIT, x, obj, wall_time=elapsed)


def _solve_external(ms, cfg: SolverConfig) -> MilpSolution:
    template = cfg.command or DEFAULT_COMMAND
    start = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="mpcsp-") as tmp:
        lp_path = os.path.join(tmp, "model.lp")
        sol_path = os.path.join(tmp, "model.sol")
        with open(lp_path, "w") as fh:
            fh.write(export_lp(ms))
        cmd = shlex.split(template.format(lp=shlex.quote(lp_path), sol=shlex.quote(sol_path)))
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=None)
        if proc.returncode != 0 or not os.path.exists(sol_path):
            raise SolverError(f"external solver failed ({proc.returncode}): {proc.stderr.strip()[:500]}")
        with open(sol_path) as fh:
            sol = import_solution(fh.read(), ms)
    sol.wall_time = time.perf_counter() - start
    return sol
