"""LP relaxation engines.

Both engines solve ``min c x`` subject to ``row_lo <= A x <= row_hi`` and
``lb <= x <= ub``. ``SimplexEngine`` is a dense bounded-variable revised
simplex (two phases, Dantzig pricing with a Bland fallback on degenerate
streaks); ``HighsEngine`` delegates to ``scipy.optimize.linprog``;
``WarmHighsEngine`` keeps one ``highspy`` model alive so each solve starts
from the previous basis (dual simplex after bound changes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = "optimal", "infeasible", "unbounded", "iteration_limit"


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


class HighsEngine:
    name = "highs"

    def __init__(self, c, A, row_lo, row_hi):
        A = sparse.csr_matrix(A)
        eq = np.isfinite(row_lo) & np.isfinite(row_hi) & (row_lo == row_hi)
        up = np.isfinite(row_hi) & ~eq
        dn = np.isfinite(row_lo) & ~eq
        self.c = np.asarray(c, dtype=float)
        self.A_ub = sparse.vstack([A[up], -A[dn]]).tocsr() if up.any() or dn.any() else None
        self.b_ub = np.concatenate([row_hi[up], -row_lo[dn]]) if self.A_ub is not None else None
        self.A_eq = A[eq] if eq.any() else None
        self.b_eq = row_lo[eq] if eq.any() else None

    def solve(self, lb, ub) -> LPResult:
        res = linprog(self.c, A_ub=self.A_ub, b_ub=self.b_ub, A_eq=self.A_eq, b_eq=self.b_eq,
                      bounds=np.column_stack([lb, ub]), method="highs")
        if res.status == 0:
            return LPResult(OPTIMAL, res.x, float(res.fun), int(getattr(res, "nit", 0)))
        if res.status == 2:
            return LPResult(INFEASIBLE)
        if res.status == 3:
            return LPResult(UNBOUNDED)
        return LPResult(ITERATION_LIMIT)


class WarmHighsEngine:
    name = "highspy"

    def __init__(self, c, A, row_lo, row_hi):
        import highspy

        self._hs = highspy
        A = sparse.csc_matrix(A)
        lp = highspy.HighsLp()
        n, m = A.shape[1], A.shape[0]
        lp.num_col_, lp.num_row_ = n, m
        lp.col_cost_ = np.asarray(c, dtype=float)
        lp.col_lower_ = np.zeros(n)
        lp.col_upper_ = np.zeros(n)
        inf = highspy.kHighsInf
        lp.row_lower_ = np.where(np.isfinite(row_lo), row_lo, -inf)
        lp.row_upper_ = np.where(np.isfinite(row_hi), row_hi, inf)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = A.indptr
        lp.a_matrix_.index_ = A.indices
        lp.a_matrix_.value_ = A.data
        self.h = highspy.Highs()
        self.h.setOptionValue("output_flag", False)
        self.h.setOptionValue("presolve", "off")
        self.h.passModel(lp)
        self.cols = np.arange(n, dtype=np.int32)
        self.c = np.asarray(c, dtype=float)

    def solve(self, lb, ub) -> LPResult:
        h, M = self.h, self._hs.HighsModelStatus
        h.changeColsBounds(len(self.cols), self.cols, np.asarray(lb, float), np.asarray(ub, float))
        h.run()
        status = h.getModelStatus()
        if status == M.kOptimal:
            x = np.array(h.getSolution().col_value)
            return LPResult(OPTIMAL, x, float(self.c @ x), int(h.getInfo().simplex_iteration_count))
        if status == M.kInfeasible:
            return LPResult(INFEASIBLE)
        if status in (M.kUnbounded, M.kUnboundedOrInfeasible):
            # resolve from scratch to tell the two apart
            h.clearSolver()
            h.run()
            status = h.getModelStatus()
            if status == M.kOptimal:
                x = np.array(h.getSolution().col_value)
                return LPResult(OPTIMAL, x, float(self.c @ x))
            return LPResult(INFEASIBLE if status == M.kInfeasible else UNBOUNDED)
        return LPResult(ITERATION_LIMIT)


def _default_engine():
    try:
        import highspy  # noqa: F401
    except ImportError:
        return HighsEngine
    return WarmHighsEngine


class SimplexEngine:
    """Dense bounded revised simplex on ``[A, -I] (x, s) = 0`` with slack
    bounds ``[row_lo, row_hi]``."""

    name = "simplex"

    def __init__(self, c, A, row_lo, row_hi, tol: float = 1e-9, max_iter: int = 50_000,
                 refactor_every: int = 64, bland_after: int = 50):
        A = A.toarray() if sparse.issparse(A) else np.asarray(A, dtype=float)
        self.m, self.n = A.shape
        self.A = np.hstack([A, -np.eye(self.m)])
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(self.m)])
        self.row_lo = np.asarray(row_lo, dtype=float)
        self.row_hi = np.asarray(row_hi, dtype=float)
        self.tol = tol
        self.max_iter = max_iter
        self.refactor_every = refactor_every
        self.bland_after = bland_after

    def solve(self, lb, ub) -> LPResult:
        m, n = self.m, self.n
        lo = np.concatenate([np.asarray(lb, dtype=float), self.row_lo])
        hi = np.concatenate([np.asarray(ub, dtype=float), self.row_hi])
        if np.any(lo > hi + self.tol):
            return LPResult(INFEASIBLE)
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        act = self.A[:, :n] @ x[:n]
        x[n:] = act
        # rows whose activity violates the slack bounds get an artificial column
        below, above = act < self.row_lo - self.tol, act > self.row_hi + self.tol
        bad = np.flatnonzero(below | above)
        k = len(bad)
        A = self.A
        if k:
            cols = np.zeros((m, k))
            target = np.where(below[bad], self.row_lo[bad], self.row_hi[bad])
            sign = np.sign(target - act[bad])
            cols[bad, np.arange(k)] = sign
            A = np.hstack([A, cols])
            x[n + bad] = target
            x = np.concatenate([x, np.abs(target - act[bad])])
            lo = np.concatenate([lo, np.zeros(k)])
            hi = np.concatenate([hi, np.full(k, np.inf)])
        basis = np.arange(n, n + m)
        if k:
            basis[bad] = n + m + np.arange(k)
        total_iter = 0
        if k:
            c1 = np.zeros(A.shape[1])
            c1[n + m:] = 1.0
            status, x, basis, it = self._run(A, c1, lo, hi, x, basis)
            total_iter += it
            if status != OPTIMAL:
                return LPResult(status, iterations=total_iter)
            if x[n + m:].sum() > 1e-7 * max(1.0, np.abs(x[:n]).max(initial=0.0)):
                return LPResult(INFEASIBLE, iterations=total_iter)
            hi[n + m:] = 0.0
            x[n + m:] = np.clip(x[n + m:], 0.0, 0.0)
        c2 = np.concatenate([self.c, np.zeros(k)])
        status, x, basis, it = self._run(A, c2, lo, hi, x, basis)
        total_iter += it
        if status != OPTIMAL:
            return LPResult(status, iterations=total_iter)
        xs = x[:n]
        return LPResult(OPTIMAL, xs, float(self.c[:n] @ xs), total_iter)

    def _run(self, A, c, lo, hi, x, basis):
        m = self.m
        tol = self.tol
        ncol = A.shape[1]
        in_basis = np.zeros(ncol, dtype=bool)
        in_basis[basis] = True
        Binv = np.linalg.inv(A[:, basis])
        degenerate = 0
        for it in range(self.max_iter):
            if it % self.refactor_every == 0 and it:
                Binv = np.linalg.inv(A[:, basis])
                nb = ~in_basis
                x[basis] = -Binv @ (A[:, nb] @ x[nb])
            y = c[basis] @ Binv
            d = c - y @ A
            d[in_basis] = 0.0
            can_up = (x < hi - tol) & (d < -tol)
            can_dn = (x > lo + tol) & (d > tol)
            elig = (can_up | can_dn) & ~in_basis
            if not elig.any():
                return OPTIMAL, x, basis, it
            if degenerate >= self.bland_after:
                j = int(np.flatnonzero(elig)[0])
            else:
                scores = np.where(elig, np.abs(d), -1.0)
                j = int(np.argmax(scores))
            direction = 1.0 if d[j] < 0 else -1.0
            alpha = Binv @ A[:, j]  # x_B changes by -alpha * direction * step
            delta_b = -alpha * direction
            step = hi[j] - lo[j]
            leave = -1
            xb = x[basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                up = delta_b > tol
                dn = delta_b < -tol
                ratios = np.full(m, np.inf)
                ratios[up] = (hi[basis][up] - xb[up]) / delta_b[up]
                ratios[dn] = (lo[basis][dn] - xb[dn]) / delta_b[dn]
            ratios = np.maximum(ratios, 0.0)
            if ratios.size:
                rmin = ratios.min()
                if rmin < step:
                    ties = np.flatnonzero(ratios <= rmin + tol)
                    if degenerate >= self.bland_after:
                        leave = int(ties[np.argmin(basis[ties])])
                    else:
                        leave = int(ties[np.argmax(np.abs(delta_b[ties]))])
                    step = rmin
            if not np.isfinite(step):
                return UNBOUNDED, x, basis, it
            degenerate = degenerate + 1 if step <= tol else 0
            x[j] += direction * step
            x[basis] += delta_b * step
            if leave < 0:
                continue  # bound flip of the entering variable
            out = basis[leave]
            # snap the leaving variable onto the bound it reached
            x[out] = hi[out] if delta_b[leave] > 0 else lo[out]
            basis[leave] = j
            in_basis[out], in_basis[j] = False, True
            piv = alpha[leave]
            row = Binv[leave] / piv
            Binv -= np.outer(alpha, row)
            Binv[leave] = row
        return ITERATION_LIMIT, x, basis, self.max_iter


ENGINES = {"highs": HighsEngine, "highspy": WarmHighsEngine, "simplex": SimplexEngine}


def make_engine(name: str, c, A, row_lo, row_hi):
    """``name="auto"`` picks the warm-started engine when highspy is installed."""
    if name == "auto":
        return _default_engine()(c, A, row_lo, row_hi)
    try:
        return ENGINES[name](c, A, row_lo, row_hi)
    except KeyError:
        raise ValueError(f"unknown LP engine {name!r}; choose from {sorted(ENGINES)}") from None
