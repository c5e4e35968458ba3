"""Activity-based bound propagation over ``lo <= A x <= hi``.

Each pass derives, for every nonzero ``a_ij``, the bound on ``x_j`` implied
by row ``i`` with the other variables at their extreme bounds. Integer
bounds are rounded inward. Only finite bounds take part.
"""

from __future__ import annotations

import numpy as np

FEAS_TOL = 1e-6


class Propagator:
    def __init__(self, A, row_lo, row_hi, integrality, max_passes: int = 8):
        coo = A.tocoo()
        keep = coo.data != 0
        self.rows, self.cols, self.vals = coo.row[keep], coo.col[keep], coo.data[keep]
        self.m = A.shape[0]
        self.lo = np.asarray(row_lo, float)
        self.hi = np.asarray(row_hi, float)
        self.integral = np.asarray(integrality, bool)
        self.max_passes = max_passes
        self.pos = self.vals > 0
        self.n = A.shape[1]

    def run(self, lb, ub, cutoff=None):
        """Tightened ``(lb, ub)`` copies, or None if the box is infeasible.

        ``cutoff`` is an optional extra row ``(c, rhs)`` meaning ``c x <= rhs``.
        """
        lb, ub = lb.copy(), ub.copy()
        rows, cols, vals, pos = self.rows, self.cols, self.vals, self.pos
        lo, hi = self.lo, self.hi
        if cutoff is not None:
            c, rhs = cutoff
            nz = np.flatnonzero(c)
            rows = np.concatenate([rows, np.full(len(nz), self.m)])
            cols = np.concatenate([cols, nz])
            vals = np.concatenate([vals, c[nz]])
            pos = vals > 0
            lo = np.append(lo, -np.inf)
            hi = np.append(hi, rhs)
        m = len(lo)
        order = np.argsort(cols, kind="stable")
        rows, cols, vals, pos = rows[order], cols[order], vals[order], pos[order]
        starts = np.flatnonzero(np.r_[True, cols[1:] != cols[:-1]]) if len(cols) else np.zeros(0, int)
        present = cols[starts]
        for _ in range(self.max_passes):
            l_c, u_c = lb[cols], ub[cols]
            cmin = np.where(pos, vals * l_c, vals * u_c)
            cmax = np.where(pos, vals * u_c, vals * l_c)
            minact = np.bincount(rows, cmin, minlength=m)
            maxact = np.bincount(rows, cmax, minlength=m)
            if np.any(minact > hi + FEAS_TOL * np.maximum(1, np.abs(hi))) or \
                    np.any(maxact < lo - FEAS_TOL * np.maximum(1, np.abs(lo))):
                return None
            with np.errstate(invalid="ignore", divide="ignore"):
                cap_hi = (hi[rows] - (minact[rows] - cmin)) / vals
                cap_lo = (lo[rows] - (maxact[rows] - cmax)) / vals
            up = np.where(pos, cap_hi, cap_lo)   # upper bound candidates
            dn = np.where(pos, cap_lo, cap_hi)   # lower bound candidates
            up[np.isnan(up)] = np.inf
            dn[np.isnan(dn)] = -np.inf
            new_ub = np.full_like(ub, np.inf)
            new_lb = np.full_like(lb, -np.inf)
            if len(starts):
                new_ub[present] = np.minimum.reduceat(up, starts)
                new_lb[present] = np.maximum.reduceat(dn, starts)
            new_ub = np.where(self.integral, np.floor(new_ub + FEAS_TOL), new_ub + FEAS_TOL)
            new_lb = np.where(self.integral, np.ceil(new_lb - FEAS_TOL), new_lb - FEAS_TOL)
            with np.errstate(invalid="ignore"):
                width = np.maximum(ub - lb, 1.0)
                gain_u = (ub - new_ub) > 1e-3 * width
                gain_l = (new_lb - lb) > 1e-3 * width
            if not (gain_u.any() or gain_l.any()):
                break
            ub = np.where(gain_u, new_ub, ub)
            lb = np.where(gain_l, new_lb, lb)
            if np.any(lb > ub + FEAS_TOL):
                return None
            ub = np.maximum(ub, lb)
        return lb, ub
