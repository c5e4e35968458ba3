"""Solver-agnostic MILP models: the full multi-period model and the myopic
and forward-looking single-period subproblems.

Variables are named ``<symbol>_<indices>`` (``v_0_1_2`` for item 1 of
instant 0 on object 2); the pretty-printer shows ``v[0,1,2]``. Item
positions are center coordinates. Double-sided bounds become two rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy import sparse

from .genealogy import ObjectPool, leftover_generator_indices, log2_bits, slot_layout
from .instance import Instance, fits_catalogue
from .plan import ObjectCut, PeriodDecision, Placement

BINARY, INTEGER, CONTINUOUS = "binary", "integer", "continuous"
LE, GE, EQ = "<=", ">=", "="

INT64_HEADROOM = 2 ** 62

# Branching ranks (higher first): purchases and assignments, then the
# relative positions and cut orientations, then the value bookkeeping.
BRANCH_PRIORITY = {"u": 4, "v": 4, "pi": 3, "tau": 3, "eta": 2, "zeta": 0, "theta": 1}


def _branch_rank(name: str) -> float:
    head, *idx = name.split("_")
    rank = BRANCH_PRIORITY.get(head, 0)
    if head == "theta":
        rank += int(idx[-1]) / 100  # high-order width bits first
    return rank


class ModelBuildError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    lower: float
    upper: float

    @property
    def symbol(self) -> str:
        head, *idx = self.name.split("_")
        return f"{head}[{','.join(idx)}]" if idx else head

    @property
    def is_integral(self) -> bool:
        return self.kind != CONTINUOUS


@dataclass(frozen=True)
class Constraint:
    terms: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    family: str = ""


@dataclass(frozen=True, eq=False)
class ModelSpec:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[int, float], ...]
    constant: float = 0.0
    metadata: dict = field(default_factory=dict)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v.name: k for k, v in enumerate(self.variables)}

    def var(self, name: str) -> int:
        return self.index[name]

    def counts(self) -> dict[str, int]:
        kinds = [v.kind for v in self.variables]
        return {"binary": kinds.count(BINARY), "integer": kinds.count(INTEGER),
                "continuous": kinds.count(CONTINUOUS), "constraints": len(self.constraints)}

    def evaluate(self, x) -> float:
        return self.constant + sum(c * x[j] for j, c in self.objective)

    def violations(self, x, tol: float = 1e-6) -> list[str]:
        """Names of violated rows and bounds at point ``x`` (debugging aid)."""
        out = []
        for k, v in enumerate(self.variables):
            if x[k] < v.lower - tol or x[k] > v.upper + tol:
                out.append(f"bound {v.name}={x[k]}")
            elif v.is_integral and abs(x[k] - round(x[k])) > tol:
                out.append(f"integrality {v.name}={x[k]}")
        for k, con in enumerate(self.constraints):
            lhs = sum(c * x[j] for j, c in con.terms)
            bad = (con.sense == LE and lhs > con.rhs + tol) or (con.sense == GE and lhs < con.rhs - tol) \
                or (con.sense == EQ and abs(lhs - con.rhs) > tol)
            if bad:
                out.append(f"row {k} ({con.family}) lhs={lhs} {con.sense} {con.rhs}")
        return out

    @cached_property
    def arrays(self) -> "MatrixForm":
        n = len(self.variables)
        c = np.zeros(n)
        for j, coef in self.objective:
            c[j] += coef
        rows, cols, vals = [], [], []
        lo = np.empty(len(self.constraints))
        hi = np.empty(len(self.constraints))
        for k, con in enumerate(self.constraints):
            for j, coef in con.terms:
                rows.append(k)
                cols.append(j)
                vals.append(coef)
            lo[k] = con.rhs if con.sense in (GE, EQ) else -np.inf
            hi[k] = con.rhs if con.sense in (LE, EQ) else np.inf
        A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(self.constraints), n))
        lb = np.array([v.lower for v in self.variables], dtype=float)
        ub = np.array([v.upper for v in self.variables], dtype=float)
        integrality = np.array([1 if v.is_integral else 0 for v in self.variables], dtype=np.int8)
        return MatrixForm(c, A, lo, hi, lb, ub, integrality)

    def pretty(self, limit: int | None = None) -> str:
        """Human-readable dump with bracketed symbol names."""
        def expr(terms):
            parts = []
            for j, coef in terms:
                sym = self.variables[j].symbol
                sign = "-" if coef < 0 else "+"
                mag = abs(coef)
                parts.append(f"{sign} {sym}" if mag == 1 else f"{sign} {mag:g} {sym}")
            text = " ".join(parts) or "0"
            return text[2:] if text.startswith("+ ") else text

        lines = [f"minimize {expr(self.objective)} + {self.constant:g}", "subject to"]
        cons = self.constraints if limit is None else self.constraints[:limit]
        for con in cons:
            lines.append(f"  [{con.family}] {expr(con.terms)} {con.sense} {con.rhs:g}")
        lines.append("bounds")
        for v in self.variables:
            lines.append(f"  {v.lower:g} <= {v.symbol} <= {v.upper:g} ({v.kind})")
        return "\n".join(lines)


@dataclass(frozen=True)
class MatrixForm:
    c: np.ndarray
    A: sparse.csr_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: np.ndarray


class Expr:
    """Affine expression over variable indices."""

    __slots__ = ("terms", "const")

    def __init__(self, terms=None, const: float = 0.0):
        self.terms = dict(terms or {})
        self.const = const

    @staticmethod
    def of(x) -> "Expr":
        return x if isinstance(x, Expr) else Expr(const=x)

    def __add__(self, other):
        other = Expr.of(other)
        terms = dict(self.terms)
        for j, c in other.terms.items():
            terms[j] = terms.get(j, 0) + c
        return Expr(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Expr({j: -c for j, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-Expr.of(other))

    def __rsub__(self, other):
        return Expr.of(other) - self

    def __mul__(self, k):
        return Expr({j: c * k for j, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__


class _Builder:
    def __init__(self):
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective = Expr()
        self.names: dict[str, int] = {}

    def var(self, name: str, kind: str, lower: float, upper: float) -> Expr:
        if name in self.names:
            raise ModelBuildError(f"duplicate variable {name}")
        if kind == BINARY:
            lower, upper = max(lower, 0), min(upper, 1)
        self.names[name] = len(self.variables)
        self.variables.append(Variable(name, kind, float(lower), float(upper)))
        return Expr({self.names[name]: 1.0})

    def add(self, lhs, sense: str, rhs, family: str) -> None:
        e = Expr.of(lhs) - Expr.of(rhs)
        terms = tuple((j, c) for j, c in sorted(e.terms.items()) if c != 0)
        self.constraints.append(Constraint(terms, sense, -e.const, family))

    def between(self, lo, e, hi, family: str) -> None:
        self.add(e, GE, lo, family)
        self.add(e, LE, hi, family)

    def tighten(self, name: str, upper: float) -> None:
        k = self.names.get(name)
        if k is not None and upper < self.variables[k].upper:
            v = self.variables[k]
            self.variables[k] = Variable(v.name, v.kind, v.lower, max(v.lower, float(upper)))

    def spec(self, metadata: dict) -> ModelSpec:
        metadata = dict(metadata)
        metadata.setdefault("branch_priority",
                            [_branch_rank(v.name) for v in self.variables])
        obj = tuple((j, c) for j, c in sorted(self.objective.terms.items()) if c != 0)
        for _, c in obj:
            if abs(c) >= INT64_HEADROOM:
                raise ModelBuildError(f"objective coefficient {c:.6g} exceeds 64-bit headroom")
        return ModelSpec(tuple(self.variables), tuple(self.constraints), obj, self.objective.const, metadata)


# -- shared constraint blocks ------------------------------------------------

def _cutting_block(b: _Builder, s: int, dims, items, Wh, Hh, allowed, u_slots, cut_slots):
    """Assignment, usage, pre-cut, containment and non-overlap rows for one
    instant. ``dims[j]`` is ``(W, H)`` as numbers or expressions."""
    u = {j: b.var(f"u_{s}_{j}", BINARY, 0, 1) for j in u_slots}
    eta, t, r = {}, {}, {}
    for j in cut_slots:
        W, H = dims[j]
        eta[j] = b.var(f"eta_{s}_{j}", BINARY, 0, 1)
        t[j] = b.var(f"t_{s}_{j}", CONTINUOUS, 0, Hh if isinstance(H, Expr) else H)
        r[j] = b.var(f"r_{s}_{j}", CONTINUOUS, 0, Wh if isinstance(W, Expr) else W)
    v = {}
    for i, js in enumerate(allowed):
        for j in js:
            v[i, j] = b.var(f"v_{s}_{i}_{j}", BINARY, 0, 1)
    x = {i: b.var(f"x_{s}_{i}", CONTINUOUS, it.width / 2, Wh - it.width / 2) for i, it in enumerate(items)}
    y = {i: b.var(f"y_{s}_{i}", CONTINUOUS, it.height / 2, Hh - it.height / 2) for i, it in enumerate(items)}

    for i, js in enumerate(allowed):
        b.add(sum((v[i, j] for j in js), Expr()), EQ, 1, "assign")
    for (i, j), vij in v.items():
        b.add(u[j], GE, vij, "used_if_assigned")
    for j in u_slots:
        b.add(u[j], LE, sum((v[i, j] for i in range(len(items)) if (i, j) in v), Expr()), "unused_if_empty")
    for j in cut_slots:
        W, H = dims[j]
        if isinstance(H, Expr):
            b.add(t[j], LE, H, "precut_bounds")
        if isinstance(W, Expr):
            b.add(r[j], LE, W, "precut_bounds")
    for (i, j), vij in v.items():
        W, H = dims[j]
        it = items[i]
        rj = r.get(j, 0)
        tj = t.get(j, 0)
        b.add(x[i], LE, W - rj + (1 - vij) * Wh - it.width / 2, "inside_width")
        b.add(y[i], LE, H - tj + (1 - vij) * Hh - it.height / 2, "inside_height")

    pi, tau = {}, {}
    n = len(items)
    for i in range(n):
        for k in range(i + 1, n):
            common = [j for j in allowed[i] if (k, j) in v]
            if not common:
                continue
            pi[i, k] = b.var(f"pi_{s}_{i}_{k}", BINARY, 0, 1)
            tau[i, k] = b.var(f"tau_{s}_{i}_{k}", BINARY, 0, 1)
            wi, wk = items[i].width, items[k].width
            hi, hk = items[i].height, items[k].height
            p_, q_ = pi[i, k], tau[i, k]
            for j in common:
                off = (1 - v[i, j]) + (1 - v[k, j])
                b.add(x[i] - x[k], GE, (wi + wk) / 2 - Wh * (off + p_ + q_), "no_overlap")
                b.add(x[k] - x[i], GE, (wi + wk) / 2 - Wh * (off + p_ + (1 - q_)), "no_overlap")
                b.add(y[i] - y[k], GE, (hi + hk) / 2 - Hh * (off + (1 - p_) + q_), "no_overlap")
                b.add(y[k] - y[i], GE, (hi + hk) / 2 - Hh * (off + (1 - p_) + (1 - q_)), "no_overlap")
    return v, u, eta, t, r


def _spawn_rows(b: _Builder, parent, purchasable: bool, u, eta, t, r, top, right, Wh, Hh):
    """Leftover-dimension rows linking a generator to its two children.

    ``parent`` is ``(W, H)``; ``top``/``right`` are ``(W, H)`` expressions of
    the children at the next instant.
    """
    W, H = parent
    (Wt, Ht), (Wr, Hr) = top, right
    fam = "spawn_purchasable" if purchasable else "spawn_leftover"
    nu = 1 - u
    if purchasable:
        b.between(0, Ht, Hh * u, fam)
        b.between(0, Wt, Wh * u, fam)
    else:
        b.between(H - Hh * u, Ht, H + Hh * u, fam)
        b.between(W - Wh * u, Wt, W + Wh * u, fam)
    b.between(t - nu * Hh, Ht, t + nu * Hh, fam)
    b.between(W - r - (1 - eta) * Wh - nu * Wh, Wt, W - r + (1 - eta) * Wh + nu * Wh, fam)
    b.between(W - eta * Wh - nu * Wh, Wt, W + eta * Wh + nu * Wh, fam)
    b.between(0, Wr, Wh * u, fam)
    b.between(r - nu * Wh, Wr, r + nu * Wh, fam)
    b.between(0, Hr, Hh * u, fam)
    b.between(H - (1 - eta) * Hh - nu * Hh, Hr, H + (1 - eta) * Hh + nu * Hh, fam)
    b.between(H - t - eta * Hh - nu * Hh, Hr, H - t + eta * Hh + nu * Hh, fam)


def _value_block(b: _Builder, tag: str, W, H, catalogue, Wh, Hh, L):
    """Usable-area variable gamma for a leftover of dims ``(W, H)``: the bit
    expansion of W, the products omega = theta * H, and catalogue-fit flags."""
    theta = [b.var(f"theta_{tag}_{l}", BINARY, 0, 1) for l in range(L)]
    omega = [b.var(f"omega_{tag}_{l}", CONTINUOUS, 0, Hh) for l in range(L)]
    zeta = [b.var(f"zeta_{tag}_{i}", BINARY, 0, 1) for i in range(len(catalogue))]
    gamma = b.var(f"gamma_{tag}", CONTINUOUS, 0, Wh * Hh)
    for l in range(L):
        b.add(omega[l], LE, H, "area_product")
        b.add(omega[l], GE, H - (1 - theta[l]) * Hh, "area_product")
        b.add(omega[l], LE, theta[l] * Hh, "area_product")
    for i, cat in enumerate(catalogue):
        b.add(W + Wh * (1 - zeta[i]), GE, cat.width, "catalogue_fit")
        b.add(H + Hh * (1 - zeta[i]), GE, cat.height, "catalogue_fit")
    b.add(gamma, LE, sum((2 ** l * omega[l] for l in range(L)), Expr()), "usable_area")
    b.add(gamma, LE, sum(zeta, Expr()) * (Wh * Hh), "usable_area")
    b.add(W, EQ, sum((2 ** l * theta[l] for l in range(L)), Expr()), "width_bits")
    return gamma


# -- full model --------------------------------------------------------------

def build_full_model(inst: Instance) -> ModelSpec:
    """Every variable of the multi-period model, including fixed dimension
    variables for purchasable objects, so size counts are comparable with
    the reference convention."""
    layout = slot_layout(inst)
    Wh, Hh = inst.max_dims()
    L = log2_bits(Wh)
    C = inst.total_cost
    if C * C >= INT64_HEADROOM:
        raise ModelBuildError(f"objective magnitude {C * C} exceeds 64-bit headroom")
    b = _Builder()

    dims = []
    for pool in layout:
        s = pool.instant
        row = []
        for j, o in enumerate(pool.objects):
            if o.is_purchasable:
                row.append((b.var(f"Wb_{s}_{j}", CONTINUOUS, o.width, o.width),
                            b.var(f"Hb_{s}_{j}", CONTINUOUS, o.height, o.height)))
            else:
                row.append((b.var(f"Wb_{s}_{j}", CONTINUOUS, 0, Wh), b.var(f"Hb_{s}_{j}", CONTINUOUS, 0, Hh)))
        dims.append(row)

    per_instant = {}
    for k, s in enumerate(inst.instants):
        pool, nxt = layout[k], layout[k + 1]
        items = inst.items_at(s)
        slots = range(len(pool))
        allowed = [list(slots) for _ in items]
        v, u, eta, t, r = _cutting_block(b, s, dims[k], items, Wh, Hh, allowed, slots, slots)
        per_instant[s] = (v, u, eta, t, r)
        for g, j in enumerate(leftover_generator_indices(pool)):
            l1, l2 = nxt.m + 2 * g, nxt.m + 2 * g + 1
            _spawn_rows(b, dims[k][j], pool[j].is_purchasable, u[j], eta[j], t[j], r[j],
                        dims[k + 1][l1], dims[k + 1][l2], Wh, Hh)
        for j in range(pool.m):
            b.objective = b.objective + u[j] * (C * pool[j].unit_cost * pool[j].width * pool[j].height)

    last = layout[-1]
    for j in range(last.m, len(last)):
        W, H = dims[-1][j]
        gamma = _value_block(b, str(j), W, H, inst.catalogue, Wh, Hh, L)
        b.objective = b.objective - gamma * last[j].unit_cost

    _tighten_full(b, inst, layout, L)
    meta = {"kind": "full", "C": C, "W_hat": Wh, "H_hat": Hh, "L": L,
            "layout": layout, "instants": list(inst.instants)}
    return b.spec(meta)


def _tighten_value(b: _Builder, tag: str, W, H, catalogue, L: int) -> None:
    """Bounds on a value block whose leftover is at most ``W x H``."""
    for l in range(L):
        if 2 ** l > W:
            b.tighten(f"theta_{tag}_{l}", 0)
        b.tighten(f"omega_{tag}_{l}", H)
    b.tighten(f"gamma_{tag}", W * H)
    for i, cat in enumerate(catalogue):
        if cat.width > W or cat.height > H:
            b.tighten(f"zeta_{tag}_{i}", 0)


def _tighten_full(b: _Builder, inst: Instance, layout, L: int) -> None:
    """Bound reductions implied by the rows: a leftover is never larger than
    the object it was cut from, so variables tied to items or catalogue
    pieces that cannot fit a slot's largest possible size are fixed at 0.
    Variable counts are unchanged."""
    cap = {}
    for pool in layout:
        for j, o in enumerate(pool.objects):
            cap[pool.instant, j] = (o.width, o.height) if o.is_purchasable else cap[o.origin.parent]
    for pool in layout:
        s = pool.instant
        items = inst.items_at(s) if s < inst.P else ()
        possible = {}
        for j, o in enumerate(pool.objects):
            W, H = cap[s, j]
            if not o.is_purchasable:
                b.tighten(f"Wb_{s}_{j}", W)
                b.tighten(f"Hb_{s}_{j}", H)
            if s == inst.P:
                _tighten_value(b, str(j), W, H, inst.catalogue, L)
                continue
            b.tighten(f"t_{s}_{j}", H)
            b.tighten(f"r_{s}_{j}", W)
            possible[j] = {i for i, it in enumerate(items) if it.width <= W and it.height <= H}
            for i in range(len(items)):
                if i not in possible[j]:
                    b.tighten(f"v_{s}_{i}_{j}", 0)
            if not possible[j]:
                # an unused object keeps its cut variables free; pin them
                for sym in ("u", "eta", "t", "r"):
                    b.tighten(f"{sym}_{s}_{j}", 0)
        for i in range(len(items)):
            for k in range(i + 1, len(items)):
                if not any(i in ok and k in ok for ok in possible.values()):
                    b.tighten(f"pi_{s}_{i}_{k}", 0)
                    b.tighten(f"tau_{s}_{i}_{k}", 0)


# -- single-period subproblems -----------------------------------------------

@dataclass(frozen=True)
class SubproblemState:
    kappa: int
    pool: ObjectPool
    items: tuple
    catalogue: tuple
    C_kappa: int
    next_m: int  # purchasable objects available at kappa + 1

    @classmethod
    def at(cls, inst: Instance, pool: ObjectPool) -> "SubproblemState":
        k = pool.instant
        return cls(k, pool, inst.items_at(k), inst.catalogue, inst.cumulative_cost(k),
                   len(inst.objects_at(k + 1)))


def amortized_cost(c: int, W: int, H: int, used: int, d1: float, g1: float, d2: float, g2: float) -> int:
    """Object cost minus the floored estimated value of its leftovers."""
    return c * W * H * used - math.floor(c * (d1 * g1 + d2 * g2) + 1e-9)


def build_myopic_subproblem(st: SubproblemState) -> ModelSpec:
    return _build_subproblem(st, None)


def build_flook_subproblem(st: SubproblemState, delta) -> ModelSpec:
    """``delta`` maps a child key ``(kappa + 1, slot)`` to an estimated
    utilization in [0, 1]; missing keys read as 0."""
    return _build_subproblem(st, delta)


def _build_subproblem(st: SubproblemState, delta) -> ModelSpec:
    pool, items, s = st.pool, st.items, st.kappa
    Wh = max([o.width for o in pool.objects if o.width] + [1])
    Hh = max([o.height for o in pool.objects if o.height] + [1])
    Wh, Hh = int(math.ceil(Wh)), int(math.ceil(Hh))
    L = log2_bits(Wh)
    C = st.C_kappa
    b = _Builder()

    allowed = [[j for j, o in enumerate(pool.objects) if o.accommodates(it.width, it.height)] for it in items]
    targets = sorted({j for js in allowed for j in js})
    gens = leftover_generator_indices(pool)
    cut_slots = [j for j in targets if pool[j].expiration > 0]
    dims = {j: (pool[j].width, pool[j].height) for j in targets}
    v, u, eta, t, r = _cutting_block(b, s, dims, items, Wh, Hh, allowed, targets, cut_slots)

    children = {}  # child slot -> (gamma expr or None, unit cost, generator j)
    constant_value = 0.0
    for g, j in enumerate(gens):
        parent = pool[j]
        l1, l2 = st.next_m + 2 * g, st.next_m + 2 * g + 1
        if j in u:
            # children are sub-rectangles of their parent
            pw, ph = parent.width, parent.height
            top = (b.var(f"Wb_{s + 1}_{l1}", CONTINUOUS, 0, pw), b.var(f"Hb_{s + 1}_{l1}", CONTINUOUS, 0, ph))
            right = (b.var(f"Wb_{s + 1}_{l2}", CONTINUOUS, 0, pw), b.var(f"Hb_{s + 1}_{l2}", CONTINUOUS, 0, ph))
            _spawn_rows(b, (pw, ph), parent.is_purchasable, u[j], eta[j], t[j], r[j], top, right, Wh, Hh)
            for slot, (W, H) in ((l1, top), (l2, right)):
                tag = f"{s + 1}_{slot}"
                gamma = _value_block(b, tag, W, H, st.catalogue, Wh, Hh, L)
                _tighten_value(b, tag, pw, ph, st.catalogue, L)
                children[slot] = (gamma, parent.unit_cost, j)
        elif not parent.is_purchasable:
            # an idle leftover survives unchanged as its own top child
            if fits_catalogue(parent.width, parent.height, st.catalogue):
                constant_value += parent.unit_cost * parent.area

    leftover_sum = sum((gam * c for gam, c, _ in children.values()), Expr())
    b.objective = -leftover_sum - constant_value
    lam_max = 0
    for j in range(pool.m):
        if j not in u:
            continue
        o = pool[j]
        b.objective = b.objective + u[j] * (C * o.unit_cost * o.width * o.height)
        if delta is None or j not in gens:
            continue
        g = gens.index(j)
        keys = [(s + 1, st.next_m + 2 * g), (s + 1, st.next_m + 2 * g + 1)]
        ds = [float(delta.get(k, 0.0)) for k in keys]
        if any(not 0 <= d <= 1 for d in ds):
            raise ModelBuildError(f"utilization estimate outside [0, 1] for object {j} at instant {s}: {ds}")
        if not any(ds):
            continue
        cap = math.floor(o.unit_cost * sum(ds) * o.width * o.height + 1e-9)
        lam = b.var(f"lambda_{s}_{j}", INTEGER, 0, cap)
        rhs = sum((children[k[1]][0] * (o.unit_cost * d) for k, d in zip(keys, ds)), Expr())
        b.add(lam, LE, rhs, "amortization")
        b.objective = b.objective - lam * C
        lam_max += cap

    # scale check: one unit of cost must outweigh every attainable leftover
    attainable = constant_value + sum(
        pool[j].unit_cost * (pool[j].area - min(it.width * it.height for i, it in enumerate(items) if j in allowed[i]))
        for j in cut_slots)
    if items and C <= attainable:
        raise ModelBuildError(f"scale constant {C} does not dominate attainable leftover value {attainable}")
    if C * (sum(o.unit_cost * o.area for o in pool.objects[:pool.m]) + lam_max) >= INT64_HEADROOM:
        raise ModelBuildError("objective magnitude exceeds 64-bit headroom")

    meta = {"kind": "flook" if delta is not None else "myopic", "C": C, "W_hat": Wh, "H_hat": Hh, "L": L,
            "kappa": s, "targets": targets, "cut_slots": cut_slots, "allowed": allowed,
            "children": {slot: (cst, j) for slot, (_, cst, j) in children.items()},
            "constant_value": constant_value}
    return b.spec(meta)


# -- reading decisions back ----------------------------------------------------

def _snap_cut(value: float) -> float:
    near = round(value)
    return float(near) if abs(value - near) <= 1e-6 else float(math.floor(value))


def _snap_center(value: float) -> float:
    near = round(value * 2) / 2
    return near if abs(value - near) <= 1e-5 else value


def extract_decision(ms: ModelSpec, x, s: int, n_items: int, slots) -> PeriodDecision:
    """Decision at instant ``s`` from an assignment of a model containing the
    variables of that instant. ``slots`` lists the candidate object indices."""
    idx = ms.index
    dec = PeriodDecision(s)
    for i in range(n_items):
        chosen = [j for j in slots if f"v_{s}_{i}_{j}" in idx and x[idx[f"v_{s}_{i}_{j}"]] > 0.5]
        if len(chosen) != 1:
            raise ValueError(f"item {i} at instant {s} assigned to {len(chosen)} objects")
        dec.placements.append(Placement(i, chosen[0], _snap_center(x[idx[f"x_{s}_{i}"]]),
                                        _snap_center(x[idx[f"y_{s}_{i}"]])))
    for j in sorted(dec.used):
        if f"eta_{s}_{j}" in idx:
            dec.cuts[j] = ObjectCut(int(round(x[idx[f"eta_{s}_{j}"]])), _snap_cut(x[idx[f"t_{s}_{j}"]]),
                                    _snap_cut(x[idx[f"r_{s}_{j}"]]))
        else:
            dec.cuts[j] = ObjectCut(1, 0.0, 0.0)
    return dec


def subproblem_decision(ms: ModelSpec, x) -> PeriodDecision:
    meta = ms.metadata
    return extract_decision(ms, x, meta["kappa"], len(meta["allowed"]), meta["targets"])


def full_model_decisions(ms: ModelSpec, inst: Instance, x) -> list[PeriodDecision]:
    layout = ms.metadata["layout"]
    return [extract_decision(ms, x, s, len(inst.items_at(s)), range(len(layout[k])))
            for k, s in enumerate(inst.instants)]


def evaluate_full_objective(inst: Instance, cost: float, leftover_value: float) -> float:
    """Full-model objective for a plan with the given totals."""
    return inst.total_cost * cost - leftover_value

