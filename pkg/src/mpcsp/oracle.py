"""Ground truth at toy scale: exhaustive exact solvers over integer
coordinates and an independent plan validator.

Within one instant the objective separates by object once the items are
partitioned, so the single-period solver is a dynamic program over item
subsets; each (object, subset) term is minimized over every integer
pre-cut pair ``(t, r)`` and both cut orders. The multi-period solver
recurses over instants, enumerating per object only the Pareto-maximal
pairs of leftover dimensions (a componentwise larger leftover can mimic
every later use of a smaller one).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

from .genealogy import (ObjectPool, ObjectState, children_dims, initial_pool, leftover_generator_indices,
                        leftover_value, purchasable_pool, spawn_pool)
from .instance import Instance, fits_catalogue
from .plan import ObjectCut, PeriodDecision, Placement, Plan
from .packing import FrontierPoint, normal_sums, packing_frontier


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_items: int = 6
    max_objects: int = 8  # objects with positive dimensions
    max_dim: int = 30
    max_periods: int = 3


@dataclass(frozen=True)
class CutOption:
    eta: int
    t: int
    r: int
    point: FrontierPoint
    top: tuple[int, int]
    right: tuple[int, int]


# -- per-object enumeration ---------------------------------------------------

def _value(w, h, c, catalogue) -> int:
    if w <= 0 or h <= 0 or not fits_catalogue(w, h, catalogue):
        return 0
    return int(c * w * h)


def _grid(dim: int, sums, cat_dims, mode: str, later=()) -> list[int]:
    """Candidate pre-cut values. ``sums`` are subset sums of the item
    dimensions packed now; ``later`` lists item dimensions of later instants,
    which a leftover may be sized to hold."""
    if mode == "full":
        return list(range(dim + 1))
    later_sums = normal_sums(later, dim)
    vals = {0, dim}
    vals |= {dim - s for s in sums}
    vals |= {dim - s for s in normal_sums(list(later) + _parts(sums), dim)}
    vals |= set(later_sums)
    vals |= {c for c in cat_dims} | {dim - c for c in cat_dims}
    return sorted(v for v in vals if 0 <= v <= dim)


def _parts(sums) -> list[int]:
    """Generators of a subset-sum set (its positive members suffice)."""
    return [s for s in sums if s > 0]


@lru_cache(maxsize=100_000)
def cut_options(W: int, H: int, rects: tuple, generator: bool, catalogue: tuple, grid: str = "full",
                pareto: bool = False, later: tuple = ((), ())) -> tuple[CutOption, ...]:
    """Feasible pre-cut choices for packing ``rects`` into a ``W x H``
    object. Non-generators get a single option with no pre-cuts. With
    ``pareto`` only choices with maximal leftover pairs are kept. ``later``
    holds the widths and heights of items ordered at later instants."""
    frontier = [p for p in packing_frontier(rects, W, H) if p.a <= W and p.b <= H]
    if not frontier:
        return ()
    if not generator:
        return (CutOption(1, 0, 0, frontier[0], (0, 0), (0, 0)),)
    ts = _grid(H, normal_sums([h for _, h in rects], H), [c.height for c in catalogue], grid, later[1])
    rs = _grid(W, normal_sums([w for w, _ in rects], W), [c.width for c in catalogue], grid, later[0])
    opts = []
    for t in ts:
        for r in rs:
            point = next((p for p in frontier if p.a <= W - r and p.b <= H - t), None)
            if point is None:
                continue
            for eta in (1, 0):
                (tw, th), (rw, rh) = children_dims(W, H, ObjectCut(eta, t, r))
                opts.append(CutOption(eta, t, r, point, _norm(tw, th), _norm(rw, rh)))
    if pareto:
        opts = _pareto(opts)
    return tuple(opts)


def _norm(w, h):
    return (0, 0) if w <= 0 or h <= 0 else (int(w), int(h))


def _pareto(opts):
    def geq(a, b):
        return a.top[0] >= b.top[0] and a.top[1] >= b.top[1] and a.right[0] >= b.right[0] and a.right[1] >= b.right[1]
    unique = {}
    for o in opts:
        unique.setdefault((o.top, o.right), o)
    items = list(unique.values())
    return [o for o in items if not any(p is not o and geq(p, o) for p in items)]


# -- single period ------------------------------------------------------------

def _check_period(pool: ObjectPool, items, limits: OracleLimits) -> None:
    live = [o for o in pool.objects if not o.is_empty]
    if len(items) > limits.max_items:
        raise OracleLimitError(f"{len(items)} items exceed the limit {limits.max_items}")
    if len(live) > limits.max_objects:
        raise OracleLimitError(f"{len(live)} objects exceed the limit {limits.max_objects}")
    dims = [o.width for o in live] + [o.height for o in live]
    if dims and max(dims) > limits.max_dim:
        raise OracleLimitError(f"dimension {max(dims)} exceeds the limit {limits.max_dim}")


def _subsets_fitting(obj: ObjectState, items) -> list[int]:
    """Bitmasks of item subsets whose members each fit ``obj``."""
    ok = [i for i, it in enumerate(items) if obj.accommodates(it.width, it.height)]
    masks = []
    for k in range(1, len(ok) + 1):
        for combo in itertools.combinations(ok, k):
            masks.append(sum(1 << i for i in combo))
    return masks


def _rects(items, mask):
    idx = [i for i in range(len(items)) if mask >> i & 1]
    return idx, tuple((items[i].width, items[i].height) for i in idx)


def _sorted_rects(items, mask):
    idx, rects = _rects(items, mask)
    order = sorted(range(len(idx)), key=lambda k: rects[k])
    return [idx[k] for k in order], tuple(rects[k] for k in order)


def _placements(j: int, idx, point: FrontierPoint, items) -> list[Placement]:
    out = []
    for i, (x, y) in zip(idx, point.positions):
        out.append(Placement(i, j, x + items[i].width / 2, y + items[i].height / 2))
    return out


@lru_cache(maxsize=500_000)
def _best_term(W, H, c, purchasable, generator, rects, ds, C, catalogue, grid):
    """Least single-period term of one used object over all pre-cut choices."""
    best = None
    fixed = C * c * W * H if purchasable else 0
    for opt in cut_options(W, H, rects, generator, catalogue, grid):
        v1 = _value(*opt.top, c, catalogue)
        v2 = _value(*opt.right, c, catalogue)
        lam = math.floor(ds[0] * v1 + ds[1] * v2 + 1e-9) if ds[0] or ds[1] else 0
        term = fixed - C * lam - v1 - v2
        if best is None or term < best[0]:
            best = (term, opt)
    return best


def period_objective_terms(pool: ObjectPool, items, catalogue, C: int, delta=None, next_m: int = 0,
                           grid: str = "full"):
    """For each object: unused term and ``{mask: (term, option, item order)}``
    for used subsets, under the single-period objective."""
    rank = {j: g for g, j in enumerate(leftover_generator_indices(pool))}
    catalogue = tuple(catalogue)
    s = pool.instant
    per_obj = []
    for j, o in enumerate(pool.objects):
        if o.is_empty:
            per_obj.append((0, {}))
            continue
        unused = 0
        if not o.is_purchasable and o.expiration > 0:
            unused = -_value(o.width, o.height, o.unit_cost, catalogue)
        used = {}
        gen = o.expiration > 0
        ds = (0.0, 0.0)
        if delta is not None and o.is_purchasable and gen:
            g = rank[j]
            ds = (float(delta.get((s + 1, next_m + 2 * g), 0.0)), float(delta.get((s + 1, next_m + 2 * g + 1), 0.0)))
        for mask in _subsets_fitting(o, items):
            idx, rects = _sorted_rects(items, mask)
            best = _best_term(int(o.width), int(o.height), o.unit_cost, o.is_purchasable, gen, rects, ds, C,
                              catalogue, grid)
            if best is not None:
                used[mask] = (best[0], best[1], idx)
        per_obj.append((unused, used))
    return per_obj


def exact_single_period(pool: ObjectPool, items, catalogue, C: int, limits: OracleLimits = OracleLimits(),
                        delta=None, next_m: int = 0, grid: str = "full"):
    """Optimal decision and objective value of the single-period problem at
    ``pool.instant``. Returns ``(None, inf)`` if the items cannot all be cut."""
    _check_period(pool, items, limits)
    n = len(items)
    full = (1 << n) - 1
    terms = period_objective_terms(pool, items, catalogue, C, delta, next_m, grid)
    INF = math.inf
    dp = {0: (0, [])}
    for j, (unused, used) in enumerate(terms):
        nxt = {}
        for mask, (val, picks) in dp.items():
            cand = (val + unused, picks)
            if mask not in nxt or cand[0] < nxt[mask][0]:
                nxt[mask] = cand
            free = full & ~mask
            for sub, (term, opt, idx) in used.items():
                if sub & mask or (sub & free) != sub:
                    continue
                m2 = mask | sub
                cand = (val + term, picks + [(j, opt, idx)])
                if m2 not in nxt or cand[0] < nxt[m2][0]:
                    nxt[m2] = cand
        dp = nxt
    if full not in dp:
        return None, INF
    value, picks = dp[full]
    dec = PeriodDecision(pool.instant)
    for j, opt, idx in picks:
        dec.cuts[j] = ObjectCut(opt.eta, float(opt.t), float(opt.r))
        dec.placements += _placements(j, idx, opt.point, items)
    dec.placements.sort(key=lambda p: p.item)
    return dec, value


def exact_subproblem(inst: Instance, pool: ObjectPool, limits: OracleLimits = OracleLimits(), delta=None,
                     grid: str = "full"):
    s = pool.instant
    return exact_single_period(pool, inst.items_at(s), inst.catalogue, inst.cumulative_cost(s), limits, delta,
                               len(inst.objects_at(s + 1)), grid)


# -- multi period -------------------------------------------------------------

class _Choice:
    """Cuts of one candidate decision, enough to spawn the next pool."""

    __slots__ = ("cuts", "picks", "used")

    def __init__(self, picks):
        self.picks = picks
        self.cuts = {j: ObjectCut(opt.eta, float(opt.t), float(opt.r)) for j, opt, _ in picks}
        self.used = set(self.cuts)

    def decision(self, instant: int, items) -> PeriodDecision:
        dec = PeriodDecision(instant, dict(self.cuts))
        for j, opt, sidx in self.picks:
            dec.placements += _placements(j, sidx, opt.point, items)
        dec.placements.sort(key=lambda p: p.item)
        return dec


def _period_options(pool: ObjectPool, items, catalogue, grid, later=((), ())):
    """Every decision at one instant that keeps Pareto-maximal leftovers per
    object. Yields ``(choice, purchase cost)``."""
    catalogue = tuple(catalogue)
    live = [j for j, o in enumerate(pool.objects) if not o.is_empty]
    choices = [[j for j in live if pool[j].accommodates(it.width, it.height)] for it in items]
    for assign in itertools.product(*choices):
        groups = {}
        for i, j in enumerate(assign):
            groups.setdefault(j, []).append(i)
        per_obj = []
        for j, idx in groups.items():
            o = pool[j]
            mask = sum(1 << i for i in idx)
            sidx, rects = _sorted_rects(items, mask)
            opts = cut_options(int(o.width), int(o.height), rects, o.expiration > 0, catalogue, grid, True, later)
            if not opts:
                break
            per_obj.append([(j, opt, sidx) for opt in opts])
        else:
            cost = sum(pool[j].unit_cost * pool[j].area for j in groups if pool[j].is_purchasable)
            for combo in itertools.product(*per_obj):
                yield _Choice(combo), cost


def _pool_key(inst: Instance, pool: ObjectPool):
    """Memo key: the multiset of objects that can still matter (fit a later
    item within their validity, or survive to the end with value)."""
    s = pool.instant
    key = []
    for o in pool.objects:
        if o.is_empty:
            continue
        if not o.is_purchasable:
            last = min(inst.P - 1, s + o.expiration)
            usable_later = any(o.accommodates(it.width, it.height)
                               for k in range(s, last + 1) for it in inst.items_at(k))
            survives = s + o.expiration >= inst.P and fits_catalogue(o.width, o.height, inst.catalogue)
            if not (usable_later or survives):
                continue
        key.append((o.width, o.height, o.expiration, o.unit_cost, o.is_purchasable))
    return s, tuple(sorted(key))


def exact_multi_period(inst: Instance, limits: OracleLimits = OracleLimits(), grid: str = "full") -> Plan | None:
    """Optimal plan under (minimum purchase cost, maximum final leftover
    value), or ``None`` if the instance is infeasible."""
    if inst.periods > limits.max_periods:
        raise OracleLimitError(f"{inst.periods} periods exceed the limit {limits.max_periods}")
    C = inst.total_cost + 1
    INF = (math.inf, 0)
    memo = {}

    def nxt_purch(s):
        return purchasable_pool(inst, s + 1) if s + 1 < inst.P else []

    def later(s):
        its = [it for k in range(s + 1, inst.P) for it in inst.items_at(k)]
        return tuple(sorted(it.width for it in its)), tuple(sorted(it.height for it in its))

    def last_period(pool):
        dec, val = exact_single_period(pool, inst.items_at(pool.instant), inst.catalogue, C, limits, grid=grid)
        if dec is None:
            return INF, None
        cost = -(-val // C)  # val = C * cost - value with 0 <= value < C
        return (cost, val - C * cost), dec

    def solve(pool: ObjectPool):
        """Best (cost, -final value) from ``pool.instant`` onward."""
        key = _pool_key(inst, pool)
        if key in memo:
            return memo[key]
        s = pool.instant
        _check_period(pool, inst.items_at(s), limits)
        if s == inst.P - 1:
            best = last_period(pool)[0]
        else:
            best = INF
            for choice, cost in _period_options(pool, inst.items_at(s), inst.catalogue, grid, later(s)):
                if cost > best[0]:
                    continue
                fc, fv = solve(spawn_pool(pool, choice, nxt_purch(s)))
                if (cost + fc, fv) < best:
                    best = (cost + fc, fv)
        memo[key] = best
        return best

    pool = initial_pool(inst)
    target = solve(pool)
    if target == INF:
        return None
    decisions = []
    for s in inst.instants:
        items = inst.items_at(s)
        if s == inst.P - 1:
            decisions.append(last_period(pool)[1])
            break
        for choice, cost in _period_options(pool, items, inst.catalogue, grid, later(s)):
            if cost > target[0]:
                continue
            child = spawn_pool(pool, choice, nxt_purch(s))
            fc, fv = solve(child)
            if (cost + fc, fv) == target:
                decisions.append(choice.decision(s, items))
                target = (fc, fv)
                pool = child
                break
    return assemble_plan(inst, decisions, method="oracle")


def assemble_plan(inst: Instance, decisions, method: str = "") -> Plan:
    """Replay decisions from the initial pool and total them up."""
    pools = [initial_pool(inst)]
    cost = 0
    for dec in decisions:
        pool = pools[-1]
        cost += sum(pool[j].unit_cost * pool[j].area for j in dec.used if pool[j].is_purchasable)
        s = pool.instant
        pools.append(spawn_pool(pool, dec, purchasable_pool(inst, s + 1) if s + 1 < inst.P else []))
    value = leftover_value(pools[-1], inst.catalogue)
    value = int(value) if float(value).is_integer() else value
    return Plan(list(decisions), pools, int(cost), value, inst.total_cost * int(cost) - value, method)


# -- validation ---------------------------------------------------------------

OVERLAP, OUT_OF_AREA, BAD_LEFTOVER = "overlap", "out_of_cutting_area", "bad_leftover_geometry"
UNASSIGNED, DOUBLE, EXPIRED, VALUE_MISMATCH = "unassigned_item", "double_assignment", "expired_object_used", \
    "value_mismatch"


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at {self.location}: {self.detail}"


def validate_plan(inst: Instance, plan: Plan, tol: float = 1e-6) -> list[Violation]:
    """Replay ``plan`` independently and report every broken rule."""
    out: list[Violation] = []
    if len(plan.decisions) != inst.periods:
        out.append(Violation(UNASSIGNED, (), f"plan has {len(plan.decisions)} decisions for {inst.periods} instants"))
        return out
    pool = initial_pool(inst)
    cost = 0
    for k, s in enumerate(inst.instants):
        dec = plan.decisions[k]
        items = inst.items_at(s)
        counts = [0] * len(items)
        for pl in dec.placements:
            if not 0 <= pl.item < len(items):
                out.append(Violation(UNASSIGNED, (s, pl.item), "placement refers to an unknown item"))
                continue
            counts[pl.item] += 1
        for i, c in enumerate(counts):
            if c == 0:
                out.append(Violation(UNASSIGNED, (s, i), "item is not cut"))
            elif c > 1:
                out.append(Violation(DOUBLE, (s, i), f"item is cut {c} times"))
        good = True
        for j in sorted(dec.used):
            if not 0 <= j < len(pool) or pool[j].is_empty:
                out.append(Violation(EXPIRED, (s, j), "object does not exist at this instant"))
                good = False
                continue
            o = pool[j]
            cut = dec.cuts.get(j)
            if cut is None or cut.eta not in (0, 1) or not (-tol <= cut.top <= o.height + tol) \
                    or not (-tol <= cut.right <= o.width + tol):
                out.append(Violation(BAD_LEFTOVER, (s, j), f"invalid pre-cuts {cut}"))
                good = False
                continue
            if o.is_purchasable:
                cost += o.unit_cost * o.area
            aw, ah = o.width - cut.right, o.height - cut.top
            rects = []
            for pl in dec.items_on(j):
                if not 0 <= pl.item < len(items):
                    continue
                it = items[pl.item]
                x0, y0 = pl.x - it.width / 2, pl.y - it.height / 2
                if x0 < -tol or y0 < -tol or x0 + it.width > aw + tol or y0 + it.height > ah + tol:
                    out.append(Violation(OUT_OF_AREA, (s, pl.item, j),
                                         f"item at ({x0:g},{y0:g}) leaves the {aw:g}x{ah:g} cutting area"))
                rects.append((pl.item, x0, y0, it.width, it.height))
            for (i1, x1, y1, w1, h1), (i2, x2, y2, w2, h2) in itertools.combinations(rects, 2):
                ox = min(x1 + w1, x2 + w2) - max(x1, x2)
                oy = min(y1 + h1, y2 + h2) - max(y1, y2)
                if ox > tol and oy > tol:
                    out.append(Violation(OVERLAP, (s, i1, i2, j), f"overlap {ox:g}x{oy:g}"))
        if not good:
            return out
        nxt = spawn_pool(pool, dec, purchasable_pool(inst, s + 1) if s + 1 < inst.P else [])
        if k + 1 < len(plan.pools):
            claimed = plan.pools[k + 1]
            if len(claimed) != len(nxt):
                out.append(Violation(BAD_LEFTOVER, (s + 1,), f"pool has {len(claimed)} slots, expected {len(nxt)}"))
            else:
                for j, (a, b) in enumerate(zip(claimed.objects, nxt.objects)):
                    if abs((a.width or 0) - (b.width or 0)) > tol or abs((a.height or 0) - (b.height or 0)) > tol \
                            or a.expiration != b.expiration:
                        out.append(Violation(BAD_LEFTOVER, (s + 1, j),
                                             f"slot is {a.width}x{a.height}, cuts give {b.width}x{b.height}"))
        pool = nxt
    value = leftover_value(pool, inst.catalogue)
    if abs(cost - plan.cost) > tol:
        out.append(Violation(VALUE_MISMATCH, ("cost",), f"plan reports {plan.cost}, recomputed {cost}"))
    if abs(value - plan.leftover_value) > tol:
        out.append(Violation(VALUE_MISMATCH, ("leftover",), f"plan reports {plan.leftover_value}, recomputed {value}"))
    return out
