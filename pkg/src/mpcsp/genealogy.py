"""The evolving object pool: slot layout, expiration dates, leftover
spawning, first-order ancestry and used-area accounting.

Indices are 0-based throughout. At instant ``s + 1`` the first ``m_{s+1}``
slots hold purchasable objects; slots ``m_{s+1} + 2k`` and
``m_{s+1} + 2k + 1`` hold the top and right-hand-side leftovers of the
``k``-th object that generates leftovers at instant ``s`` (objects with a
positive expiration date, in index order). Zero-size slots are kept so the
index arithmetic stays aligned.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

from .instance import Instance, fits_catalogue
from .plan import PeriodDecision

PURCHASABLE, TOP, RIGHT = "purchasable", "top", "right"

Key = tuple[int, int]  # (instant, slot)


@dataclass(frozen=True)
class Origin:
    kind: str  # PURCHASABLE, TOP or RIGHT
    parent: Key | None = None


@dataclass(frozen=True)
class ObjectState:
    """One slot of the pool. ``width``/``height`` are ``None`` in a static
    layout where leftover dimensions are still decision variables."""

    width: float | None
    height: float | None
    unit_cost: int
    expiration: int
    origin: Origin
    ancestor: Key | None = None

    @property
    def is_purchasable(self) -> bool:
        return self.origin.kind == PURCHASABLE

    @property
    def area(self) -> float:
        return (self.width or 0) * (self.height or 0)

    @property
    def is_empty(self) -> bool:
        return not self.width or not self.height

    def value(self, catalogue) -> float:
        """Unit cost times area when a catalogue item fits, else 0."""
        if self.is_empty or not fits_catalogue(self.width, self.height, catalogue):
            return 0
        return self.unit_cost * self.area

    def accommodates(self, w: float, h: float) -> bool:
        return not self.is_empty and w <= self.width + 1e-9 and h <= self.height + 1e-9


@dataclass(frozen=True)
class ObjectPool:
    instant: int
    objects: tuple[ObjectState, ...]
    m: int  # number of purchasable objects (the first m slots)

    def __len__(self) -> int:
        return len(self.objects)

    def __getitem__(self, j: int) -> ObjectState:
        return self.objects[j]


def object_counts(m, p: int, P: int, xi: int) -> tuple[list[int], list[int]]:
    """Closed-form pool sizes.

    Returns ``(m_hat, m_bar)`` where ``m_hat[s - p]`` (s = p .. P-1) counts the
    objects generating leftovers during ``[s, s+1)`` and ``m_bar[s - p]``
    (s = p .. P) counts all objects at instant ``s``.
    """
    m = list(m)
    if len(m) != P - p:
        raise ValueError(f"need {P - p} purchasable counts, got {len(m)}")
    if not 0 <= xi <= P - p:
        raise ValueError(f"xi out of range [0, {P - p}]: {xi}")
    m_full = m + [0]  # m_P = 0
    m_hat = []
    for s in range(p, P):
        top = min(s - p, xi - 1)
        m_hat.append(sum(2 ** ell * m_full[s - ell - p] for ell in range(top + 1)))
    m_bar = [m_full[s - p] + 2 * (m_hat[s - p - 1] if s > p else 0) for s in range(p, P + 1)]
    return m_hat, m_bar


def leftover_generator_indices(pool: ObjectPool) -> list[int]:
    """Indices of objects with a positive expiration date, ascending."""
    return [j for j, obj in enumerate(pool.objects) if obj.expiration > 0]


def purchasable_pool(inst: Instance, s: int) -> list[ObjectState]:
    return [ObjectState(o.width, o.height, o.unit_cost, inst.xi, Origin(PURCHASABLE))
            for o in inst.objects_at(s)]


def initial_pool(inst: Instance) -> ObjectPool:
    return ObjectPool(inst.p, tuple(purchasable_pool(inst, inst.p)), len(inst.objects_at(inst.p)))


def children_dims(W: float, H: float, cut) -> tuple[tuple[float, float], tuple[float, float]]:
    """((top w, top h), (right w, right h)) produced by pre-cuts ``cut``."""
    t, r = cut.top, cut.right
    if cut.eta == 1:
        return (W - r, t), (r, H)
    return (W, t), (r, H - t)


def _child(parent: ObjectState, parent_key: Key, key: Key, kind: str, w, h) -> ObjectState:
    ancestor = key if parent.is_purchasable else parent.ancestor
    return ObjectState(w, h, parent.unit_cost, parent.expiration - 1, Origin(kind, parent_key), ancestor)


def spawn_pool(pool: ObjectPool, dec: PeriodDecision | None, next_purchasables: list[ObjectState]) -> ObjectPool:
    """Pool at instant ``pool.instant + 1`` given the decision taken at
    ``pool.instant``. ``dec=None`` means nothing is cut."""
    s = pool.instant
    used = dec.used if dec is not None else set()
    for j in used:
        if not 0 <= j < len(pool):
            raise IndexError(f"decision at instant {s} references object {j}, pool has {len(pool)}")
    objects = list(next_purchasables)
    m_next = len(objects)
    for k, j in enumerate(leftover_generator_indices(pool)):
        parent = pool[j]
        top_key, right_key = (s + 1, m_next + 2 * k), (s + 1, m_next + 2 * k + 1)
        if j in used:
            (tw, th), (rw, rh) = children_dims(parent.width, parent.height, dec.cuts[j])
        elif parent.is_purchasable:
            (tw, th), (rw, rh) = (0, 0), (0, 0)
        else:
            (tw, th), (rw, rh) = (parent.width, parent.height), (0, 0)
        objects.append(_child(parent, (s, j), top_key, TOP, tw, th))
        objects.append(_child(parent, (s, j), right_key, RIGHT, rw, rh))
    return ObjectPool(s + 1, tuple(objects), m_next)


def slot_layout(inst: Instance) -> list[ObjectPool]:
    """Static pools for instants p .. P: expirations, unit costs and ancestry
    are fixed by the instance; leftover dimensions are left as ``None``."""
    pools = [initial_pool(inst)]
    for s in inst.instants:
        pool = pools[-1]
        nxt = purchasable_pool(inst, s + 1) if s + 1 < inst.P else []
        objects = list(nxt)
        for k, j in enumerate(leftover_generator_indices(pool)):
            parent = pool[j]
            for side, kind in ((0, TOP), (1, RIGHT)):
                key = (s + 1, len(nxt) + 2 * k + side)
                objects.append(_child(parent, (s, j), key, kind, None, None))
        pools.append(ObjectPool(s + 1, tuple(objects), len(nxt)))
    return pools


def first_order_keys(pool_next: ObjectPool) -> list[Key]:
    """Keys of first-order leftovers (children of purchasable objects)."""
    return [(pool_next.instant, j) for j, o in enumerate(pool_next.objects)
            if not o.is_purchasable and o.ancestor == (pool_next.instant, j)]


def leftover_value(pool: ObjectPool, catalogue) -> float:
    return sum(o.value(catalogue) for o in pool.objects if not o.is_purchasable)


# -- used-area accounting ----------------------------------------------------

class GenealogyError(RuntimeError):
    pass


@dataclass
class UsageTracker:
    """Used area ``a`` and realized usable area ``A`` per first-order leftover."""

    used: dict[Key, int] = field(default_factory=dict)
    realized: dict[Key, float] = field(default_factory=dict)

    def register(self, key: Key, realized_area: float) -> None:
        self.used.setdefault(key, 0)
        self.realized[key] = realized_area

    def register_children(self, pool_next: ObjectPool, catalogue) -> None:
        """Record ``A`` (area if usable, else 0) for every first-order leftover
        of ``pool_next``."""
        for key in first_order_keys(pool_next):
            obj = pool_next[key[1]]
            self.register(key, obj.area if obj.value(catalogue) > 0 else 0)


def record_item_usage(tracker: UsageTracker, pool: ObjectPool, item, j: int) -> UsageTracker:
    obj = pool[j]
    if obj.is_purchasable:
        return tracker
    key = obj.ancestor
    if key is None or key not in tracker.used:
        raise GenealogyError(f"ancestor {key} of object {j} at instant {pool.instant} is not tracked")
    tracker.used[key] += item.width * item.height
    return tracker


def utilization_fractions(tracker: UsageTracker) -> dict[Key, float]:
    return {k: tracker.used.get(k, 0) / A for k, A in tracker.realized.items() if A > 0}


def dump_genealogy(pools: list[ObjectPool], catalogue=()) -> str:
    """Text tree of pools: one line per non-empty slot, indented by instant."""
    lines = []
    for pool in pools:
        lines.append(f"instant {pool.instant}: {len(pool)} slots ({pool.m} purchasable)")
        for j, o in enumerate(pool.objects):
            if o.width is not None and o.is_empty:
                continue
            dims = "?x?" if o.width is None else f"{_fmt(o.width)}x{_fmt(o.height)}"
            origin = o.origin.kind if o.origin.parent is None else f"{o.origin.kind} of {o.origin.parent}"
            anc = "" if o.ancestor is None else f" ancestor={o.ancestor}"
            val = ""
            if catalogue and o.width is not None and not o.is_purchasable:
                val = f" value={_fmt(o.value(catalogue))}"
            lines.append(f"  [{j}] {dims} c={o.unit_cost} e={o.expiration} {origin}{anc}{val}")
    return "\n".join(lines)


def _fmt(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


def replace_dims(obj: ObjectState, w, h) -> ObjectState:
    return replace(obj, width=w, height=h)


def log2_bits(max_width: int) -> int:
    """Bits needed to encode any integer width in [0, max_width]."""
    return int(math.floor(math.log2(max_width))) + 1 if max_width >= 1 else 1
