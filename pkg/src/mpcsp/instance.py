"""Problem instances: data types, the text file format, validation and a
seeded random generator.

Instance file format (UTF-8, line oriented, ``#`` starts a comment)::

    P <int> XI <int> D <int>
    CAT <w> <h>                 # D lines
    PERIOD <s> M <m_s> N <n_s>  # one block per instant s = p .. P-1
    OBJ <W> <H> <c>             # m_s lines
    ITEM <w> <h>                # n_s lines

The first ``PERIOD`` index is the first instant ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

logger = logging.getLogger(__name__)


class InstanceParseError(ValueError):
    """Raised for malformed instance files; carries the offending line."""

    def __init__(self, message: str, line: int | None = None, field_name: str | None = None):
        self.line = line
        self.field_name = field_name
        where = f"line {line}" if line is not None else "end of input"
        if field_name:
            where += f", field {field_name}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class PurchasableObject:
    width: int
    height: int
    unit_cost: int = 1

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def cost(self) -> int:
        return self.unit_cost * self.width * self.height


@dataclass(frozen=True)
class OrderedItem:
    width: int
    height: int

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class CatalogueItem:
    width: int
    height: int


@dataclass(frozen=True)
class Instance:
    """Immutable problem data.

    ``purchasable[k]`` and ``orders[k]`` belong to instant ``p + k``; there are
    ``P - p`` of each. No purchasable objects exist at instant ``P``.
    """

    p: int
    P: int
    xi: int
    purchasable: tuple[tuple[PurchasableObject, ...], ...]
    orders: tuple[tuple[OrderedItem, ...], ...]
    catalogue: tuple[CatalogueItem, ...]
    name: str = field(default="", compare=False)

    @property
    def periods(self) -> int:
        return self.P - self.p

    @property
    def instants(self) -> range:
        """Decision instants p .. P-1."""
        return range(self.p, self.P)

    @property
    def m(self) -> list[int]:
        return [len(objs) for objs in self.purchasable]

    @property
    def n(self) -> list[int]:
        return [len(items) for items in self.orders]

    @property
    def d(self) -> int:
        return len(self.catalogue)

    def objects_at(self, s: int) -> tuple[PurchasableObject, ...]:
        if s == self.P:
            return ()
        return self.purchasable[s - self.p]

    def items_at(self, s: int) -> tuple[OrderedItem, ...]:
        return self.orders[s - self.p]

    def cumulative_cost(self, kappa: int) -> int:
        """Total cost of every purchasable object at instants p .. kappa."""
        return sum(o.cost for s in range(self.p, kappa + 1) for o in self.objects_at(s))

    @property
    def total_cost(self) -> int:
        return self.cumulative_cost(self.P - 1)

    def max_dims(self, upto: int | None = None) -> tuple[int, int]:
        """Largest purchasable width and height over instants p .. upto."""
        last = self.P - 1 if upto is None else upto
        objs = [o for s in range(self.p, last + 1) for o in self.objects_at(s)]
        if not objs:
            return 0, 0
        return max(o.width for o in objs), max(o.height for o in objs)

    def with_xi(self, xi: int) -> "Instance":
        return Instance(self.p, self.P, xi, self.purchasable, self.orders, self.catalogue, self.name)

    def with_objects(self, s: int, objects) -> "Instance":
        purch = list(self.purchasable)
        purch[s - self.p] = tuple(objects)
        return Instance(self.p, self.P, self.xi, tuple(purch), self.orders, self.catalogue, self.name)


def fits_catalogue(width: float, height: float, catalogue) -> bool:
    """True if at least one catalogue item fits (fixed orientation)."""
    return any(c.width <= width + 1e-9 and c.height <= height + 1e-9 for c in catalogue)


# -- parsing -----------------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _ints(tokens: list[str], lineno: int, names: list[str]) -> list[int]:
    if len(tokens) != len(names):
        raise InstanceParseError(
            f"expected {len(names)} values ({' '.join(names)}), got {len(tokens)}", lineno)
    out = []
    for tok, name in zip(tokens, names):
        try:
            out.append(int(tok))
        except ValueError:
            raise InstanceParseError(f"not an integer: {tok!r}", lineno, name) from None
    return out


def _positive(value: int, lineno: int, name: str) -> int:
    if value < 1:
        raise InstanceParseError(f"must be a positive integer, got {value}", lineno, name)
    return value


def parse_instance(text: str, name: str = "") -> Instance:
    lines = [(k + 1, _strip(raw)) for k, raw in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln]
    pos = 0

    def take(keyword: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise InstanceParseError(f"expected {keyword} line")
        lineno, ln = lines[pos]
        tokens = ln.split()
        if tokens[0].upper() != keyword:
            raise InstanceParseError(f"expected {keyword}, found {tokens[0]!r}", lineno)
        pos += 1
        return lineno, tokens

    lineno, tok = take("P")
    if len(tok) != 6 or tok[2].upper() != "XI" or tok[4].upper() != "D":
        raise InstanceParseError("malformed header, expected 'P <int> XI <int> D <int>'", lineno, "header")
    P, xi, d = _ints([tok[1], tok[3], tok[5]], lineno, ["P", "XI", "D"])
    _positive(d, lineno, "D")

    catalogue = []
    for _ in range(d):
        lineno, tok = take("CAT")
        w, h = _ints(tok[1:], lineno, ["w", "h"])
        catalogue.append(CatalogueItem(_positive(w, lineno, "w"), _positive(h, lineno, "h")))

    purchasable, orders = [], []
    p = None
    while pos < len(lines):
        lineno, tok = take("PERIOD")
        if len(tok) != 6 or tok[2].upper() != "M" or tok[4].upper() != "N":
            raise InstanceParseError("malformed period header, expected 'PERIOD <s> M <m> N <n>'",
                                     lineno, "PERIOD")
        s, m_s, n_s = _ints([tok[1], tok[3], tok[5]], lineno, ["s", "M", "N"])
        if p is None:
            p = s
            if p < 0:
                raise InstanceParseError(f"first instant must be >= 0, got {p}", lineno, "s")
        elif s != p + len(purchasable):
            raise InstanceParseError(f"periods out of order: expected {p + len(purchasable)}, got {s}",
                                     lineno, "s")
        if m_s < 0 or n_s < 0:
            raise InstanceParseError("counts must be non-negative", lineno, "M" if m_s < 0 else "N")
        objs = []
        for _ in range(m_s):
            lineno, tok = take("OBJ")
            W, H, c = _ints(tok[1:], lineno, ["W", "H", "c"])
            objs.append(PurchasableObject(_positive(W, lineno, "W"), _positive(H, lineno, "H"),
                                          _positive(c, lineno, "c")))
        items = []
        for _ in range(n_s):
            lineno, tok = take("ITEM")
            w, h = _ints(tok[1:], lineno, ["w", "h"])
            items.append(OrderedItem(_positive(w, lineno, "w"), _positive(h, lineno, "h")))
        purchasable.append(tuple(objs))
        orders.append(tuple(items))

    if p is None:
        raise InstanceParseError("no PERIOD blocks")
    last_line = lines[-1][0]
    if P <= p:
        raise InstanceParseError(f"P={P} must exceed the first instant p={p}", 1, "P")
    if len(purchasable) != P - p:
        raise InstanceParseError(
            f"period count mismatch: header declares {P - p} periods (p={p}, P={P}), "
            f"found {len(purchasable)}", last_line, "PERIOD")
    if not 0 <= xi <= P - p:
        raise InstanceParseError(f"xi out of range [0, {P - p}]: {xi}", 1, "XI")
    return Instance(p, P, xi, tuple(purchasable), tuple(orders), tuple(catalogue), name)


def serialize_instance(inst: Instance) -> str:
    out = [f"P {inst.P} XI {inst.xi} D {inst.d}"]
    out += [f"CAT {c.width} {c.height}" for c in inst.catalogue]
    for s in inst.instants:
        objs, items = inst.objects_at(s), inst.items_at(s)
        out.append(f"PERIOD {s} M {len(objs)} N {len(items)}")
        out += [f"OBJ {o.width} {o.height} {o.unit_cost}" for o in objs]
        out += [f"ITEM {i.width} {i.height}" for i in items]
    return "\n".join(out) + "\n"


def load_instance(path) -> Instance:
    from pathlib import Path
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), name=path.stem)


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Issue:
    severity: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


def validate_instance(inst: Instance) -> list[Issue]:
    issues: list[Issue] = []
    err = lambda msg: issues.append(Issue("error", msg))  # noqa: E731
    if inst.p < 0:
        err(f"p must be >= 0, got {inst.p}")
    if inst.P <= inst.p:
        err(f"P={inst.P} must exceed p={inst.p}")
    if not 0 <= inst.xi <= inst.P - inst.p:
        err(f"xi out of range [0, {inst.P - inst.p}]: {inst.xi}")
    if len(inst.purchasable) != inst.P - inst.p or len(inst.orders) != inst.P - inst.p:
        err("period count mismatch")
        return issues
    if not inst.catalogue:
        err("catalogue must hold at least one item")
    for k, c in enumerate(inst.catalogue):
        if c.width < 1 or c.height < 1:
            err(f"catalogue item {k} has non-positive dimension")
    seen_objects: list[PurchasableObject] = []
    for s in inst.instants:
        for j, o in enumerate(inst.objects_at(s)):
            if min(o.width, o.height, o.unit_cost) < 1:
                err(f"object {j} at instant {s} has non-positive dimension or cost")
        seen_objects.extend(inst.objects_at(s))
        for i, it in enumerate(inst.items_at(s)):
            if it.width < 1 or it.height < 1:
                err(f"item {i} at instant {s} has non-positive dimension")
                continue
            if not any(o.width >= it.width and o.height >= it.height for o in seen_objects):
                issues.append(Issue(
                    "warning", f"item {i} at instant {s} ({it.width}x{it.height}): "
                               f"item cannot fit any object available so far"))
    return issues


# -- generation --------------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    """Ranges for the random generator; all bounds inclusive."""

    periods: int = 4
    xi: int = 1
    p: int = 0
    objects: tuple[int, int] = (1, 5)
    object_dims: tuple[int, int] = (30, 100)
    items: tuple[int, int] = (2, 15)
    item_dims: tuple[int, int] = (5, 20)
    catalogue: tuple[int, int] = (1, 5)
    unit_cost: tuple[int, int] = (1, 1)
    seed: int = 0
    max_retries: int = 1000

    def __post_init__(self):
        for name in ("objects", "object_dims", "items", "item_dims", "catalogue", "unit_cost"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty range for {name}: {lo}..{hi}")
        if self.periods < 1:
            raise ValueError("periods must be >= 1")
        if min(self.object_dims[0], self.item_dims[0], self.unit_cost[0], self.catalogue[0]) < 1:
            raise ValueError("dimensions, costs and catalogue size must be positive")
        if self.objects[0] < 1:
            raise ValueError("every instant needs at least one purchasable object")
        if not 0 <= self.xi <= self.periods:
            raise ValueError("xi out of range")


def generate_instance(cfg: GenConfig) -> Instance:
    """Random instance; deterministic for a fixed seed.

    Items that fit no object of their own instant are redrawn. Catalogue
    items are the smallest (by area) distinct item shapes generated.
    """
    rng = np.random.default_rng(cfg.seed)

    def draw(rng_range) -> int:
        return int(rng.integers(rng_range[0], rng_range[1] + 1))

    purchasable, orders = [], []
    for _ in range(cfg.periods):
        objs = tuple(PurchasableObject(draw(cfg.object_dims), draw(cfg.object_dims), draw(cfg.unit_cost))
                     for _ in range(draw(cfg.objects)))
        items = []
        for _ in range(draw(cfg.items)):
            for _attempt in range(cfg.max_retries):
                it = OrderedItem(draw(cfg.item_dims), draw(cfg.item_dims))
                if any(o.width >= it.width and o.height >= it.height for o in objs):
                    break
            else:
                raise RuntimeError(f"could not draw an item fitting the objects after {cfg.max_retries} tries")
            items.append(it)
        purchasable.append(objs)
        orders.append(tuple(items))

    shapes = sorted({(it.width, it.height) for items in orders for it in items},
                    key=lambda wh: (wh[0] * wh[1], wh))
    if not shapes:
        shapes = [(cfg.item_dims[0], cfg.item_dims[0])]
    d = min(draw(cfg.catalogue), len(shapes))
    catalogue = tuple(CatalogueItem(w, h) for w, h in shapes[:d])
    return Instance(cfg.p, cfg.p + cfg.periods, cfg.xi, tuple(purchasable), tuple(orders), catalogue,
                    name=f"gen-{cfg.seed}")
