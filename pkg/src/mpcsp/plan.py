"""Per-period cutting decisions and assembled multi-period plans."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ObjectCut:
    """Pre-cuts of a used object.

    ``eta = 1``: vertical pre-cut first (top leftover is ``(W - r) x t``,
    right leftover ``r x H``); ``eta = 0``: horizontal first (top ``W x t``,
    right ``r x (H - t)``).
    """

    eta: int
    top: float  # t, height of the top leftover
    right: float  # r, width of the right-hand-side leftover


@dataclass(frozen=True)
class Placement:
    """Item ``item`` cut from object ``obj`` with its center at ``(x, y)``."""

    item: int
    obj: int
    x: float
    y: float

    def corner(self, w: float, h: float) -> tuple[float, float]:
        return self.x - w / 2, self.y - h / 2


@dataclass
class PeriodDecision:
    instant: int
    cuts: dict[int, ObjectCut] = field(default_factory=dict)
    placements: list[Placement] = field(default_factory=list)

    @property
    def used(self) -> set[int]:
        return {pl.obj for pl in self.placements}

    def items_on(self, j: int) -> list[Placement]:
        return [pl for pl in self.placements if pl.obj == j]


@dataclass
class Plan:
    """A complete solution: one decision per instant p .. P-1 plus the pools
    those decisions realize at instants p .. P."""

    decisions: list[PeriodDecision]
    pools: list  # ObjectPool per instant p .. P
    cost: int = 0
    leftover_value: int = 0
    objective: int = 0
    method: str = ""

    @property
    def key(self) -> tuple[int, int]:
        """Lexicographic rank: lower cost first, then higher final leftover value."""
        return (self.cost, -self.leftover_value)

    def summary(self) -> dict:
        return {"method": self.method, "cost": self.cost, "leftover_value": self.leftover_value,
                "objective": self.objective}
