from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPTIMAL, FEASIBLE, INFEASIBLE, UNBOUNDED, LIMIT = "optimal", "feasible", "infeasible", "unbounded", "limit"

DEFAULT_ABS_GAP = 1 - 1e-6


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """``backend`` is ``builtin``, ``highs`` or ``external``; ``command`` is
    the external command template with ``{lp}`` and ``{sol}`` placeholders."""

    backend: str = "builtin"
    abs_gap: float = DEFAULT_ABS_GAP
    rel_gap: float = 0.0
    time_limit: float | None = None
    node_limit: int | None = None
    lp_engine: str = "auto"
    command: str | None = None
    propagate: bool = True
    priorities: bool = True

    def __post_init__(self):
        if not 0 < self.abs_gap <= 1:
            raise ValueError(f"abs_gap must lie in (0, 1], got {self.abs_gap}")
        if self.rel_gap < 0:
            raise ValueError(f"rel_gap must be non-negative, got {self.rel_gap}")
        if self.backend not in ("builtin", "highs", "external"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class MilpSolution:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    bound: float | None = None
    wall_time: float = 0.0
    nodes: int = 0
    info: dict = field(default_factory=dict)

    @property
    def has_solution(self) -> bool:
        return self.x is not None

    def value(self, ms, name: str) -> float:
        return float(self.x[ms.index[name]])


def relative_gap(incumbent: float, bound: float) -> float:
    return abs(incumbent - bound) / (1e-10 + abs(incumbent))
