"""Exact orthogonal packing of a handful of rectangles (no rotation).

``packing_frontier`` returns every Pareto-minimal bounding box ``(a, b)``
into which a set of rectangles can be packed, each with one witness
packing. The search enumerates bottom-left justified packings whose
coordinates come from normal patterns (subset sums of the other items'
dimensions), placing items in increasing ``(y, x)`` order so every packing
is visited once.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple


class FrontierPoint(NamedTuple):
    a: int
    b: int
    positions: tuple[tuple[int, int], ...]  # bottom-left corner per input rectangle


def normal_sums(values, cap: int) -> list[int]:
    """All subset sums of ``values`` not exceeding ``cap`` (including 0)."""
    sums = {0}
    for v in values:
        sums |= {s + v for s in sums if s + v <= cap}
    return sorted(sums)


def _dominated(a: int, b: int, frontier) -> bool:
    return any(p.a <= a and p.b <= b for p in frontier)


@lru_cache(maxsize=200_000)
def packing_frontier(rects: tuple[tuple[int, int], ...], cap_w: int, cap_h: int) -> tuple[FrontierPoint, ...]:
    n = len(rects)
    if n == 0:
        return (FrontierPoint(0, 0, ()),)
    if any(w > cap_w or h > cap_h for w, h in rects):
        return ()
    xs = [normal_sums([rects[k][0] for k in range(n) if k != i], cap_w - rects[i][0]) for i in range(n)]
    ys = [normal_sums([rects[k][1] for k in range(n) if k != i], cap_h - rects[i][1]) for i in range(n)]
    frontier: list[FrontierPoint] = []
    pos: list[tuple[int, int] | None] = [None] * n
    placed: list[int] = []

    def free(i, x, y) -> bool:
        w, h = rects[i]
        for k in placed:
            kx, ky = pos[k]
            kw, kh = rects[k]
            if x < kx + kw and kx < x + w and y < ky + kh and ky < y + h:
                return False
        return True

    def dfs(remaining: int, last: tuple[int, int], A: int, B: int) -> None:
        if remaining == 0:
            if not _dominated(A, B, frontier):
                frontier[:] = [p for p in frontier if not (A <= p.a and B <= p.b)]
                frontier.append(FrontierPoint(A, B, tuple(pos)))
            return
        need_a = max([A] + [rects[i][0] for i in range(n) if remaining >> i & 1])
        need_b = max([B] + [rects[i][1] for i in range(n) if remaining >> i & 1])
        if _dominated(need_a, need_b, frontier):
            return
        seen = set()
        for i in range(n):
            if not remaining >> i & 1 or rects[i] in seen:
                continue
            seen.add(rects[i])  # identical rectangles are interchangeable
            w, h = rects[i]
            for y in ys[i]:
                if y < last[0]:
                    continue
                for x in xs[i]:
                    if (y, x) <= last:
                        continue
                    a2, b2 = max(A, x + w), max(B, y + h)
                    if _dominated(a2, b2, frontier) or not free(i, x, y):
                        continue
                    pos[i] = (x, y)
                    placed.append(i)
                    dfs(remaining & ~(1 << i), (y, x), a2, b2)
                    placed.pop()
                    pos[i] = None

    dfs((1 << n) - 1, (-1, -1), 0, 0)
    return tuple(sorted(frontier))


def fits(rects, width: float, height: float) -> FrontierPoint | None:
    """A witness packing of ``rects`` inside ``width x height``, or None."""
    key = tuple(rects)
    cap_w, cap_h = int(width + 1e-9), int(height + 1e-9)
    for p in packing_frontier(key, cap_w, cap_h):
        if p.a <= width + 1e-9 and p.b <= height + 1e-9:
            return p
    return None
