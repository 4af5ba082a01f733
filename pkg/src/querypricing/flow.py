"""Max-flow / min-cut on directed networks (Dinic's algorithm).

Arcs carry a nonnegative float capacity or ``None`` for an infinite arc.
Infinite arcs are tracked with a flag and never enter arithmetic: they are
always traversable in the residual graph and can never be cut.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

INFINITE = math.inf


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class FlowNetwork:
    """``arcs`` are ``(tail, head, capacity)``; ``capacity=None`` is infinite."""

    node_count: int
    source: int
    sink: int
    arcs: Sequence[tuple[int, int, Optional[float]]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(self.arcs))

    def validate(self) -> None:
        n = self.node_count
        if not (0 <= self.source < n and 0 <= self.sink < n):
            raise FlowError("source/sink out of range")
        if self.source == self.sink:
            raise FlowError("source equals sink")
        for k, (u, v, c) in enumerate(self.arcs):
            if not (0 <= u < n and 0 <= v < n):
                raise FlowError(f"arc {k}: node id out of range")
            if c is not None and not (c >= 0 and math.isfinite(c)):
                raise FlowError(f"arc {k}: capacity {c!r} must be finite and >= 0 or None")


@dataclass(frozen=True)
class CutResult:
    value: float
    cut_arcs: frozenset[int]
    source_side: frozenset[int]


class _Dinic:
    # Arc k is stored as residual edge 2k (forward) and 2k+1 (backward).

    def __init__(self, net: FlowNetwork):
        net.validate()
        self.n = net.node_count
        self.s, self.t = net.source, net.sink
        self.head: list[int] = []
        self.cap: list[float] = []
        self.inf: list[bool] = []
        self.adj: list[list[int]] = [[] for _ in range(self.n)]
        scale = 0.0
        for u, v, c in net.arcs:
            self.adj[u].append(len(self.head))
            self.head.append(v)
            self.cap.append(0.0 if c is None else float(c))
            self.inf.append(c is None)
            self.adj[v].append(len(self.head))
            self.head.append(u)
            self.cap.append(0.0)
            self.inf.append(False)
            if c is not None:
                scale = max(scale, float(c))
        self.tol = 1e-12 * max(scale, 1.0)
        self.flow = 0.0

    def _usable(self, e: int) -> bool:
        return self.inf[e] or self.cap[e] > self.tol

    def reachable(self, infinite_only: bool = False) -> list[bool]:
        seen = [False] * self.n
        seen[self.s] = True
        queue = deque([self.s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.head[e]
                if not seen[v] and (self.inf[e] if infinite_only else self._usable(e)):
                    seen[v] = True
                    queue.append(v)
        return seen

    def _levels(self) -> Optional[list[int]]:
        level = [-1] * self.n
        level[self.s] = 0
        queue = deque([self.s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.head[e]
                if level[v] < 0 and self._usable(e):
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[self.t] >= 0 else None

    def _push(self, e: int, f: float) -> None:
        if not self.inf[e]:
            self.cap[e] -= f
        if not self.inf[e ^ 1]:
            self.cap[e ^ 1] += f

    def _blocking_flow(self, level: list[int]) -> float:
        head, adj = self.head, self.adj
        it = [0] * self.n
        total = 0.0
        path: list[int] = []
        u = self.s
        while True:
            if u == self.t:
                # an all-infinite path is excluded by the check in run()
                f = min(self.cap[e] for e in path if not self.inf[e])
                for e in path:
                    self._push(e, f)
                total += f
                k = next(i for i, e in enumerate(path) if not self._usable(e))
                del path[k:]
                u = self.s if not path else head[path[-1]]
                continue
            edges = adj[u]
            advanced = False
            while it[u] < len(edges):
                e = edges[it[u]]
                v = head[e]
                if level[v] == level[u] + 1 and self._usable(e):
                    path.append(e)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if u == self.s:
                return total
            level[u] = -1  # dead end for the rest of this phase
            e = path.pop()
            u = head[e ^ 1]
            it[u] += 1

    def run(self) -> float:
        if self.reachable(infinite_only=True)[self.t]:
            return INFINITE
        while (level := self._levels()) is not None:
            self.flow += self._blocking_flow(level)
        return self.flow


def max_flow(net: FlowNetwork) -> float:
    """Maximum s-t flow value; ``math.inf`` iff every cut has an infinite arc."""
    return _Dinic(net).run()


def min_cut(net: FlowNetwork) -> CutResult:
    """Canonical minimum cut: arcs leaving the residual-reachable source side.

    When no finite cut exists the value is ``math.inf`` and the arc set is
    empty.
    """
    solver = _Dinic(net)
    value = solver.run()
    if math.isinf(value):
        return CutResult(INFINITE, frozenset(), frozenset())
    side = solver.reachable()
    cut = frozenset(k for k, (u, v, _) in enumerate(net.arcs) if side[u] and not side[v])
    value = math.fsum(net.arcs[k][2] for k in cut)
    return CutResult(value, cut, frozenset(i for i, x in enumerate(side) if x))
