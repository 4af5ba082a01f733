"""Seeded instance generators.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
config and seed always reproduce the same instance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from querypricing.core import Buyer, CutGraphDemand, ExplicitDemand, Instance, ValidationError
from querypricing.flow import FlowNetwork, max_flow

MAX_REGENERATIONS = 10_000


@dataclass(frozen=True)
class GenConfig:
    n: int
    m: int
    value_lo: float = 0.0
    value_hi: float = 1.0
    layers: int = 1
    width: int = 1
    inf_edge_prob: float = 0.0
    seed: int = 0

    def violations(self) -> list[str]:
        out = []
        if self.n < 0:
            out.append("n must be >= 0")
        if self.m < 1:
            out.append("m must be >= 1")
        if not (0 <= self.value_lo <= self.value_hi) or not math.isfinite(self.value_hi):
            out.append("need 0 <= value_lo <= value_hi < inf")
        if self.layers < 1 or self.width < 1:
            out.append("layers and width must be >= 1")
        if not 0 <= self.inf_edge_prob < 1:
            out.append("inf_edge_prob must lie in [0, 1)")
        return out

    def check(self) -> None:
        bad = self.violations()
        if bad:
            raise ValidationError("invalid generator config", bad)

    def to_dict(self) -> dict:
        return asdict(self)


def derive_seed(base: int, *keys: int) -> int:
    """Independent 63-bit seed for a (point, trial, ...) key."""
    ss = np.random.SeedSequence([int(base) & (2**64 - 1), *map(int, keys)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def gen_single_minded(cfg: GenConfig) -> Instance:
    """Each buyer draws ``t ~ U{1..m}`` base queries with replacement; the
    distinct draws form their only support set."""
    cfg.check()
    rng = np.random.default_rng(cfg.seed)
    buyers = []
    for _ in range(cfg.n):
        t = int(rng.integers(1, cfg.m + 1))
        items = np.unique(rng.integers(0, cfg.m, size=t))
        value = float(rng.uniform(cfg.value_lo, cfg.value_hi))
        buyers.append(Buyer(value, ExplicitDemand((tuple(int(b) for b in items),))))
    return Instance(cfg.m, buyers)


def layered_arcs(layers: int, width: int) -> tuple[int, list[tuple[int, int]]]:
    """Node count and arcs of a source-to-sink DAG that is ``layers`` arcs deep.

    Node 0 is the source, the last node the sink, and in between sit
    ``layers - 1`` layers of ``width`` nodes.  Consecutive layers are joined
    by complete bipartite arcs, so one layer means ``width`` parallel arcs.
    """
    inner = [list(range(1 + k * width, 1 + (k + 1) * width)) for k in range(layers - 1)]
    sink = (layers - 1) * width + 1
    if layers == 1:
        return 2, [(0, 1)] * width
    levels = [[0], *inner, [sink]]
    arcs = [(u, v) for a, b in zip(levels, levels[1:]) for u in a for v in b]
    return sink + 1, arcs


def _has_finite_cut(nodes: int, arcs: Sequence[tuple[int, int]], infinite: np.ndarray) -> bool:
    net = FlowNetwork(nodes, 0, nodes - 1,
                      [(u, v, None if inf else 1.0) for (u, v), inf in zip(arcs, infinite)])
    return math.isfinite(max_flow(net))


def gen_cut_instance(cfg: GenConfig) -> Instance:
    """Buyers with layered cut-graph demands.

    Each arc gets a distinct base query from the pool (so a buyer never pays
    twice for one label); with probability ``inf_edge_prob`` it is made
    infinite instead.  Infinite patterns are redrawn until a finite cut
    exists.
    """
    cfg.check()
    nodes, arcs = layered_arcs(cfg.layers, cfg.width)
    if len(arcs) > cfg.m:
        raise ValidationError(
            f"{len(arcs)} arcs per buyer need at least that many base queries, m = {cfg.m}",
            ["base-query pool too small"])
    rng = np.random.default_rng([cfg.seed, 0])
    # values come from their own stream so they do not depend on the graph shape
    values = np.random.default_rng([cfg.seed, 1]).uniform(cfg.value_lo, cfg.value_hi, cfg.n)
    buyers = []
    for value in values:
        labels = rng.choice(cfg.m, size=len(arcs), replace=False)
        for _attempt in range(MAX_REGENERATIONS):
            infinite = rng.random(len(arcs)) < cfg.inf_edge_prob
            if _has_finite_cut(nodes, arcs, infinite):
                break
        else:
            raise ValidationError("could not draw a cut graph with a finite cut",
                                  ["inf_edge_prob too high"])
        edges = tuple((u, v, None if inf else int(b))
                      for (u, v), b, inf in zip(arcs, labels, infinite))
        buyers.append(Buyer(float(value), CutGraphDemand(nodes, 0, nodes - 1, edges)))
    return Instance(cfg.m, buyers)


def gen_subset_sum_gadget(a: Sequence[int], B: int) -> Instance:
    """Pricing instance whose optimum is ``B + 3*sum(a)`` iff some subset of
    ``a`` sums to ``B``.

    Item ``j`` has two single-item buyers valued ``a_j`` and ``2 a_j``; one
    more buyer wants every item at value ``B + sum(a)``.
    """
    a = [int(x) for x in a]
    if not a:
        raise ValidationError("subset-sum gadget needs at least one integer", ["empty a"])
    if any(x < 1 for x in a) or int(B) < 1:
        raise ValidationError("subset-sum entries and target must be positive",
                              ["nonpositive entry"])
    buyers = []
    for j, aj in enumerate(a):
        buyers.append(Buyer(float(aj), ExplicitDemand(((j,),))))
        buyers.append(Buyer(float(2 * aj), ExplicitDemand(((j,),))))
    buyers.append(Buyer(float(B + sum(a)), ExplicitDemand((tuple(range(len(a))),))))
    return Instance(len(a), buyers)
