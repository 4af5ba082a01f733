"""Fundamental price of a demand: the cheapest support set at given prices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from querypricing.core import CutGraphDemand, Demand, ExplicitDemand
from querypricing.flow import FlowNetwork, min_cut


class UndeterminableDemand(ValueError):
    """The demand has no finite support set."""


@dataclass(frozen=True)
class QuoteResult:
    price: float
    minimizer: frozenset[int]


def _explicit_quote(demand: ExplicitDemand, prices: np.ndarray) -> QuoteResult:
    if not demand.support_sets:
        raise UndeterminableDemand("explicit demand without support sets")
    best, best_price = None, math.inf
    for s, idx in zip(demand.support_sets, demand.index_arrays):
        price = float(prices[idx].sum())
        # strict: first set in normalized order wins ties
        if price < best_price:
            best, best_price = s, price
    return QuoteResult(best_price, frozenset(best))


def cut_network(demand: CutGraphDemand, prices: Sequence[float]) -> FlowNetwork:
    arcs = [(u, v, None if b is None else float(prices[b])) for u, v, b in demand.edges]
    return FlowNetwork(demand.nodes, demand.source, demand.sink, arcs)


def _cut_quote(demand: CutGraphDemand, prices: np.ndarray) -> QuoteResult:
    cut = min_cut(cut_network(demand, prices))
    if math.isinf(cut.value):
        raise UndeterminableDemand("cut graph has no finite s-t cut")
    labels = frozenset(demand.edges[k][2] for k in cut.cut_arcs)
    return QuoteResult(math.fsum(prices[b] for b in labels), labels)


def quote(demand: Demand, prices) -> QuoteResult:
    """Price of ``demand`` at base-query ``prices`` plus the minimizing set.

    Ties go to the first set in normalized order (explicit demands) or to
    the residual-reachability cut (cut graphs).
    """
    p = np.asarray(prices, dtype=float)
    if isinstance(demand, ExplicitDemand):
        return _explicit_quote(demand, p)
    return _cut_quote(demand, p)


def min_support_size(demand: Demand, m: int | None = None) -> tuple[int, frozenset[int]]:
    """Size and members of the minimum-cardinality support set.

    Computed by quoting at price 1 on every base query, so the tie-break is
    the same one :func:`quote` uses.
    """
    if m is None:
        m = max(demand.base_queries, default=-1) + 1
    q = quote(demand, np.ones(m))
    return len(q.minimizer), q.minimizer
