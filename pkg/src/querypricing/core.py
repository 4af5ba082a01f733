"""Pricing instances, demands, and the revenue evaluator.

A buyer wants the answer to one query.  The query is determined by any of
its *support sets* (bundles of base queries), so at input prices ``p`` the
buyer pays the cheapest support set and buys iff that price does not exceed
their value.  Two demand representations are supported:

* :class:`ExplicitDemand` lists the support sets.
* :class:`CutGraphDemand` is an s-t network whose finite cuts are the
  support sets; every finite arc is labelled with a base query.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

#: absolute tolerance on money comparisons
EPS = 1e-7


class ValidationError(ValueError):
    """Raised when an instance or price vector violates its invariants."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations)


class InstanceFormatError(ValidationError):
    """The instance JSON could not be parsed into an :class:`Instance`."""


def _normalize_support_sets(sets: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    unique = sorted({tuple(sorted(set(int(b) for b in s))) for s in sets},
                    key=lambda s: (len(s), s))
    kept: list[tuple[int, ...]] = []
    kept_sets: list[frozenset[int]] = []
    for s in unique:
        fs = frozenset(s)
        # sorted by size, so only earlier (smaller or equal) sets can be subsets
        if any(k <= fs for k in kept_sets):
            continue
        kept.append(s)
        kept_sets.append(fs)
    return tuple(kept)


@dataclass(frozen=True)
class ExplicitDemand:
    """Demand given by an explicit list of support sets.

    Sets are normalized on construction: duplicates and supersets of other
    sets are dropped, the rest sorted by ``(size, lexicographic)``.
    """

    support_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "support_sets", _normalize_support_sets(self.support_sets))

    @property
    def base_queries(self) -> frozenset[int]:
        return frozenset(b for s in self.support_sets for b in s)

    @property
    def is_single_minded(self) -> bool:
        return len(self.support_sets) == 1

    @cached_property
    def index_arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(np.array(s, dtype=np.intp) for s in self.support_sets)


@dataclass(frozen=True)
class CutGraphDemand:
    """Demand whose support sets are the label sets of finite s-t cuts.

    ``edges`` holds ``(tail, head, base_query)`` triples; a ``None`` label
    marks an infinite-capacity arc that can never be cut.
    """

    nodes: int
    source: int
    sink: int
    edges: tuple[tuple[int, int, Optional[int]], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges",
            tuple((int(u), int(v), None if b is None else int(b)) for u, v, b in self.edges),
        )

    @property
    def base_queries(self) -> frozenset[int]:
        return frozenset(b for _, _, b in self.edges if b is not None)

    @property
    def is_single_minded(self) -> bool:
        return False


Demand = Union[ExplicitDemand, CutGraphDemand]


@dataclass(frozen=True)
class Buyer:
    value: float
    demand: Demand


@dataclass(frozen=True)
class Instance:
    """A complete pricing problem: ``m`` base queries and a list of buyers."""

    m: int
    buyers: tuple[Buyer, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "buyers", tuple(self.buyers))

    @property
    def n(self) -> int:
        return len(self.buyers)

    @property
    def values(self) -> np.ndarray:
        return np.array([b.value for b in self.buyers], dtype=float)

    @property
    def value_bound(self) -> float:
        """Largest buyer value (``0`` without buyers)."""
        return max((b.value for b in self.buyers), default=0.0)

    @property
    def sentinel(self) -> float:
        """Price for base queries that should never be sold."""
        return self.value_bound + 1.0

    @property
    def is_single_minded(self) -> bool:
        return all(b.demand.is_single_minded for b in self.buyers)

    def sentinel_prices(self) -> np.ndarray:
        return np.full(self.m, self.sentinel)


@dataclass(frozen=True)
class RevenueReport:
    revenue: float
    served: frozenset[int]
    quotes: tuple  # tuple[QuoteResult, ...]

    @property
    def served_count(self) -> int:
        return len(self.served)


def as_prices(instance: Instance, prices: Any) -> np.ndarray:
    """Validate ``prices`` against ``instance`` and return a float array."""
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or p.shape[0] != instance.m:
        raise ValidationError(
            f"price vector has shape {p.shape}, expected ({instance.m},)",
            ["price dimension mismatch"],
        )
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValidationError("prices must be finite and nonnegative",
                              ["invalid price entry"])
    return p


def evaluate_revenue(instance: Instance, prices: Any) -> RevenueReport:
    """Seller revenue at ``prices``: every buyer whose quote is within their
    value buys and pays the quote."""
    from querypricing.oracle import quote

    p = as_prices(instance, prices)
    quotes = tuple(quote(b.demand, p) for b in instance.buyers)
    served = frozenset(i for i, (b, q) in enumerate(zip(instance.buyers, quotes))
                       if q.price <= b.value + EPS)
    revenue = float(sum(quotes[i].price for i in sorted(served)))
    return RevenueReport(revenue, served, quotes)


def validate_instance(instance: Instance) -> list[str]:
    """Return every invariant violation of ``instance`` (empty when valid).

    Violations are ordered by buyer index, then by check.
    """
    from querypricing.flow import FlowNetwork, max_flow

    out: list[str] = []
    if instance.m < 1:
        out.append(f"m = {instance.m}: need at least one base query")
    for i, buyer in enumerate(instance.buyers):
        where = f"buyer {i}"
        if not (isinstance(buyer.value, (int, float)) and math.isfinite(buyer.value)) \
                or buyer.value < 0:
            out.append(f"{where}: value {buyer.value!r} is not a finite nonnegative number")
        d = buyer.demand
        if isinstance(d, ExplicitDemand):
            if not d.support_sets:
                out.append(f"{where}: no support sets")
            for s in d.support_sets:
                if not s:
                    out.append(f"{where}: empty support set")
                bad = [b for b in s if not 0 <= b < instance.m]
                if bad:
                    out.append(f"{where}: base query index out of range {bad}")
        elif isinstance(d, CutGraphDemand):
            if d.nodes < 2:
                out.append(f"{where}: cut graph needs at least 2 nodes")
            ends = (d.source, d.sink) + tuple(x for u, v, _ in d.edges for x in (u, v))
            if any(not 0 <= x < d.nodes for x in ends):
                out.append(f"{where}: node id out of range")
                continue
            if d.source == d.sink:
                out.append(f"{where}: source equals sink")
                continue
            labels = [b for _, _, b in d.edges if b is not None]
            bad = sorted({b for b in labels if not 0 <= b < instance.m})
            if bad:
                out.append(f"{where}: base query index out of range {bad}")
            dup = sorted({b for b in labels if labels.count(b) > 1})
            if dup:
                out.append(f"{where}: base queries label more than one edge {dup}")
            net = FlowNetwork(d.nodes, d.source, d.sink,
                              [(u, v, None if b is None else 1.0) for u, v, b in d.edges])
            flow = max_flow(net)
            if math.isinf(flow):
                out.append(f"{where}: no finite cut (demand is undeterminable)")
            elif flow == 0:
                out.append(f"{where}: sink unreachable from source (empty support set)")
        else:
            out.append(f"{where}: unknown demand type {type(d).__name__}")
    return out


def require_valid(instance: Instance) -> Instance:
    violations = validate_instance(instance)
    if violations:
        raise ValidationError(f"invalid instance ({len(violations)} violations)", violations)
    return instance


# -- JSON ---------------------------------------------------------------

def demand_to_dict(d: Demand) -> dict:
    if isinstance(d, ExplicitDemand):
        return {"type": "explicit", "support_sets": [list(s) for s in d.support_sets]}
    return {
        "type": "cut_graph", "nodes": d.nodes, "s": d.source, "t": d.sink,
        "edges": [{"from": u, "to": v, "base_query": b} for u, v, b in d.edges],
    }


def demand_from_dict(obj: dict) -> Demand:
    kind = obj.get("type")
    if kind == "explicit":
        return ExplicitDemand(tuple(tuple(s) for s in obj["support_sets"]))
    if kind == "cut_graph":
        edges = tuple((e["from"], e["to"], e.get("base_query")) for e in obj["edges"])
        return CutGraphDemand(int(obj["nodes"]), int(obj["s"]), int(obj["t"]), edges)
    raise InstanceFormatError(f"unknown demand type {kind!r}", [f"unknown demand type {kind!r}"])


def instance_to_dict(instance: Instance) -> dict:
    return {
        "m": instance.m,
        "buyers": [{"value": b.value, "demand": demand_to_dict(b.demand)}
                   for b in instance.buyers],
    }


def instance_from_dict(obj: dict) -> Instance:
    try:
        buyers = tuple(Buyer(float(b["value"]), demand_from_dict(b["demand"]))
                       for b in obj["buyers"])
        return Instance(int(obj["m"]), buyers)
    except InstanceFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed instance: {exc!r}", [f"malformed instance: {exc!r}"])


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def load_instance(path: Union[str, Path]) -> Instance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not JSON ({exc})", [f"invalid JSON: {exc}"])
    return instance_from_dict(obj)
