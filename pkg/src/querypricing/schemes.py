"""Pricing schemes.

Every scheme maps an :class:`~querypricing.core.Instance` to a price vector
and reports the revenue that vector actually earns.  Buyers are scored by
their per-base-query value ``pi = v / t`` where ``t`` is the size of their
minimum-cardinality support set ``C``; the multi-price schemes only consider
service sets that are prefixes of the ``pi``-descending order.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from querypricing.core import EPS, Instance, RevenueReport, evaluate_revenue
from querypricing.lp import Constraint, LinearProgram, solve, solve_lazy
from querypricing.oracle import min_support_size, quote

logger = logging.getLogger(__name__)

DEFAULT_MAX_BUYERS = 16


class ContractError(ValueError):
    """The instance is outside the scheme's domain."""


@dataclass(frozen=True)
class ScoredBuyer:
    index: int
    value: float
    t: int
    support: frozenset[int]
    pi: float


@dataclass(frozen=True)
class PricingResult:
    scheme: str
    prices: np.ndarray
    report: RevenueReport
    #: size of the winning prefix service set, for the prefix-based schemes
    service_size: Optional[int] = None

    @property
    def revenue(self) -> float:
        return self.report.revenue


@dataclass(frozen=True)
class FillState:
    """Snapshot of the fill procedure at the start of one step."""

    step: int
    remaining: tuple[int, ...]
    residual_values: dict[int, float]
    residual_sets: dict[int, frozenset[int]]
    price: float
    selected: int

    def per_item_value(self, buyer: int) -> float:
        return self.residual_values[buyer] / len(self.residual_sets[buyer])


def _result(name: str, instance: Instance, prices: np.ndarray,
            service_size: Optional[int] = None) -> PricingResult:
    prices = np.array(prices, dtype=float)
    prices.setflags(write=False)
    return PricingResult(name, prices, evaluate_revenue(instance, prices), service_size)


def _degenerate(instance: Instance) -> bool:
    return instance.n == 0 or instance.value_bound <= 0


def score_and_order(instance: Instance) -> list[ScoredBuyer]:
    """Buyers sorted by per-base-query value, descending; ties by index."""
    scored = []
    for i, buyer in enumerate(instance.buyers):
        t, support = min_support_size(buyer.demand, instance.m)
        scored.append(ScoredBuyer(i, buyer.value, t, support, buyer.value / t))
    scored.sort(key=lambda s: (-s.pi, s.index))
    return scored


# -- single price ----------------------------------------------------------

def price_grid(instance: Instance) -> np.ndarray:
    """``H, H/2, H/4, ...`` with ``floor(log2(2nm))`` entries (at least one)."""
    s = max(1, (2 * instance.n * instance.m).bit_length() - 1)
    return instance.value_bound / 2.0 ** np.arange(s)


def random_single_price(instance: Instance, seed: int = 0) -> PricingResult:
    """One uniform price drawn uniformly from :func:`price_grid`."""
    if _degenerate(instance):
        return _result("rand-single", instance, instance.sentinel_prices())
    grid = price_grid(instance)
    rng = np.random.default_rng(seed)
    price = grid[rng.integers(len(grid))]
    return _result("rand-single", instance, np.full(instance.m, price))


def grid_expected_revenue(instance: Instance) -> float:
    """Exact expected revenue of :func:`random_single_price`."""
    if _degenerate(instance):
        return 0.0
    revenues = [evaluate_revenue(instance, np.full(instance.m, g)).revenue
                for g in price_grid(instance)]
    return float(np.mean(revenues))


def deterministic_single_price(instance: Instance) -> PricingResult:
    """Best uniform price among the candidates ``pi_1 >= pi_2 >= ...``.

    Candidate ``i`` is scored in closed form as ``pi_i * (t_1 + ... + t_i)``;
    the first maximizer wins.
    """
    if _degenerate(instance):
        return _result("det-single", instance, instance.sentinel_prices())
    scored = score_and_order(instance)
    pis = np.array([s.pi for s in scored])
    closed_form = pis * np.cumsum([s.t for s in scored])
    best = int(np.argmax(closed_form))
    return _result("det-single", instance, np.full(instance.m, pis[best]))


# -- LP based multi-price --------------------------------------------------

def _serve_lp(instance: Instance, served: list[ScoredBuyer]) -> np.ndarray:
    """Optimal prices when exactly ``served`` must each afford their set.

    Base queries outside every served set stay at the sentinel.
    """
    prices = instance.sentinel_prices()
    items = sorted(set().union(*(s.support for s in served)))
    if not items:
        return prices
    col = {b: j for j, b in enumerate(items)}
    objective = np.zeros(len(items))
    constraints = []
    for s in served:
        row = np.zeros(len(items))
        row[[col[b] for b in s.support]] = 1.0
        objective += row
        constraints.append(Constraint(row, s.value))
    sol = solve(LinearProgram(objective, constraints))
    if not sol.optimal:
        raise RuntimeError(f"service LP ended with status {sol.status.value}")
    prices[items] = sol.x
    return prices


def _require_single_minded(instance: Instance, hint: str) -> None:
    if not instance.is_single_minded:
        raise ContractError(f"instance is not single-minded; {hint}")


def _best_of(name: str, instance: Instance, candidates) -> PricingResult:
    """Highest evaluated revenue among ``(service_size, prices)`` candidates;
    the first one wins ties."""
    best: Optional[PricingResult] = None
    for size, prices in candidates:
        res = _result(name, instance, prices, size)
        if best is None or res.revenue > best.revenue:
            best = res
    if best is None:
        return _result(name, instance, instance.sentinel_prices())
    return best


def lp_multi_price_single_minded(instance: Instance) -> PricingResult:
    """Solve the service LP for every prefix and keep the best prices."""
    _require_single_minded(instance, "use lp_multi_price_general")
    if _degenerate(instance):
        return _result("lp-multi", instance, instance.sentinel_prices())
    scored = score_and_order(instance)
    return _best_of("lp-multi", instance,
                    ((k, _serve_lp(instance, scored[:k])) for k in range(1, len(scored) + 1)))


def _envy_free_lp(instance: Instance, served: list[ScoredBuyer], max_cuts: int) -> np.ndarray:
    m = instance.m
    demands = [instance.buyers[s.index].demand for s in served]
    items = sorted(set().union(*(d.base_queries for d in demands)))
    col = {b: j for j, b in enumerate(items)}
    nv = len(items)

    def indicator(bs) -> np.ndarray:
        row = np.zeros(nv)
        row[[col[b] for b in bs]] = 1.0
        return row

    own = [indicator(s.support) for s in served]
    base = LinearProgram(np.sum(own, axis=0),
                         [Constraint(r, s.value) for r, s in zip(own, served)],
                         upper=instance.value_bound)
    tol = 1e-9 * max(1.0, instance.value_bound)
    seen: set[tuple] = set()

    def separate(x: np.ndarray) -> list[Constraint]:
        p = np.zeros(m)
        p[items] = x
        cuts = []
        for d, row in zip(demands, own):
            q = quote(d, p)
            if q.price < row @ x - tol:
                coeffs = row - indicator(q.minimizer)
                key = tuple(coeffs)
                if key not in seen:
                    seen.add(key)
                    cuts.append(Constraint(coeffs, 0.0))
        return cuts

    sol = solve_lazy(base, separate, max_cuts=max_cuts)
    if not sol.optimal:
        raise RuntimeError(f"envy-free LP ended with status {sol.status.value}")
    prices = instance.sentinel_prices()
    chosen = sorted(set().union(*(s.support for s in served)))
    prices[chosen] = sol.x[[col[b] for b in chosen]]
    return prices


def lp_multi_price_general(instance: Instance) -> PricingResult:
    """Prefix LPs with envy-freeness constraints generated by the oracle.

    Each buyer is pinned to the minimum-cardinality support set ``C_i``; a
    quote cheaper than ``C_i`` at the current LP point adds the constraint
    ``sum(p[C_i]) <= sum(p[C'])`` for the quoted minimizer ``C'``.
    """
    if _degenerate(instance):
        return _result("lp-multi", instance, instance.sentinel_prices())
    scored = score_and_order(instance)
    max_cuts = instance.n * instance.m + 1000
    return _best_of("lp-multi", instance,
                    ((k, _envy_free_lp(instance, scored[:k], max_cuts))
                     for k in range(1, len(scored) + 1)))


def lp_multi_price(instance: Instance) -> PricingResult:
    """Single-minded LP when it applies, the envy-free LP otherwise."""
    if instance.is_single_minded:
        return lp_multi_price_single_minded(instance)
    return lp_multi_price_general(instance)


# -- combinatorial multi-price ---------------------------------------------

def fill_prices_for_service_set(instance: Instance, scored: list[ScoredBuyer], size: int,
                                trace: Optional[list[FillState]] = None) -> np.ndarray:
    """Greedy prices for the service set ``scored[:size]``.

    Repeatedly take the buyer with the lowest residual per-item value, price
    their unpriced base queries at that value, and charge the price against
    every other buyer's residual value.  Buyers index ``FillState`` fields.
    """
    prices = instance.sentinel_prices()
    values = {s.index: s.value for s in scored[:size]}
    sets = {s.index: set(s.support) for s in scored[:size]}
    rank = {s.index: k for k, s in enumerate(scored)}
    active = [s.index for s in scored[:size]]
    step = 0
    while True:
        active = [i for i in active if sets[i]]
        if not active:
            break
        sel = min(active, key=lambda i: (values[i] / len(sets[i]), rank[i]))
        p = values[sel] / len(sets[sel])
        chosen = frozenset(sets[sel])
        if trace is not None:
            trace.append(FillState(step, tuple(active), dict(values),
                                   {i: frozenset(sets[i]) for i in active}, p, sel))
        prices[list(chosen)] = p
        for i in active:
            overlap = len(sets[i] & chosen)
            if overlap:
                values[i] = max(values[i] - overlap * p, 0.0)
                sets[i] -= chosen
        active.remove(sel)
        step += 1
    return prices


def fill_violations(trace: list[FillState], prices: np.ndarray, floor: float,
                    sentinel: float, eps: float = EPS) -> list[str]:
    """Check a fill run: per-item values never drop between steps and every
    priced base query costs at least ``floor``."""
    out = []
    for before, after in zip(trace, trace[1:]):
        for i in after.remaining:
            if after.per_item_value(i) < before.per_item_value(i) - eps:
                out.append(f"step {after.step}: buyer {i} per-item value fell "
                           f"{before.per_item_value(i):.6g} -> {after.per_item_value(i):.6g}")
    finite = prices[prices < sentinel]
    if finite.size and finite.min() < floor - eps:
        out.append(f"price {finite.min():.6g} below floor {floor:.6g}")
    return out


def combinatorial_multi_price(instance: Instance,
                              traces: Optional[list] = None) -> PricingResult:
    """Fill prices for every prefix service set and keep the best.

    If ``traces`` is a list, ``(size, states, prices, floor)`` is appended for
    each prefix.
    """
    if _degenerate(instance):
        return _result("comb-multi", instance, instance.sentinel_prices())
    scored = score_and_order(instance)

    def candidates():
        for k in range(1, len(scored) + 1):
            states: Optional[list[FillState]] = [] if traces is not None else None
            prices = fill_prices_for_service_set(instance, scored, k, states)
            if traces is not None:
                traces.append((k, states, prices, scored[k - 1].pi))
            yield k, prices

    return _best_of("comb-multi", instance, candidates())


# -- exact baseline ----------------------------------------------------------

def optimal_exponential(instance: Instance,
                        max_buyers: int = DEFAULT_MAX_BUYERS) -> PricingResult:
    """Exact optimum for single-minded buyers by enumerating service sets."""
    _require_single_minded(instance, "the exponential baseline needs single-minded buyers")
    if instance.n > max_buyers:
        raise ContractError(f"{instance.n} buyers exceed the enumeration cap of {max_buyers}")
    if _degenerate(instance):
        return _result("optimal", instance, instance.sentinel_prices())
    scored = score_and_order(instance)
    subsets = (list(c) for r in range(1, len(scored) + 1)
               for c in itertools.combinations(scored, r))
    return _best_of("optimal", instance, ((None, _serve_lp(instance, s)) for s in subsets))


SchemeFn = Callable[[Instance, int], PricingResult]

SCHEMES: dict[str, SchemeFn] = {
    "rand-single": lambda inst, seed: random_single_price(inst, seed),
    "det-single": lambda inst, seed: deterministic_single_price(inst),
    "lp-multi": lambda inst, seed: lp_multi_price(inst),
    "comb-multi": lambda inst, seed: combinatorial_multi_price(inst),
    "optimal": lambda inst, seed: optimal_exponential(inst),
}


def run_scheme(name: str, instance: Instance, seed: int = 0) -> PricingResult:
    try:
        fn = SCHEMES[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    return fn(instance, seed)
