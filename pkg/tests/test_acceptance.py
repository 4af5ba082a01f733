"""Acceptance criteria 1-9, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
Expensive instance runs are shared between criteria through module fixtures.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pytest

from querypricing.core import Buyer, CutGraphDemand, ExplicitDemand, Instance
from querypricing.flow import FlowNetwork, max_flow
from querypricing.gen import GenConfig, derive_seed, gen_single_minded, gen_subset_sum_gadget, layered_arcs
from querypricing.harness import GENERATORS, BenchConfig, bench
from querypricing.lp import Constraint, LinearProgram, LpStatus, solve
from querypricing.oracle import UndeterminableDemand, quote
from querypricing.schemes import (
    combinatorial_multi_price, deterministic_single_price, fill_violations, lp_multi_price,
    optimal_exponential, score_and_order,
)
from oracles import (
    brute_min_cut, enumerate_cut_support_sets, explicit_price, harmonic, lp_is_unbounded,
    lp_vertex_max, random_arcs, subset_sum_yes,
)

C1_M = (10, 100, 1000)
C1_TRIALS = 1000
C2_M = (10, 50, 100, 200)
C2_TRIALS = 100
C9_LAYERS = (5, 20, 80, 320)
C9_TRIALS = 30


@dataclass
class Tally:
    """Counters shared by the criteria that look at every run."""
    instances: int = 0
    fill_runs: int = 0
    fill_bad: list = field(default_factory=list)
    bound_bad: list = field(default_factory=list)

    def fill(self, tag, instance, traces):
        for size, states, prices, floor in traces:
            self.fill_runs += 1
            bad = fill_violations(states, prices, floor, instance.sentinel)
            self.fill_bad += [f"{tag} N_{size}: {v}" for v in bad]

    def bound(self, tag, instance, det_revenue):
        self.instances += 1
        lo = instance.values.sum() / harmonic(instance.n * instance.m) if instance.n else 0.0
        if det_revenue < lo - 1e-9:
            self.bound_bad.append(f"{tag}: {det_revenue} < {lo}")


@pytest.fixture(scope="module")
def tally():
    return Tally()


def comb_with_trace(tag, instance, tally):
    traces = []
    res = combinatorial_multi_price(instance, traces)
    tally.fill(tag, instance, traces)
    return res


@pytest.fixture(scope="module")
def c1_runs(tally):
    rows = []
    for m in C1_M:
        for k in range(C1_TRIALS):
            tag = f"m={m} trial={k}"
            inst = gen_single_minded(GenConfig(n=20, m=m, seed=derive_seed(1, m, k)))
            det = deterministic_single_price(inst)
            lp = lp_multi_price(inst)
            comb = comb_with_trace(tag, inst, tally)
            tally.bound(tag, inst, det.revenue)
            envy = []
            for s in score_and_order(inst)[:lp.service_size]:
                q = quote(inst.buyers[s.index].demand, lp.prices).price
                want = float(sum(lp.prices[b] for b in s.support))
                if abs(q - want) > 1e-6:
                    envy.append(f"{tag} buyer {s.index}: {q} != {want}")
            rows.append((tag, det.revenue, lp.revenue, comb.revenue, envy, lp.service_size))
    return rows


@pytest.fixture(scope="module")
def c2_ratios(tally):
    out = {}
    for m in C2_M:
        ratios = []
        for k in range(C2_TRIALS):
            tag = f"n=7 m={m} trial={k}"
            inst = gen_single_minded(GenConfig(n=7, m=m, seed=derive_seed(2, m, k)))
            opt = optimal_exponential(inst).revenue
            lp = lp_multi_price(inst).revenue
            tally.bound(tag, inst, deterministic_single_price(inst).revenue)
            comb_with_trace(tag, inst, tally)
            ratios.append(lp / opt if opt > 0 else 1.0)
        out[m] = float(np.mean(ratios))
    return out


def one_over_i_items(m):
    return Instance(m, [Buyer(1 / (i + 1), ExplicitDemand(((i,),))) for i in range(m)])


def one_over_i_buyers(n):
    return Instance(1, [Buyer(1 / (i + 1), ExplicitDemand(((0,),))) for i in range(n)])


def test_criterion_1_pointwise_dominance(c1_runs, accept):
    bad = [f"{tag}: det {d} lp {l} comb {c}" for tag, d, l, c, _, _ in c1_runs
           if l < d - 1e-6 or c < d - 1e-6]
    accept(1, not bad and len(c1_runs) == len(C1_M) * C1_TRIALS,
           f"{len(c1_runs)} instances (n=20, m in {C1_M}), lp-multi and comb-multi >= det-single - 1e-6 "
           f"on all; violations {bad[:3]}")


def test_criterion_2_near_optimality(c2_ratios, accept):
    worst = min(c2_ratios.values())
    means = ", ".join(f"m={m}: {r:.4f}" for m, r in c2_ratios.items())
    accept(2, worst >= 0.95,
           f"mean lp-multi/optimal {means}; gate 0.95; >= 0.99 at every point: "
           f"{'yes' if worst >= 0.99 else 'no'}")


@pytest.fixture(scope="module")
def c3_mismatches(tally):
    bad = []
    for m in (3, 10, 20):
        inst = one_over_i_items(m)
        comb = comb_with_trace(f"1/i m={m}", inst, tally).revenue
        lp = lp_multi_price(inst).revenue
        det = deterministic_single_price(inst).revenue
        h = harmonic(m)
        for name, got, want in (("comb", comb, h), ("lp", lp, h), ("det", det, 1.0)):
            if abs(got - want) > 1e-6:
                bad.append(f"m={m} {name} {got} != {want}")
    inst = one_over_i_buyers(5)
    comb_with_trace("1/i single item", inst, tally)
    opt = optimal_exponential(inst).revenue
    if abs(opt - 1) > 1e-6 or abs(inst.values.sum() - harmonic(5)) > 1e-12:
        bad.append(f"single item optimal {opt}")
    return bad


def test_criterion_3_separation_examples(c3_mismatches, accept):
    accept(3, not c3_mismatches,
           f"1/i instances m in (3, 10, 20) and single-item n=5; mismatches {c3_mismatches}")


def subset_sum_pairs(count=10, seed=4):
    rng = np.random.default_rng(seed)
    yes, no = [], []
    while len(yes) < count or len(no) < count:
        a = rng.integers(1, 13, size=int(rng.integers(1, 6))).tolist()
        if rng.random() < 0.5 and len(yes) < count:
            pick = [x for x in a if rng.random() < 0.5] or a[:1]
            yes.append((a, sum(pick)))
        elif len(no) < count:
            B = int(rng.integers(1, sum(a) + 1))
            if not subset_sum_yes(a, B):
                no.append((a, B))
    return yes, no


def test_criterion_4_gadget_identity(accept):
    yes, no = subset_sum_pairs()
    assert all(subset_sum_yes(a, B) for a, B in yes)
    assert not any(subset_sum_yes(a, B) for a, B in no)
    bad = []
    for (a, B), is_yes in [(p, True) for p in yes] + [(p, False) for p in no]:
        rev = optimal_exponential(gen_subset_sum_gadget(a, B)).revenue
        target = B + 3 * sum(a)
        ok = abs(rev - target) <= 1e-6 if is_yes else rev < target - 1e-6
        if not ok:
            bad.append(f"a={a} B={B} revenue {rev} target {target}")
    accept(4, not bad, f"{len(yes)} YES and {len(no)} NO pairs, |a| <= 5; mismatches {bad}")


def test_criterion_5_harmonic_bound(c1_runs, c2_ratios, c9_bench, tally, accept):
    accept(5, not tally.bound_bad,
           f"det-single >= sum(v)/H(nm) on {tally.instances} benchmark instances; "
           f"violations {tally.bound_bad[:3]}")


def test_criterion_6_brute_force(accept):
    rng = np.random.default_rng(6)
    flow_bad = 0
    for _ in range(1000):
        n, s, t, arcs = random_arcs(rng)
        want = brute_min_cut(n, s, t, arcs)
        got = max_flow(FlowNetwork(n, s, t, arcs))
        if not (math.isinf(want) and math.isinf(got)) and abs(got - want) > 1e-6:
            flow_bad += 1

    quote_bad = checked = 0
    while checked < 1000:
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, 13))
        labels = rng.permutation(12)[:k]
        edges = tuple((int(rng.integers(0, n)), int(rng.integers(0, n)),
                       None if rng.random() < 0.15 else int(b)) for b in labels)
        d = CutGraphDemand(n, 0, n - 1, edges)
        sets = enumerate_cut_support_sets(n, 0, n - 1, edges)
        prices = rng.uniform(0, 10, 12)
        if not sets:
            try:
                quote(d, prices)
                quote_bad += 1
            except UndeterminableDemand:
                pass
            continue
        checked += 1
        if abs(quote(d, prices).price - explicit_price(sets, prices)) > 1e-6:
            quote_bad += 1

    lp_bad = 0
    for _ in range(1000):
        nv = int(rng.integers(1, 4))
        rows = int(rng.integers(0, 5))
        A = rng.uniform(0, 5, (rows, nv)).round(1)
        b = rng.uniform(-2, 10, rows).round(1)
        c = rng.uniform(-1, 3, nv).round(1)
        sol = solve(LinearProgram(c, [Constraint(r, x) for r, x in zip(A, b)]))
        ref = lp_vertex_max(c, A, b)
        if ref is None:
            lp_bad += sol.status is not LpStatus.INFEASIBLE
        elif lp_is_unbounded(c, A, b):
            lp_bad += sol.status is not LpStatus.UNBOUNDED
        else:
            lp_bad += sol.status is not LpStatus.OPTIMAL or abs(sol.objective_value - ref) > 1e-6
    accept(6, flow_bad == quote_bad == lp_bad == 0,
           f"mismatches: max-flow {flow_bad}/1000, cut quote {quote_bad}/1000, simplex {lp_bad}/1000")


def test_criterion_7_fill_invariants(c1_runs, c2_ratios, c3_mismatches, tally, accept):
    accept(7, tally.fill_runs > 0 and not tally.fill_bad,
           f"{tally.fill_runs} fill runs, monotone per-item values and prices >= floor - eps; "
           f"violations {tally.fill_bad[:3]}")


def test_criterion_8_envy_feasibility(c1_runs, accept):
    bad = [e for row in c1_runs for e in row[4]]
    served = sum(row[5] or 0 for row in c1_runs)
    accept(8, not bad, f"{served} served buyers over {len(c1_runs)} lp-multi winners, "
                       f"quote == sum over C_i within 1e-6; violations {bad[:3]}")


@pytest.fixture(scope="module")
def c9_bench(tally):
    width = 2
    cfg = BenchConfig(
        generator="cut",
        sweep={"layers": list(C9_LAYERS),
               "m": [len(layered_arcs(L, width)[1]) for L in C9_LAYERS]},
        params={"n": 20, "width": width, "inf_edge_prob": 0.0},
        trials=C9_TRIALS, seed=9, schemes=("det-single", "comb-multi"), timing=False)
    res = bench(cfg)
    det = {(r.point, r.trial): r.revenue for r in res.rows if r.scheme == "det-single"}
    for trial in range(cfg.trials):
        for point, gcfg in enumerate(cfg.gen_configs(derive_seed(cfg.seed, trial))):
            inst = GENERATORS["cut"](gcfg)
            tally.bound(f"cut L={gcfg.layers} trial={trial}", inst, det[point, trial])
    return res


def test_criterion_9_cut_trend(c9_bench, accept):
    means = [p.ratios["comb-multi"] for p in c9_bench.summary()]
    ok = all(b >= a for a, b in zip(means, means[1:]))
    shown = ", ".join(f"L={L}: {r:.4f}" for L, r in zip(C9_LAYERS, means))
    accept(9, ok, f"mean comb-multi/det-single over {C9_TRIALS} trials, {shown}; nondecreasing")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
