"""Benchmark runner and per-instance invariant checks.

``bench`` sweeps one generator parameter, runs every requested scheme on
each (point, trial) instance and collects one :class:`ResultRow` per run.
``verify`` executes the cross-scheme invariant suite on a single instance.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Any, Optional, Sequence

import numpy as np

from querypricing.core import (
    EPS, CutGraphDemand, ExplicitDemand, Instance, ValidationError, require_valid,
)
from querypricing.gen import GenConfig, derive_seed, gen_cut_instance, gen_single_minded
from querypricing.oracle import quote
from querypricing.schemes import (
    SCHEMES, PricingResult, combinatorial_multi_price, fill_violations,
    optimal_exponential, run_scheme, score_and_order,
)

SCHEMA_VERSION = 1
GENERATORS = {"single-minded": gen_single_minded, "cut": gen_cut_instance}
SWEEPABLE = ("n", "m", "layers", "width", "inf_edge_prob", "value_lo", "value_hi")


@dataclass(frozen=True)
class BenchConfig:
    """One sweep over generator parameters.

    ``sweep`` maps :class:`GenConfig` fields to equal-length value lists that
    are zipped into sweep points (``{"layers": [5, 20], "m": [16, 76]}`` is
    two points); ``params`` holds the fixed fields.  Trial ``k`` uses the same derived seed at every
    sweep point, so points are compared on common random numbers.
    """

    generator: str
    sweep: dict[str, list]
    params: dict[str, Any] = field(default_factory=dict)
    trials: int = 100
    schemes: tuple[str, ...] = ("det-single", "lp-multi", "comb-multi")
    seed: int = 0
    baseline: str = "det-single"
    timing: bool = True
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "schemes", tuple(self.schemes))

    def violations(self) -> list[str]:
        out = []
        if self.generator not in GENERATORS:
            out.append(f"unknown generator {self.generator!r}; choose from {sorted(GENERATORS)}")
        if not self.sweep:
            out.append("sweep must name at least one parameter")
        for key, values in self.sweep.items():
            if key not in SWEEPABLE:
                out.append(f"cannot sweep {key!r}; choose from {list(SWEEPABLE)}")
            if not values:
                out.append("sweep must be nonempty")
        if len({len(v) for v in self.sweep.values()}) > 1:
            out.append("sweep lists must have equal length")
        unknown = set(self.params) - set(SWEEPABLE)
        if unknown:
            out.append(f"unknown generator parameters {sorted(unknown)}")
        if self.trials < 1:
            out.append("trials must be >= 1")
        if not self.schemes:
            out.append("need at least one scheme")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            out.append(f"unknown schemes {bad}")
        if self.baseline not in self.schemes:
            out.append(f"baseline {self.baseline!r} must be one of the schemes")
        if self.workers < 1:
            out.append("workers must be >= 1")
        if not out:
            for cfg in self.gen_configs(0):
                out.extend(cfg.violations())
        return out

    def check(self) -> None:
        bad = self.violations()
        if bad:
            raise ValidationError("invalid bench config", bad)

    @property
    def sweep_label(self) -> str:
        return ",".join(self.sweep)

    @property
    def points(self) -> list[tuple]:
        return list(zip(*self.sweep.values()))

    def gen_configs(self, seed: int) -> list[GenConfig]:
        return [GenConfig(**{**self.params, **dict(zip(self.sweep, pt)), "seed": seed})
                for pt in self.points]

    @classmethod
    def from_dict(cls, obj: dict) -> "BenchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValidationError("invalid bench config", [f"unknown keys {sorted(unknown)}"])
        types = {"generator": str, "sweep": dict, "params": dict, "trials": int, "schemes": list,
                 "seed": int, "baseline": str, "timing": bool, "workers": int}
        bad = [f"{k} must be {t.__name__}" for k, t in types.items()
               if k in obj and not isinstance(obj[k], t)]
        bad += [f"sweep values for {k!r} must be a list" for k, v in obj.get("sweep", {}).items()
                if not isinstance(v, list)] if isinstance(obj.get("sweep"), dict) else []
        if bad:
            raise ValidationError("invalid bench config", bad)
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ValidationError("invalid bench config", [str(exc)]) from None


@dataclass(frozen=True)
class ResultRow:
    instance_id: str
    point: int
    trial: int
    generator: str
    n: int
    m: int
    layers: int
    width: int
    inf_edge_prob: float
    value_lo: float
    value_hi: float
    scheme: str
    revenue: float
    served_count: int
    wall_ms: Optional[float]
    seed: int
    schema_version: int = SCHEMA_VERSION


CSV_COLUMNS = [f.name for f in fields(ResultRow)]


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def timed_run(scheme: str, instance: Instance, seed: int) -> tuple[PricingResult, float]:
    t0 = time.perf_counter()
    res = run_scheme(scheme, instance, seed)
    return res, (time.perf_counter() - t0) * 1e3


def _run_trial(cfg: BenchConfig, point: int, trial: int) -> list[ResultRow]:
    seed = derive_seed(cfg.seed, trial)
    gcfg = cfg.gen_configs(seed)[point]
    inst = GENERATORS[cfg.generator](gcfg)
    rows = []
    for scheme in cfg.schemes:
        res, ms = timed_run(scheme, inst, derive_seed(seed, 1))
        rows.append(ResultRow(
            f"p{point}-t{trial}", point, trial, cfg.generator, gcfg.n, gcfg.m, gcfg.layers,
            gcfg.width, gcfg.inf_edge_prob, gcfg.value_lo, gcfg.value_hi, scheme,
            res.revenue, res.report.served_count, ms if cfg.timing else None, seed))
    return rows


def _run_trial_args(args) -> list[ResultRow]:
    return _run_trial(*args)


@dataclass(frozen=True)
class PointSummary:
    point: int
    value: tuple
    ratios: dict[str, float]  # scheme -> mean ratio to the baseline
    counts: dict[str, int]


@dataclass
class BenchResult:
    config: BenchConfig
    rows: list[ResultRow]

    def ratios(self, scheme: str, point: int) -> list[float]:
        """Per-instance revenue ratios ``scheme / baseline`` at one point.

        Instances where the baseline earns nothing count as ratio 1 if the
        scheme also earns nothing and are dropped otherwise."""
        by = {(r.trial, r.scheme): r.revenue for r in self.rows if r.point == point}
        out = []
        for t in range(self.config.trials):
            num, den = by[t, scheme], by[t, self.config.baseline]
            if den > 0:
                out.append(num / den)
            elif num <= EPS:
                out.append(1.0)
        return out

    def summary(self) -> list[PointSummary]:
        out = []
        for k, value in enumerate(self.config.points):
            ratios, counts = {}, {}
            for s in self.config.schemes:
                rs = self.ratios(s, k)
                ratios[s] = float(np.mean(rs)) if rs else math.nan
                counts[s] = len(rs)
            out.append(PointSummary(k, value, ratios, counts))
        return out

    def summary_table(self) -> str:
        key = self.config.sweep_label
        others = [s for s in self.config.schemes if s != self.config.baseline]
        head = [key] + [f"{s}/{self.config.baseline}" for s in others]
        lines = ["  ".join(f"{h:>22}" for h in head)]
        for p in self.summary():
            cells = [",".join(map(str, p.value))] + [f"{p.ratios[s]:.4f}" for s in others]
            lines.append("  ".join(f"{c:>22}" for c in cells))
        return "\n".join(lines)

    def csv(self) -> str:
        return rows_to_csv(self.rows)


def bench(cfg: BenchConfig) -> BenchResult:
    cfg.check()
    points = len(cfg.points)
    tasks = [(cfg, p, t) for p in range(points) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            # map preserves task order, so rows come out sorted by (point, trial)
            chunks = list(pool.map(_run_trial_args, tasks, chunksize=4))
    else:
        chunks = [_run_trial(*t) for t in tasks]
    return BenchResult(cfg, list(itertools.chain.from_iterable(chunks)))


# -- verify ----------------------------------------------------------------

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list[Check]
    revenues: dict[str, float]

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def format(self) -> str:
        lines = [f"{name:>12}: revenue {rev:.6g}" for name, rev in self.revenues.items()]
        lines += [f"[{c.status.upper():>4}] {c.name}" + (f": {c.detail}" if c.detail else "")
                  for c in self.checks]
        return "\n".join(lines)


@dataclass(frozen=True)
class VerifyCaps:
    optimal_buyers: int = 12
    brute_force_nodes: int = 14


def _brute_cut_price(d: CutGraphDemand, prices: np.ndarray) -> float:
    """Cheapest finite s-t cut by enumerating node bipartitions."""
    inner = [v for v in range(d.nodes) if v not in (d.source, d.sink)]
    best = math.inf
    for mask in range(1 << len(inner)):
        side = {d.source} | {v for k, v in enumerate(inner) if mask >> k & 1}
        total = 0.0
        for u, v, b in d.edges:
            if u in side and v not in side:
                if b is None:
                    total = math.inf
                    break
                total += prices[b]
        best = min(best, total)
    return best


def _check(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name, PASS if ok else FAIL, "" if ok else detail)


def _gadget_params(inst: Instance) -> Optional[tuple[list[int], int]]:
    """Recover ``(a, B)`` if ``inst`` has the subset-sum gadget shape."""
    bs = inst.buyers
    m = inst.m
    if len(bs) != 2 * m + 1 or not inst.is_single_minded:
        return None
    a = []
    for j in range(m):
        lo, hi = bs[2 * j], bs[2 * j + 1]
        if lo.demand.support_sets != ((j,),) or hi.demand.support_sets != ((j,),):
            return None
        if lo.value < 1 or lo.value != int(lo.value) or hi.value != 2 * lo.value:
            return None
        a.append(int(lo.value))
    last = bs[-1]
    B = last.value - sum(a)
    if last.demand.support_sets != (tuple(range(m)),) or B < 1 or B != int(B):
        return None
    return a, int(B)


def verify(instance: Instance, caps: VerifyCaps = VerifyCaps()) -> VerifyReport:
    """Run the invariant suite on a validated instance."""
    require_valid(instance)
    checks: list[Check] = []
    results: dict[str, PricingResult] = {}
    for name in ("rand-single", "det-single", "lp-multi", "comb-multi"):
        results[name] = run_scheme(name, instance, 0)
    det = results["det-single"].revenue

    for name in ("lp-multi", "comb-multi"):
        rev = results[name].revenue
        checks.append(_check(f"dominance {name} >= det-single", rev >= det - 1e-6,
                             f"{rev!r} < {det!r}"))

    bound = float(instance.values.sum()) / sum(1 / k for k in range(1, instance.n * instance.m + 1)) \
        if instance.n else 0.0
    checks.append(_check("det-single >= sum(v) / H(nm)", det >= bound - 1e-9,
                         f"{det!r} < {bound!r}"))

    lp = results["lp-multi"]
    scored = score_and_order(instance)
    bad = []
    for s in scored[:lp.service_size or 0]:
        q = quote(instance.buyers[s.index].demand, lp.prices).price
        want = float(sum(lp.prices[b] for b in s.support))
        if abs(q - want) > 1e-6:
            bad.append(f"buyer {s.index}: quote {q!r} != {want!r}")
    checks.append(_check("lp-multi envy-feasibility", not bad, "; ".join(bad)))

    traces: list = []
    combinatorial_multi_price(instance, traces)
    bad = []
    for size, states, prices, floor in traces:
        bad += [f"N_{size}: {v}" for v in fill_violations(states, prices, floor, instance.sentinel)]
    checks.append(_check("fill invariants", not bad, "; ".join(bad[:5])))

    # quote oracle against brute force at every scheme's prices
    cut_buyers = [b for b in instance.buyers if isinstance(b.demand, CutGraphDemand)]
    if any(b.demand.nodes > caps.brute_force_nodes for b in cut_buyers):
        checks.append(Check("oracle vs brute force", SKIP,
                            f"cut graph exceeds {caps.brute_force_nodes} nodes"))
    else:
        bad = []
        for name, res in results.items():
            for i, b in enumerate(instance.buyers):
                got = quote(b.demand, res.prices).price
                if isinstance(b.demand, ExplicitDemand):
                    want = min(float(sum(res.prices[x] for x in s)) for s in b.demand.support_sets)
                else:
                    want = _brute_cut_price(b.demand, res.prices)
                if abs(got - want) > 1e-6:
                    bad.append(f"{name} buyer {i}: {got!r} != {want!r}")
        checks.append(_check("oracle vs brute force", not bad, "; ".join(bad[:5])))

    gadget = _gadget_params(instance)
    if not instance.is_single_minded:
        checks.append(Check("optimal dominates", SKIP, "instance is not single-minded"))
    elif instance.n > caps.optimal_buyers:
        checks.append(Check("optimal dominates", SKIP,
                            f"n = {instance.n} exceeds cap {caps.optimal_buyers}"))
    else:
        opt = optimal_exponential(instance, max_buyers=caps.optimal_buyers)
        results["optimal"] = opt
        low = [n for n, r in results.items() if r.revenue > opt.revenue + 1e-6]
        checks.append(_check("optimal dominates", not low, f"beaten by {low}"))
        if gadget is not None:
            a, B = gadget
            target = B + 3 * sum(a)
            yes = any(sum(c) == B for r in range(len(a) + 1)
                      for c in itertools.combinations(a, r))
            ok = abs(opt.revenue - target) <= 1e-6 if yes else opt.revenue < target - 1e-6
            checks.append(_check(f"gadget identity ({'YES' if yes else 'NO'})", ok,
                                 f"optimal {opt.revenue!r} vs B+3A = {target}"))
    revenues = {name: r.revenue for name, r in results.items()}
    return VerifyReport(checks, revenues)


__all__ = [
    "SCHEMA_VERSION", "BenchConfig", "BenchResult", "ResultRow", "PointSummary", "bench",
    "rows_to_csv", "read_csv", "timed_run", "Check", "VerifyCaps", "VerifyReport", "verify",
]
