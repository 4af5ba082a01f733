"""A small version of the revenue-ratio studies.

Random single-minded buyers over a growing pool of base queries: how much
more do the item-pricing schemes earn than the best single posted price?
Raise ``trials`` for smoother curves; the full runs live in the acceptance
suite.
"""

from querypricing.harness import BenchConfig, bench

cfg = BenchConfig(
    generator="single-minded",
    sweep={"m": [10, 30, 100]},
    params={"n": 20},
    trials=10,
    seed=1,
    schemes=("det-single", "lp-multi", "comb-multi"),
    timing=False,
)
result = bench(cfg)
print(result.summary_table())

# Every row of the CSV is one (instance, scheme) run.
print()
print("\n".join(result.csv().splitlines()[:4]))
