"""The pricing schemes side by side on three small instances."""

import numpy as np

from querypricing import Buyer, ExplicitDemand, Instance, gen_subset_sum_gadget, run_scheme
from querypricing.schemes import fill_prices_for_service_set, score_and_order

SCHEMES = ("det-single", "lp-multi", "comb-multi", "optimal")


def show(title, inst):
    print(f"\n{title}")
    for name in SCHEMES:
        res = run_scheme(name, inst)
        print(f"  {name:>10}: revenue {res.revenue:8.4f}  prices {np.round(res.prices, 4)}")


# Buyer i wants only item i and values it at 1/i.  One posted price sells to
# a prefix of buyers and earns at most 1; item prices earn the harmonic sum.
m = 6
show("disjoint 1/i buyers", Instance(m, [Buyer(1 / (i + 1), ExplicitDemand(((i,),))) for i in range(m)]))

# Two overlapping buyers.  Pricing the shared item at the small buyer's value
# and charging the rest to the large buyer's private item serves both.
overlap = Instance(3, [Buyer(2.0, ExplicitDemand(((1, 2),))), Buyer(0.4, ExplicitDemand(((2,),)))])
show("overlapping bundles", overlap)

print("\nfill trace for serving both buyers")
trace = []
prices = fill_prices_for_service_set(overlap, score_and_order(overlap), 2, trace)
for s in trace:
    print(f"  step {s.step}: buyer {s.selected} fixes its open items at {s.price:.4f}")
print("  final prices", prices)

# A subset-sum instance in disguise: revenue B + 3*sum(a) is reachable exactly
# when some subset of a sums to B.
show("subset-sum gadget a=(1, 2), B=3", gen_subset_sum_gadget([1, 2], 3))
show("subset-sum gadget a=(2, 4), B=3", gen_subset_sum_gadget([2, 4], 3))
