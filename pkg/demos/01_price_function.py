"""How a query is priced from the prices of its base queries.

A buyer's query is determined by any one of several bundles of base
queries.  The seller may only charge the cheapest such bundle, otherwise the
buyer would assemble the answer from the parts.
"""

import numpy as np

from querypricing import CutGraphDemand, ExplicitDemand, quote

prices = np.array([5.0, 2.0, 2.0, 1.0])

# Either base query 0 alone, or base queries 1 and 2 together, answer the query.
demand = ExplicitDemand(((0,), (1, 2)))
q = quote(demand, prices)
print(f"explicit: price {q.price}, bought as {sorted(q.minimizer)}")

# Supersets never help: {0, 3} costs more than {0} at any nonnegative prices,
# so it is dropped when the demand is built.
print("normalized support sets:", ExplicitDemand(((0, 3), (0,), (1, 2))).support_sets)

# For join-like queries the bundles are the cuts of a small network.  Here
# arcs 0 and 1 run in parallel into node 1, and arc 2 leads on to the sink,
# so the bundles are {0, 1} and {2}.
graph = CutGraphDemand(nodes=3, source=0, sink=2, edges=((0, 1, 0), (0, 1, 1), (1, 2, 2)))
q = quote(graph, prices)
print(f"cut graph: price {q.price}, bought as {sorted(q.minimizer)}")

# Raising the price of base query 2 makes the parallel pair the cheaper cut.
prices[2] = 9.0
q = quote(graph, prices)
print(f"after repricing: price {q.price}, bought as {sorted(q.minimizer)}")
