"""
Immunization plans
==================

Static and sequential rankings, the per-community Commn plan and the two
random-walk strategies. We compare the largest component left behind.
"""
from commn import degree_centrality, mod_centrality
from commn.graph import largest_connected_component_size
from commn.immunization import (
    StochasticParams,
    immunize_acquaintance,
    immunize_cbf,
    immunize_commn,
    immunize_sequential,
    immunize_static,
    removal_count,
)
from commn.lfr import LfrParams, generate_lfr

g, part = generate_lfr(LfrParams(n=800, k_max=60, c_max=100, mu=0.3, seed=8))
print("intact LCC:", largest_connected_component_size(g))

for frac in (0.2, 0.35, 0.5):
    count = removal_count(frac, g.n)
    plans = {
        "degree": immunize_static(g, degree_centrality(g), count),
        "degree (seq)": immunize_sequential(g, degree_centrality, count),
        "mod (seq)": immunize_sequential(g, lambda h: mod_centrality(h, part), count, name="mod"),
        "commn": immunize_commn(g, part, frac),
        "acquaintance": immunize_acquaintance(g, count, StochasticParams(seed=1)),
        "cbf": immunize_cbf(g, count, StochasticParams(seed=1)),
    }
    line = ", ".join(f"{k} {largest_connected_component_size(p.apply(g))}" for k, p in plans.items())
    print(f"g={frac:.2f} ({count} nodes): {line}")

# Commn budgets follow community sizes
plan = immunize_commn(g, part, 0.1)
removed = part.community_of[plan.removal_order]
print("\nremovals per community (first 10):", [int((removed == c).sum()) for c in range(10)])
print("community sizes           (first 10):", part.sizes()[:10].tolist())
