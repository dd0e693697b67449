"""
Four centralities on one network
================================

Degree and betweenness ignore communities. Mod rewards links into
important communities, Commn mixes a node's hub role inside its own
community with its bridge role towards the others.
"""
import numpy as np

from commn import betweenness_centrality, commn_centrality, degree_centrality, mod_centrality, rank
from commn.lfr import LfrParams, generate_lfr

g, part = generate_lfr(LfrParams(n=400, k_max=40, c_max=80, mu=0.3, seed=3))

scores = {
    "degree": degree_centrality(g),
    "betweenness": betweenness_centrality(g),
    "mod": mod_centrality(g, part),
    "commn": commn_centrality(g, part),
}
for name, sc in scores.items():
    print(f"{name:12s} top 10: {rank(sc)[:10].tolist()}")

# how much do the top-40 sets agree?
top = {name: set(rank(sc)[:40].tolist()) for name, sc in scores.items()}
names = list(top)
print("\noverlap of top-40 sets")
print(" " * 12 + "".join(f"{n:>12s}" for n in names))
for a in names:
    print(f"{a:12s}" + "".join(f"{len(top[a] & top[b]):12d}" for b in names))

# Commn favours nodes whose links leave their community
from commn import split_degrees
k_in, k_out = split_degrees(g, part)
best = rank(scores["commn"])[:10]
print("\nout-link share of Commn top 10:", np.round(k_out[best] / (k_in[best] + k_out[best]), 2))
