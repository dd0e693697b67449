"""
Graphs, masks and community mixing
==================================

Two triangles joined by a single bridge. We look at in/out degrees, the
per-community mixing and what happens when the bridge end is removed.
"""
import numpy as np

from commn import Graph, Partition, community_mus, global_mixing, split_degrees
from commn.graph import largest_connected_component_size, remove_nodes

g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
part = Partition([0, 0, 0, 1, 1, 1])
print(g)

k_in, k_out = split_degrees(g, part)
print("k_in ", k_in)
print("k_out", k_out)

# mean out-link fraction inside each community, and over all links
print("mu_C  ", community_mus(g, part))
print("mixing", global_mixing(g, part))

# removal masks the node, ids stay put
h = remove_nodes(g, [2])
print("active after removing 2:", h.active_nodes())
print("LCC before/after:", largest_connected_component_size(g), largest_connected_component_size(h))
print("degrees after:", h.degrees())
assert np.array_equal(g.degrees(), [2, 2, 3, 3, 2, 2])
