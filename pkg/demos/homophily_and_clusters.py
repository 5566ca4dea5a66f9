"""Choosing vertex subsets: homophily scores and k-means supports.

Homophily measures how often a vertex's neighbours share its label; a
class with low one-hop but high two-hop homophily suggests propagating
further than one hop. K-means on node features gives the subsets used by a
SemiGCN layer when no edge types are available.

Run: python3 demos/homophily_and_clusters.py
"""

import numpy as np

from semishift import TypedGraph, heterogeneous_support, kmeans
from semishift.gnn import homophily_counts, lloyd
from semishift.graph import Graph, cycle_graph

# A star whose centre has a different label from its leaves: each leaf's
# only neighbour disagrees, but its two-hop ring is all leaves.
star = Graph(5, tuple((0, leaf) for leaf in range(1, 5)))
labels = ["hub", "leaf", "leaf", "leaf", "leaf"]
for eta in ("hub", "leaf"):
    for hops in (1, 2):
        score, count = homophily_counts(star, labels, eta, hops)
        print(f"star  H_{eta}({hops} hop) = {score}  over {count} vertices")

score, count = homophily_counts(cycle_graph(3), ["a", "a", "b"], "a")
print(f"triangle (a, a, b): H_a = {score}")

# k-means on two blobs; the partition becomes a tuple of vertex sets.
rng = np.random.default_rng(4)
X = np.vstack([rng.normal(0, 0.3, (6, 2)), rng.normal(3, 0.3, (5, 2))])
res = lloyd(X, 2, seed=1)
print(f"\nk-means: {res.clusters()} after {res.iterations} iterations")
print("objective per step:", [round(v, 3) for v in res.history])
print("same partition via kmeans():", kmeans(X, 2, seed=1) == res.clusters())

# With typed edges, each edge type contributes the set of its endpoints.
tg = TypedGraph.from_edges(
    6, [(0, 2), (1, 3), (0, 3), (0, 4), (1, 4)],
    ["movie-actor", "movie-actor", "movie-actor", "movie-director", "movie-director"],
    ["movie", "movie", "actor", "actor", "director", "movie"])
print("\nedge-type supports:", dict(zip(tg.edge_alphabet, heterogeneous_support(tg))))
print("vertex 5 (no edges) appears in none of them")
