"""How big is a filter bank?

Walks through the dimension count for banks of masked polynomial filters
on a small graph, then shows what goes wrong on a symmetric graph and how
a tiny diagonal perturbation repairs it.

Run: python3 demos/bank_dimensions.py
"""

import numpy as np

from semishift import (BankSpec, bank_dimension, build_shift, genericity_check,
                       is_essential, laplacian, locality_equivalent)
from semishift.graph import Graph, cycle_graph, path_graph
from semishift.spectral import generic_perturbed_laplacian

rng = np.random.default_rng(0)

# A 6-vertex graph with no symmetries: its Laplacian already has a simple
# spectrum and no zero eigenvector entries.
g = Graph(6, ((0, 3), (0, 4), (1, 2), (1, 4), (1, 5), (4, 5)))
s = build_shift(laplacian(g))
print("genericity:", genericity_check(s))

# Three supports, each with a private vertex, so the tuple is essential.
spec = BankSpec(((0, 3), (1, 2), (4, 5, 3)), (2, 1, 3), 6)
print(f"{spec}: essential={is_essential(spec.sets)}")
print(f"  dimension {bank_dimension(spec, s)}, sum(d)+k = {sum(spec.degrees) + spec.k}")

# When one set is the union of two others it has no private vertex, and its
# filters are already sums of theirs: the count overshoots.
shared = BankSpec(((0, 1), (0,), (1,)), (1, 1, 1), 6)
print(f"{shared}: essential={is_essential(shared.sets)}, dimension {bank_dimension(shared, s)}"
      f" (the count would say {sum(shared.degrees) + shared.k})")

# The cycle C5 has repeated eigenvalues; the count fails there.
c5 = build_shift(laplacian(cycle_graph(5)))
rep = genericity_check(c5)
print("\nC5 generic?", rep.generic, f"(smallest eigenvalue gap {rep.min_eigenvalue_gap:.1e})")
full = BankSpec(((0, 1, 2, 3, 4),), (4,), 5)
print(f"  {full}: dimension {bank_dimension(full, c5)} instead of 5")

# A single perturbed Laplacian of the path P3 carries the full matrix space
# once every vertex gets its own degree-2 polynomial.
p3 = generic_perturbed_laplacian(laplacian(path_graph(3)), rng)
spec = BankSpec(((0,), (1,), (2,)), (2, 2, 2), 3)
print(f"\nP3 perturbed, {spec}: dimension {bank_dimension(spec, p3)} = 3^2")

# Rows of a degree-d polynomial filter on V0 only see the d-hop ball.
lhs, rhs = locality_equivalent(g, [0], 2, rng=rng)
print("\nrows of Q(L) on {0} computed from the 2-hop ball: max gap", np.abs(lhs - rhs).max())
