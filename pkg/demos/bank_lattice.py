"""The inclusion order among banks on the two-vertex path.

Every bank with at most two support sets and degrees at most one is
enumerated, duplicates (same span) are merged, and the Hasse diagram is
printed bottom-up. Joins and meets are looked up on the diagram.

Run: python3 demos/bank_lattice.py [out.dot]
"""

import sys

from semishift import BankSpec, build_lattice, build_shift, dedup_banks, enumerate_banks, join, meet
from semishift import laplacian
from semishift.graph import path_graph

s = build_shift(laplacian(path_graph(2)))
specs = enumerate_banks(2, max_d=1)
kept = dedup_banks(specs, s)
lat = build_lattice(kept, s)
print(f"{len(specs)} enumerated banks, {len(kept)} distinct spans, "
      f"{len(lat)} nodes with the zero space, {len(lat.edges)} covering edges\n")

for dim in sorted(set(lat.dims)):
    row = [lat.label(i) for i in range(len(lat)) if lat.dims[i] == dim]
    print(f"dim {dim}: " + "   ".join(row))

print("\ncovering edges:")
for c, p in lat.edges:
    print(f"  {lat.label(c):>22}  <  {lat.label(p)}")

si = lat.index(BankSpec(((0, 1),), (1,), 2))
for v in (0, 1):
    single = lat.index(BankSpec(((v,),), (1,), 2), s)
    print(f"\njoin({lat.label(si)}, {lat.label(single)}) = {lat.label(join(lat, si, single))}")
    print(f"meet({lat.label(si)}, {lat.label(single)}) = {lat.label(meet(lat, si, single))}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(lat.to_dot())
    print("\nwrote", sys.argv[1], "(render with: dot -Tpng)")
