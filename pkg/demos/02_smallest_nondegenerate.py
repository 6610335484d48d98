"""How small can a gyrogroup be without being a group?

Backtracking search over Cayley tables of order 1..8, deduplicated up to
relabeling.  Every table below order 8 is a group; order 8 is the first
with gyrogroups whose gyrations are not all trivial.  Order 8 takes about
half a minute.
"""

import time

from gyrokit import search_small

for n in range(1, 9):
    t0 = time.perf_counter()
    res = search_small(n)
    nd = res.nondegenerate()
    print(f"order {n}: {len(res):2d} tables, {len(nd)} non-degenerate, "
          f"{res.nodes} nodes, {time.perf_counter() - t0:.1f}s")

print()
g = nd[0]
print("one non-degenerate table of order 8:")
print(g.table)
n = g.order
pairs = [(a, b) for a in range(n) for b in range(n) if (g.gyr_table[a, b] != range(n)).any()]
a, b = pairs[0]
print(f"gyr[{a}, {b}] permutes the elements as {g.gyr_table[a, b].tolist()}")
