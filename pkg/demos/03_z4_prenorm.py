"""From a chain of neighborhoods to a prenorm, by hand, on Z4.

Chain: U0 = Z4, U1 = {0, 2}, U2 = U3 = ... = {0}.  The dyadic family V(r)
is built from it, f(x) is the least r with x in V(r), and
N(x) = max_y |f(x + y) - f(y)|.
"""

from gyrokit import (DyadicFamily, coset_metric, finite_chain, group_adapter, metric_check,
                     prenorm_check, prenorm_table)

z4 = group_adapter(4)
chain = finite_chain(z4, [[0, 1, 2, 3], [0, 2], [0]])
fam = DyadicFamily(chain, 3)
for n in range(3):
    for m in range(1, 2 ** n + 1, 2 if n else 1):
        print(f"V({m}/{2 ** n}) = {set(fam.V(m, n).members)}")

tab = prenorm_table(fam)
print()
print("f =", tab.f.tolist())
print("N =", tab.N.tolist())
print()
print(prenorm_check(chain, 3, table=tab).summary())

print()
print("with P = {0} the coset metric is a metric on Z4 itself:")
for x in range(4):
    print("  ", [coset_metric(z4, [0], tab, x, y) for y in range(4)])
print(metric_check(z4, [0], tab).summary())
