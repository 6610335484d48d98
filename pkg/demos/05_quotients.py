"""Cosets always partition, but coset addition need not be well defined.

For a subgyrogroup H, the left cosets a + H partition the carrier.  The
rule (a + H) + (b + H) = (a + b) + H gives a quotient only when the answer
does not depend on the representatives.  In Z6 by {0, 3} it never does.  In
an order-8 gyrogroup it can, even for a subgyrogroup fixed by every gyr[a, h].
"""

from pathlib import Path

from gyrokit import IllDefined, finite_from_table, group_adapter, is_L_subgyrogroup, left_cosets, quotient, read_table

z6 = group_adapter(6)
print("cosets of {0, 3} in Z6:", left_cosets(z6, [0, 3]).blocks)
q, rep = quotient(z6, [0, 3])
print("quotient table:", q.table.tolist())

fixture = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "gyro8_0.tbl"
g = finite_from_table(read_table(fixture)[0])
H = [0, 2]
print("\norder-8 gyrogroup, H =", H)
print("L-subgyrogroup (gyr[a, h] H = H)?", bool(is_L_subgyrogroup(g, H)[0]))
print("cosets:", left_cosets(g, H).blocks)
try:
    quotient(g, H)
except IllDefined as err:
    a, a2, b, b2 = err.witness
    print(f"ill defined: {a} ~ {a2} and {b} ~ {b2}, but {a} + {b} = {g.add(a, b)} "
          f"while {a2} + {b2} = {g.add(a2, b2)}, in different cosets")
