"""The Möbius disk: a gyrogroup that is not a group.

a + b = (a + b) / (1 + conj(a) b) on |z| < 1.  Addition is not associative,
but the defect is a rotation gyr[a, b], and the gyrogroup axioms hold.
"""

from gyrokit import gyr_consistency_check, is_degenerate_group, mobius_make, verify_axioms

disk = mobius_make()

a, b, z = 0.5j, 0.5, 0.3
print("a + b            =", disk.add(a, b))
print("b + a            =", disk.add(b, a), "(not commutative)")
left = disk.add(a, disk.add(b, z))
right = disk.add(disk.add(a, b), z)
print("a + (b + z)      =", left)
print("(a + b) + z      =", right, "(not associative)")
print("gyr[a, b] factor =", disk.gyr_factor(a, b), "= (15 + 8i) / 17")
print("(a + b) + gyr z  =", disk.add(disk.add(a, b), disk.gyr(a, b, z)), "(left gyroassociative)")

print()
rep = verify_axioms(disk, budget=5000, seed=0)
print(rep.summary())
print()
print(gyr_consistency_check(disk, budget=5000, seed=0).summary())
degenerate, witness = is_degenerate_group(disk)
print()
print("degenerate (a group)?", degenerate, "witness:", witness)
