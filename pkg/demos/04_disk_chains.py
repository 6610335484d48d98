"""Neighborhood chains on the disk, and why the disk has no small subgyrogroups.

Balls add by adding rapidities: B(r) + B(s) = B(tanh(artanh r + artanh s)).
Radii 3**-(n+1) satisfy U_{n+1} + U_{n+1} inside U_n; the harmonic radii
1/(n+1) do not, and the checker says where.
"""

from gyrokit import (ball_sum_radius, geometric_chain, harmonic_chain, mobius_make, nss_probe,
                     prenorm_check, validate_chain)

disk = mobius_make()
print("B(1/3) + B(1/3) = B(%.4f)" % ball_sum_radius(1 / 3, 1 / 3))

geo = validate_chain(geometric_chain(disk), "prenorm", budget=500)
print("\ngeometric chain:", "pass" if geo.passed else "fail")
bad = validate_chain(harmonic_chain(disk), "prenorm")
e = bad["doubling_condition"]
print("harmonic chain:", e.status, "at n, r, s, r + s =", e.counterexample)

print("\nprenorm of the geometric chain, depth 6, 60x60 grid:")
rep = prenorm_check(geometric_chain(disk), depth=6, grid=60, sup_samples=300, budget=300, seed=0)
print(rep.summary())

print("\nno small subgyrogroups: every point doubles its way out of B(1/2)")
for x in (0.1, 0.01, 0.001j):
    res = nss_probe(disk, 0.5, x)
    print(f"  x = {x}: escapes after {res.step} doublings, |x_k| = {[round(m, 5) for m in res.moduli]}")
