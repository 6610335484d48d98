"""Set-level arithmetic A + B and -A, neighborhood chains and chain checks.

Finite carriers use exact boolean masks.  On the Möbius disk a set is a
seeded cloud of sample points plus a membership predicate; a centered open
ball additionally knows its radius, which makes ball sums exact through the
rapidity law B(r) + B(s) = B((r + s) / (1 + rs)).  Inclusions between
sampled sets are one-sided: "no violation among the cloud points".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .carriers import FiniteGyrogroupTable, MobiusDisk
from .core import Carrier, GyroError, PropertyResult, VerificationReport, as_scalar
from .subgyro import SubgyroHandle, _handle, is_subgyrogroup

DEFAULT_DEPTH = 16
DEFAULT_RESOLUTION = 512


class CarrierMismatch(GyroError, ValueError):
    pass


class ConditionsViolated(GyroError):
    """A family member U has no partner V with V + V and -V inside U."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"no matching V for U = {witness}")


class SetHandle:
    carrier: Carrier
    exact: bool = False

    def contains(self, xs) -> np.ndarray:
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        return bool(np.asarray(self.contains(np.atleast_1d(x)))[0])


class ExactSet(SetHandle):
    """Subset of a finite Cayley-table carrier, stored as a mask."""

    exact = True

    def __init__(self, carrier: FiniteGyrogroupTable, members=(), mask=None):
        if not isinstance(carrier, FiniteGyrogroupTable):
            raise TypeError("exact sets need a finite Cayley-table carrier")
        self.carrier = carrier
        if mask is None:
            idx = np.asarray(list(members), dtype=np.int64)
            carrier.check(idx)
            mask = np.zeros(carrier.order, dtype=bool)
            mask[idx] = True
        self.mask = np.asarray(mask, dtype=bool).copy()
        self.mask.flags.writeable = False

    @classmethod
    def whole(cls, carrier):
        return cls(carrier, mask=np.ones(carrier.order, dtype=bool))

    @property
    def members(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.mask))

    def contains(self, xs):
        return self.mask[np.asarray(xs, dtype=np.int64)]

    def __len__(self):
        return int(self.mask.sum())

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        if isinstance(other, ExactSet):
            return self.carrier is other.carrier and bool((self.mask == other.mask).all())
        if isinstance(other, (set, frozenset, tuple, list)):
            return set(self.members) == {int(x) for x in other}
        return NotImplemented

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __and__(self, other):
        return ExactSet(self.carrier, mask=self.mask & other.mask)

    def __repr__(self):
        return f"ExactSet({set(self.members) or '{}'})"


def _sort_cloud(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((np.angle(z), np.abs(z)))]


class SampledSet(SetHandle):
    """Subset of the disk given by a predicate and a cloud of its points."""

    def __init__(self, carrier: MobiusDisk, cloud, predicate: Callable, resolution: int, seed: int):
        self.carrier = carrier
        self.predicate = predicate
        self.resolution = int(resolution)
        self.seed = seed
        cloud = _sort_cloud(np.atleast_1d(cloud))
        self.cloud = cloud[np.asarray(predicate(cloud), dtype=bool)]

    def contains(self, xs):
        return np.asarray(self.predicate(np.asarray(xs, dtype=complex)), dtype=bool)

    def __repr__(self):
        return f"SampledSet({len(self.cloud)} points)"


def _disk_points(rng, k, radius):
    # uniform in the disk of the given radius, by inverse-cdf on the modulus
    r = radius * np.sqrt(rng.random(k))
    return r * np.exp(2j * np.pi * rng.random(k))


class Ball(SampledSet):
    """Open ball |z| < radius around 0; radius >= 1 is the whole disk."""

    def __init__(self, carrier: MobiusDisk, radius: float, resolution: int = DEFAULT_RESOLUTION,
                 seed: int = 0):
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        rho = min(self.radius, carrier.guard_radius)
        rng = np.random.default_rng(seed)
        ring = 64
        inner = _disk_points(rng, max(resolution - ring, 0), rho)
        edge = rho * (1 - 1e-9) * np.exp(2j * np.pi * np.arange(ring) / ring)
        cloud = np.concatenate([[0], inner, edge])
        super().__init__(carrier, cloud, self._pred, resolution, seed)

    @property
    def whole(self) -> bool:
        return self.radius >= 1

    def _pred(self, z):
        if self.whole:
            return np.abs(z) < 1
        return np.abs(z) < self.radius + self.carrier.tol

    def __repr__(self):
        return "Ball(whole disk)" if self.whole else f"Ball({self.radius:.6g})"


def ball_sum_radius(r: float, s: float) -> float:
    """Radius of B(r) + B(s) on the disk; the rapidities of r and s add."""
    if r >= 1 or s >= 1:
        return 1.0
    return (r + s) / (1 + r * s)


def _same_carrier(*sets):
    c = sets[0].carrier
    for s in sets[1:]:
        if s.carrier is not c and s.carrier != c:
            raise CarrierMismatch("sets live on different carriers")
    return c


def set_add(A: SetHandle, B: SetHandle, resolution: int | None = None) -> SetHandle:
    """The set {a + b : a in A, b in B}."""
    c = _same_carrier(A, B)
    if isinstance(A, ExactSet):
        if not isinstance(B, ExactSet):
            raise CarrierMismatch("cannot mix exact and sampled sets")
        out = np.zeros(c.order, dtype=bool)
        out[c.table[np.ix_(np.flatnonzero(A.mask), np.flatnonzero(B.mask))].ravel()] = True
        return ExactSet(c, mask=out)
    if isinstance(A, Ball) and isinstance(B, Ball):
        return Ball(c, ball_sum_radius(A.radius, B.radius), resolution or max(A.resolution, B.resolution),
                    A.seed)
    a, b = np.meshgrid(A.cloud, B.cloud, indexing="ij")
    cloud = c.add(a.ravel(), b.ravel())
    a_cloud = A.cloud

    def pred(z, chunk=256):
        # z is in A + B iff some cloud point a of A has -a + z in B
        z = np.atleast_1d(z)
        hit = np.zeros(z.shape, dtype=bool)
        for i in range(0, len(a_cloud), chunk):
            aa = a_cloud[i:i + chunk, None]
            hit |= B.contains(c.add(-aa, z[None, :]).ravel()).reshape(-1, len(z)).any(axis=0)
        return hit

    return SampledSet(c, cloud, pred, A.resolution * B.resolution, A.seed)


def set_inv(A: SetHandle) -> SetHandle:
    """The set {-a : a in A}."""
    c = A.carrier
    if isinstance(A, ExactSet):
        out = np.zeros(c.order, dtype=bool)
        out[c.inverse[A.mask]] = True
        return ExactSet(c, mask=out)
    if isinstance(A, Ball):
        return A
    return SampledSet(c, -A.cloud, lambda z: A.contains(-np.asarray(z)), A.resolution, A.seed)


def set_gyr(A: SetHandle, a, b) -> SetHandle:
    """Image of A under gyr[a, b]."""
    c = A.carrier
    if isinstance(A, ExactSet):
        out = np.zeros(c.order, dtype=bool)
        out[c.gyration(a, b)[A.mask]] = True
        return ExactSet(c, mask=out)
    g = c.gyr_factor(a, b)
    return SampledSet(c, g * A.cloud, lambda z: A.contains(np.asarray(z) / g), A.resolution, A.seed)


def subset_check(A: SetHandle, B: SetHandle):
    """``(ok, witness, mode)`` for A inside B.

    ``mode`` is "exact" for masks, "closed-form" for two balls and
    "sampled" otherwise; a sampled pass only means no cloud point of A
    falls outside B.
    """
    _same_carrier(A, B)
    if isinstance(A, ExactSet):
        bad = np.flatnonzero(A.mask & ~B.mask)
        return (bad.size == 0, None if bad.size == 0 else int(bad[0]), "exact")
    if isinstance(A, Ball) and isinstance(B, Ball):
        ok = B.whole or (not A.whole and A.radius <= B.radius + A.carrier.tol)
        return ok, None if ok else (A.radius, B.radius), "closed-form"
    inside = B.contains(A.cloud)
    if inside.all():
        return True, None, "sampled"
    return False, as_scalar(A.cloud[int(np.flatnonzero(~inside)[0])]), "sampled"


def set_equal(A: SetHandle, B: SetHandle) -> bool:
    if isinstance(A, ExactSet):
        return A == B
    return subset_check(A, B)[0] and subset_check(B, A)[0]


def disjointness_check(A: ExactSet, B: ExactSet, C: ExactSet):
    """Both sides of: (A + B) n C empty  <=>  B n ((-A) + C) empty.

    Returns ``(lhs_empty, rhs_empty, verdict)`` with verdict "pass" when
    the two truth values agree.  Exact sets only.
    """
    for s in (A, B, C):
        if not isinstance(s, ExactSet):
            raise TypeError("the disjointness equivalence is only checked on exact sets")
    _same_carrier(A, B, C)
    lhs = not (set_add(A, B).mask & C.mask).any()
    rhs = not (B.mask & set_add(set_inv(A), C).mask).any()
    return lhs, rhs, "pass" if lhs == rhs else "fail"


@dataclass
class NeighborhoodChain:
    """Decreasing symmetric neighborhoods U0, U1, ... of the identity.

    With ``stable_tail`` the last set repeats forever (finite carriers).
    Otherwise ``factory(n)`` extends the chain on demand and ``kernel``
    is a predicate for the intersection of all members.
    """

    sets: list
    stable_tail: bool = False
    factory: Callable | None = None
    kernel: Callable | None = None
    label: str = ""
    radii: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.sets:
            raise ValueError("empty chain")

    @property
    def carrier(self) -> Carrier:
        return self.sets[0].carrier

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, n: int) -> SetHandle:
        if n < 0:
            raise IndexError(n)
        if n < len(self.sets):
            return self.sets[n]
        if self.stable_tail:
            return self.sets[-1]
        if self.factory is not None:
            return self.factory(n)
        raise IndexError(f"chain has only {len(self.sets)} members")

    def radius(self, n: int) -> float:
        return self[n].radius

    def kernel_contains(self, xs) -> np.ndarray:
        """Membership in the intersection of the whole chain."""
        if self.stable_tail:
            return self.sets[-1].contains(xs)
        if self.kernel is not None:
            return np.asarray(self.kernel(np.asarray(xs)), dtype=bool)
        raise ValueError("chain has no known intersection")

    def kernel_set(self) -> SubgyroHandle:
        c = self.carrier
        if self.stable_tail:
            return _handle(c, np.asarray(self.sets[-1].members), is_subgyrogroup="unchecked")
        return _handle(c, np.asarray([c.identity]), is_subgyrogroup="unchecked")


def finite_chain(carrier: FiniteGyrogroupTable, sets: Sequence, label: str = "") -> NeighborhoodChain:
    """Chain of explicit subsets; the last one repeats forever."""
    handles = [s if isinstance(s, ExactSet) else ExactSet(carrier, s) for s in sets]
    return NeighborhoodChain(handles, stable_tail=True, label=label or "finite")


def ball_chain(disk: MobiusDisk, radius: Callable, depth: int = DEFAULT_DEPTH,
               resolution: int = DEFAULT_RESOLUTION, seed: int = 0, label: str = "balls",
               limit: float = 0.0) -> NeighborhoodChain:
    """Chain U_n = B(radius(n)); the chain intersects down to B(limit) or {0}."""

    def make(n):
        return Ball(disk, radius(n), resolution, seed + n)

    sets = [make(n) for n in range(depth + 1)]
    if limit > 0:
        kernel = lambda z: np.abs(z) <= limit + disk.tol
    else:
        kernel = lambda z: np.abs(z) <= disk.tol
    return NeighborhoodChain(sets, factory=make, kernel=kernel, label=label,
                             radii=[radius(n) for n in range(depth + 1)])


def geometric_chain(disk: MobiusDisk, r0: float = 1 / 3, ratio: float = 1 / 3, **kw) -> NeighborhoodChain:
    """Balls with radii r0 * ratio**n (the default disk chain)."""
    return ball_chain(disk, lambda n: r0 * ratio ** n, label=f"geometric r0={r0:g} ratio={ratio:g}", **kw)


def harmonic_chain(disk: MobiusDisk, **kw) -> NeighborhoodChain:
    """Balls with radii 1/n; U0 and U1 are the whole disk."""
    return ball_chain(disk, lambda n: np.inf if n == 0 else 1.0 / n, label="harmonic", **kw)


def closure_via_chain(A: SetHandle, chain: NeighborhoodChain, depth: int | None = None) -> SetHandle:
    """Intersection of U_n + A over the chain, up to ``depth``.

    For a finite chain ending in {0} this is A itself (discrete closure).
    On the disk with a ball A the result is the ball of radius
    min_n (r_n + a) / (1 + r_n a), a superset of A that shrinks to the
    closed ball as the depth grows.
    """
    if chain is None or len(chain) == 0:
        raise ValueError("empty chain")
    if depth is None:
        depth = len(chain) if chain.stable_tail else len(chain) - 1
    pieces = [set_add(chain[n], A) for n in range(depth + 1)]
    if isinstance(A, ExactSet):
        mask = np.logical_and.reduce([p.mask for p in pieces])
        return ExactSet(A.carrier, mask=mask)
    if all(isinstance(p, Ball) for p in pieces):
        return Ball(A.carrier, min(p.radius for p in pieces), A.resolution, A.seed)

    def pred(z):
        return np.logical_and.reduce([p.contains(z) for p in pieces])

    return SampledSet(A.carrier, np.concatenate([A.cloud, pieces[-1].cloud]), pred, A.resolution, A.seed)


def intersection_subgyrogroup(family: Sequence[ExactSet], pairing: dict | None = None) -> SubgyroHandle:
    """H = intersection of the family, for a family closed in the sense that
    each U has some V in the family with V + V and -V inside U.

    ``pairing`` maps the position of U to the position of its V; without it
    every member is tried and the first match is used.
    """
    if not family:
        raise ValueError("empty family")
    for i, U in enumerate(family):
        cands = [pairing[i]] if pairing is not None else range(len(family))
        for j in cands:
            V = family[j]
            if subset_check(set_add(V, V), U)[0] and subset_check(set_inv(V), U)[0]:
                break
        else:
            raise ConditionsViolated(set(U.members))
    c = family[0].carrier
    mask = np.logical_and.reduce([U.mask for U in family])
    arr = np.flatnonzero(mask)
    ok, _ = is_subgyrogroup(c, arr)
    return _handle(c, arr, is_subgyrogroup="yes" if ok else "no")


# --- chain validation -------------------------------------------------------

def _levels(chain: NeighborhoodChain, depth: int | None) -> int:
    if depth is not None:
        return depth
    return len(chain) + 1 if chain.stable_tail else len(chain) - 1


def _inclusion_entry(name: str, pairs) -> PropertyResult:
    """``pairs`` yields (level, lhs_set, rhs_set, label) and checks lhs inside rhs."""
    checks = 0
    modes = set()
    for n, lhs, rhs, label in pairs:
        ok, wit, mode = subset_check(lhs, rhs)
        modes.add(mode)
        checks += len(lhs) if isinstance(lhs, ExactSet) else (1 if mode == "closed-form" else len(lhs.cloud))
        if not ok:
            cex, res = _witness(n, lhs, rhs, wit, label)
            return PropertyResult(name, "fail", checks, counterexample=cex, residual=res,
                                  note=f"{label}; {mode}")
    note = "; ".join(sorted(modes))
    if "sampled" in modes:
        note += " (one-sided: no violation among cloud points)"
    return PropertyResult(name, "pass", checks, note=note)


def _witness(n, lhs, rhs, wit, label):
    if isinstance(lhs, ExactSet):
        return [n, wit], 1.0
    if isinstance(wit, tuple):
        r_in, r_out = wit
        return [n, r_in, r_out], float(r_in - r_out)
    return [n, [float(np.real(wit)), float(np.imag(wit))]], float(abs(wit))


def _doubling_entry(name, chain, levels, target) -> PropertyResult:
    """U_{n+1} + U_{n+1} inside target(n) for n < levels."""
    checks = 0
    for n in range(levels):
        V = chain[n + 1]
        T = target(n)
        S = set_add(V, V)
        ok, wit, mode = subset_check(S, T)
        if isinstance(V, ExactSet):
            checks += len(V) ** 2
            if not ok:
                c = V.carrier
                idx = np.flatnonzero(V.mask)
                a, b = np.meshgrid(idx, idx, indexing="ij")
                s = c.table[a, b]
                i = int(np.flatnonzero(~T.mask[s].ravel())[0])
                cex = [n, int(a.ravel()[i]), int(b.ravel()[i]), int(s.ravel()[i])]
                return PropertyResult(name, "fail", checks, counterexample=cex, residual=1.0,
                                      note=f"U_{n + 1} + U_{n + 1} leaves the target at n={n}")
        elif mode == "closed-form":
            checks += 1
            if not ok:
                r = V.radius
                cex = [n, r, r, S.radius]
                bound = T.radius
                return PropertyResult(name, "fail", checks, counterexample=cex, residual=S.radius - bound,
                                      note=f"2r/(1+r^2) = {S.radius:.6g} > {bound:.6g} at n={n}")
        else:
            checks += len(S.cloud)
            if not ok:
                return PropertyResult(name, "fail", checks, counterexample=[n, [wit.real, wit.imag]],
                                      residual=float(abs(wit)), note=f"sampled sum point outside at n={n}")
    return PropertyResult(name, "pass", checks)


def _gyr_invariance_entry(chain, levels, budget, seed) -> PropertyResult:
    c = chain.carrier
    checks = 0
    if isinstance(c, FiniteGyrogroupTable):
        g = c.gyr_table  # g[a, b, z]
        for n in range(levels + 1):
            m = chain[n].mask
            img = g[:, :, m]
            bad = ~m[img]
            checks += img.size
            if bad.any():
                a, b, k = np.unravel_index(int(np.flatnonzero(bad)[0]), bad.shape)
                z = int(np.flatnonzero(m)[k])
                return PropertyResult("gyr_invariant", "fail", checks,
                                      counterexample=[n, int(a), int(b), z], residual=1.0)
        return PropertyResult("gyr_invariant", "pass", checks, note="exhaustive")
    rng = np.random.default_rng(seed)
    # split the budget evenly over levels, then into gyrations x points
    per_level = max(1, budget // (levels + 1))
    k = max(1, int(np.sqrt(per_level)))
    pts = max(1, per_level // k)
    x, y = c.sample(rng, k), c.sample(rng, k)
    fac = c.gyr_factor(x, y)
    for n in range(levels + 1):
        U = chain[n]
        cloud = U.cloud[np.linspace(0, len(U.cloud) - 1, min(pts, len(U.cloud))).astype(int)]
        img = fac[:, None] * cloud[None, :]
        ok = U.contains(img.ravel()).reshape(img.shape)
        checks += ok.size
        if not ok.all():
            i, j = np.unravel_index(int(np.flatnonzero(~ok)[0]), ok.shape)
            z = cloud[j]
            return PropertyResult("gyr_invariant", "fail", checks,
                                  counterexample=[n, c.to_json(x[i]), c.to_json(y[i]), c.to_json(z)],
                                  residual=float(abs(img[i, j]) - abs(z)))
    return PropertyResult("gyr_invariant", "pass", checks,
                          note="sampled gyrations applied to cloud points")


def validate_chain(chain: NeighborhoodChain, mode: str = "prenorm", *, base: NeighborhoodChain | None = None,
                   F: SetHandle | None = None, budget: int = 1000, seed: int = 0,
                   depth: int | None = None) -> VerificationReport:
    """Check a chain against the conditions of one of three constructions.

    prenorm:        U_{n+1} + U_{n+1} inside U_n
    base-at-H:      V_{n+1} + V_{n+1} inside V_n n U_n for a given base chain U
    invariant-set:  F + V_n inside U_n for a given base chain U and set F,
                    together with V_{n+1} + V_{n+1} inside V_n

    Every mode also checks that 0 lies in each member, that members are
    symmetric and nested, and that gyrations map each member onto itself.
    """
    if mode not in ("prenorm", "base-at-H", "invariant-set"):
        raise ValueError(f"unknown chain mode {mode!r}")
    if mode != "prenorm" and base is None:
        raise ValueError(f"mode {mode} needs a base chain")
    if mode == "invariant-set" and F is None:
        raise ValueError("invariant-set mode needs the set F")
    c = chain.carrier
    levels = _levels(chain, depth)
    rep = VerificationReport(f"chain {chain.label}", mode, seed=seed, budget=budget)

    zero = np.atleast_1d(np.asarray(c.identity))
    bad = [n for n in range(levels + 1) if not chain[n].contains(zero)[0]]
    if bad:
        rep.add(PropertyResult("contains_identity", "fail", levels + 1, counterexample=[bad[0]], residual=1.0))
    else:
        rep.add(PropertyResult("contains_identity", "pass", levels + 1))

    rep.add(_inclusion_entry("symmetric", ((n, set_inv(chain[n]), chain[n], f"-U_{n} inside U_{n}")
                                          for n in range(levels + 1))))
    rep.add(_inclusion_entry("nested", ((n, chain[n + 1], chain[n], f"U_{n + 1} inside U_{n}")
                                       for n in range(levels))))
    if mode == "prenorm":
        rep.add(_doubling_entry("doubling_condition", chain, levels, lambda n: chain[n]))
    elif mode == "base-at-H":
        rep.add(_doubling_entry("doubling_condition", chain, levels, lambda n: _meet(chain[n], base[n])))
    else:
        rep.add(_inclusion_entry("F_translate", ((n, set_add(F, chain[n]), base[n], f"F + V_{n} inside U_{n}")
                                                for n in range(levels + 1))))
        rep.add(_doubling_entry("doubling_condition", chain, levels, lambda n: chain[n]))
    rep.add(_gyr_invariance_entry(chain, levels, budget, seed))
    return rep


def _meet(A: SetHandle, B: SetHandle) -> SetHandle:
    if isinstance(A, ExactSet):
        return A & B
    if isinstance(A, Ball) and isinstance(B, Ball):
        return A if A.radius <= B.radius else B
    return SampledSet(A.carrier, A.cloud, lambda z: A.contains(z) & B.contains(z), A.resolution, A.seed)
