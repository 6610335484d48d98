"""Dyadic neighborhood family, the prenorm it induces, and the derived metrics.

Starting from a chain U0, U1, ... with U_{n+1} + U_{n+1} inside U_n, sets
V(r) are assigned to dyadic rationals r = m / 2**n:

    V(1) = U0,  V(1 / 2**n) = U_n,  V(2m / 2**n) = V(m / 2**(n-1)),
    V((2m + 1) / 2**n) = U_n + V(m / 2**(n-1)),  V(r) = G for r > 1.

Then f(x) = inf{r : x in V(r)} and N(x) = sup_y |f(x + y) - f(y)|.  N is
gyration invariant when the chain members are, it is subadditive and
symmetric, and it is sandwiched by the chain:
{N < 1/2**n} in U_n in {N <= 2/2**n}.

On a finite carrier whose chain is constant (= P) from index L on, V(r) is
constant on every open interval between consecutive multiples of 2**-L,
equal to P + V(left endpoint).  That makes the infimum exact: f is read at
depth L + 1 and rounded down to the multiple of 2**-L where it is not
attained.  On the disk f is the least stored dyadic r = m / 2**n_max with x
in V(r), an overshoot of at most 2**-n_max.  Outside V(1) the infimum is
exactly 1 in both cases, since V(r) = G for every r > 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .carriers import FiniteGyrogroupTable, MobiusDisk
from .core import GyroError, PropertyResult, VerificationReport
from .sets import Ball, ExactSet, NeighborhoodChain, SetHandle, set_add, subset_check, validate_chain
from .subgyro import SubgyroHandle, left_cosets

DEFAULT_NMAX = 12
DEFAULT_GRID = 200
DEFAULT_SUP_SAMPLES = 1000


class ChainInvalid(GyroError):
    def __init__(self, report: VerificationReport):
        self.report = report
        bad = report.failures()[0]
        super().__init__(f"chain fails {bad.name}: {bad.counterexample}")


class ChainMismatch(GyroError, ValueError):
    pass


class DyadicFamily:
    """V(m / 2**n) for 1 <= m <= 2**n and n <= depth.

    Finite carriers store masks, ball chains store radii; ``V(m, n)``
    returns a set handle either way.
    """

    def __init__(self, chain: NeighborhoodChain, depth: int = DEFAULT_NMAX, *, validate: bool = True):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        if validate:
            rep = validate_chain(chain, "prenorm", depth=max(depth, 1))
            if not rep.passed:
                raise ChainInvalid(rep)
        self.chain = chain
        self.depth = depth
        self.carrier = c = chain.carrier
        self.balls = all(isinstance(chain[n], Ball) for n in range(depth + 1))
        if isinstance(c, FiniteGyrogroupTable):
            self.kind = "exact"
        elif self.balls:
            self.kind = "radii"
        else:
            raise TypeError("dyadic families need a finite carrier or a ball chain")
        # a stable tail from index L on makes depth L + 1 enough for exact f
        self.tail = len(chain.sets) - 1 if chain.stable_tail else None
        self.f_depth = depth if self.tail is None else max(depth, self.tail + 1)
        self.levels = [self._level0()]
        for n in range(1, self.f_depth + 1):
            self.levels.append(self._next_level(n))

    def _level0(self):
        U0 = self.chain[0]
        return U0.mask[None, :].copy() if self.kind == "exact" else np.array([U0.radius])

    def _sum(self, n, prev):
        U = self.chain[n]
        if self.kind == "exact":
            c = self.carrier
            out = np.zeros(c.order, dtype=bool)
            out[c.table[np.ix_(np.flatnonzero(U.mask), np.flatnonzero(prev))].ravel()] = True
            return out
        r, s = U.radius, prev
        return 1.0 if r >= 1 or s >= 1 else (r + s) / (1 + r * s)

    def _next_level(self, n):
        prev = self.levels[n - 1]
        size = 2 ** n
        out = [None] * size
        for m in range(1, size + 1):
            if m % 2 == 0:
                out[m - 1] = prev[m // 2 - 1]
            elif m == 1:
                U = self.chain[n]
                out[0] = U.mask if self.kind == "exact" else U.radius
            else:
                out[m - 1] = self._sum(n, prev[(m - 1) // 2 - 1])
        return np.array(out)

    def raw(self, m: int, n: int):
        """Mask or radius of V(m / 2**n); None means the whole carrier."""
        if m < 1 or n < 0:
            raise ValueError("need m >= 1 and n >= 0")
        if m > 2 ** n:
            return None
        # reduce to the shallowest level holding this rational
        while n > self.depth or (m % 2 == 0 and n > 0):
            if m % 2:
                raise ValueError(f"level {n} is deeper than the family depth {self.depth}")
            m, n = m // 2, n - 1
        return self.levels[n][m - 1]

    def V(self, m: int, n: int) -> SetHandle:
        c = self.carrier
        v = self.raw(m, n)
        if self.kind == "exact":
            return ExactSet.whole(c) if v is None else ExactSet(c, mask=v)
        return Ball(c, 1.0 if v is None else float(v))

    @property
    def exact_f(self) -> bool:
        return self.kind == "exact" and self.tail is not None

    @property
    def f_error(self) -> float:
        return 0.0 if self.exact_f else 2.0 ** -self.depth

    def claim_check(self) -> PropertyResult:
        """V(1/2**n) + V(m/2**n) inside V((m+1)/2**n) for every stored pair."""
        checks = 0
        for n in range(self.depth + 1):
            for m in range(1, 2 ** n):
                A, B, T = self.V(1, n), self.V(m, n), self.V(m + 1, n)
                S = set_add(A, B)
                ok, wit, _ = subset_check(S, T)
                checks += 1
                if not ok:
                    return PropertyResult("dyadic_step", "fail", checks,
                                          counterexample=[n, m, _jsonable(wit)], residual=1.0)
        return PropertyResult("dyadic_step", "pass", checks,
                              note="exact" if self.kind == "exact" else "closed-form radii")

    def monotone_check(self) -> PropertyResult:
        """V(m/2**n) inside V((m+1)/2**n) at the deepest level."""
        lv = self.levels[self.depth]
        if self.kind == "exact":
            bad = lv[:-1] & ~lv[1:]
            if bad.any():
                m, x = np.argwhere(bad)[0]
                return PropertyResult("monotone", "fail", len(lv) - 1,
                                      counterexample=[int(m) + 1, self.depth, int(x)], residual=1.0)
        else:
            bad = np.flatnonzero(np.diff(lv) < 0)
            if bad.size:
                m = int(bad[0])
                return PropertyResult("monotone", "fail", len(lv) - 1,
                                      counterexample=[m + 1, self.depth, float(lv[m]), float(lv[m + 1])],
                                      residual=float(lv[m] - lv[m + 1]))
        return PropertyResult("monotone", "pass", max(len(lv) - 1, 0))

    def f(self, xs) -> np.ndarray:
        """inf{r : x in V(r)}; exact for stable finite chains, otherwise the
        least stored dyadic r (0 on the chain's intersection)."""
        xs = np.atleast_1d(np.asarray(xs))
        n = self.f_depth
        scale = 2.0 ** n
        lv = self.levels[n]
        if self.kind == "exact":
            inside = lv[:, xs]  # (2**n, k)
            first = np.where(inside.any(axis=0), inside.argmax(axis=0) + 1, 2 ** n + 1)
        else:
            # open balls with the carrier tolerance, matching Ball membership
            tol = self.carrier.tol
            mod = np.abs(xs)
            first = np.searchsorted(lv, mod - tol, side="right") + 1
            first = np.where(lv[-1] >= 1, np.minimum(first, np.searchsorted(lv, 1.0) + 1), first)
            first = np.where(mod < 1, first, 2 ** n + 1)
        out = np.where(first > 2 ** n, 1.0, first / scale)
        if self.exact_f:
            step = 2.0 ** self.tail
            low = np.floor(out * step) / step
            return np.where(out * step == np.floor(out * step), out, low)
        return np.where(self.chain.kernel_contains(xs), 0.0, out)

    def to_dict(self) -> dict:
        out = {"depth": self.depth, "chain": self.chain.label, "kind": self.kind, "V": {}}
        for n in range(min(self.depth, 6) + 1):
            for m in range(1, 2 ** n + 1):
                if m % 2 == 0 and n > 0:
                    continue
                v = self.levels[n][m - 1]
                key = f"{m}/{2 ** n}"
                out["V"][key] = [int(i) for i in np.flatnonzero(v)] if self.kind == "exact" else float(v)
        return out


def _jsonable(w):
    if isinstance(w, complex):
        return [w.real, w.imag]
    if isinstance(w, tuple):
        return [_jsonable(v) for v in w]
    return w


def build_dyadic_family(chain: NeighborhoodChain, depth: int = DEFAULT_NMAX) -> DyadicFamily:
    return DyadicFamily(chain, depth)


def f_value(fam: DyadicFamily, x) -> float:
    return float(fam.f(x)[0])


# --- the prenorm N -----------------------------------------------------------

def _sup_points(disk: MobiusDisk, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    y = disk.sample(rng, k)
    return np.concatenate([[0j], y])


def _prenorm_disk(fam: DyadicFamily, xs: np.ndarray, ys: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Sampled sup of |f(x + y) - f(y)|, with y taken in x's own frame.

    The sample points are rotated to the direction of x and -x is always
    included.  f is rotation invariant, so this keeps N a function of |x|
    alone, and the y = -x term guarantees N(x) >= f(x).
    """
    c = fam.carrier
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    out = np.zeros(len(xs))
    fy_base = None
    for i in range(0, len(xs), chunk):
        x = xs[i:i + chunk, None]
        mod = np.abs(x)
        frame = np.where(mod > 0, x / np.where(mod > 0, mod, 1), 1)
        y = np.concatenate([frame * ys[None, :], -x], axis=1)
        s = c.add(np.broadcast_to(x, y.shape), y)
        fy = fam.f(y.ravel()).reshape(y.shape)
        fs = fam.f(s.ravel()).reshape(y.shape)
        out[i:i + chunk] = np.abs(fs - fy).max(axis=1)
    out[np.abs(xs) == 0] = 0.0
    return out


def _prenorm_exact(fam: DyadicFamily) -> np.ndarray:
    c = fam.carrier
    fv = fam.f(c.elements())
    return np.abs(fv[c.table] - fv[None, :]).max(axis=1)


def prenorm(fam: DyadicFamily, x, sup_set=None, seed: int = 0) -> float:
    """N(x).  Exact on finite carriers; a lower estimate on the disk, taken
    over ``sup_set`` (default: 1000 seeded points)."""
    if fam.kind == "exact":
        return float(_prenorm_exact(fam)[int(x)])
    ys = _sup_points(fam.carrier, DEFAULT_SUP_SAMPLES, seed) if sup_set is None else np.asarray(sup_set)
    return float(_prenorm_disk(fam, np.atleast_1d(x), ys)[0])


@dataclass
class PrenormTable:
    """f and N over the elements of a finite carrier or a grid on the disk."""

    family: DyadicFamily
    points: np.ndarray
    f: np.ndarray
    N: np.ndarray
    sup_points: np.ndarray | None = None
    note: str = ""
    grid_shape: tuple | None = None
    meta: dict = field(default_factory=dict)

    @property
    def carrier(self):
        return self.family.carrier

    @property
    def depth(self) -> int:
        return self.family.depth

    @property
    def f_error(self) -> float:
        return self.family.f_error

    @property
    def exact(self) -> bool:
        return self.family.kind == "exact"

    def N_of(self, xs) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs))
        if self.exact:
            return self.N[xs.astype(np.int64)]
        return _prenorm_disk(self.family, xs, self.sup_points)

    def f_of(self, xs) -> np.ndarray:
        return self.family.f(xs)

    def to_dict(self) -> dict:
        d = {"depth": self.depth, "f_error": self.f_error, "note": self.note}
        if self.exact:
            d["f"] = [float(v) for v in self.f]
            d["N"] = [float(v) for v in self.N]
        else:
            d["grid_shape"] = list(self.grid_shape)
            d["sup_samples"] = int(len(self.sup_points))
        return d


def disk_grid(disk: MobiusDisk, size: int = DEFAULT_GRID) -> np.ndarray:
    """size x size grid over [-g, g]^2 (g = guard radius), row-major, as complex."""
    g = disk.guard_radius
    ax = np.linspace(-g, g, size)
    X, Y = np.meshgrid(ax, ax, indexing="xy")
    return (X + 1j * Y).ravel()


def prenorm_table(fam: DyadicFamily, grid: int = DEFAULT_GRID, sup_samples: int = DEFAULT_SUP_SAMPLES,
                  seed: int = 0) -> PrenormTable:
    if fam.kind == "exact":
        c = fam.carrier
        pts = c.elements()
        return PrenormTable(fam, pts, fam.f(pts), _prenorm_exact(fam), note="exact sup over all elements")
    c = fam.carrier
    pts = disk_grid(c, grid)
    ys = _sup_points(c, sup_samples, seed)
    N = np.full(len(pts), np.nan)
    f = np.full(len(pts), np.nan)
    inside = np.abs(pts) < 1
    N[inside] = _prenorm_disk(fam, pts[inside], ys)
    f[inside] = fam.f(pts[inside])
    note = (f"N is a sup over {len(ys)} seeded points (plus -x) and so a lower estimate; "
            f"f overshoots its infimum by at most {fam.f_error:g}")
    return PrenormTable(fam, pts, f, N, sup_points=ys, note=note, grid_shape=(grid, grid),
                        meta={"seed": seed})


# --- verification ------------------------------------------------------------

def _first_bad(ok: np.ndarray) -> int:
    return int(np.flatnonzero(~ok)[0])


def _entry(name, ok, res, cex_fn, note="") -> PropertyResult:
    ok = np.asarray(ok, dtype=bool).ravel()
    res = np.asarray(res, dtype=float).ravel()
    mx = float(res.max()) if res.size else 0.0
    if ok.all():
        return PropertyResult(name, "pass", int(ok.size), max_residual=mx, note=note)
    i = _first_bad(ok)
    return PropertyResult(name, "fail", int(ok.size), counterexample=cex_fn(i), residual=float(res[i]),
                          max_residual=mx, note=note)


def prenorm_check(chain: NeighborhoodChain, depth: int = DEFAULT_NMAX, budget: int = 1000, seed: int = 0, *,
                  grid: int = DEFAULT_GRID, sup_samples: int = DEFAULT_SUP_SAMPLES,
                  gyr_tol: float = 1e-6, table: PrenormTable | None = None) -> VerificationReport:
    """PN1-PN3, gyration invariance and the sandwich for the chain's prenorm.

    Finite carriers are checked exhaustively and exactly.  On the disk,
    PN2/PN3 get slack 2 / 2**depth (two f roundings), gyration invariance
    gets ``gyr_tol``, and the sandwich is checked on every grid point with
    no slack.
    """
    fam = table.family if table is not None else DyadicFamily(chain, depth)
    tab = table if table is not None else prenorm_table(fam, grid, sup_samples, seed)
    c = fam.carrier
    rep = VerificationReport(f"prenorm {chain.label}", "exhaustive" if tab.exact else "sampled",
                             seed=seed, budget=budget)
    rep.add(fam.claim_check())
    rep.add(fam.monotone_check())
    # f(x) < r implies x in V(r)
    rep.add(_f_below_entry(fam, tab))
    if tab.exact:
        _exact_checks(rep, c, tab)
    else:
        _disk_checks(rep, c, tab, budget, seed, gyr_tol)
    rep.add(_sandwich_entry(chain, tab))
    return rep


def _f_below_entry(fam, tab) -> PropertyResult:
    n = fam.depth
    pts = tab.points if tab.exact else tab.points[np.abs(tab.points) < 1]
    fv = fam.f(pts)
    checks, cex = 0, None
    for m in range(1, 2 ** n + 1):
        r = m / 2 ** n
        sel = fv < r
        if not sel.any():
            continue
        inside = fam.V(m, n).contains(pts[sel])
        checks += int(sel.sum())
        if not inside.all():
            x = pts[sel][_first_bad(inside)]
            cex = [r, x.item() if tab.exact else [x.real, x.imag]]
            break
    if cex is None:
        return PropertyResult("f_below_r_in_V", "pass", checks)
    return PropertyResult("f_below_r_in_V", "fail", checks, counterexample=cex, residual=1.0)


def _exact_checks(rep, c, tab):
    N, t, inv = tab.N, c.table, c.inverse
    rep.add(_entry("PN1_zero", [N[0] == 0], [abs(N[0])], lambda i: [0]))
    x, y = np.indices((c.order, c.order)).reshape(2, -1)
    lhs, rhs = N[t[x, y]], N[x] + N[y]
    rep.add(_entry("PN2_subadditive", lhs <= rhs, np.maximum(lhs - rhs, 0),
                   lambda i: [int(x[i]), int(y[i])]))
    xs = np.arange(c.order)
    rep.add(_entry("PN3_symmetric", N[inv] == N, np.abs(N[inv] - N), lambda i: [int(xs[i])]))
    g = c.gyr_table.reshape(-1)
    a, b, z = np.indices((c.order,) * 3).reshape(3, -1)
    rep.add(_entry("gyr_invariant", N[g] == N[z], np.abs(N[g] - N[z]),
                   lambda i: [int(a[i]), int(b[i]), int(z[i])]))


def _disk_checks(rep, c, tab, budget, seed, gyr_tol):
    rng = np.random.default_rng(seed + 1)
    slack = 2 * tab.f_error
    rep.add(_entry("PN1_zero", [tab.N_of([0j])[0] == 0], [tab.N_of([0j])[0]], lambda i: [[0.0, 0.0]]))
    x, y = c.sample(rng, budget), c.sample(rng, budget)
    Nx, Ny, Ns = tab.N_of(x), tab.N_of(y), tab.N_of(c.add(x, y))
    rep.add(_entry("PN2_subadditive", Ns <= Nx + Ny + slack, np.maximum(Ns - Nx - Ny, 0),
                   lambda i: [c.to_json(x[i]), c.to_json(y[i])],
                   note=f"slack {slack:g}; sup over sampled points"))
    Nm = tab.N_of(-x)
    rep.add(_entry("PN3_symmetric", np.abs(Nm - Nx) <= slack, np.abs(Nm - Nx),
                   lambda i: [c.to_json(x[i])], note=f"slack {slack:g}"))
    a, b = c.sample(rng, budget), c.sample(rng, budget)
    gz = c.gyr(a, b, x)
    Ng = tab.N_of(gz)
    rep.add(_entry("gyr_invariant", np.abs(Ng - Nx) <= gyr_tol, np.abs(Ng - Nx),
                   lambda i: [c.to_json(a[i]), c.to_json(b[i]), c.to_json(x[i])], note=f"tol {gyr_tol:g}"))


def _sandwich_entry(chain, tab) -> PropertyResult:
    """{N < 1/2**n} in U_n in {N <= 2/2**n} on every stored point, n <= depth."""
    pts, N = tab.points, tab.N
    valid = np.isfinite(N)
    pts, N = pts[valid], N[valid]
    checks = 0
    for n in range(tab.depth + 1):
        U = chain[n].contains(pts)
        low = N < 2.0 ** -n
        bad_low = low & ~U
        bad_high = U & ~(N <= 2.0 * 2.0 ** -n)
        checks += 2 * len(pts)
        for bad, side, res in ((bad_low, "N < 1/2^n outside U_n", 1.0),
                               (bad_high, "U_n point with N > 2/2^n", None)):
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                p = pts[i]
                cex = [n, p.item() if tab.exact else [p.real, p.imag], float(N[i])]
                r = res if res is not None else float(N[i] - 2.0 ** (1 - n))
                return PropertyResult("sandwich", "fail", checks, counterexample=cex, residual=r, note=side)
    return PropertyResult("sandwich", "pass", checks, note=f"n = 0..{tab.depth}")


# --- metrics -----------------------------------------------------------------

def pseudometric_d(tab: PrenormTable, x, y) -> float:
    """d(x, y) = |N(x) - N(y)|."""
    Nx, Ny = tab.N_of([x])[0], tab.N_of([y])[0]
    return float(abs(Nx - Ny))


def _check_kernel(tab: PrenormTable, P) -> np.ndarray:
    chain = tab.family.chain
    members = np.asarray(P.members if hasattr(P, "members") else list(P))
    if tab.exact:
        kern = np.flatnonzero(chain.kernel_contains(np.arange(tab.carrier.order)))
        if set(kern.tolist()) != set(int(m) for m in members):
            raise ChainMismatch(f"P = {sorted(int(m) for m in members)} is not the chain's intersection "
                                f"{kern.tolist()}")
    else:
        if not np.all(chain.kernel_contains(members.astype(complex))):
            raise ChainMismatch("P is not contained in the chain's intersection")
    return members


def coset_metric(c, P, tab: PrenormTable, x, y) -> float:
    """rho(pi(x), pi(y)) = d(-x + y, 0) + d(-y + x, 0)."""
    if c is not tab.carrier and c != tab.carrier:
        raise ChainMismatch("table was built over a different carrier")
    _check_kernel(tab, P)
    u = c.add(c.inv(x), y)
    v = c.add(c.inv(y), x)
    N = tab.N_of([u, v])
    return float(N[0] + N[1])


def _rho_matrix(c, tab, xs):
    """rho over all pairs of the points xs."""
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    u = c.add(c.inv(X.ravel()), Y.ravel())
    v = c.add(c.inv(Y.ravel()), X.ravel())
    N = tab.N_of(np.concatenate([np.atleast_1d(u), np.atleast_1d(v)]))
    k = X.size
    return (N[:k] + N[k:]).reshape(X.shape)


def metric_check(c, P, tab: PrenormTable, budget: int = 1000, seed: int = 0) -> VerificationReport:
    """Representative independence, indiscernibility on cosets, symmetry
    and the triangle inequality for rho.

    Finite carriers: exhaustive over all elements and triples.  Disk:
    ``budget`` seeded points drawn from the table's grid, triangle slack
    2 * (f error bound).
    """
    members = _check_kernel(tab, P)
    rep = VerificationReport("coset metric", "exhaustive" if tab.exact else "sampled", seed=seed, budget=budget)
    if tab.exact:
        _metric_exact(rep, c, members, tab)
    else:
        _metric_disk(rep, c, tab, budget, seed)
    return rep


def _metric_exact(rep, c, members, tab):
    n = c.order
    N = tab.N
    xs = np.arange(n)
    X, Pp = np.meshgrid(xs, members, indexing="ij")
    X, Pp = X.ravel(), Pp.ravel()
    moved = N[c.table[X, Pp]]
    rep.add(_entry("representative_independent", moved == N[X], np.abs(moved - N[X]),
                   lambda i: [int(X[i]), int(Pp[i])], note="N(x + p) = N(x) for p in P"))
    rho = _rho_matrix(c, tab, xs)
    dec = left_cosets(c, SubgyroHandle(c, tuple(int(m) for m in members), is_subgyrogroup="yes"))
    blk = dec.index
    # rho must not depend on which representatives are used
    same = blk[:, None] == blk[None, :]
    A, B = np.indices((n, n))
    ref = rho[np.asarray(dec.representatives)[blk][:, None], np.asarray(dec.representatives)[blk][None, :]]
    rep.add(_entry("well_defined", rho == ref, np.abs(rho - ref),
                   lambda i: [int(A.ravel()[i]), int(B.ravel()[i])]))
    zero = rho == 0
    rep.add(_entry("indiscernible", (zero == same).ravel(), (zero != same).ravel().astype(float),
                   lambda i: [int(A.ravel()[i]), int(B.ravel()[i]), float(rho.ravel()[i])],
                   note="rho = 0 iff same coset"))
    rep.add(_entry("symmetric", (rho == rho.T).ravel(), np.abs(rho - rho.T).ravel(),
                   lambda i: [int(A.ravel()[i]), int(B.ravel()[i])]))
    reps = np.asarray(dec.representatives)
    r = rho[np.ix_(reps, reps)]
    lhs = r[:, None, :]
    rhs = r[:, :, None] + r[None, :, :]
    k = len(reps)
    I, J, K = np.indices((k, k, k))
    ok = (lhs <= rhs + 1e-12)
    rep.add(_entry("triangle", ok.ravel(), np.maximum(lhs - rhs, 0).ravel(),
                   lambda i: [int(reps[I.ravel()[i]]), int(reps[J.ravel()[i]]), int(reps[K.ravel()[i]])],
                   note="rho(x, z) <= rho(x, y) + rho(y, z) over coset representatives"))


def _metric_disk(rep, c, tab, budget, seed):
    rng = np.random.default_rng(seed + 2)
    grid = tab.points[np.isfinite(tab.N)]
    k = max(2, int(round(budget ** (1 / 3))) + 1)
    xs = grid[rng.choice(len(grid), size=k, replace=False)]
    rho = _rho_matrix(c, tab, xs)
    slack = 2 * tab.f_error
    A, B = np.indices(rho.shape)
    off = A != B
    rep.add(_entry("indiscernible", (rho[off] > 0), (rho[off] <= 0).astype(float),
                   lambda i: [c.to_json(xs[A[off][i]]), c.to_json(xs[B[off][i]])],
                   note="distinct grid points, P = {0}"))
    rep.add(_entry("zero_diagonal", np.diag(rho) == 0, np.abs(np.diag(rho)), lambda i: [c.to_json(xs[i])]))
    rep.add(_entry("symmetric", (np.abs(rho - rho.T) <= slack).ravel(), np.abs(rho - rho.T).ravel(),
                   lambda i: [c.to_json(xs[A.ravel()[i]]), c.to_json(xs[B.ravel()[i]])]))
    lhs = rho[:, None, :]
    rhs = rho[:, :, None] + rho[None, :, :]
    I, J, K = np.indices(lhs.shape[:1] + rhs.shape[1:])
    rep.add(_entry("triangle", (lhs <= rhs + slack).ravel(), np.maximum(lhs - rhs, 0).ravel(),
                   lambda i: [c.to_json(xs[I.ravel()[i]]), c.to_json(xs[J.ravel()[i]]),
                              c.to_json(xs[K.ravel()[i]])],
                   note=f"slack {slack:g}"))
