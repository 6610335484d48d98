"""Concrete carriers: the Möbius disk, Cayley tables, groups and products."""

from __future__ import annotations

import numpy as np

from .core import Carrier, DomainError, GyroError, verify_axioms


class MalformedTable(GyroError, ValueError):
    """The table is not a square array of in-range indices with permutation rows."""


class NotAGyrogroup(GyroError):
    """A table failed an axiom; carries the property name and a witness."""

    def __init__(self, prop: str, counterexample, report=None):
        self.property = prop
        self.counterexample = counterexample
        self.report = report
        super().__init__(f"{prop} fails at {counterexample}")


class NotAGroup(GyroError, ValueError):
    pass


def _wrap(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


class MobiusDisk(Carrier):
    """The open complex unit disk under a + b = (a + b) / (1 + conj(a) b)."""

    kind = "mobius-disk"

    def __init__(self, tol: float = 1e-9, guard_radius: float = 0.95):
        if not 0 < tol < 1e-2:
            raise ValueError(f"tolerance must lie in (0, 1e-2), got {tol}")
        if not 0 < guard_radius < 1:
            raise ValueError(f"guard radius must lie in (0, 1), got {guard_radius}")
        self.tol = float(tol)
        self.guard_radius = float(guard_radius)

    def __repr__(self):
        return f"MobiusDisk(tol={self.tol:g}, guard_radius={self.guard_radius:g})"

    @property
    def identity(self):
        return 0j

    def check(self, *zs):
        for z in zs:
            z = np.asarray(z)
            if np.any(~(np.abs(z) < 1.0)):
                raise DomainError("Möbius disk elements need |z| < 1")

    def add(self, a, b):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        self.check(a, b)
        return _wrap((a + b) / (1 + np.conj(a) * b))

    def inv(self, a):
        a = np.asarray(a, dtype=complex)
        self.check(a)
        return _wrap(-a)

    def gyr_factor(self, a, b):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        return (1 + a * np.conj(b)) / (1 + np.conj(a) * b)

    def gyr(self, a, b, z):
        z = np.asarray(z, dtype=complex)
        self.check(a, b, z)
        return _wrap(self.gyr_factor(a, b) * z)

    def distance(self, a, b):
        return np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))

    def equal(self, a, b):
        return self.distance(a, b) <= self.tol

    def sample(self, rng, k, radius=None):
        """``k`` points uniform on the closed disk of ``radius`` (default: guard radius)."""
        r = self.guard_radius if radius is None else radius
        out = np.empty(0, dtype=complex)
        while out.size < k:
            m = 2 * (k - out.size) + 8
            pts = rng.uniform(-r, r, m) + 1j * rng.uniform(-r, r, m)
            out = np.concatenate([out, pts[np.abs(pts) <= r]])
        return out[:k]

    def take(self, batch, idx):
        return _wrap(np.asarray(batch, dtype=complex)[idx])

    def to_json(self, z):
        z = complex(z)
        return [z.real, z.imag]

    def describe(self):
        return {"kind": self.kind, "order": None, "tol": self.tol, "guard_radius": self.guard_radius}


class FiniteGyrogroupTable(Carrier):
    """A finite carrier given by its Cayley table; index 0 is the identity.

    ``table[a, b]`` is ``a + b``.  Inverses and all gyrations are derived from
    the table.  With ``validate=True`` (the default) construction runs the
    exhaustive axiom check and raises :class:`NotAGyrogroup` on failure.
    """

    kind = "finite-table"
    finite = True

    def __init__(self, table, name: str | None = None, *, validate: bool = True):
        t = _parse_table(table)
        self.order = n = t.shape[0]
        self.name = name
        t.setflags(write=False)
        self.table = t
        self.inverse = _inverses(t)
        self.inverse.setflags(write=False)
        # gyr[a, b, z] = -(a + b) + (a + (b + z))
        a, b, z = np.indices((n, n, n))
        g = t[self.inverse[t[a, b]], t[a, t[b, z]]]
        g.setflags(write=False)
        self.gyr_table = g
        if validate:
            rep = verify_axioms(self, budget=10_000, seed=0)
            bad = rep.failures()
            if bad:
                raise NotAGyrogroup(bad[0].name, bad[0].counterexample, rep)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} order={self.order}>"

    def __eq__(self, other):
        return isinstance(other, FiniteGyrogroupTable) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    @property
    def identity(self):
        return 0

    def check(self, *xs):
        for x in xs:
            x = np.asarray(x)
            if x.dtype.kind not in "iu" or np.any((x < 0) | (x >= self.order)):
                raise DomainError(f"elements must be indices in [0, {self.order})")

    def add(self, a, b):
        self.check(a, b)
        return _wrap(self.table[a, b])

    def inv(self, a):
        self.check(a)
        return _wrap(self.inverse[a])

    def derived_gyr(self, a, b, z):
        self.check(a, b, z)
        return _wrap(self.gyr_table[a, b, z])

    def distance(self, a, b):
        return (np.asarray(a) != np.asarray(b)).astype(float)

    def equal(self, a, b):
        return np.asarray(a) == np.asarray(b)

    def sample(self, rng, k):
        return rng.integers(0, self.order, size=k)

    def take(self, batch, idx):
        return _wrap(np.asarray(batch)[idx])

    def elements(self):
        return np.arange(self.order)

    def index_of(self, batch):
        return np.asarray(batch)

    def to_json(self, x):
        return int(x)

    def describe(self):
        d = {"kind": self.kind, "order": self.order}
        if self.name:
            d["name"] = self.name
        return d

    def gyration(self, a: int, b: int) -> np.ndarray:
        """gyr[a, b] as a permutation array."""
        return self.gyr_table[a, b].copy()


class GroupTable(FiniteGyrogroupTable):
    """A finite group viewed as a gyrogroup; every gyration is the identity."""

    kind = "finite-table"

    def gyr(self, a, b, z):
        self.check(a, b, z)
        return _wrap(np.broadcast_arrays(np.asarray(a), np.asarray(b), np.asarray(z))[2])


class ProductCarrier(Carrier):
    """Coordinatewise product of two carriers."""

    kind = "product"

    def __init__(self, left: Carrier, right: Carrier):
        self.factors = (left, right)
        self.finite = left.finite and right.finite
        self.order = left.order * right.order if self.finite else None

    def __repr__(self):
        return f"ProductCarrier({self.factors[0]!r}, {self.factors[1]!r})"

    @property
    def identity(self):
        return (self.factors[0].identity, self.factors[1].identity)

    def add(self, a, b):
        l, r = self.factors
        return (l.add(a[0], b[0]), r.add(a[1], b[1]))

    def inv(self, a):
        l, r = self.factors
        return (l.inv(a[0]), r.inv(a[1]))

    def gyr(self, a, b, z):
        l, r = self.factors
        return (l.gyr(a[0], b[0], z[0]), r.gyr(a[1], b[1], z[1]))

    def distance(self, a, b):
        l, r = self.factors
        return np.maximum(l.distance(a[0], b[0]), r.distance(a[1], b[1]))

    def equal(self, a, b):
        l, r = self.factors
        return np.logical_and(l.equal(a[0], b[0]), r.equal(a[1], b[1]))

    def sample(self, rng, k):
        l, r = self.factors
        return (l.sample(rng, k), r.sample(rng, k))

    def take(self, batch, idx):
        l, r = self.factors
        return (l.take(batch[0], idx), r.take(batch[1], idx))

    def elements(self):
        if not self.finite:
            raise TypeError("product with an infinite factor is not finite")
        l, r = self.factors
        idx = np.arange(self.order)
        n2 = r.order
        return (l.take(l.elements(), idx // n2), r.take(r.elements(), idx % n2))

    def index_of(self, batch):
        l, r = self.factors
        return l.index_of(batch[0]) * r.order + r.index_of(batch[1])

    def to_json(self, x):
        l, r = self.factors
        return [l.to_json(x[0]), r.to_json(x[1])]

    def to_table(self, name: str | None = None) -> FiniteGyrogroupTable:
        """Flatten a finite product to a Cayley table (pair (i, j) -> i * n2 + j)."""
        e = self.elements()
        n = self.order
        a, b = np.indices((n, n)).reshape(2, -1)
        s = self.add(self.take(e, a), self.take(e, b))
        return FiniteGyrogroupTable(self.index_of(s).reshape(n, n), name=name)

    def describe(self):
        return {"kind": self.kind, "order": self.order,
                "factors": [f.describe() for f in self.factors]}


def _parse_table(table) -> np.ndarray:
    try:
        rows = [list(r) for r in table]
    except TypeError as exc:
        raise MalformedTable("table must be a sequence of rows") from exc
    n = len(rows)
    if n == 0:
        raise MalformedTable("empty table")
    for i, r in enumerate(rows):
        if len(r) != n:
            raise MalformedTable(f"row {i} has {len(r)} entries, expected {n}")
    t = np.array(rows)
    if t.dtype.kind not in "iu":
        if t.dtype.kind == "f" and np.all(t == np.round(t)):
            t = t.astype(np.int64)
        else:
            raise MalformedTable("entries must be integers")
    t = t.astype(np.int64)
    bad = np.argwhere((t < 0) | (t >= n))
    if bad.size:
        i, j = bad[0]
        raise MalformedTable(f"entry ({i}, {j}) = {t[i, j]} out of range [0, {n})")
    for i in range(n):
        if len(set(t[i].tolist())) != n:
            raise MalformedTable(f"row {i} is not a permutation of 0..{n - 1}")
    return t


def _inverses(t: np.ndarray) -> np.ndarray:
    # -a is the b with b + a = 0; falls back to the right inverse, then 0,
    # so malformed inputs still reach the axiom checker
    n = t.shape[0]
    inv = np.zeros(n, dtype=np.int64)
    for a in range(n):
        left = np.flatnonzero(t[:, a] == 0)
        right = np.flatnonzero(t[a] == 0)
        inv[a] = left[0] if left.size else (right[0] if right.size else 0)
    return inv


def mobius_make(tolerance: float = 1e-9, guard_radius: float = 0.95) -> MobiusDisk:
    return MobiusDisk(tolerance, guard_radius)


def finite_from_table(table, name: str | None = None) -> FiniteGyrogroupTable:
    return FiniteGyrogroupTable(table, name=name)


def cyclic_table(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("order must be positive")
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n


KLEIN_FOUR = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])


def group_adapter(spec, name: str | None = None) -> GroupTable:
    """Wrap a group as a gyrogroup carrier.

    ``spec`` is either an order ``n`` (the cyclic group Z_n) or an explicit
    group table.  If the identity of an explicit table is not index 0 the
    labels ``0`` and ``e`` are swapped.
    """
    if isinstance(spec, (int, np.integer)):
        return GroupTable(cyclic_table(int(spec)), name=name or f"Z{int(spec)}")
    t = _parse_table(spec)
    n = t.shape[0]
    ids = [e for e in range(n) if np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n))]
    if not ids:
        raise NotAGroup("no two-sided identity")
    e = ids[0]
    if e != 0:
        perm = np.arange(n)
        perm[[0, e]] = [e, 0]
        # relabel x -> perm[x]; perm is an involution
        t = perm[t[np.ix_(perm, perm)]]
    a, b, c = np.indices((n, n, n))
    bad = np.argwhere(t[t[a, b], c] != t[a, t[b, c]])
    if bad.size:
        raise NotAGroup(f"not associative at {tuple(int(v) for v in bad[0])}")
    return GroupTable(t, name=name)


def product(c1: Carrier, c2: Carrier) -> ProductCarrier:
    return ProductCarrier(c1, c2)

