"""Carrier interface, verification reports and the axiom checking engine.

A carrier works on *batches*: a finite carrier's batch is an integer array of
element indices, the disk's batch is a complex array, and a product's batch is
a pair of component batches.  Every operation accepts scalars as well as
batches, so the same code path serves single lookups and vectorised checks.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

#: finite carriers up to this order are checked exhaustively
EXHAUSTIVE_CAP = 32


class GyroError(Exception):
    """Base class for library errors."""


class DomainError(GyroError, ValueError):
    """An element lies outside the carrier's domain."""


class Carrier(abc.ABC):
    """A gyrogroup carrier.

    Subclasses supply ``add``, ``inv``, equality and sampling.  ``gyr`` falls
    back to the derived formula ``gyr[a,b](z) = -(a+b) + (a + (b + z))``;
    a carrier may override it with a closed form, which
    :func:`gyr_consistency_check` then validates against the derived one.
    """

    kind: str = "abstract"
    finite: bool = False
    order: int | None = None

    @property
    @abc.abstractmethod
    def identity(self) -> Any: ...

    @abc.abstractmethod
    def add(self, a, b): ...

    @abc.abstractmethod
    def inv(self, a): ...

    @abc.abstractmethod
    def distance(self, a, b) -> np.ndarray:
        """Residual magnitude between two batches (0 means equal)."""

    @abc.abstractmethod
    def equal(self, a, b) -> np.ndarray: ...

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, k: int): ...

    @abc.abstractmethod
    def take(self, batch, idx): ...

    @abc.abstractmethod
    def to_json(self, element) -> Any: ...

    def elements(self):
        raise TypeError(f"{self.kind} carrier is not finite")

    def derived_gyr(self, a, b, z):
        return self.add(self.inv(self.add(a, b)), self.add(a, self.add(b, z)))

    def gyr(self, a, b, z):
        return self.derived_gyr(a, b, z)

    @property
    def has_closed_gyr(self) -> bool:
        return type(self).gyr is not Carrier.gyr

    def index_of(self, batch) -> np.ndarray:
        raise TypeError(f"{self.kind} carrier has no element indexing")

    def describe(self) -> dict:
        return {"kind": self.kind, "order": self.order}


@dataclass
class PropertyResult:
    name: str
    status: str
    checks: int = 0
    counterexample: list | None = None
    residual: float | None = None
    max_residual: float = 0.0
    note: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and self.counterexample is None:
            raise ValueError(f"failing property {self.name} needs a counterexample")

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "checks": int(self.checks),
            "counterexample": self.counterexample,
            "residual": None if self.residual is None else float(self.residual),
            "max_residual": float(self.max_residual),
            "note": self.note,
        }


@dataclass
class VerificationReport:
    title: str
    mode: str
    seed: int | None = None
    budget: int | None = None
    entries: list[PropertyResult] = field(default_factory=list)

    def add(self, entry: PropertyResult) -> PropertyResult:
        self.entries.append(entry)
        return entry

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for e in other.entries:
            e = PropertyResult(**{**e.__dict__, "name": prefix + e.name})
            self.entries.append(e)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def budget_consumed(self) -> int:
        return sum(e.checks for e in self.entries)

    def failures(self) -> list[PropertyResult]:
        return [e for e in self.entries if e.status == "fail"]

    def __getitem__(self, name: str) -> PropertyResult:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "mode": self.mode,
            "seed": self.seed,
            "budget": self.budget,
            "budget_consumed": self.budget_consumed,
            "passed": self.passed,
            "properties": [e.to_dict() for e in self.entries],
        }

    def summary(self) -> str:
        lines = [f"{self.title} [{self.mode}]"]
        for e in self.entries:
            line = f"  {e.status.upper():7s} {e.name} ({e.checks} checks)"
            if e.status == "fail":
                line += f" counterexample={e.counterexample} residual={e.residual:.3g}"
            lines.append(line)
        return "\n".join(lines)


def as_scalar(x):
    """Unwrap 0-d numpy results (also inside tuples) into plain Python numbers."""
    if isinstance(x, tuple):
        return tuple(as_scalar(v) for v in x)
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return x.item()
    if isinstance(x, np.generic):
        return x.item()
    return x


def check_property(
    carrier: Carrier,
    name: str,
    args: Sequence,
    lhs_rhs: Callable,
    *,
    note: str = "",
) -> PropertyResult:
    """Evaluate ``lhs == rhs`` elementwise over the argument batches.

    ``args`` is a list of equal-length batches; the first failing position
    (in batch order, which is lexicographic for exhaustive enumerations)
    becomes the counterexample.
    """
    lhs, rhs = lhs_rhs(*args)
    ok = np.asarray(carrier.equal(lhs, rhs), dtype=bool)
    res = np.asarray(carrier.distance(lhs, rhs), dtype=float)
    # nan residuals (overflow near the boundary) count as failures
    ok = ok & np.isfinite(res)
    checks = int(ok.size)
    max_res = float(np.nanmax(res)) if res.size else 0.0
    if ok.all():
        return PropertyResult(name, "pass", checks, max_residual=max_res, note=note)
    i = int(np.flatnonzero(~ok)[0])
    cex = [carrier.to_json(carrier.take(a, i)) for a in args]
    return PropertyResult(
        name, "fail", checks, counterexample=cex, residual=float(res[i]),
        max_residual=max_res, note=note,
    )


class TupleSource:
    """Hands out argument batches: all tuples, or seeded random ones."""

    def __init__(self, carrier: Carrier, budget: int, seed: int, cap: int = EXHAUSTIVE_CAP):
        self.carrier = carrier
        self.budget = budget
        self.exhaustive = carrier.finite and carrier.order <= cap
        self.rng = np.random.default_rng(seed)

    @property
    def mode(self) -> str:
        return "exhaustive" if self.exhaustive else "sampled"

    def tuples(self, arity: int) -> list:
        c = self.carrier
        if self.exhaustive:
            n = c.order
            grids = np.indices((n,) * arity).reshape(arity, -1)
            elems = c.elements()
            return [c.take(elems, g) for g in grids]
        return [c.sample(self.rng, self.budget) for _ in range(arity)]


def _bijection_check(c: Carrier, src: TupleSource) -> PropertyResult:
    name = "G3_gyr_bijective"
    if src.exhaustive:
        a, b = src.tuples(2)
        n = c.order
        elems = c.elements()
        checks = 0
        for i in range(n * n):
            ai, bi = c.take(a, i), c.take(b, i)
            img = c.index_of(c.gyr(ai, bi, elems))
            checks += n
            if len(np.unique(img)) != n:
                vals, counts = np.unique(img, return_counts=True)
                dup = vals[counts > 1][0]
                zs = np.flatnonzero(img == dup)[:2]
                cex = [c.to_json(ai), c.to_json(bi)] + [c.to_json(c.take(elems, int(z))) for z in zs]
                return PropertyResult(name, "fail", checks, counterexample=cex, residual=1.0,
                                      max_residual=1.0, note="two points share an image")
        return PropertyResult(name, "pass", checks)
    # sampled: exhibit gyr[b,a] as a two-sided inverse of gyr[a,b]
    a, b, z = src.tuples(3)
    r1 = check_property(c, name, [a, b, z], lambda a, b, z: (c.gyr(b, a, c.gyr(a, b, z)), z),
                        note="gyr[b,a] inverts gyr[a,b]")
    if r1.status == "fail":
        return r1
    r2 = check_property(c, name, [a, b, z], lambda a, b, z: (c.gyr(a, b, c.gyr(b, a, z)), z),
                        note="gyr[b,a] inverts gyr[a,b]")
    r2.checks += r1.checks
    r2.max_residual = max(r1.max_residual, r2.max_residual)
    return r2


def verify_axioms(carrier: Carrier, budget: int = 10_000, seed: int = 0,
                  cap: int = EXHAUSTIVE_CAP) -> VerificationReport:
    """Check the gyrogroup axioms and the standard derived identities.

    Finite carriers of order at most ``cap`` are enumerated exhaustively
    (the exhaustive counts are not limited by ``budget``); anything else is
    checked on ``budget`` seeded random tuples per property.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    c = carrier
    src = TupleSource(c, budget, seed, cap)
    rep = VerificationReport("gyrogroup axioms", src.mode, seed, budget)
    zero = c.identity

    (a,) = src.tuples(1)
    rep.add(check_property(c, "G1_left_identity", [a], lambda a: (c.add(zero, a), a)))
    rep.add(check_property(c, "G1_right_identity", [a], lambda a: (c.add(a, zero), a)))
    rep.add(check_property(c, "G2_left_inverse", [a], lambda a: (c.add(c.inv(a), a), _zeros_like(c, a))))
    rep.add(check_property(c, "G2_right_inverse", [a], lambda a: (c.add(a, c.inv(a)), _zeros_like(c, a))))
    if src.exhaustive:
        x, y = src.tuples(2)
        # b + a = 0 forces b = -a
        hit = np.asarray(c.equal(c.add(y, x), _zeros_like(c, x)), dtype=bool)
        idx = np.flatnonzero(hit)
        xs, ys = c.take(x, idx), c.take(y, idx)
        rep.add(check_property(c, "G2_unique_inverse", [xs, ys], lambda x, y: (y, c.inv(x))))

    x, y, z = src.tuples(3)
    rep.add(check_property(c, "G3_left_gyroassociative", [x, y, z],
                           lambda x, y, z: (c.add(x, c.add(y, z)), c.add(c.add(x, y), c.gyr(x, y, z)))))
    p, q, u, v = src.tuples(4)
    rep.add(check_property(c, "G3_gyr_homomorphism", [p, q, u, v],
                           lambda p, q, u, v: (c.gyr(p, q, c.add(u, v)),
                                               c.add(c.gyr(p, q, u), c.gyr(p, q, v)))))
    rep.add(_bijection_check(c, src))
    x, y, z = src.tuples(3)
    rep.add(check_property(c, "G4_left_loop", [x, y, z],
                           lambda x, y, z: (c.gyr(c.add(x, y), y, z), c.gyr(x, y, z))))

    x, y = src.tuples(2)
    rep.add(check_property(c, "L1_left_cancellation", [x, y],
                           lambda x, y: (c.add(c.inv(x), c.add(x, y)), y)))
    rep.add(check_property(c, "L2_right_cancellation_gyr", [x, y],
                           lambda x, y: (c.add(c.add(x, c.inv(y)), c.gyr(x, c.inv(y), y)), x)))
    rep.add(check_property(c, "L3_right_cancellation_inv", [x, y],
                           lambda x, y: (c.add(c.add(x, c.gyr(x, y, c.inv(y))), y), x)))
    x, y, z = src.tuples(3)
    rep.add(check_property(c, "L4_gyr_formula", [x, y, z],
                           lambda x, y, z: (c.gyr(x, y, z), c.derived_gyr(x, y, z))))
    return rep


def _zeros_like(c: Carrier, batch):
    """A batch of identities with the shape of ``batch``."""
    if isinstance(batch, tuple):
        return tuple(_zeros_like(part, b) for part, b in zip(c.factors, batch))
    return np.full(np.shape(batch), c.identity, dtype=np.asarray(batch).dtype)


def gyr_consistency_check(carrier: Carrier, budget: int = 10_000, seed: int = 0,
                          tol: float | None = None) -> VerificationReport:
    """Compare the carrier's closed-form gyration with the derived formula."""
    c = carrier
    src = TupleSource(c, budget, seed)
    rep = VerificationReport("gyration consistency", src.mode, seed, budget)
    if not c.has_closed_gyr:
        rep.add(PropertyResult("closed_vs_derived_gyr", "skipped", note="no closed form"))
        return rep
    x, y, z = src.tuples(3)
    closed, derived = c.gyr(x, y, z), c.derived_gyr(x, y, z)
    res = np.asarray(c.distance(closed, derived), dtype=float)
    if tol is None:
        ok = np.asarray(c.equal(closed, derived), dtype=bool)
    else:
        ok = res <= tol
    ok = ok & np.isfinite(res)
    entry = PropertyResult("closed_vs_derived_gyr", "pass", int(res.size),
                           max_residual=float(res.max()) if res.size else 0.0)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        entry.status = "fail"
        entry.counterexample = [c.to_json(c.take(t, i)) for t in (x, y, z)]
        entry.residual = float(res[i])
    rep.add(entry)
    return rep


def is_degenerate_group(carrier: Carrier, budget: int = 10_000, seed: int = 0):
    """Return ``(True, None)`` if every checked gyration is the identity map,
    else ``(False, (a, b, z))`` with ``gyr[a,b](z) != z``."""
    c = carrier
    src = TupleSource(c, budget, seed)
    a, b, z = src.tuples(3)
    ok = np.asarray(c.equal(c.gyr(a, b, z), z), dtype=bool)
    if ok.all():
        return True, None
    i = int(np.flatnonzero(~ok)[0])
    return False, tuple(as_scalar(c.take(t, i)) for t in (a, b, z))
