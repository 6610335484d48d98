"""Subgyrogroups, L-subgyrogroups, left cosets, quotients and the NSS probe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .carriers import FiniteGyrogroupTable, GroupTable, MobiusDisk, NotAGyrogroup
from .core import Carrier, GyroError, PropertyResult, VerificationReport, as_scalar, is_degenerate_group, verify_axioms

#: moduli beyond this are numerically indistinguishable from the unit circle
SATURATION = 1 - 1e-12


class PartitionFailure(GyroError):
    """Left cosets overlap without coinciding."""

    def __init__(self, message, witness):
        self.witness = witness
        super().__init__(f"{message}: {witness}")


class IllDefined(GyroError):
    """Coset addition depends on the representatives; witness is (a, a', b, b')."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"quotient operation is ill-defined at {witness}")


class CapExhausted(GyroError):
    """An iteration stopped at its cap without a verdict."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


@dataclass
class SubgyroHandle:
    """A subset of a carrier with subgyrogroup flags.

    The flags take the values ``"yes"``, ``"no"``, ``"unchecked"``, and for
    the L-flag on infinite carriers ``"sampled"`` (no counterexample found
    among the sampled gyrations).
    """

    carrier: Carrier
    members: tuple
    is_subgyrogroup: str = "unchecked"
    is_L_subgyrogroup: str = "unchecked"
    partial: bool = False
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return bool(_member(self.carrier, np.asarray(self.members), np.asarray([x]))[0])

    def mask(self) -> np.ndarray:
        m = np.zeros(self.carrier.order, dtype=bool)
        m[list(self.members)] = True
        return m


@dataclass
class CosetDecomposition:
    subgroup: SubgyroHandle
    representatives: list
    blocks: list
    index: np.ndarray

    def __len__(self):
        return len(self.blocks)

    def block_of(self, x: int) -> int:
        return int(self.index[x])

    def to_dict(self) -> dict:
        return {
            "subgyrogroup": [int(h) for h in self.subgroup.members],
            "representatives": [int(r) for r in self.representatives],
            "blocks": [[int(x) for x in b] for b in self.blocks],
        }


@dataclass
class Escape:
    step: int
    element: object
    moduli: list = field(default_factory=list)


@dataclass
class Contained:
    subgyrogroup: SubgyroHandle
    steps: int


def _as_array(c: Carrier, S) -> np.ndarray:
    if hasattr(S, "members"):
        S = S.members
    if isinstance(c, MobiusDisk):
        arr = np.atleast_1d(np.asarray(list(S), dtype=complex))
        c.check(arr)
        return arr
    arr = np.atleast_1d(np.asarray(sorted({int(s) for s in S}), dtype=np.int64))
    c.check(arr)
    return arr


def _member(c: Carrier, S: np.ndarray, xs: np.ndarray) -> np.ndarray:
    if isinstance(c, MobiusDisk):
        if S.size == 0:
            return np.zeros(xs.shape, dtype=bool)
        if S.size * xs.size <= 1 << 22:
            return (np.abs(xs[:, None] - S[None, :]) <= c.tol).any(axis=1)
        # sorted by real part, only candidates within tol of x.real can match
        S = S[np.argsort(S.real)]
        lo = np.searchsorted(S.real, xs.real - c.tol, side="left")
        hi = np.searchsorted(S.real, xs.real + c.tol, side="right")
        out = np.zeros(xs.shape, dtype=bool)
        for k in range(int((hi - lo).max(initial=0))):
            j = lo + k
            live = j < hi
            jj = np.minimum(j, len(S) - 1)
            out |= live & (np.abs(xs - S[jj]) <= c.tol)
        return out
    return np.isin(xs, S)


def _dedupe(c: Carrier, xs: np.ndarray) -> np.ndarray:
    if isinstance(c, MobiusDisk):
        key = np.round(xs.real / c.tol) + 1j * np.round(xs.imag / c.tol)
        _, first = np.unique(key, return_index=True)
        out = xs[np.sort(first)]
        return out[np.lexsort((np.angle(out), np.abs(out)))]
    return np.unique(xs)


def _handle(c, arr, **kw) -> SubgyroHandle:
    return SubgyroHandle(c, tuple(as_scalar(v) for v in arr), **kw)


def is_subgyrogroup(c: Carrier, S):
    """``(True, None)`` if S is closed under addition and inversion.

    Otherwise ``(False, witness)``: a pair ``(a, b)`` with ``a + b`` outside
    S, or a 1-tuple ``(a,)`` whose inverse is outside S.  Sums are checked
    first, pairs in lexicographic order.
    """
    arr = _as_array(c, S)
    if arr.size == 0:
        raise ValueError("subgyrogroup candidate must be nonempty")
    a, b = np.meshgrid(arr, arr, indexing="ij")
    a, b = a.ravel(), b.ravel()
    ok = _member(c, arr, np.atleast_1d(np.asarray(c.add(a, b))))
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        return False, (as_scalar(a[i]), as_scalar(b[i]))
    ok = _member(c, arr, np.atleast_1d(np.asarray(c.inv(arr))))
    if not ok.all():
        return False, (as_scalar(arr[int(np.flatnonzero(~ok)[0])]),)
    return True, None


def subgyrogroup(c: Carrier, S) -> SubgyroHandle:
    """Wrap S as a handle with its subgyrogroup flag checked."""
    arr = _as_array(c, S)
    ok, _ = is_subgyrogroup(c, arr)
    return _handle(c, arr, is_subgyrogroup="yes" if ok else "no")


def _rounds(c: Carrier, seeds: np.ndarray):
    """Successive closure rounds S_{k+1} = S_k u (S_k + S_k) u (-S_k)."""
    s = _dedupe(c, seeds)
    while True:
        a, b = np.meshgrid(s, s, indexing="ij")
        new = np.concatenate([s, np.atleast_1d(c.add(a.ravel(), b.ravel())), np.atleast_1d(c.inv(s))])
        new = _dedupe(c, new)
        yield new
        s = new


def _max_modulus(arr):
    return float(np.abs(arr).max()) if arr.size else 0.0


def generated(c: Carrier, seeds: Iterable, cap: int = 64, max_size: int = 20_000) -> SubgyroHandle:
    """Least set containing ``seeds`` closed under addition and inversion.

    Finite carriers close exactly (``cap`` is ignored).  On the disk the
    iteration stops after ``cap`` rounds, at ``max_size`` elements, or once
    a modulus saturates at the unit circle; the handle is then flagged
    ``partial``.  ``steps`` holds the largest modulus after each round
    (seeds first).
    """
    arr = _dedupe(c, _as_array(c, seeds))
    disk = isinstance(c, MobiusDisk)
    steps = [_max_modulus(arr)] if disk else [len(arr)]
    cur = arr
    for k, nxt in enumerate(_rounds(c, arr), start=1):
        if len(nxt) == len(cur):
            return _handle(c, cur, is_subgyrogroup="yes", steps=steps)
        # |m + m| > |m| for the largest m, so a stalled modulus is float saturation
        if disk and (_max_modulus(nxt) > SATURATION or _max_modulus(nxt) <= steps[-1]
                     or len(nxt) > max_size):
            return _handle(c, cur, partial=True, steps=steps)
        steps.append(_max_modulus(nxt) if disk else len(nxt))
        cur = nxt
        # finite carriers always close; on the disk the last round still grew
        if disk and k >= cap:
            return _handle(c, cur, partial=True, steps=steps)


def is_L_subgyrogroup(c: Carrier, H, budget: int = 1000, seed: int = 0):
    """Check gyr[a, h](H) = H for all a in G and h in H.

    Returns ``(True, None)``/``(False, (a, h, x))`` on finite carriers.  On the
    disk, ``a`` is sampled and a clean run returns ``(None, None)``: no
    counterexample found, which is not a proof.
    """
    if not isinstance(H, SubgyroHandle):
        H = subgyrogroup(c, H)
    if H.is_subgyrogroup == "unchecked":
        H.is_subgyrogroup = "yes" if is_subgyrogroup(c, H)[0] else "no"
    if H.is_subgyrogroup != "yes":
        raise ValueError("not a subgyrogroup")
    h = _as_array(c, H)
    if c.finite:
        a = c.elements()
    else:
        a = np.concatenate([[c.identity], c.sample(np.random.default_rng(seed), budget)])
    A, Hh, X = np.meshgrid(a, h, h, indexing="ij")
    A, Hh, X = A.ravel(), Hh.ravel(), X.ravel()
    img = np.atleast_1d(np.asarray(c.gyr(A, Hh, X)))
    ok = _member(c, h, img)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        H.is_L_subgyrogroup = "no"
        return False, (as_scalar(A[i]), as_scalar(Hh[i]), as_scalar(X[i]))
    if c.finite:
        H.is_L_subgyrogroup = "yes"
        return True, None
    H.is_L_subgyrogroup = "sampled"
    return None, None


def _finite_handle(c: Carrier, H) -> SubgyroHandle:
    if not isinstance(c, FiniteGyrogroupTable):
        raise TypeError("cosets need a finite Cayley-table carrier")
    if not isinstance(H, SubgyroHandle):
        H = subgyrogroup(c, H)
    if H.is_subgyrogroup == "unchecked":
        H.is_subgyrogroup = "yes" if is_subgyrogroup(c, H)[0] else "no"
    if H.is_subgyrogroup != "yes":
        raise ValueError("not a subgyrogroup")
    return H


def left_cosets(c: FiniteGyrogroupTable, H) -> CosetDecomposition:
    """Partition G into blocks a + H, each represented by its smallest index."""
    H = _finite_handle(c, H)
    h = np.asarray(H.members)
    n = c.order
    index = -np.ones(n, dtype=np.int64)
    reps, blocks = [], []
    for a in range(n):
        if index[a] >= 0:
            continue
        block = np.unique(c.table[a, h])
        if len(block) != len(h):
            raise PartitionFailure("left translate is not injective on H", (a,))
        clash = block[index[block] >= 0]
        if clash.size:
            x = int(clash[0])
            raise PartitionFailure("cosets overlap", (a, reps[index[x]], x))
        index[block] = len(blocks)
        reps.append(a)
        blocks.append(tuple(int(x) for x in block))
    return CosetDecomposition(H, reps, blocks, index)


def quotient(c: FiniteGyrogroupTable, H, *, seed: int = 0):
    """The coset gyrogroup G/H and a report of the checks behind it.

    Well-definedness is checked over every choice of representatives; the
    block containing 0 becomes index 0 of the quotient table.
    """
    H = _finite_handle(c, H)
    rep = VerificationReport("quotient", "exhaustive", seed)
    isL, wit = is_L_subgyrogroup(c, H)
    rep.add(PropertyResult("L_subgyrogroup", "pass" if isL else "fail", c.order * len(H) ** 2,
                           counterexample=None if isL else list(wit)))
    dec = left_cosets(c, H)
    k = len(dec)
    reps = np.asarray(dec.representatives)
    q = dec.index[c.table[reps[:, None], reps[None, :]]]
    checks = 0
    for i, bi in enumerate(dec.blocks):
        for j, bj in enumerate(dec.blocks):
            got = dec.index[c.table[np.ix_(bi, bj)]]
            checks += got.size
            bad = np.argwhere(got != q[i, j])
            if bad.size:
                u, v = bad[0]
                raise IllDefined((int(reps[i]), int(bi[u]), int(reps[j]), int(bj[v])))
    rep.add(PropertyResult("well_defined", "pass", checks))
    table = FiniteGyrogroupTable(q, validate=False)
    axioms = verify_axioms(table)
    rep.extend(axioms, prefix="quotient.")
    if not axioms.passed:
        bad = axioms.failures()[0]
        raise NotAGyrogroup(bad.name, bad.counterexample, rep)
    if is_degenerate_group(table)[0]:
        table = GroupTable(q, validate=False)
    return table, rep


def nss_probe(c: Carrier, U, x, cap: int = 32):
    """Grow the subgyrogroup generated by ``x`` until it leaves U.

    On the disk ``U`` is a radius (open ball) or any object with a
    ``contains`` method; on finite carriers an explicit subset.  Returns
    :class:`Escape` with the round at which an element first left U (round 0
    is ``{x}`` itself), or :class:`Contained` with the closed subgyrogroup
    found inside U.  The disk raises :class:`CapExhausted` when the cap or
    numerical saturation is hit first.
    """
    disk = isinstance(c, MobiusDisk)
    if disk:
        if np.isscalar(U) or isinstance(U, (int, float)):
            radius = float(U)
            inside = lambda z: np.abs(z) < radius
        else:
            inside = U.contains
    else:
        members = _as_array(c, U.members if hasattr(U, "members") else U)
        inside = lambda z: np.isin(z, members)
    start = _as_array(c, [x])
    if bool(np.asarray(c.equal(start[0], c.identity))):
        raise ValueError("probe element must differ from the identity")
    moduli = []
    cur = start
    if not inside(cur).all():
        return Escape(0, as_scalar(cur[~inside(cur)][0]), moduli)
    for k, nxt in enumerate(_rounds(c, start), start=1):
        if disk:
            moduli.append(_max_modulus(nxt))
        out = ~inside(nxt)
        if out.any():
            far = nxt[out]
            el = far[np.argmax(np.abs(far))] if disk else far[0]
            return Escape(k, as_scalar(el), moduli)
        if len(nxt) == len(cur):
            return Contained(_handle(c, cur, is_subgyrogroup="yes"), k)
        if disk and _max_modulus(nxt) > SATURATION:
            break
        cur = nxt
        if k >= cap:
            break
    raise CapExhausted(f"no escape within {k} rounds", _handle(c, cur, partial=True, steps=moduli))
