"""Backtracking search for small gyrogroup Cayley tables.

Cells are filled row-major with the identity row and column fixed.  After
every assignment the partially known table is checked against left
cancellation, gyroassociativity, the automorphism property of the derived
gyrations and the left loop property; any identity whose two sides are both
already determined and disagree prunes the branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .carriers import FiniteGyrogroupTable, GroupTable, NotAGyrogroup
from .core import GyroError, is_degenerate_group


# enough for a complete order-8 search (about 5.4 million nodes)
SEARCH_BUDGET = 10_000_000


class BudgetExhausted(GyroError):
    """The node budget ran out; ``result`` holds what was found so far."""

    def __init__(self, result: "SearchResult"):
        self.result = result
        super().__init__(f"search budget exhausted after {result.nodes} nodes "
                         f"({len(result.tables)} tables so far)")


@dataclass
class SearchResult:
    order: int
    tables: list = field(default_factory=list)
    nodes: int = 0
    complete: bool = True

    def __len__(self):
        return len(self.tables)

    def __iter__(self):
        return iter(self.tables)

    def __getitem__(self, i):
        return self.tables[i]

    def nondegenerate(self) -> list:
        return [t for t in self.tables if not is_degenerate_group(t)[0]]


def _consistent_loops(t):
    """Loop version of :meth:`_PartialChecker.consistent`, for numba."""
    n = t.shape[0]
    inv = -np.ones(n, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            if t[a, b] == 0:
                inv[a] = b
    for a in range(n):
        if inv[a] >= 0:
            v = t[inv[a], a]
            if v >= 0 and v != 0:
                return False
    for x in range(n):
        ix = inv[x]
        if ix < 0:
            continue
        for y in range(n):
            s = t[x, y]
            if s >= 0:
                v = t[ix, s]
                if v >= 0 and v != y:
                    return False
    g = -np.ones((n, n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            s = t[x, y]
            if s < 0 or inv[s] < 0:
                continue
            m = inv[s]
            for z in range(n):
                yz = t[y, z]
                if yz < 0:
                    continue
                w = t[x, yz]
                if w >= 0:
                    g[x, y, z] = t[m, w]
    for x in range(n):
        for y in range(n):
            s = t[x, y]
            for z in range(n):
                gz = g[x, y, z]
                if s >= 0 and gz >= 0:
                    yz = t[y, z]
                    if yz >= 0:
                        lhs = t[x, yz]
                        rhs = t[s, gz]
                        if lhs >= 0 and rhs >= 0 and lhs != rhs:
                            return False
                if s >= 0 and gz >= 0:
                    v = g[s, y, z]
                    if v >= 0 and v != gz:
                        return False
    for a in range(n):
        for b in range(n):
            for u in range(n):
                gu = g[a, b, u]
                if gu < 0:
                    continue
                for v in range(n):
                    uv = t[u, v]
                    gv = g[a, b, v]
                    if uv < 0 or gv < 0:
                        continue
                    lhs = g[a, b, uv]
                    rhs = t[gu, gv]
                    if lhs >= 0 and rhs >= 0 and lhs != rhs:
                        return False
    return True


try:
    import numba

    _consistent_fast = numba.njit(cache=True)(_consistent_loops)
except ImportError:  # pragma: no cover
    _consistent_fast = None


class _PartialChecker:
    def __init__(self, n: int):
        self.n = n
        self.i2 = np.indices((n, n)).reshape(2, -1)
        self.i3 = np.indices((n, n, n)).reshape(3, -1)
        self.i4 = np.indices((n, n, n, n)).reshape(4, -1)

    def consistent(self, t: np.ndarray) -> bool:
        if _consistent_fast is not None:
            return bool(_consistent_fast(t))
        return self.consistent_numpy(t)

    def consistent_numpy(self, t: np.ndarray) -> bool:
        n = self.n
        has0 = t == 0
        inv = np.where(has0.any(axis=1), has0.argmax(axis=1), -1)

        def look(a, b):
            v = t[np.clip(a, 0, None), np.clip(b, 0, None)]
            return np.where((a < 0) | (b < 0), -1, v)

        def neg(a):
            return np.where(a < 0, -1, inv[np.clip(a, 0, None)])

        def clash(lhs, rhs):
            return bool(np.any((lhs >= 0) & (rhs >= 0) & (lhs != rhs)))

        # two-sided inverse: (-a) + a = 0
        known = inv >= 0
        if clash(look(inv[known], np.flatnonzero(known)), np.zeros(known.sum(), dtype=int)):
            return False
        x, y = self.i2
        if clash(look(neg(x), look(x, y)), y):
            return False
        x, y, z = self.i3
        g = look(neg(look(x, y)), look(x, look(y, z))).reshape(n, n, n)

        def gyr(a, b, c):
            v = g[np.clip(a, 0, None), np.clip(b, 0, None), np.clip(c, 0, None)]
            return np.where((a < 0) | (b < 0) | (c < 0), -1, v)

        if clash(look(x, look(y, z)), look(look(x, y), gyr(x, y, z))):
            return False
        if clash(gyr(look(x, y), y, z), gyr(x, y, z)):
            return False
        a, b, u, v = self.i4
        if clash(gyr(a, b, look(u, v)), look(gyr(a, b, u), gyr(a, b, v))):
            return False
        return True


def search_small(n: int, budget: int = SEARCH_BUDGET, *, partial_ok: bool = False) -> SearchResult:
    """All order-``n`` gyrogroup tables up to relabelings fixing 0.

    ``budget`` bounds the number of search nodes (cell assignments).  When it
    runs out :class:`BudgetExhausted` is raised carrying the partial result,
    unless ``partial_ok`` is set, in which case the partial result is
    returned with ``complete=False``.
    """
    if not 1 <= n <= 16:
        raise ValueError("search_small supports 1 <= n <= 16")
    t = -np.ones((n, n), dtype=np.int64)
    t[0, :] = np.arange(n)
    t[:, 0] = np.arange(n)
    # row 1 is preset to one canonical permutation per cycle type
    cells = [(a, b) for a in range(2, n) for b in range(1, n)]
    checker = _PartialChecker(n)
    result = SearchResult(n)
    seen: dict[bytes, np.ndarray] = {}

    class _Stop(Exception):
        pass

    def rec(k: int):
        if k == len(cells):
            canon = canonical_form(t)
            key = canon.tobytes()
            if key not in seen:
                seen[key] = canon
            return
        a, b = cells[k]
        row = set(t[a, :b].tolist())
        # right translations of a gyrogroup are bijective too (it is a loop)
        col = set(t[:a, b].tolist())
        for v in range(n):
            if v in row or v in col:
                continue
            result.nodes += 1
            if result.nodes > budget:
                raise _Stop
            t[a, b] = v
            if checker.consistent(t):
                rec(k + 1)
            t[a, b] = -1

    try:
        if n == 1:
            rec(0)
        for row in canonical_rows(n):
            result.nodes += 1
            if result.nodes > budget:
                raise _Stop
            t[1] = row
            if _columns_ok(t) and checker.consistent(t):
                rec(0)
            t[1, 1:] = -1
    except _Stop:
        result.complete = False
        result.nodes = budget
    for key in sorted(seen):
        table = seen[key]
        try:
            g = FiniteGyrogroupTable(table)
        except NotAGyrogroup:
            continue
        if is_degenerate_group(g)[0]:
            g = GroupTable(table)
        result.tables.append(g)
    if not result.complete and not partial_ok:
        raise BudgetExhausted(result)
    return result


def _columns_ok(t: np.ndarray) -> bool:
    for col in t.T:
        v = col[col >= 0]
        if len(np.unique(v)) != len(v):
            return False
    return True


def _partitions(m: int, largest: int | None = None):
    if m == 0:
        yield ()
        return
    for k in range(min(m, largest or m), 0, -1):
        for rest in _partitions(m - k, k):
            yield (k,) + rest


def canonical_rows(n: int) -> list[np.ndarray]:
    """One left translation x -> 1 + x per cycle type, up to relabelings fixing 0 and 1.

    Any non-identity element can be renamed 1, and the remaining labels can
    then be chosen so that the cycle through 0 reads 0 -> 1 -> 2 -> ... and
    the other cycles follow with consecutive labels, longest first.  Every
    gyrogroup of order n is therefore isomorphic to one whose row 1 is in
    this list.
    """
    rows = []
    for k in range(2, n + 1):
        for rest in _partitions(n - k):
            perm = np.empty(n, dtype=np.int64)
            cycles = [list(range(k))]
            start = k
            for length in rest:
                cycles.append(list(range(start, start + length)))
                start += length
            for cyc in cycles:
                for i, x in enumerate(cyc):
                    perm[x] = cyc[(i + 1) % len(cyc)]
            rows.append(perm)
    return rows


def relabel(t: np.ndarray, perm) -> np.ndarray:
    """Table of the same operation after renaming element x to perm[x]."""
    perm = np.asarray(perm)
    out = np.empty_like(t)
    out[np.ix_(perm, perm)] = perm[t]
    return out


def canonical_form(t: np.ndarray) -> np.ndarray:
    """Lexicographically smallest relabeling of ``t`` that fixes 0.

    Exact for n <= 9.  Larger orders use the smallest table among labelings
    generated breadth-first from every ordered pair of elements, which is an
    isomorphism invariant but not necessarily the global lexicographic
    minimum.
    """
    t = np.asarray(t)
    n = t.shape[0]
    if n <= 2:
        return t.copy()
    if n <= 9:
        rest = np.array(list(itertools.permutations(range(1, n))), dtype=np.int64)
        perms = np.concatenate([np.zeros((len(rest), 1), dtype=np.int64), rest], axis=1)
        best = None
        for chunk in np.array_split(perms, max(1, len(perms) // 20000)):
            inv = np.empty_like(chunk)
            rows = np.arange(len(chunk))[:, None]
            inv[rows, chunk] = np.arange(n)
            # new[i, j] = perm[t[inv[i], inv[j]]]
            tt = t[inv[:, :, None], inv[:, None, :]]
            new = np.take_along_axis(chunk, tt.reshape(len(chunk), -1), axis=1)
            order = np.lexsort(new.T[::-1])
            cand = new[order[0]]
            if best is None or tuple(cand) < tuple(best):
                best = cand
        return best.reshape(n, n)
    best = None
    for g1, g2 in itertools.product(range(1, n), repeat=2):
        perm = _bfs_labeling(t, (g1, g2))
        if perm is None:
            continue
        cand = relabel(t, perm)
        if best is None or tuple(cand.ravel()) < tuple(best.ravel()):
            best = cand
    return best if best is not None else t.copy()


def _bfs_labeling(t: np.ndarray, gens) -> np.ndarray | None:
    n = t.shape[0]
    order = [0]
    for g in gens:
        if g not in order:
            order.append(g)
    i = 0
    while i < len(order) and len(order) < n:
        for j in range(i + 1):
            for s in (t[order[i], order[j]], t[order[j], order[i]]):
                if s not in order:
                    order.append(int(s))
        i += 1
    if len(order) < n:
        return None
    perm = np.empty(n, dtype=np.int64)
    perm[order] = np.arange(n)
    return perm
