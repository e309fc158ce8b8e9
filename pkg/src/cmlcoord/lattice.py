"""Finite bounded lattices given by their Hasse diagram.

All tables (order, meet, join) are computed once at construction; every
other module relies on O(1) lookups.  Elements are identified by index,
labels are cosmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import NotALattice, NotAPoset, OutOfInterval, ParseError, Unbounded


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome plus a witness explaining a failure.

    Truthiness follows ``ok`` and the object unpacks as ``ok, witness``.
    """

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok

    def __iter__(self):
        yield self.ok
        yield self.witness


class Interval(NamedTuple):
    lo: int
    hi: int


class FiniteLattice:
    """Immutable finite lattice on the indices ``0..n-1``.

    Use :func:`build_lattice` rather than calling the constructor directly;
    the constructor trusts its tables.
    """

    def __init__(self, leq, meet, join, labels=None):
        leq = np.array(leq, dtype=bool)
        meet = np.array(meet, dtype=np.int64)
        join = np.array(join, dtype=np.int64)
        n = leq.shape[0]
        for arr in (leq, meet, join):
            arr.setflags(write=False)
        self.n = n
        self.leq_table = leq
        self.meet_table = meet
        self.join_table = join
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(self.labels) != n:
            raise ParseError(f"expected {n} labels, got {len(self.labels)}")
        # plain lists are much faster than numpy scalars in the exhaustive loops
        self._leq = leq.tolist()
        self._meet = meet.tolist()
        self._join = join.tolist()
        below = leq.sum(axis=0)
        above = leq.sum(axis=1)
        self.bottom = int(np.flatnonzero(above == n)[0])
        self.top = int(np.flatnonzero(below == n)[0])
        self._index = {}
        for i, lab in enumerate(self.labels):
            self._index.setdefault(lab, []).append(i)

    # -- primitive operations -------------------------------------------------

    def leq(self, a, b):
        return self._leq[a][b]

    def meet(self, a, b):
        return self._meet[a][b]

    def join(self, a, b):
        return self._join[a][b]

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.top
        for x in xs:
            out = self._meet[out][x]
        return out

    def join_all(self, xs: Iterable[int]) -> int:
        out = self.bottom
        for x in xs:
            out = self._join[out][x]
        return out

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(range(self.n))

    def __eq__(self, other):
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.leq_table, other.leq_table)
        )

    def __hash__(self):
        return hash((self.n, self.labels, self.leq_table.tobytes()))

    def __repr__(self):
        return f"FiniteLattice(n={self.n})"

    # -- derived structure ----------------------------------------------------

    def index(self, ref) -> int:
        """Resolve a label (preferred) or an integer index to an element."""
        if isinstance(ref, str):
            hits = self._index.get(ref)
            if hits:
                if len(hits) > 1:
                    raise ParseError(f"label {ref!r} is ambiguous")
                return hits[0]
            try:
                ref = int(ref)
            except ValueError:
                raise ParseError(f"unknown element {ref!r}") from None
        if isinstance(ref, (int, np.integer)) and 0 <= ref < self.n:
            return int(ref)
        raise ParseError(f"unknown element {ref!r}")

    def label(self, i) -> str:
        return self.labels[i]

    def down(self, x) -> list[int]:
        return [y for y in range(self.n) if self._leq[y][x]]

    def up(self, x) -> list[int]:
        return [y for y in range(self.n) if self._leq[x][y]]

    def interval(self, lo, hi) -> list[int]:
        return [y for y in range(self.n) if self._leq[lo][y] and self._leq[y][hi]]

    @cached_property
    def covers(self) -> list[tuple[int, int]]:
        """The Hasse diagram as sorted (lower, upper) pairs."""
        strict = self.leq_table & ~np.eye(self.n, dtype=bool)
        s = strict.astype(np.int64)
        hasse = strict & ((s @ s) == 0)
        return [(int(a), int(b)) for a, b in np.argwhere(hasse)]

    @cached_property
    def heights(self) -> list[int]:
        """Length of the longest chain from bottom to each element."""
        order = sorted(range(self.n), key=lambda x: int(self.leq_table[:, x].sum()))
        h = [0] * self.n
        for x in order:
            for y in range(self.n):
                if y != x and self._leq[y][x]:
                    h[x] = max(h[x], h[y] + 1)
        return h


def _closure_bits(n, succ):
    """Reflexive-transitive closure as up-set bitmasks; raises on a cycle."""
    indeg = [0] * n
    for a in range(n):
        for b in succ[a]:
            indeg[b] += 1
    order = [a for a in range(n) if indeg[a] == 0]
    k = 0
    while k < len(order):
        a = order[k]
        k += 1
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
    if len(order) < n:
        stuck = {a for a in range(n) if indeg[a] > 0}
        raise NotAPoset("cover relation has a cycle", cycle=_find_cycle(succ, stuck))
    up = [0] * n
    for a in reversed(order):
        bits = 1 << a
        for b in succ[a]:
            bits |= up[b]
        up[a] = bits
    return up


def _find_cycle(succ, nodes):
    # every stuck node keeps a stuck predecessor, so walk backwards
    pred = {a: [] for a in nodes}
    for a in nodes:
        for b in succ[a]:
            if b in nodes:
                pred[b].append(a)
    start = min(nodes)
    path, seen = [start], {start: 0}
    while True:
        prv = min(pred[path[-1]])
        if prv in seen:
            cyc = path[seen[prv]:] + [prv]
            return cyc[::-1]
        seen[prv] = len(path)
        path.append(prv)


def build_lattice(covers: Iterable[Sequence[int]], n: int, labels=None) -> FiniteLattice:
    """Build a lattice from generating order pairs ``(lower, upper)``.

    The order is the reflexive-transitive closure of the pairs, so redundant
    (non-cover) pairs are harmless.  Raises ``NotAPoset`` on a cycle,
    ``NotALattice`` (with the offending pair as witness) when some pair lacks
    a unique meet or join, and ``Unbounded`` for the empty poset.
    """
    if n <= 0:
        raise Unbounded("a lattice needs at least one element")
    succ = [set() for _ in range(n)]
    for pair in covers:
        a, b = (int(t) for t in pair)
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"cover ({a}, {b}) out of range for n={n}")
        if a == b:
            raise NotAPoset(f"self-loop at {a}", cycle=[a, a])
        succ[a].add(b)
    up = _closure_bits(n, [sorted(s) for s in succ])
    leq = np.zeros((n, n), dtype=bool)
    for a in range(n):
        bits = up[a]
        while bits:
            low = bits & -bits
            leq[a, low.bit_length() - 1] = True
            bits ^= low
    return lattice_from_leq(leq, labels)


def _bound_table(leq, name):
    # leq[a, b] means a <= b.  For the join look at common upper bounds.
    n = leq.shape[0]
    common = leq[:, None, :] & leq[None, :, :]
    score = leq.sum(axis=1)  # size of the up-set; the lub has the largest
    cand = np.where(common, score[None, None, :], -1).argmax(axis=2)
    empty = ~common.any(axis=2)
    ok = ~empty & np.all(~common | leq[cand], axis=2)
    if not ok.all():
        a, b = (int(t) for t in np.argwhere(~ok)[0])
        why = "no" if empty[a, b] else "no unique"
        raise NotALattice(f"elements {a} and {b} have {why} {name}", witness=(a, b))
    return cand


def lattice_from_leq(leq, labels=None) -> FiniteLattice:
    """Build a lattice from a full order matrix (``leq[a, b]`` iff a <= b)."""
    leq = np.asarray(leq, dtype=bool)
    n = leq.shape[0]
    if n == 0:
        raise Unbounded("a lattice needs at least one element")
    if not leq.diagonal().all():
        raise NotAPoset("order is not reflexive")
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        a, b = (int(t) for t in np.argwhere(both)[0])
        raise NotAPoset("order is not antisymmetric", cycle=[a, b, a])
    if not np.array_equal((leq.astype(np.int64) @ leq.astype(np.int64)) > 0, leq):
        raise NotAPoset("order is not transitive")
    join = _bound_table(leq, "join")
    meet = _bound_table(leq.T, "meet")
    return FiniteLattice(leq, meet, join, labels)


# -- predicates ---------------------------------------------------------------


def is_modular(L: FiniteLattice) -> Verdict:
    """Check (a v b) ^ c == a v (b ^ c) for all a <= c; witness is (a, b, c)."""
    meet, join, leq = L.meet_table, L.join_table, L.leq_table
    for a in range(L.n):
        lhs = meet[join[a][:, None], np.arange(L.n)[None, :]]
        rhs = join[a][meet]
        bad = (lhs != rhs) & leq[a][None, :]
        if bad.any():
            b, c = (int(t) for t in np.argwhere(bad)[0])
            return Verdict(False, (a, b, c))
    return Verdict(True)


def complements(L: FiniteLattice, a: int) -> list[int]:
    return [b for b in range(L.n) if L.join(a, b) == L.top and L.meet(a, b) == L.bottom]


def is_complemented(L: FiniteLattice) -> Verdict:
    for a in range(L.n):
        if not complements(L, a):
            return Verdict(False, a)
    return Verdict(True)


def relative_complements(L: FiniteLattice, a: int, interval) -> list[int]:
    """All z in [lo, hi] with a v z = hi and a ^ z = lo."""
    lo, hi = interval
    if not (L.leq(lo, a) and L.leq(a, hi)):
        raise OutOfInterval(f"{L.label(a)} is not in [{L.label(lo)}, {L.label(hi)}]")
    return [
        z for z in range(L.n)
        if L.leq(lo, z) and L.leq(z, hi) and L.join(a, z) == hi and L.meet(a, z) == lo
    ]


def is_independent(L: FiniteLattice, xs: Sequence[int]) -> Verdict:
    """Each x_i meets the join of the others in bottom; witness is the failing position."""
    for i, x in enumerate(xs):
        rest = L.join_all(y for j, y in enumerate(xs) if j != i)
        if L.meet(rest, x) != L.bottom:
            return Verdict(False, i)
    return Verdict(True)


def perspectivity_axes(L: FiniteLattice, a: int, b: int) -> list[int]:
    bot = L.bottom
    return [
        x for x in range(L.n)
        if L.join(a, x) == L.join(b, x) and L.meet(a, x) == bot and L.meet(b, x) == bot
    ]


def is_perspective(L: FiniteLattice, a: int, b: int) -> bool:
    return bool(perspectivity_axes(L, a, b))


def check_lattice_tables(L: FiniteLattice) -> Verdict:
    """Recheck meet/join against the order by brute force (test oracle)."""
    n = L.n
    for a, b in combinations(range(n), 2):
        m, j = L.meet(a, b), L.join(a, b)
        if not (L.leq(m, a) and L.leq(m, b) and L.leq(a, j) and L.leq(b, j)):
            return Verdict(False, (a, b))
        for c in range(n):
            if L.leq(c, a) and L.leq(c, b) and not L.leq(c, m):
                return Verdict(False, (a, b, c))
            if L.leq(a, c) and L.leq(b, c) and not L.leq(j, c):
                return Verdict(False, (a, b, c))
    return Verdict(True)


# -- serialization ------------------------------------------------------------


def lattice_from_json(data) -> FiniteLattice:
    try:
        n = data["n"]
        covers = data["covers"]
    except (KeyError, TypeError):
        raise ParseError('lattice JSON needs "n" and "covers"') from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError('"n" must be an integer')
    labels = data.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or not all(isinstance(s, str) for s in labels)
    ):
        raise ParseError('"labels" must be a list of strings')
    pairs = []
    for c in covers:
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(t, int) for t in c)):
            raise ParseError(f"bad cover entry {c!r}")
        pairs.append(tuple(c))
    return build_lattice(pairs, n, labels)


def lattice_to_json(L: FiniteLattice) -> dict:
    return {"n": L.n, "labels": list(L.labels), "covers": [list(c) for c in L.covers]}


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dot_hasse(L: FiniteLattice, name="lattice") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(L.n):
        lines.append(f'  n{i} [label="{L.label(i)}"];')
    for a, b in L.covers:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
