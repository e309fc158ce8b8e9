"""Lattice isomorphism search.

Only join-irreducibles are branched on; every other element is reached by
joining images already fixed, so a bad choice surfaces as soon as two joins
collide.  Candidates are pruned by a per-element invariant (height and the
sizes of the principal ideal, filter and cover sets).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .lattice import FiniteLattice


@dataclass(frozen=True)
class Isomorphism:
    """``mapping[x]`` is the image in the target of source element ``x``."""

    mapping: tuple
    nodes: int = 0

    def __call__(self, x):
        return self.mapping[x]

    def labels(self, src: FiniteLattice, dst: FiniteLattice) -> dict:
        return {src.label(x): dst.label(y) for x, y in enumerate(self.mapping)}


def element_invariants(L: FiniteLattice) -> list[tuple]:
    leq = L.leq_table
    down = leq.sum(axis=0)
    up = leq.sum(axis=1)
    lower = Counter(b for _, b in L.covers)
    upper = Counter(a for a, _ in L.covers)
    return [(L.heights[x], int(down[x]), int(up[x]), lower[x], upper[x]) for x in range(L.n)]


def join_irreducibles(L: FiniteLattice) -> list[int]:
    lower = Counter(b for _, b in L.covers)
    return sorted((x for x in range(L.n) if lower[x] == 1), key=lambda x: (L.heights[x], x))


def is_isomorphism(src: FiniteLattice, dst: FiniteLattice, mapping) -> bool:
    m = np.asarray(mapping)
    if src.n != dst.n or sorted(m.tolist()) != list(range(dst.n)):
        return False
    return bool(np.array_equal(src.leq_table, dst.leq_table[np.ix_(m, m)]))


class _Search:
    def __init__(self, src, dst):
        self.src, self.dst = src, dst
        self.inv_s = element_invariants(src)
        self.inv_d = element_invariants(dst)
        self.phi = [-1] * src.n
        self.back = [-1] * dst.n
        self.assigned = []
        self.nodes = 0
        self.ls, self.ld = src.leq_table, dst.leq_table

    def _set(self, x, y):
        # assign x -> y and close under joins; False on contradiction
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if self.phi[x] >= 0:
                if self.phi[x] != y:
                    return False
                continue
            if self.back[y] >= 0 or self.inv_s[x] != self.inv_d[y]:
                return False
            if self.assigned:
                a = np.array(self.assigned)
                fa = np.array([self.phi[u] for u in a])
                if not (np.array_equal(self.ls[x, a], self.ld[y, fa])
                        and np.array_equal(self.ls[a, x], self.ld[fa, y])):
                    return False
            self.phi[x], self.back[y] = y, x
            self.assigned.append(x)
            for u in self.assigned[:-1]:
                queue.append((self.src.join(x, u), self.dst.join(y, self.phi[u])))
        return True

    def _undo(self, mark):
        while len(self.assigned) > mark:
            x = self.assigned.pop()
            self.back[self.phi[x]] = -1
            self.phi[x] = -1

    def run(self, js, jd):
        if not self._set(self.src.bottom, self.dst.bottom):
            return None
        return self._branch(js, 0, jd)

    def _branch(self, js, k, jd):
        self.nodes += 1
        if k == len(js):
            return list(self.phi) if min(self.phi) >= 0 else None
        x = js[k]
        if self.phi[x] >= 0:
            return self._branch(js, k + 1, jd)
        mark = len(self.assigned)
        for y in jd:
            if self.back[y] >= 0 or self.inv_s[x] != self.inv_d[y]:
                continue
            if self._set(x, y):
                found = self._branch(js, k + 1, jd)
                if found is not None:
                    return found
            self._undo(mark)
        return None


def find_isomorphism(src: FiniteLattice, dst: FiniteLattice) -> Isomorphism | None:
    """An order isomorphism src -> dst, or None.

    The result is always re-verified on the full order relation.
    """
    if src.n != dst.n:
        return None
    if Counter(element_invariants(src)) != Counter(element_invariants(dst)):
        return None
    js, jd = join_irreducibles(src), join_irreducibles(dst)
    if len(js) != len(jd):
        return None
    search = _Search(src, dst)
    found = search.run(js, jd)
    if found is None or not is_isomorphism(src, dst, found):
        return None
    return Isomorphism(tuple(found), search.nodes)


def are_isomorphic(src: FiniteLattice, dst: FiniteLattice) -> bool:
    return find_isomorphism(src, dst) is not None
