"""Named lattices used throughout the tests and the CLI.

``catalog("M3")``, ``catalog("F2^3")`` and friends; subspace lattices of
F_q^k are built by enumerating spans and labelled by reduced row echelon
bases, e.g. ``<100,011>``.
"""

from __future__ import annotations

import re
import string
from itertools import combinations, product

import numpy as np

from .errors import ParseError
from .lattice import FiniteLattice, build_lattice, lattice_from_leq


def one_element() -> FiniteLattice:
    return build_lattice([], 1, ["0"])


def chain(k: int) -> FiniteLattice:
    """Chain with ``k`` elements, labelled 0 < c1 < ... < 1."""
    if k == 1:
        return one_element()
    labels = ["0"] + [f"c{i}" for i in range(1, k - 1)] + ["1"]
    if k == 3:
        labels[1] = "m"
    return build_lattice([(i, i + 1) for i in range(k - 1)], k, labels)


def boolean(k: int) -> FiniteLattice:
    """Power set of ``k`` atoms named a, b, c, ...; bottom is 0 and top is 1."""
    atoms = string.ascii_lowercase[:k]
    subsets = [frozenset(c) for r in range(k + 1) for c in combinations(atoms, r)]
    index = {s: i for i, s in enumerate(subsets)}
    covers = [(index[s], index[s | {x}]) for s in subsets for x in atoms if x not in s]
    labels = ["".join(sorted(s)) or "0" for s in subsets]
    labels[-1] = "1"
    return build_lattice(covers, len(subsets), labels)


def diamond(k: int) -> FiniteLattice:
    """M_k: bottom, ``k`` pairwise incomparable atoms a1..ak, top."""
    n = k + 2
    covers = [(0, i) for i in range(1, k + 1)] + [(i, n - 1) for i in range(1, k + 1)]
    return build_lattice(covers, n, ["0"] + [f"a{i}" for i in range(1, k + 1)] + ["1"])


def pentagon() -> FiniteLattice:
    """N5: 0 < x < z < 1 and 0 < y < 1."""
    return build_lattice([(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)], 5, ["0", "x", "y", "z", "1"])


# -- subspace lattices ----------------------------------------------------------


def rref(rows, q):
    """Reduced row echelon form over F_q (q prime), zero rows dropped."""
    m = [list(r) for r in rows]
    out = []
    ncols = len(m[0]) if m else 0
    col = 0
    while m and col < ncols:
        piv = next((r for r in m if r[col] % q), None)
        if piv is None:
            col += 1
            continue
        m.remove(piv)
        inv = pow(piv[col], -1, q)
        piv = [(x * inv) % q for x in piv]
        m = [[(x - r[col] * y) % q for x, y in zip(r, piv)] for r in m]
        out = [[(x - r[col] * y) % q for x, y in zip(r, piv)] for r in out]
        out.append(piv)
        m = [r for r in m if any(r)]
        col += 1
    return tuple(tuple(r) for r in out)


def span(vectors, q, dim):
    """The set of all F_q-linear combinations of ``vectors``."""
    basis = rref(vectors, q) if vectors else ()
    out = set()
    for coeffs in product(range(q), repeat=len(basis)):
        v = [0] * dim
        for c, b in zip(coeffs, basis):
            for i in range(dim):
                v[i] = (v[i] + c * b[i]) % q
        out.add(tuple(v))
    return frozenset(out)


class SubspaceLattice(FiniteLattice):
    """Lattice of subspaces of F_q^dim, with the vector sets kept for oracles."""

    def __init__(self, q, dim):
        if q < 2 or any(q % p == 0 for p in range(2, int(q ** 0.5) + 1)):
            raise ParseError(f"q={q} must be prime")
        self.q, self.dim = q, dim
        zero = frozenset([(0,) * dim])
        seen = {zero}
        frontier = [zero]
        vectors = list(product(range(q), repeat=dim))
        while frontier:
            nxt = []
            for s in frontier:
                for v in vectors:
                    if v not in s:
                        t = span(list(s) + [v], q, dim)
                        if t not in seen:
                            seen.add(t)
                            nxt.append(t)
            frontier = nxt
        bases = {s: rref(sorted(s), q) for s in seen}
        spaces = sorted(seen, key=lambda s: (len(bases[s]), bases[s]))
        self.subspaces = spaces
        self._space_index = {s: i for i, s in enumerate(spaces)}
        n = len(spaces)
        leq = np.array([[a <= b for b in spaces] for a in spaces], dtype=bool)
        base = lattice_from_leq(leq)
        labels = []
        for s in spaces:
            b = bases[s]
            if not b:
                labels.append("0")
            elif len(b) == dim:
                labels.append("1")
            else:
                labels.append("<" + ",".join("".join(map(str, r)) for r in b) + ">")
        super().__init__(base.leq_table, base.meet_table, base.join_table, labels)
        assert self.n == n

    def span_index(self, vectors) -> int:
        """Index of the subspace spanned by ``vectors`` (tuples or digit strings)."""
        vecs = [tuple(int(c) for c in v) if isinstance(v, str) else tuple(v) for v in vectors]
        return self._space_index[span(vecs, self.q, self.dim)]

    def __repr__(self):
        return f"SubspaceLattice(q={self.q}, dim={self.dim}, n={self.n})"


def subspace_lattice(q: int, dim: int) -> SubspaceLattice:
    return SubspaceLattice(q, dim)


_PATTERNS = [
    (re.compile(r"one|chain1"), lambda m: one_element()),
    (re.compile(r"chain(\d+)"), lambda m: chain(int(m[1]))),
    (re.compile(r"B(\d+)"), lambda m: boolean(int(m[1]))),
    (re.compile(r"M(\d+)"), lambda m: diamond(int(m[1]))),
    (re.compile(r"N5"), lambda m: pentagon()),
    (re.compile(r"F(\d+)\^(\d+)"), lambda m: subspace_lattice(int(m[1]), int(m[2]))),
]


def catalog(name: str) -> FiniteLattice:
    """Look up a lattice by name: one, chainK, BK, MK, N5, Fq^k."""
    for pat, make in _PATTERNS:
        m = pat.fullmatch(name)
        if m:
            return make(m)
    raise ParseError(f"unknown catalog lattice {name!r}")


# the desk-scale complemented modular lattices used for exhaustive checks
CATALOG_SMALL = ("one", "chain2", "B2", "B3", "M3", "M4", "F2^3")
