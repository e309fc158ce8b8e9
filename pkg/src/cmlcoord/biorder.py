"""Biordered sets of idempotents.

A :class:`BiorderedSet` is stored by index: boolean matrices for the two
quasi-orders (``omega_l[e, f]`` means e omega^l f) and an integer matrix for
the basic product (``-1`` where undefined).  It can come from a lattice
(:func:`build_biorder`), from a ring, or be assembled by hand for negative
tests; the axiom checker only looks at the relations and the product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import NotComplementedModular, UndefinedProduct, UnknownElement
from .lattice import FiniteLattice, Verdict, is_complemented, is_modular, relative_complements
from .semigroup import NVPair, compose, idempotent_pairs, make_nv


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(col):
    out = 0
    for i in np.flatnonzero(col):
        out |= 1 << int(i)
    return out


class BiorderedSet:
    def __init__(self, elements, omega_l, omega_r, product, lattice=None, labeler=None):
        self.elements = list(elements)
        self.omega_l = np.array(omega_l, dtype=bool)
        self.omega_r = np.array(omega_r, dtype=bool)
        self.product_table = np.array(product, dtype=np.int64)
        for arr in (self.omega_l, self.omega_r, self.product_table):
            arr.setflags(write=False)
        self.lattice = lattice
        self._labeler = labeler
        self._pos = {k: i for i, k in enumerate(self.elements)}
        self._prod = self.product_table.tolist()
        # down_l[i] = {g : g omega^l i} as a bitmask
        self.down_l = [_mask(self.omega_l[:, i]) for i in range(len(self))]
        self.down_r = [_mask(self.omega_r[:, i]) for i in range(len(self))]
        self._sandwich_cache = {}

    def __len__(self):
        return len(self.elements)

    def pos(self, key) -> int:
        try:
            return self._pos[key]
        except KeyError:
            raise UnknownElement(f"{key!r} is not an element of this biordered set") from None

    def label(self, i) -> str:
        key = self.elements[i]
        if self._labeler is not None:
            return self._labeler(key)
        if self.lattice is not None:
            return key.label(self.lattice)
        return str(key)

    def with_product(self, product) -> "BiorderedSet":
        """Same relations, different product table (for negative tests)."""
        return BiorderedSet(self.elements, self.omega_l, self.omega_r, product,
                            self.lattice, self._labeler)

    # -- derived relations ---------------------------------------------------

    @cached_property
    def L(self):
        return self.omega_l & self.omega_l.T

    @cached_property
    def R(self):
        return self.omega_r & self.omega_r.T

    @cached_property
    def omega(self):
        return self.omega_l & self.omega_r

    @cached_property
    def domain(self):
        u = self.omega_l | self.omega_r
        return u | u.T

    def prod(self, i, j) -> int:
        """Basic product by position; raises outside the domain."""
        k = self._prod[i][j]
        if k < 0:
            raise UndefinedProduct(f"{self.label(i)}.{self.label(j)} is undefined")
        return k

    # -- sandwich sets -------------------------------------------------------

    def m_members(self, i, j) -> int:
        return self.down_l[i] & self.down_r[j]

    def precedes(self, i, j, g, h) -> bool:
        """g < h in M(e, f): eg omega^r eh and gf omega^l hf."""
        P = self._prod
        return bool(self.omega_r[P[i][g], P[i][h]] and self.omega_l[P[g][j], P[h][j]])

    def sandwich_mask(self, i, j) -> int:
        hit = self._sandwich_cache.get((i, j))
        if hit is not None:
            return hit
        P = self._prod
        members = list(_bits(self.m_members(i, j)))
        left = right = 0
        for g in members:
            eg, gf = P[i][g], P[g][j]
            if eg < 0 or gf < 0:
                raise UndefinedProduct(
                    f"product undefined while forming M({self.label(i)}, {self.label(j)})")
            left |= 1 << eg
            right |= 1 << gf
        out = 0
        for h in members:
            if not left & ~self.down_r[P[i][h]] and not right & ~self.down_l[P[h][j]]:
                out |= 1 << h
        self._sandwich_cache[(i, j)] = out
        return out


# -- construction from a lattice ----------------------------------------------


def _require_cm(L):
    ok, w = is_modular(L)
    if not ok:
        raise NotComplementedModular("lattice is not modular", witness=w)
    ok, w = is_complemented(L)
    if not ok:
        raise NotComplementedModular("lattice is not complemented", witness=w)


def build_biorder(L: FiniteLattice) -> BiorderedSet:
    """E_{P(L)} with omega^l by v1 <= v2, omega^r by n2 <= n1 and the
    closed-form basic products."""
    _require_cm(L)
    pairs = idempotent_pairs(L)
    n = np.array([p.n for p in pairs])
    v = np.array([p.v for p in pairs])
    leq, meet, join = L.leq_table, L.meet_table, L.join_table
    ol = leq[v[:, None], v[None, :]]
    orr = leq[n[None, :], n[:, None]]
    lookup = np.full((L.n, L.n), -1, dtype=np.int64)
    lookup[n, v] = np.arange(len(pairs))
    N = len(pairs)
    ni, nj = n[:, None], n[None, :]
    vi, vj = v[:, None], v[None, :]
    rows = np.broadcast_to(np.arange(N)[:, None], (N, N))
    cols = np.broadcast_to(np.arange(N)[None, :], (N, N))
    # e omega^r f: ef = (n_e; v_f ^ (n_f v v_e))
    case_r = lookup[np.broadcast_to(ni, (N, N)), meet[vj, join[nj, vi]]]
    # f omega^l e: ef = (n_e v (v_e ^ n_f); v_f)
    case_l = lookup[join[ni, meet[vi, nj]], np.broadcast_to(vj, (N, N))]
    prod = np.full((N, N), -1, dtype=np.int64)
    prod = np.where(ol.T, case_l, prod)
    prod = np.where(orr, case_r, prod)
    prod = np.where(orr.T, cols, prod)  # f omega^r e: ef = f
    prod = np.where(ol, rows, prod)     # e omega^l f: ef = e
    return BiorderedSet(pairs, ol, orr, prod, lattice=L)


def composition_products(E: BiorderedSet) -> np.ndarray:
    """Products of the underlying maps, as positions in E (-1 if the
    composite is not one of the (n; v) maps)."""
    L = E.lattice
    maps = np.array([make_nv(L, p).table for p in E.elements], dtype=np.intp)
    index = {row.tobytes(): i for i, row in enumerate(maps)}
    out = np.full((len(E), len(E)), -1, dtype=np.int64)
    for i in range(len(E)):
        comp = maps[:, maps[i]]  # row j: x -> e_j(e_i(x)), i.e. e_i e_j
        for j, row in enumerate(comp):
            out[i, j] = index.get(row.tobytes(), -1)
    return out


def basic_product(E: BiorderedSet, e, f):
    return E.elements[E.prod(E.pos(e), E.pos(f))]


@dataclass
class MSet:
    members: list
    precedes: set = field(default_factory=set)


def m_set(E: BiorderedSet, e, f) -> MSet:
    i, j = E.pos(e), E.pos(f)
    members = list(_bits(E.m_members(i, j)))
    rel = {(E.elements[g], E.elements[h]) for g in members for h in members if E.precedes(i, j, g, h)}
    return MSet(sorted(E.elements[g] for g in members), rel)


def sandwich_set(E: BiorderedSet, e, f) -> list:
    i, j = E.pos(e), E.pos(f)
    return sorted(E.elements[h] for h in _bits(E.sandwich_mask(i, j)))


def sandwich_via_complements(E: BiorderedSet, e, f) -> list[NVPair]:
    """Pairs (n; v) with n a complement of v1 v n2 in [n2, 1] and v a
    complement of v1 ^ n2 in [0, v1]; non-complementary combinations are
    dropped."""
    L = E.lattice
    (n1, v1), (n2, v2) = e, f
    ns = relative_complements(L, L.join(v1, n2), (n2, L.top))
    vs = relative_complements(L, L.meet(v1, n2), (L.bottom, v1))
    return sorted(
        NVPair(a, b) for a in ns for b in vs
        if L.join(a, b) == L.top and L.meet(a, b) == L.bottom
    )


def trivial_sandwich_check(E: BiorderedSet, e, f) -> Verdict:
    """S(e, f) = S(f, e) = {(1; 0)} exactly when v_e <= n_f and v_f <= n_e."""
    L = E.lattice
    e, f = NVPair(*e), NVPair(*f)
    zero = {NVPair(L.top, L.bottom)}
    trivial = set(sandwich_set(E, e, f)) == zero and set(sandwich_set(E, f, e)) == zero
    compatible = L.leq(e.v, f.n) and L.leq(f.v, e.n)
    if trivial != compatible:
        return Verdict(False, {"pair": (e.label(L), f.label(L)), "trivial": trivial, "compatible": compatible})
    return Verdict(True)


def inverse_law_check(E: BiorderedSet, e) -> Verdict:
    """e (v; n) = (v; n) e = (1; 0) as maps, and e omega^l f <=> f' omega^r e'."""
    L = E.lattice
    e = NVPair(*e)
    zero = make_nv(L, (L.top, L.bottom))
    a, b = make_nv(L, e), make_nv(L, e.inverse())
    if compose(a, b) != zero or compose(b, a) != zero:
        return Verdict(False, {"element": e.label(L), "product": "not (1;0)"})
    i, ii = E.pos(e), E.pos(e.inverse())
    for f in E.elements:
        j, jj = E.pos(f), E.pos(f.inverse())
        if E.omega_l[i, j] != E.omega_r[jj, ii]:
            return Verdict(False, {"element": e.label(L), "other": f.label(L)})
    return Verdict(True)


# -- axioms --------------------------------------------------------------------

AXIOMS = {
    "1": "omega^l, omega^r are quasi-orders; products defined exactly on D_E "
         "and e omega^l f <=> ef = e, e omega^r f <=> fe = e there",
    "2": "f omega^r e => f R fe omega e",
    "2*": "f omega^l e => f L ef omega e",
    "3": "g omega^l f, f, g omega^r e => ge omega^l fe",
    "3*": "g omega^r f, f, g omega^l e => eg omega^r ef",
    "4": "g omega^r f omega^r e => gf = (ge)f",
    "4*": "g omega^l f omega^l e => fg = f(eg)",
    "5": "g omega^l f, f, g omega^r e => (fg)e = (fe)(ge)",
    "5*": "g omega^r f, f, g omega^l e => e(gf) = (eg)(ef)",
    "6": "f, g omega^r e => S(f, g)e = S(fe, ge)",
    "6*": "f, g omega^l e => eS(f, g) = S(ef, eg)",
    "omega": "omega = omega^l ^ omega^r is a partial order",
    "regular": "S(e, f) is nonempty for all e, f",
}

DUAL_NOTE = ("starred axioms are the left-right duals: swap omega^l with omega^r "
             "and reverse every product")


@dataclass
class AxiomResult:
    name: str
    statement: str
    passed: bool
    witness: object = None


@dataclass
class AxiomReport:
    results: list

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self):
        return [r for r in self.results if not r.passed]


class _Fail(Exception):
    def __init__(self, witness):
        self.witness = witness


def _first(mask):
    idx = np.argwhere(mask)[0]
    return tuple(int(t) for t in idx)


def _pp(P, a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    ok = (a >= 0) & (b >= 0)
    return np.where(ok, P[np.clip(a, 0, None), np.clip(b, 0, None)], -1)


def _check_1(E):
    N = len(E)
    P = E.product_table
    for name, rel in (("omega^l", E.omega_l), ("omega^r", E.omega_r)):
        if not rel.diagonal().all():
            i = int(np.flatnonzero(~rel.diagonal())[0])
            raise _Fail({"not reflexive": name, "e": E.label(i)})
        r = rel.astype(np.int64)
        bad = ((r @ r) > 0) & ~rel
        if bad.any():
            i, k = _first(bad)
            j = int(np.flatnonzero(rel[i] & rel[:, k])[0])
            raise _Fail({"not transitive": name, "e": E.label(i), "f": E.label(j), "g": E.label(k)})
    defined = P >= 0
    bad = defined != E.domain
    if bad.any():
        i, j = _first(bad)
        what = "undefined on D_E" if E.domain[i, j] else "defined off D_E"
        raise _Fail({"product": what, "e": E.label(i), "f": E.label(j)})
    ar = np.arange(N)
    left_id = (P == ar[:, None]) & defined
    right_id = (P.T == ar[:, None]) & defined.T
    for name, rel, lhs in (("omega^l", E.omega_l, left_id), ("omega^r", E.omega_r, right_id)):
        bad = (rel != lhs) & E.domain
        if bad.any():
            i, j = _first(bad)
            raise _Fail({"relation/product mismatch": name, "e": E.label(i), "f": E.label(j)})


def _check_2(E, dual):
    rel = E.omega_l if dual else E.omega_r
    P = E.product_table
    N = len(E)
    f_idx, e_idx = np.nonzero(rel)
    prod = P[e_idx, f_idx] if dual else P[f_idx, e_idx]
    if (prod < 0).any():
        k = int(np.flatnonzero(prod < 0)[0])
        raise _Fail({"undefined": True, "f": E.label(f_idx[k]), "e": E.label(e_idx[k])})
    green = E.L if dual else E.R
    ok = green[f_idx, prod] & E.omega[prod, e_idx]
    if not ok.all():
        k = int(np.flatnonzero(~ok)[0])
        raise _Fail({"f": E.label(f_idx[k]), "e": E.label(e_idx[k]), "product": E.label(prod[k])})


def _down(rel, e):
    return np.flatnonzero(rel[:, e])


def _check_3(E, dual):
    P = E.product_table
    outer = E.omega_l if dual else E.omega_r
    inner = E.omega_r if dual else E.omega_l
    for e in range(len(E)):
        F = _down(outer, e)
        sub = inner[np.ix_(F, F)]  # [g, f]: g inner f
        xe = P[e, F] if dual else P[F, e]
        a = xe[:, None]  # ge (or eg)
        b = xe[None, :]  # fe (or ef)
        defined = (a >= 0) & (b >= 0)
        holds = inner[np.clip(a, 0, None), np.clip(b, 0, None)]
        bad = sub & ~(defined & holds)
        if bad.any():
            gi, fi = _first(bad)
            raise _Fail({"e": E.label(e), "f": E.label(F[fi]), "g": E.label(F[gi])})


def _check_4(E, dual):
    P = E.product_table
    rel = E.omega_l if dual else E.omega_r
    for e in range(len(E)):
        F = _down(rel, e)
        mask = rel[:, F]  # [g, f]: g rel f
        if dual:
            lhs = P.T[:, F]                       # fg
            eg = P[e, :]
            rhs = _pp(P, F[None, :], eg[:, None])  # f(eg)
        else:
            lhs = P[:, F]                         # gf
            ge = P[:, e]
            rhs = _pp(P, ge[:, None], F[None, :])  # (ge)f
        bad = mask & ((lhs != rhs) | (lhs < 0))
        if bad.any():
            g, fi = _first(bad)
            raise _Fail({"e": E.label(e), "f": E.label(F[fi]), "g": E.label(g)})


def _check_5(E, dual):
    P = E.product_table
    outer = E.omega_l if dual else E.omega_r
    inner = E.omega_r if dual else E.omega_l
    for e in range(len(E)):
        F = _down(outer, e)
        mask = inner[np.ix_(F, F)]  # [g, f]
        g = F[:, None]
        f = F[None, :]
        if dual:
            lhs = _pp(P, np.full_like(g, e), P[g, f])           # e(gf)
            rhs = _pp(P, P[e, g], P[e, f])                      # (eg)(ef)
        else:
            lhs = _pp(P, P[f, g], np.full_like(g, e))           # (fg)e
            rhs = _pp(P, P[f, e], P[g, e])                      # (fe)(ge)
        bad = mask & ((lhs != rhs) | (lhs < 0))
        if bad.any():
            gi, fi = _first(bad)
            raise _Fail({"e": E.label(e), "f": E.label(F[fi]), "g": E.label(F[gi])})


def _check_6(E, dual):
    rel = E.omega_l if dual else E.omega_r
    P = E._prod
    for e in range(len(E)):
        F = [int(x) for x in _down(rel, e)]
        for f in F:
            for g in F:
                s = E.sandwich_mask(f, g)
                moved = 0
                for h in _bits(s):
                    k = P[e][h] if dual else P[h][e]
                    if k < 0:
                        raise _Fail({"undefined": True, "e": E.label(e), "h": E.label(h)})
                    moved |= 1 << k
                fe, ge = (P[e][f], P[e][g]) if dual else (P[f][e], P[g][e])
                if fe < 0 or ge < 0:
                    raise _Fail({"undefined": True, "e": E.label(e), "f": E.label(f), "g": E.label(g)})
                if moved != E.sandwich_mask(fe, ge):
                    raise _Fail({"e": E.label(e), "f": E.label(f), "g": E.label(g)})


def _check_omega(E):
    both = E.omega & E.omega.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = _first(both)
        raise _Fail({"e": E.label(i), "f": E.label(j)})


def _check_regular(E):
    for i in range(len(E)):
        for j in range(len(E)):
            if not E.sandwich_mask(i, j):
                raise _Fail({"e": E.label(i), "f": E.label(j)})


def check_biorder_axioms(E: BiorderedSet) -> AxiomReport:
    """Exhaustively verify the biordered-set axioms, their duals, the
    partial order omega, and regularity.  Failures carry a witness."""
    checks = [
        ("1", lambda: _check_1(E)),
        ("2", lambda: _check_2(E, False)),
        ("2*", lambda: _check_2(E, True)),
        ("3", lambda: _check_3(E, False)),
        ("3*", lambda: _check_3(E, True)),
        ("4", lambda: _check_4(E, False)),
        ("4*", lambda: _check_4(E, True)),
        ("5", lambda: _check_5(E, False)),
        ("5*", lambda: _check_5(E, True)),
        ("6", lambda: _check_6(E, False)),
        ("6*", lambda: _check_6(E, True)),
        ("omega", lambda: _check_omega(E)),
        ("regular", lambda: _check_regular(E)),
    ]
    results = []
    for name, run in checks:
        try:
            run()
        except _Fail as exc:
            results.append(AxiomResult(name, AXIOMS[name], False, exc.witness))
        except UndefinedProduct as exc:
            results.append(AxiomResult(name, AXIOMS[name], False, {"undefined": str(exc)}))
        else:
            results.append(AxiomResult(name, AXIOMS[name], True))
    return AxiomReport(results)


# -- E-sequences ---------------------------------------------------------------


def lr_neighbors(E: BiorderedSet) -> list[list[int]]:
    adj = (E.L | E.R) & ~np.eye(len(E), dtype=bool)
    return [np.flatnonzero(row).tolist() for row in adj]


def e_chain(E: BiorderedSet, e, f) -> list | None:
    """A shortest E-sequence from e to f (breadth-first), or None."""
    s, t = E.pos(e), E.pos(f)
    adj = lr_neighbors(E)
    prev = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            path = []
            while x is not None:
                path.append(E.elements[x])
                x = prev[x]
            return path[::-1]
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    return None


def e_distance(E: BiorderedSet, e, f) -> int:
    """Shortest E-sequence length with d(e, e) = 1 and d = 0 when unreachable."""
    if e == f:
        E.pos(e)
        return 1
    path = e_chain(E, e, f)
    return 0 if path is None else len(path) - 1


def distance_matrix(E: BiorderedSet) -> np.ndarray:
    """All-pairs d with the same conventions, via scipy's breadth-first search."""
    adj = (E.L | E.R) & ~np.eye(len(E), dtype=bool)
    dist = shortest_path(csr_matrix(adj.astype(np.int8)), unweighted=True, directed=False)
    out = np.where(np.isinf(dist), 0, dist).astype(np.int64)
    np.fill_diagonal(out, 1)
    return out


# -- DOT -----------------------------------------------------------------------


def dot_lr_graph(E: BiorderedSet, name="E") -> str:
    lines = [f"graph {name} {{"]
    for i in range(len(E)):
        lines.append(f'  e{i} [label="{E.label(i)}"];')
    for i in range(len(E)):
        for j in range(i + 1, len(E)):
            if E.L[i, j]:
                lines.append(f'  e{i} -- e{j} [label="l"];')
            if E.R[i, j]:
                lines.append(f'  e{i} -- e{j} [label="r"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_omega_diagram(E: BiorderedSet, name="omega") -> str:
    """Hasse diagram of the natural partial order omega."""
    w = E.omega & ~np.eye(len(E), dtype=bool)
    s = w.astype(np.int64)
    hasse = w & ((s @ s) == 0)
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(len(E)):
        lines.append(f'  e{i} [label="{E.label(i)}"];')
    for i, j in np.argwhere(hasse):
        lines.append(f"  e{i} -> e{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
