"""The operation (n_i; v_i) + (n_j; v_j) = (n_i ^ n_j; v_i v v_j) on
compatible pairs, its laws, the E0 family search, and homogeneous bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .biorder import BiorderedSet, _bits, distance_matrix, sandwich_set
from .errors import IncompatiblePair, NotABasis, NotComplementary
from .lattice import FiniteLattice, Verdict, is_independent, perspectivity_axes
from .semigroup import NVPair, compose, make_nv

DISTANCE_NOTE = (
    "E0 condition (3) asks for d = 3 while the ring-side basis theorem assumes "
    "d <= 3; exact3 implements the former, dle3 the latter (1 <= d <= 3)"
)


@dataclass(frozen=True)
class CompatibleFamily:
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def checked(cls, L: FiniteLattice, members) -> "CompatibleFamily":
        members = tuple(NVPair(*m) for m in members)
        for a in range(len(members)):
            for b in range(len(members)):
                if a != b and not L.leq(members[a].v, members[b].n):
                    raise IncompatiblePair(f"v_{a} is not below n_{b}")
        return cls(members)

    def labels(self, L):
        return [p.label(L) for p in self.members]


@dataclass
class HomogeneousBasis:
    elements: tuple
    axes: dict = field(default_factory=dict)

    @property
    def order(self):
        return len(self.elements)


def _lat(x):
    return x.lattice if isinstance(x, BiorderedSet) else x


def compatible(L, e, f) -> bool:
    L = _lat(L)
    return L.leq(e[1], f[0]) and L.leq(f[1], e[0])


def oplus(L, e, f) -> NVPair:
    """(n_e ^ n_f; v_e v v_f), defined when v_e <= n_f and v_f <= n_e."""
    L = _lat(L)
    e, f = NVPair(*e), NVPair(*f)
    if not compatible(L, e, f):
        raise IncompatiblePair(f"{e.label(L)} and {f.label(L)} are not compatible")
    out = NVPair(L.meet(e.n, f.n), L.join(e.v, f.v))
    if L.join(*out) != L.top or L.meet(*out) != L.bottom:
        raise NotComplementary(f"{e.label(L)} + {f.label(L)} = {out.label(L)} is not complementary")
    return out


def verify_oplus_bounds(E: BiorderedSet, e, f) -> Verdict:
    """e, f lie omega-below e + f, and e + f is the least omega^l and the
    greatest omega^r bound among all (r; s)."""
    L = E.lattice
    p = oplus(L, e, f)
    ip, ie, jf = E.pos(p), E.pos(e), E.pos(f)
    for x in (ie, jf):
        if not E.omega[x, ip]:
            return Verdict(False, {"not omega-below": E.label(x), "sum": E.label(ip)})
    for r in range(len(E)):
        if E.omega_l[ie, r] and E.omega_l[jf, r] and not E.omega_l[ip, r]:
            return Verdict(False, {"omega^l bound": E.label(r)})
        if E.omega_r[ie, r] and E.omega_r[jf, r] and not E.omega_r[ip, r]:
            return Verdict(False, {"omega^r bound": E.label(r)})
    return Verdict(True)


def verify_cancellation(E, ei, ej, ek) -> bool:
    """ei + ej == ei + ek exactly when ej == ek."""
    L = _lat(E)
    if not (compatible(L, ei, ej) and compatible(L, ei, ek)):
        raise IncompatiblePair("cancellation needs ei compatible with both ej and ek")
    return (oplus(L, ei, ej) == oplus(L, ei, ek)) == (NVPair(*ej) == NVPair(*ek))


def oplus_inverse_check(E: BiorderedSet, e) -> Verdict:
    """e + (v; n) = (0; 1), and (v; n) is the only compatible partner doing so."""
    L = E.lattice
    e = NVPair(*e)
    one = NVPair(L.bottom, L.top)
    if oplus(L, e, e.inverse()) != one:
        return Verdict(False, {"sum with inverse": oplus(L, e, e.inverse()).label(L)})
    for f in E.elements:
        if compatible(L, e, f) and oplus(L, e, f) == one and f != e.inverse():
            return Verdict(False, {"other partner": f.label(L)})
    return Verdict(True)


def verify_sandwich_uniqueness(E: BiorderedSet, e, f) -> Verdict:
    """For compatible e, f the inverses' two sandwich sets meet exactly in
    (v_e v v_f; n_f ^ n_e)."""
    L = E.lattice
    e, f = NVPair(*e), NVPair(*f)
    ie, jf = e.inverse(), f.inverse()
    both = set(sandwich_set(E, ie, jf)) & set(sandwich_set(E, jf, ie))
    want = NVPair(L.join(e.v, f.v), L.meet(f.n, e.n))
    if both != {want}:
        return Verdict(False, {"intersection": sorted(p.label(L) for p in both), "expected": want.label(L)})
    return Verdict(True)


def verify_inverse_products(E: BiorderedSet, e, f) -> Verdict:
    """The inverses of compatible e, f commute as maps, and their product is
    the inverse of e + f."""
    L = E.lattice
    e, f = NVPair(*e), NVPair(*f)
    a, b = make_nv(L, e.inverse()), make_nv(L, f.inverse())
    ab, ba = compose(a, b), compose(b, a)
    want = make_nv(L, oplus(L, e, f).inverse())
    if ab != ba:
        return Verdict(False, {"noncommuting": (e.label(L), f.label(L))})
    if ab != want:
        return Verdict(False, {"product differs from inverse of sum": (e.label(L), f.label(L))})
    return Verdict(True)


def family_independence(L, fam) -> Verdict:
    """The v-components of a compatible family are independent."""
    L = _lat(L)
    return is_independent(L, [p[1] for p in fam])


def oplus_fold(L, fam) -> NVPair:
    """Left fold of + over the family; IncompatiblePair carries the step."""
    L = _lat(L)
    members = [NVPair(*p) for p in fam]
    if not members:
        raise IncompatiblePair("empty family", step=0)
    acc = members[0]
    for k, p in enumerate(members[1:], start=1):
        try:
            acc = oplus(L, acc, p)
        except (IncompatiblePair, NotComplementary) as exc:
            raise IncompatiblePair(f"fold step {k}: {exc}", step=k) from None
    return acc


def fold_order_independent(L, fam) -> Verdict:
    """Fold every ordering (all of them up to six members, otherwise the
    rotations and their reversals) and compare."""
    L = _lat(L)
    members = list(fam)
    base = oplus_fold(L, members)
    if len(members) <= 6:
        orders = permutations(members)
    else:
        rots = [members[k:] + members[:k] for k in range(len(members))]
        orders = rots + [r[::-1] for r in rots]
    for order in orders:
        try:
            got = oplus_fold(L, order)
        except IncompatiblePair as exc:
            return Verdict(False, {"order": [p.label(L) for p in order], "error": str(exc)})
        if got != base:
            return Verdict(False, {"order": [p.label(L) for p in order], "fold": got.label(L)})
    return Verdict(True)


def compatibility_matrix(E: BiorderedSet) -> np.ndarray:
    L = E.lattice
    n = np.array([p.n for p in E.elements])
    v = np.array([p.v for p in E.elements])
    c = L.leq_table[v[:, None], n[None, :]]
    return c & c.T


def compatible_families(E: BiorderedSet, max_size=None):
    """Every nonempty set of pairwise compatible elements, as index tuples."""
    adj = compatibility_matrix(E) & ~np.eye(len(E), dtype=bool)
    nbrs = [sum(1 << int(j) for j in np.flatnonzero(adj[i])) for i in range(len(E))]

    def grow(clique, cand):
        yield clique
        if max_size is not None and len(clique) >= max_size:
            return
        for j in _bits(cand):
            yield from grow(clique + (j,), cand & nbrs[j] & ~((1 << (j + 1)) - 1))

    for i in range(len(E)):
        yield from grow((i,), nbrs[i] & ~((1 << (i + 1)) - 1))


def _distance_ok(D, mode):
    if mode == "exact3":
        return D == 3
    if mode == "dle3":
        return (D >= 1) & (D <= 3)
    raise ValueError(f"unknown distance mode {mode!r}")


def find_E0_subsets(E: BiorderedSet, N: int, mode: str = "exact3", limit=None) -> list[CompatibleFamily]:
    """All N-element families with v_i <= n_j (i != j), fold (0; 1), and
    pairwise distance 3 (or 1..3 with ``mode="dle3"``), canonically sorted."""
    L = E.lattice
    one = NVPair(L.bottom, L.top)
    if N < 1:
        raise ValueError("N must be at least 1")
    if N == 1:
        return [CompatibleFamily((one,))] if one in E._pos else []
    D = distance_matrix(E)
    adj = compatibility_matrix(E) & _distance_ok(D, mode) & ~np.eye(len(E), dtype=bool)
    nbrs = [sum(1 << int(j) for j in np.flatnonzero(adj[i])) for i in range(len(E))]
    out = []

    def grow(clique, cand):
        if len(clique) == N:
            members = [E.elements[i] for i in clique]
            try:
                if oplus_fold(L, members) == one:
                    out.append(CompatibleFamily(tuple(members)))
            except IncompatiblePair:
                pass
            return
        for j in _bits(cand):
            if limit is not None and len(out) >= limit:
                return
            grow(clique + (j,), cand & nbrs[j] & ~((1 << (j + 1)) - 1))

    for i in range(len(E)):
        if limit is not None and len(out) >= limit:
            break
        grow((i,), nbrs[i] & ~((1 << (i + 1)) - 1))
    return out


def extract_homogeneous_basis(L, fam) -> HomogeneousBasis:
    """The v-components with an explicit perspectivity axis for every pair."""
    L = _lat(L)
    vs = tuple(p[1] for p in fam)
    ok, w = is_independent(L, vs)
    if not ok:
        raise NotABasis("elements are not independent", condition="independent", witness=w)
    if L.join_all(vs) != L.top:
        raise NotABasis("elements do not join to the top", condition="join", witness=L.join_all(vs))
    axes = {}
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            found = perspectivity_axes(L, vs[a], vs[b])
            if not found:
                raise NotABasis("elements are not perspective", condition="perspective", witness=(a, b))
            axes[(a, b)] = found[0]
    return HomogeneousBasis(vs, axes)


def coordinatization_conditions(L, N: int = 4, mode: str = "exact3", E=None, limit=None) -> dict:
    """Does L admit an N-element E0 family?  Reports the first family's basis."""
    from .biorder import build_biorder

    L = _lat(L)
    E = E if E is not None else build_biorder(L)
    fams = find_E0_subsets(E, N, mode, limit=limit)
    report = {
        "N": N,
        "mode": mode,
        "families": len(fams),
        "nonempty": bool(fams),
        "basis_hypothesis_N_ge_4": N >= 4,
        "note": DISTANCE_NOTE,
    }
    if fams:
        basis = extract_homogeneous_basis(L, fams[0])
        report["family"] = fams[0].labels(L)
        report["basis"] = [L.label(x) for x in basis.elements]
        report["axes"] = {f"{a},{b}": L.label(x) for (a, b), x in sorted(basis.axes.items())}
    return report
