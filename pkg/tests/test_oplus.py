from itertools import product

import pytest

from cmlcoord.biorder import build_biorder, e_distance
from cmlcoord.catalog import CATALOG_SMALL, catalog, subspace_lattice
from cmlcoord.errors import IncompatiblePair, NotABasis
from cmlcoord.lattice import is_independent
from cmlcoord.oplus import (
    DISTANCE_NOTE,
    CompatibleFamily,
    compatibility_matrix,
    compatible,
    compatible_families,
    coordinatization_conditions,
    extract_homogeneous_basis,
    family_independence,
    find_E0_subsets,
    fold_order_independent,
    oplus,
    oplus_fold,
    oplus_inverse_check,
    verify_cancellation,
    verify_inverse_products,
    verify_oplus_bounds,
    verify_sandwich_uniqueness,
)
from cmlcoord.semigroup import NVPair


def P(L, n, v):
    return NVPair(L.index(n), L.index(v))


@pytest.fixture(scope="module")
def f23():
    F = subspace_lattice(2, 3)
    return F, build_biorder(F)


def coord_pair(F, i):
    # (span of the other two unit vectors; <e_i>)
    units = ["100", "010", "001"]
    rest = [u for k, u in enumerate(units) if k != i]
    return NVPair(F.span_index(rest), F.span_index([units[i]]))


def test_b2_inverse_pair_sums_to_identity():
    L = catalog("B2")
    assert oplus(L, P(L, "a", "b"), P(L, "b", "a")) == P(L, "0", "1")


def test_f23_example(f23):
    F, E = f23
    s = oplus(F, coord_pair(F, 0), coord_pair(F, 1))
    assert s == NVPair(F.span_index(["001"]), F.span_index(["100", "010"]))
    assert verify_oplus_bounds(E, coord_pair(F, 0), coord_pair(F, 1))


def test_self_sum_rules():
    L = catalog("M3")
    with pytest.raises(IncompatiblePair):
        oplus(L, P(L, "a1", "a2"), P(L, "a1", "a2"))
    zero = P(L, "1", "0")
    assert oplus(L, zero, zero) == zero
    assert verify_oplus_bounds(build_biorder(L), zero, zero)


def test_one_sided_compatibility_is_rejected():
    L = catalog("M3")
    e, f = P(L, "a1", "a2"), P(L, "0", "1")  # v_e <= n_f fails
    assert not compatible(L, e, f)
    with pytest.raises(IncompatiblePair):
        oplus(L, e, f)


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_pairwise_laws_exhaustive(name):
    L = catalog(name)
    E = build_biorder(L)
    for e, f in product(E.elements, repeat=2):
        if not compatible(L, e, f):
            continue
        s = oplus(L, e, f)
        assert s == oplus(L, f, e)
        assert verify_oplus_bounds(E, e, f)
        assert verify_sandwich_uniqueness(E, e, f)
        assert verify_inverse_products(E, e, f)


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_cancellation_exhaustive(name):
    L = catalog(name)
    E = build_biorder(L)
    C = compatibility_matrix(E)
    for i in range(len(E)):
        partners = [E.elements[j] for j in range(len(E)) if C[i, j]]
        for f, g in product(partners, repeat=2):
            assert verify_cancellation(E, E.elements[i], f, g)


def test_cancellation_needs_compatibility():
    L = catalog("M3")
    E = build_biorder(L)
    with pytest.raises(IncompatiblePair):
        verify_cancellation(E, P(L, "a1", "a2"), P(L, "a1", "a2"), P(L, "a2", "a1"))


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_oplus_inverse_law(name):
    E = build_biorder(catalog(name))
    for e in E.elements:
        assert oplus_inverse_check(E, e)


def test_inverse_examples():
    L = catalog("B2")
    E = build_biorder(L)
    assert oplus_inverse_check(E, P(L, "a", "b"))
    assert oplus(L, P(L, "0", "1"), P(L, "1", "0")) == P(L, "0", "1")


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_every_compatible_family_is_independent(name):
    L = catalog(name)
    E = build_biorder(L)
    count = 0
    for idx in compatible_families(E):
        fam = [E.elements[i] for i in idx]
        assert family_independence(L, fam)
        count += 1
    assert count >= len(E)


def test_independence_examples(f23):
    F, _ = f23
    fam = CompatibleFamily.checked(F, [coord_pair(F, i) for i in range(3)])
    assert family_independence(F, fam)
    L = catalog("M3")
    assert family_independence(L, [P(L, "a2", "a1"), P(L, "a1", "a2")])
    assert family_independence(L, [P(L, "a2", "a1")])


def test_checked_family_rejects_incompatible():
    L = catalog("M3")
    with pytest.raises(IncompatiblePair):
        CompatibleFamily.checked(L, [P(L, "a1", "a2"), P(L, "a1", "a3")])


def test_fold_examples(f23):
    F, _ = f23
    fam = [coord_pair(F, i) for i in range(3)]
    assert oplus_fold(F, fam) == NVPair(F.bottom, F.top)
    assert fold_order_independent(F, fam)
    assert oplus_fold(F, fam[:1]) == fam[0]
    L = catalog("M3")
    assert oplus_fold(L, [P(L, "a2", "a1"), P(L, "a1", "a2")]) == P(L, "0", "1")


def test_fold_reports_failing_step():
    L = catalog("M3")
    with pytest.raises(IncompatiblePair) as exc:
        oplus_fold(L, [P(L, "a2", "a1"), P(L, "a1", "a2"), P(L, "a1", "a3")])
    assert exc.value.step == 2


def test_e0_m3_n2():
    L = catalog("M3")
    E = build_biorder(L)
    fams = find_E0_subsets(E, 2)
    want = {frozenset([P(L, f"a{i}", f"a{j}"), P(L, f"a{j}", f"a{i}")]) for i, j in [(1, 2), (1, 3), (2, 3)]}
    assert {frozenset(f.members) for f in fams} == want
    for fam in fams:
        a, b = fam.members
        assert e_distance(E, a, b) == 3


def test_e0_b2_decided_by_distance():
    L = catalog("B2")
    E = build_biorder(L)
    d = e_distance(E, P(L, "a", "b"), P(L, "b", "a"))
    fams = find_E0_subsets(E, 2)
    assert (len(fams) == 1) == (d == 3)
    assert d == 0 and fams == []


def test_e0_n1_is_identity_pair():
    for name in ("one", "B2", "M3"):
        L = catalog(name)
        fams = find_E0_subsets(build_biorder(L), 1)
        assert [f.members for f in fams] == [(NVPair(L.bottom, L.top),)]


@pytest.mark.parametrize("name,N,mode,expected", [
    ("M3", 2, "exact3", 3), ("M3", 2, "dle3", 3), ("M3", 3, "exact3", 0), ("M3", 4, "exact3", 0),
    ("M4", 2, "exact3", 6), ("B2", 4, "exact3", 0), ("B3", 3, "dle3", 0),
    ("F2^3", 3, "exact3", 28), ("F2^3", 3, "dle3", 28), ("F2^3", 2, "exact3", 0),
])
def test_e0_counts_frozen(name, N, mode, expected):
    # regression values; each family is checked against the conditions below
    E = build_biorder(catalog(name))
    fams = find_E0_subsets(E, N, mode)
    assert len(fams) == expected
    L = E.lattice
    for fam in fams:
        assert oplus_fold(L, fam) == NVPair(L.bottom, L.top)
        for a, b in product(fam.members, repeat=2):
            if a != b:
                assert compatible(L, a, b)
                d = e_distance(E, a, b)
                assert d == 3 if mode == "exact3" else 1 <= d <= 3


def test_e0_families_are_bases(f23):
    F, E = f23
    for fam in find_E0_subsets(E, 3):
        assert fold_order_independent(F, fam)
        basis = extract_homogeneous_basis(F, fam)
        assert basis.order == 3
        assert F.join_all(basis.elements) == F.top
        assert is_independent(F, basis.elements)


def test_extract_basis_m3():
    L = catalog("M3")
    basis = extract_homogeneous_basis(L, [P(L, "a2", "a1"), P(L, "a1", "a2")])
    assert sorted(L.label(x) for x in basis.elements) == ["a1", "a2"]
    assert [L.label(x) for x in basis.axes.values()] == ["a3"]


def test_extract_basis_f23_diagonal_axes(f23):
    F, _ = f23
    basis = extract_homogeneous_basis(F, [coord_pair(F, i) for i in range(3)])
    assert basis.order == 3
    assert basis.axes[(0, 1)] == F.span_index(["110"])
    for (a, b), x in basis.axes.items():
        va, vb = basis.elements[a], basis.elements[b]
        assert F.join(va, x) == F.join(vb, x) and F.meet(va, x) == F.bottom == F.meet(vb, x)


def test_extract_basis_one_element():
    L = catalog("one")
    basis = extract_homogeneous_basis(L, [NVPair(0, 0)])
    assert basis.order == 1 and basis.axes == {}


def test_extract_basis_failures():
    L = catalog("M3")
    with pytest.raises(NotABasis) as exc:
        extract_homogeneous_basis(L, [P(L, "a2", "a1")])
    assert exc.value.condition == "join"
    B = catalog("B2")
    with pytest.raises(NotABasis) as exc:
        extract_homogeneous_basis(B, [P(B, "a", "b"), P(B, "b", "a")])
    assert exc.value.condition == "perspective"


def test_coordinatization_conditions():
    rep = coordinatization_conditions(catalog("M3"), 4)
    assert not rep["nonempty"] and rep["families"] == 0 and rep["note"] == DISTANCE_NOTE
    assert not coordinatization_conditions(catalog("B2"), 4)["nonempty"]
    rep = coordinatization_conditions(catalog("M3"), 2)
    assert rep["nonempty"] and sorted(rep["basis"]) == ["a1", "a2"] and rep["axes"] == {"0,1": "a3"}


@pytest.mark.slow
def test_coordinatization_f24():
    F = subspace_lattice(2, 4)
    rep = coordinatization_conditions(F, 4, limit=1)
    assert rep["nonempty"] and len(rep["basis"]) == 4 and rep["basis_hypothesis_N_ge_4"]
    assert len(rep["axes"]) == 6
