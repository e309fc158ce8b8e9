import numpy as np
import pytest

import oracles
from cmlcoord.catalog import catalog
from cmlcoord.iso import element_invariants, find_isomorphism, is_isomorphism, join_irreducibles
from cmlcoord.lattice import lattice_from_leq

nx = pytest.importorskip("networkx")

SMALL = ["one", "chain2", "chain3", "B2", "M3", "N5", "M4", "B3", "chain5"]


def relabel(L, perm):
    """The same lattice with element x renamed perm[x]."""
    inv = np.argsort(perm)
    return lattice_from_leq(L.leq_table[np.ix_(inv, inv)])


@pytest.mark.parametrize("a", SMALL)
@pytest.mark.parametrize("b", SMALL)
def test_agrees_with_brute_force(a, b):
    A, B = catalog(a), catalog(b)
    if A.n > 8 or B.n > 8:
        pytest.skip("permutation oracle limited to 8 elements")
    iso = find_isomorphism(A, B)
    assert (iso is not None) == oracles.brute_isomorphic(A._leq, B._leq)
    if iso is not None:
        assert is_isomorphism(A, B, iso.mapping)


def _hasse(L):
    g = nx.DiGraph()
    g.add_nodes_from(range(L.n))
    g.add_edges_from(L.covers)
    return g


@pytest.mark.parametrize("a,b", [("F2^3", "F2^3"), ("F2^3", "B4"), ("M4", "F3^2"), ("F2^4", "F2^4"), ("B4", "B4")])
def test_agrees_with_networkx(a, b):
    A, B = catalog(a), catalog(b)
    ours = find_isomorphism(A, B) is not None
    theirs = nx.is_isomorphic(_hasse(A), _hasse(B)) if A.n == B.n else False
    assert ours == theirs


@pytest.mark.parametrize("name", ["M4", "B3", "F2^3", "N5"])
def test_finds_hidden_relabelling(name):
    L = catalog(name)
    rng = np.random.default_rng(7)
    perm = rng.permutation(L.n)
    K = relabel(L, perm)
    iso = find_isomorphism(L, K)
    assert iso is not None and is_isomorphism(L, K, iso.mapping)


def test_size_mismatch():
    assert find_isomorphism(catalog("B2"), catalog("M3")) is None


def test_invariants_and_join_irreducibles():
    L = catalog("M3")
    assert join_irreducibles(L) == [1, 2, 3]
    inv = element_invariants(L)
    assert inv[L.bottom][0] == 0 and inv[L.top][0] == 2
    B = catalog("B3")
    assert len(join_irreducibles(B)) == 3


def test_is_isomorphism_rejects_non_bijection():
    L = catalog("M3")
    assert not is_isomorphism(L, L, [0, 1, 1, 3, 4])
    assert not is_isomorphism(L, L, [4, 1, 2, 3, 0])
