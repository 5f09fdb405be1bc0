import itertools

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from buildings import catalog
from buildings.building import BuildingError, join
from buildings.nerve import (
    apartment_complex,
    find_isomorphism,
    maximal_families,
    nerve_from_json,
    reconstruct_building,
    refine_to_maximal,
    search_maximal,
    verify_round_trip,
)


def flag_graph(B):
    """Vertices of B with incidence edges, as a networkx graph (independent oracle)."""
    G = nx.Graph()
    for c in range(B.n):
        vs = B.chamber_vertices(c)
        G.add_nodes_from(vs)
        G.add_edges_from(itertools.combinations(vs, 2))
    return G


def rec_graph(rec):
    G = nx.Graph()
    G.add_nodes_from(range(len(rec.vertices)))
    G.add_edges_from(rec.edges)
    return G


def test_apartment_complex_vertices(fano, digon, hexagon):
    assert len(apartment_complex(fano).labels) == 28
    assert len(apartment_complex(digon).labels) == 9
    N = apartment_complex(hexagon)
    assert N.labels == [0] and N.oracle(frozenset({0}))


def test_oracle_is_vertex_sharing(fano):
    N = apartment_complex(fano)
    apts = fano.enumerate_apartments()
    verts = [{v for c in A.chambers for v in fano.chamber_vertices(c)} for A in apts]
    for a, b, c in itertools.combinations(range(len(apts)), 3):
        assert N.oracle(frozenset({a, b, c})) == bool(verts[a] & verts[b] & verts[c])


@given(st.sets(st.integers(0, 27), min_size=1, max_size=6), st.data())
def test_oracle_monotone(s, data):
    N = apartment_complex(catalog.fano())
    if N.oracle(frozenset(s)):
        sub = data.draw(st.sets(st.sampled_from(sorted(s)), min_size=1))
        assert N.oracle(frozenset(sub))
    for x in s:
        assert N.oracle(frozenset({x}))


@pytest.mark.parametrize("name,expected", [("fano", 14), ("gq", 30), ("digon", 6)])
def test_maximal_families_are_vertex_stars(name, expected, request):
    B = request.getfixturevalue(name)
    N = apartment_complex(B)
    fams = maximal_families(N)
    assert len(fams) == expected
    assert set(fams) == set(N.source_families.values())


def test_exhaustive_search_agrees_with_refinement(fano, digon):
    for B in (fano, digon):
        N = apartment_complex(B)
        abstract = nerve_from_json(N.to_json())
        bare = type(N)(N.labels, N.oracle)
        assert set(search_maximal(bare)) == set(maximal_families(N))
        assert set(maximal_families(abstract)) == set(maximal_families(N))


def test_search_cap(fano):
    N = apartment_complex(fano)
    bare = type(N)(N.labels, N.oracle)
    with pytest.raises(BuildingError):
        search_maximal(bare, cap=50)


def test_refine_grows_singletons(fano):
    N = apartment_complex(fano)
    fams = refine_to_maximal(N, [frozenset({k}) for k in N.labels])
    assert all(f in set(N.source_families.values()) for f in fams)


@pytest.mark.parametrize("name", ["fano", "gq", "digon"])
def test_reconstruction_matches_oracle(name, request):
    B = request.getfixturevalue(name)
    rec = reconstruct_building(apartment_complex(B))
    assert nx.is_isomorphic(flag_graph(B), rec_graph(rec))
    assert rec.building.n == B.n
    assert rec.building.W.matrix == B.W.matrix


@pytest.mark.parametrize("name", ["fano", "gq", "digon"])
def test_round_trip(name, request):
    B = request.getfixturevalue(name)
    rep = verify_round_trip(B)
    assert rep.ok and rep.apartments_match and rep.backtracking_isomorphism, rep.problems
    assert rep.vertices == len(B.vertices())


def test_round_trip_rank_four():
    F = catalog.fano()
    rep = verify_round_trip(join(F, F))
    assert rep.ok and rep.vertices == 28


def test_thin_input_rejected(hexagon, square):
    for B in (hexagon, square):
        with pytest.raises(BuildingError):
            reconstruct_building(apartment_complex(B))


def test_nerve_json_round_trip(gq):
    N = apartment_complex(gq)
    M = nerve_from_json(N.to_json())
    assert M.labels == N.labels
    for f in maximal_families(N):
        assert M.oracle(f)


def test_find_isomorphism_against_networkx():
    G = nx.petersen_graph()
    H = nx.relabel_nodes(G, {v: (v * 3) % 10 for v in G})
    adj = lambda X: {v: set(X[v]) for v in X}
    zero = {v: 0 for v in range(10)}
    m = find_isomorphism(adj(G), adj(H), zero, zero)
    assert m is not None and all(H.has_edge(m[u], m[v]) for u, v in G.edges)
    C = nx.circulant_graph(10, [1, 2])  # 4-regular, not Petersen
    assert find_isomorphism(adj(G), adj(nx.cycle_graph(10)), zero, zero) is None
    assert not nx.is_isomorphic(G, C)
