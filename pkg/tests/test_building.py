import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from buildings import catalog
from buildings.building import (
    Apartment,
    BuildingError,
    building_from_incidence,
    building_from_json,
    check_morphism,
    coxeter_complex,
    diagram_factorization,
    join,
    rank_one_building,
    retraction,
    thickness_report,
)
from buildings.catalog import coxeter


def incidence_graph(points, lines):
    G = nx.Graph()
    for k, line in enumerate(lines):
        for p in line:
            G.add_edge(("p", p), ("l", k))
    return G


def brute_gate(B, a, c):
    res = B.chambers_of(a)
    dist = B.dist_row(c)
    best = min(dist[x] for x in res)
    hits = [x for x in res if dist[x] == best]
    assert len(hits) == 1
    return hits[0]


# ---------------------------------------------------------------- construction
def test_incidence_examples(fano, digon, gq):
    assert fano.n == 21 and digon.n == 9 and gq.n == 45
    assert fano.type_names == ("point", "line")


def test_non_polygon_rejected():
    points, lines = catalog.fano_geometry()
    with pytest.raises(BuildingError):
        building_from_incidence(points, lines[:-1], 3)
    with pytest.raises(BuildingError):
        building_from_incidence(points, lines, 4)


def test_join_examples(fano):
    B = join(rank_one_building(3), rank_one_building(3, "1"))
    assert B.n == 9 and B.rank == 2
    sq = join(coxeter_complex(coxeter("A1")), coxeter_complex(coxeter("A1")))
    assert sq.n == 4 and len(sq.enumerate_apartments()) == 1
    assert join(fano, rank_one_building(2, "2")).n == 42


def test_json_round_trip(gq):
    B = building_from_json(gq.to_json())
    assert B.n == gq.n and B.panels == gq.panels


# --------------------------------------------------------------- W-distance
def test_w_distance_examples(fano):
    T = fano.table
    wd = fano.w_distance(0, 0)
    assert wd.element == T.identity and wd.gallery == (0,)
    c = 0
    i, d = next(iter(fano.neighbours(c)))
    assert fano.delta(c, d) == T.gen(i)
    opp = [x for x in range(fano.n) if fano.delta(0, x) == fano.w0]
    assert opp and T.length(fano.delta(0, opp[0])) == 3


@pytest.mark.parametrize("name", ["fano", "gq", "digon", "hexagon"])
def test_w_distance_inverse_and_lengths(name, request):
    B = request.getfixturevalue(name)
    T = B.table
    for c in range(B.n):
        row = B.delta_row(c)
        dist = B.dist_row(c)
        for d in range(B.n):
            assert T.inverse(int(row[d])) == B.delta(d, c)
            assert T.length(int(row[d])) == dist[d]


def test_w_distance_gallery_is_minimal(gq):
    rng = random.Random(3)
    for _ in range(50):
        c, d = rng.randrange(gq.n), rng.randrange(gq.n)
        wd = gq.w_distance(c, d)
        assert len(wd.gallery) - 1 == gq.dist(c, d)
        for x, y in zip(wd.gallery, wd.gallery[1:]):
            assert any(y == z for _, z in gq.neighbours(x))
        assert gq.table.element(wd.word) == wd.element


# ----------------------------------------------------------------- projections
@pytest.mark.parametrize("name", ["fano", "gq", "hexagon", "digon"])
def test_gate_property(name, request):
    B = request.getfixturevalue(name)
    for a in B.all_simplices():
        res = B.chambers_of(a)
        for c in range(B.n):
            g = B.project_chamber(a, c)
            assert g == brute_gate(B, a, c)
            for x in res:
                assert B.dist(c, x) == B.dist(c, g) + B.dist(g, x)


def test_projection_examples(fano, hexagon):
    P = fano.all_panels(1)[0]
    for c in fano.chambers_of(P):
        assert fano.project_chamber(P, c) == c
    a = hexagon.panel_ref(0, 0)
    antipode = [x for x in range(6) if hexagon.delta(0, x) == hexagon.w0][0]
    g = hexagon.project_chamber(a, antipode)
    assert g in hexagon.chambers_of(a) and hexagon.dist(antipode, g) == 2


def _common_face(B, chambers):
    verts = set(B.chamber_vertices(chambers[0]))
    for c in chambers[1:]:
        verts &= set(B.chamber_vertices(c))
    return verts


def test_project_simplex_matches_brute_force(fano):
    simplices = fano.all_simplices()
    for a in simplices:
        assert fano.project_simplex(a, a) == a
        for b in simplices:
            gates = [brute_gate(fano, a, c) for c in fano.chambers_of(b)]
            got = fano.project_simplex(a, b)
            expected = _common_face(fano, gates)
            got_vertices = {fano.vertex(got.chamber, k) for k in got.types(fano.rank)}
            assert got_vertices == expected


def test_project_opposite_point_line(fano):
    P = fano.vertex(0, 0)
    L = next(b for b in fano.opposite_simplices(P))
    got = fano.project_simplex(P, L)
    assert got == P


# ------------------------------------------------------------------ apartments
def test_hull_examples(fano, digon, hexagon):
    c = 0
    d = next(x for x in range(6) if hexagon.is_opposite_chambers(c, x))
    assert hexagon.hull_apartment(c, d).chambers == tuple(range(6))
    d = next(x for x in range(21) if fano.is_opposite_chambers(0, x))
    A = fano.hull_apartment(0, d)
    assert len(A) == 6
    G = nx.Graph()
    for x in A.chambers:
        for _, y in fano.neighbours(x):
            if y in A:
                G.add_edge(x, y)
    assert nx.is_isomorphic(G, nx.cycle_graph(6))
    d = next(x for x in range(9) if digon.is_opposite_chambers(0, x))
    assert len(digon.hull_apartment(0, d)) == 4
    with pytest.raises(BuildingError):
        fano.hull_apartment(0, 0)


@pytest.mark.parametrize("name", ["fano", "gq", "digon"])
def test_hull_symmetric(name, request):
    B = request.getfixturevalue(name)
    for c in range(B.n):
        for d in range(B.n):
            if B.is_opposite_chambers(c, d):
                assert B.hull_apartment(c, d) == B.hull_apartment(d, c)


@pytest.mark.parametrize("name", ["fano", "gq", "digon", "hexagon"])
def test_apartment_containing(name, request):
    B = request.getfixturevalue(name)
    rng = random.Random(0)
    for _ in range(60):
        c, d = rng.randrange(B.n), rng.randrange(B.n)
        A = B.apartment_containing(c, d)
        assert c in A and d in A
        assert len(A) == len(B.table)
        for x in A.chambers:
            for i in range(B.rank):
                assert sum(1 for y in B.panel(x, i) if y in A) == 2
        if B.is_opposite_chambers(c, d):
            assert A == B.hull_apartment(c, d)
    assert B.apartment_containing(0, 0) == B.apartment_containing(0, 0)


def test_apartment_counts_against_cycle_oracle(fano, gq, digon, hexagon):
    # apartments of a generalized m-gon are the 2m-cycles of its incidence graph
    for B, (points, lines), m in [
        (fano, catalog.fano_geometry(), 3),
        (gq, catalog.gq22_geometry(), 4),
        (digon, catalog.digon_geometry(), 2),
    ]:
        G = incidence_graph(points, lines)
        cycles = sum(1 for c in nx.simple_cycles(G, length_bound=2 * m) if len(c) == 2 * m)
        assert len(B.enumerate_apartments()) == cycles
    assert len(fano.enumerate_apartments()) == 28
    assert len(digon.enumerate_apartments()) == 9
    assert len(hexagon.enumerate_apartments()) == 1


def test_apartment_cap(gq):
    B = catalog.gq22()
    with pytest.raises(BuildingError):
        B.enumerate_apartments(cap=10)


@pytest.mark.parametrize("name", ["fano", "gq", "digon"])
def test_antipodal_map_is_involution(name, request):
    B = request.getfixturevalue(name)
    for A in B.enumerate_apartments():
        for c in A.chambers:
            assert B.opposite_in(A, B.opposite_in(A, c)) == c


# ------------------------------------------------------------------ opposition
def test_opposition_examples(fano):
    P = fano.vertex(0, 0)
    assert not fano.are_opposite(P, P)
    points, lines = catalog.fano_geometry()
    for p in points:
        for k, line in enumerate(lines):
            Pv = fano.vertex(next(c for c, lab in enumerate(fano.labels) if lab[0] == p), 0)
            Lv = fano.vertex(next(c for c, lab in enumerate(fano.labels) if lab[1] == k), 1)
            assert fano.are_opposite(Pv, Lv) == (p not in line)


@pytest.mark.parametrize("name,geometry,m", [
    ("fano", catalog.fano_geometry, 3), ("gq", catalog.gq22_geometry, 4),
])
def test_vertex_opposition_matches_incidence_distance(name, geometry, m, request):
    B = request.getfixturevalue(name)
    G = incidence_graph(*geometry())
    dist = dict(nx.all_pairs_shortest_path_length(G))

    def node(v):
        k = B.vertex_type(v)
        return ("p", B.labels[v.chamber][0]) if k == 0 else ("l", B.labels[v.chamber][1])

    verts = B.vertices()
    for u in verts:
        for v in verts:
            assert B.are_opposite(u, v) == (dist[node(u)][node(v)] == m)


# ------------------------------------------------------------------- thickness
def test_thickness_examples(fano, hexagon):
    rep = thickness_report(fano)
    assert rep.is_thick and rep.min_chambers == rep.max_chambers == 3
    assert not thickness_report(hexagon).is_thick
    for A in fano.enumerate_apartments():
        assert thickness_report(fano, A).is_thick
    with pytest.raises(BuildingError):
        thickness_report(fano, Apartment(tuple(range(6))))


# ------------------------------------------------------------------- morphisms
def apartment_inclusion(B, A):
    """Chamber map Sigma(W) -> B onto the apartment A, based at its least chamber."""
    base = A.chambers[0]
    row = B.delta_row(base)
    by_w = {int(row[x]): x for x in A.chambers}
    return [by_w[w] for w in range(len(B.table))]


def test_morphism_examples(fano, hexagon):
    rep = check_morphism(fano, fano, list(range(21)))
    assert rep.is_morphism and rep.is_nondegenerate and rep.is_epimorphism
    A = fano.enumerate_apartments()[0]
    rep = check_morphism(hexagon, fano, apartment_inclusion(fano, A))
    assert rep.is_morphism and rep.is_nondegenerate and not rep.is_epimorphism
    rot = [hexagon.table.mul(hexagon.w0, w) for w in range(6)]
    rep = check_morphism(hexagon, hexagon, rot)
    assert rep.is_morphism and rep.is_epimorphism and rep.image_surjective
    with pytest.raises(BuildingError):
        check_morphism(fano, fano, list(range(20)))


def test_non_morphism_detected(fano):
    phi = list(range(21))
    phi[0], phi[5] = phi[5], phi[0]
    rep = check_morphism(fano, fano, phi)
    assert not rep.is_morphism and rep.problems


def test_retraction_is_epimorphism_onto_apartment(fano, hexagon):
    A = fano.enumerate_apartments()[3]
    c = A.chambers[0]
    rho = retraction(fano, A, c)
    row = fano.delta_row(c)
    to_sigma = [int(row[rho[x]]) for x in range(fano.n)]
    rep = check_morphism(fano, hexagon, to_sigma)
    assert rep.is_epimorphism and rep.image_surjective


def test_diagram_factorization(fano, square):
    B = join(fano, rank_one_building(2, "2"))
    facs = diagram_factorization(B)
    assert [(f.label, f.thick, f.thin) for f in facs] == [("A2", True, False), ("A1/S0", False, True)]
    assert [(f.label, f.thick) for f in diagram_factorization(fano)] == [("A2", True)]
    assert [f.label for f in diagram_factorization(square)] == ["A1/S0", "A1/S0"]


@given(st.integers(0, 44), st.integers(0, 44), st.integers(0, 44))
def test_delta_cocycle_on_apartments(c, d, e):
    B = catalog.gq22()
    A = B.apartment_containing(c, d)
    if e not in A:
        e = A.chambers[e % len(A)]
    # inside one apartment W-distances compose
    T = B.table
    assert T.mul(B.delta(c, d), B.delta(d, e)) == B.delta(c, e)
