"""Acceptance suite: one test per criterion, each reporting a pass/fail line."""

import itertools
import math
import random
import time
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from buildings import catalog
from buildings.building import (
    check_morphism,
    coxeter_complex,
    join,
    rank_one_building,
    retraction,
    thickness_report,
)
from buildings.catalog import coxeter
from buildings.coarse import (
    MorseMatcher,
    apartment_map_from_isometry,
    induced_end_map,
    morse_match,
    perturbed_isometry,
)
from buildings.cone import (
    APEX,
    building_chart,
    cone_distance,
    cone_point,
    cone_vector,
    random_cone_point,
    random_realized_point,
)
from buildings.nerve import apartment_complex, reconstruct_building, verify_round_trip
from buildings.projectivity import (
    compose_path,
    knarr_projectivity,
    projectivity_group,
    slide_along_path,
)
from buildings.rtree import (
    apartments,
    cone_tree,
    h_tree,
    random_automorphism,
    regular_tree,
    structure_report,
    verify_recovery_criteria,
)
from conftest import ACCEPTANCE_LINES

TOL = 1e-9


def report(k: int, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def brute_gate(B, a, c):
    dist = B.dist_row(c)
    return min(B.chambers_of(a), key=lambda x: dist[x])


# ------------------------------------------------------------------ 1
def test_criterion_01_round_trip():
    details, ok = [], True
    for name, B in (("Fano", catalog.fano()), ("GQ(2,2)", catalog.gq22())):
        t = time.perf_counter()
        rep = verify_round_trip(B)
        elapsed = time.perf_counter() - t
        # independent route: networkx isomorphism of the incidence graphs
        rec = reconstruct_building(apartment_complex(B))
        G1 = nx.Graph([e for c in range(B.n) for e in [B.chamber_vertices(c)]])
        G2 = nx.Graph(sorted(rec.edges))
        iso = nx.is_isomorphic(G1, G2)
        good = rep.ok and rep.apartments_match and iso and elapsed < 10
        ok &= good
        details.append(f"{name} vertices={rep.vertices} apartments_match={rep.apartments_match} "
                       f"nx_iso={iso} {elapsed:.2f}s")
    report(1, ok, "; ".join(details))


# ------------------------------------------------------------------ 2
def test_criterion_02_knarr():
    t = time.perf_counter()
    ok, groups, triples, bad = True, 0, 0, []
    for name, B in (("Fano", catalog.fano()), ("GQ(2,2)", catalog.gq22())):
        for r in B.all_panels():
            res = B.chambers_of(r)
            rep = projectivity_group(B, r, 4)
            orbit = {(g[0], g[1]) for g in rep.elements}
            two = len(orbit) == len(res) * (len(res) - 1)
            if not (two and rep.two_transitive):
                bad.append((name, str(r), "not 2-transitive"))
            groups += 1
            for a, b, b2 in itertools.permutations(res, 3):
                p = knarr_projectivity(B, r, a, b, b2)
                x, y = a, b
                for s in p.path[1:]:
                    x, y = brute_gate(B, s, x), brute_gate(B, s, y)
                if not (x == a and y == b2 and p(a) == a and p(b) == b2):
                    bad.append((name, str(r), (a, b, b2)))
                triples += 1
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 60
    report(2, ok, f"{groups} panels 2-transitive, {triples} Knarr triples checked, "
                  f"{len(bad)} failures, {elapsed:.1f}s")


# ------------------------------------------------------------------ 3
def test_criterion_03_thickness():
    F = catalog.fano()
    thick = {"Fano": F, "GQ(2,2)": catalog.gq22(), "digon(3,3)": catalog.digon(),
             "Fano*A1(3)": join(F, rank_one_building(3, "2"))}
    thin = {"Sigma(A2)": catalog.thin_hexagon(), "Sigma(A1xA1)": catalog.thin_square(),
            "Sigma(B2)": coxeter_complex(coxeter("B2")), "Sigma(A3)": coxeter_complex(coxeter("A3")),
            "Sigma(H3)": coxeter_complex(coxeter("H3"))}
    disagree, checked = 0, 0
    for B in thick.values():
        direct = thickness_report(B).is_thick
        assert direct
        for A in B.enumerate_apartments():
            checked += 1
            disagree += thickness_report(B, A).is_thick != direct
    for B in thin.values():
        for A in B.enumerate_apartments():
            checked += 1
            rep = thickness_report(B, A)
            disagree += rep.is_thick or thickness_report(B).is_thick
    report(3, disagree == 0, f"{checked} apartments over {len(thick)} thick and "
                             f"{len(thin)} thin complexes, {disagree} disagreements")


# ------------------------------------------------------------------ 4
def _apartment_inclusion(B, A):
    row = B.delta_row(A.chambers[0])
    by_w = {int(row[x]): x for x in A.chambers}
    return [by_w[w] for w in range(len(B.table))]


def morphism_suite():
    F, GQ = catalog.fano(), catalog.gq22()
    hexagon = catalog.thin_hexagon()
    sigma_b2 = coxeter_complex(coxeter("B2"))
    F2 = join(F, rank_one_building(2, "2"))
    F3 = join(F, rank_one_building(3, "2"))
    pol, tmap = catalog.fano_polarity(F)
    suite = [
        ("Fano identity", F, F, list(range(F.n)), None),
        ("Fano collineation", F, F, catalog.fano_collineation(F, 1), None),
        ("Fano collineation^3", F, F, catalog.fano_collineation(F, 3), None),
        ("Fano polarity", F, F, pol, tmap),
        ("GQ identity", GQ, GQ, list(range(GQ.n)), None),
    ]
    for k, A in enumerate(F.enumerate_apartments()[:2]):
        suite.append((f"Sigma(A2) -> Fano apartment {k}", hexagon, F, _apartment_inclusion(F, A), None))
    A = GQ.enumerate_apartments()[0]
    suite.append(("Sigma(B2) -> GQ apartment", sigma_b2, GQ, _apartment_inclusion(GQ, A), None))
    # join projection Fano*A1(3) -> Fano*A1(2), identity on Fano, 0,1,2 -> 0,1,1
    squash = [0, 1, 1]
    suite.append(("join projection", F3, F2, [(c // 3) * 2 + squash[c % 3] for c in range(F3.n)], None))
    # constant on the A1 factor: a morphism that is not surjective
    suite.append(("id x const", F2, F2, [(c // 2) * 2 for c in range(F2.n)], None))
    for B, name in ((F, "Fano"), (GQ, "GQ")):
        A = B.enumerate_apartments()[1]
        c = A.chambers[0]
        rho = retraction(B, A, c)
        row = B.delta_row(c)
        target = hexagon if B is F else sigma_b2
        suite.append((f"retraction {name} -> Sigma(W)", B, target, [int(row[rho[x]]) for x in range(B.n)], None))
    return suite


def test_criterion_04_local_surjectivity():
    suite = morphism_suite()
    disagree, kinds = 0, []
    for name, B, B2, phi, tmap in suite:
        rep = check_morphism(B, B2, phi, tmap)
        assert rep.is_morphism, name
        brute = set(phi) == set(range(B2.n))
        disagree += rep.panel_criterion != brute
        kinds.append(rep.panel_criterion)
    ok = disagree == 0 and len(suite) >= 10 and any(kinds) and not all(kinds)
    report(4, ok, f"{len(suite)} morphisms ({sum(kinds)} epimorphisms), {disagree} disagreements")


# ------------------------------------------------------------------ 5
def test_criterion_05_cone_metric():
    B = catalog.fano()
    chart = building_chart(B)
    rng = random.Random(2024)
    apex_ok = all(cone_distance(B, chart, APEX, P) == P.radius
                  and cone_distance(B, chart, P, APEX) == P.radius
                  for P in (random_cone_point(B, rng) for _ in range(1000)))
    ray_err = 0.0
    for _ in range(1000):
        p = random_realized_point(B, rng)
        s, t = rng.uniform(0.01, 5), rng.uniform(0.01, 5)
        ray_err = max(ray_err, abs(cone_distance(B, chart, cone_point(p, s), cone_point(p, t)) - abs(s - t)))
    apts = B.enumerate_apartments()
    flat_err = 0.0
    for _ in range(10_000):
        A = apts[rng.randrange(len(apts))]
        P = random_cone_point(B, rng, chamber=rng.choice(A.chambers))
        Q = random_cone_point(B, rng, chamber=rng.choice(A.chambers))
        x = cone_vector(B, chart, A, A.chambers[0], P)
        y = cone_vector(B, chart, A, A.chambers[0], Q)
        flat_err = max(flat_err, abs(cone_distance(B, chart, P, Q) - float(np.linalg.norm(x - y))))
    tri_slack = -math.inf
    for _ in range(10_000):
        P, Q, R = (random_cone_point(B, rng) for _ in range(3))
        tri_slack = max(tri_slack, cone_distance(B, chart, P, R)
                        - cone_distance(B, chart, P, Q) - cone_distance(B, chart, Q, R))
    ok = apex_ok and ray_err <= TOL and flat_err <= TOL and tri_slack <= TOL
    report(5, ok, f"apex exact={apex_ok}, ray err={ray_err:.1e}, flatness err={flat_err:.1e} "
                  f"(1e4 pairs), triangle max excess={tri_slack:.1e} (1e4 triples)")


# ------------------------------------------------------------------ 6
def test_criterion_06_tree_classification():
    kinds = {}
    for k in range(2, 9):
        kinds[f"cone_tree({k})"] = structure_report(cone_tree([f"e{i}" for i in range(k)])).kind
    regular = {d: structure_report(regular_tree(3, d)) for d in (2, 3, 4)}
    h = structure_report(h_tree()).kind
    ok = (kinds["cone_tree(2)"] == "0"
          and all(v == "I" for key, v in kinds.items() if key != "cone_tree(2)")
          and all(r.kind == "II" and r.t == 1 for r in regular.values())
          and h == "inconsistent")
    report(6, ok, f"cone trees {[kinds[f'cone_tree({k})'] for k in range(2, 9)]}, "
                  f"3-regular depth 2-4 {[r.kind for r in regular.values()]}, H-tree {h}")


# ------------------------------------------------------------------ 7
def test_criterion_07_recovery():
    details, ok = [], True
    for depth in (3, 4):
        rep = verify_recovery_criteria(regular_tree(3, depth), mode="local")
        total = rep.agreements + rep.disagreements
        good = rep.disagreements == 0 and total > 0 and rep.isolation_matches_branching
        ok &= good
        details.append(f"depth {depth}: {rep.agreements}/{total} pairs agree, "
                       f"isolated=branching {rep.isolation_matches_branching}")
    report(7, ok, "; ".join(details))


# ------------------------------------------------------------------ 8
def test_criterion_08_morse_matching():
    T = regular_tree(3, 4)
    rng = random.Random(8)
    matcher = MorseMatcher(T)
    apts = apartments(T)
    eps = Fraction(1, 4)
    wrong, worst, checked = 0, Fraction(0), 0
    for _ in range(100):
        g = random_automorphism(T, rng)
        f = perturbed_isometry(T, g, eps, rng)
        for A in apts:
            rep = morse_match(T, T, f, A, matcher)
            checked += 1
            worst = max(worst, rep.distance)
            if rep.best.ends != frozenset((g[A.u], g[A.v])) or len(rep.minimizers) > 1:
                wrong += 1
    ok = wrong == 0 and worst <= eps
    report(8, ok, f"100 perturbed isometries x {len(apts)} apartments: {wrong} mismatches, "
                  f"max Hausdorff distance {worst}")


# ------------------------------------------------------------------ 9
def test_criterion_09_end_map():
    rng = random.Random(9)
    good = 0
    trials = [(regular_tree(3, d), k) for d in (2, 3, 4) for k in range(10)]
    for T, _ in trials:
        g = random_automorphism(T, rng)
        res = induced_end_map(T, T, apartment_map_from_isometry(T, T, g))
        good += res.ok and res.end_map == {T.ids[u]: T.ids[g[u]] for u in T.ends}
    H = h_tree()
    i = H.index
    m = {(A.u, A.v): (A.u, A.v) for A in apartments(H)}
    by_ends = {A.ends: A for A in apartments(H)}
    uw, wz = by_ends[frozenset((i["u"], i["w"]))], by_ends[frozenset((i["w"], i["z"]))]
    m[(uw.u, uw.v)], m[(wz.u, wz.v)] = (wz.u, wz.v), (uw.u, uw.v)
    bad = induced_end_map(H, H, m)
    ok = good == len(trials) and not bad.ok and bad.certificate is not None
    report(9, ok, f"{good}/{len(trials)} isometry end maps recovered; H-tree swap rejected "
                  f"with certificate {bad.certificate}")


# ------------------------------------------------------------------ 10
def closed_even_paths(B, max_len=4):
    panels = B.all_panels()
    opp = {a: [b for b in B.opposite_simplices(a) if len(b.cotype) == 1] for a in panels}
    out = []

    def walk(path):
        k = len(path) - 1
        if k >= 2 and k % 2 == 0 and path[-1] == path[0]:
            out.append(list(path))
        if k == max_len:
            return
        for b in opp[path[-1]]:
            walk(path + [b])

    for a in panels:
        walk([a])
    return out


def test_criterion_10_slides():
    B = catalog.fano()
    paths = closed_even_paths(B, 4)
    disagree = 0
    for path in paths:
        slide = slide_along_path(B, path)
        proj = compose_path(B, path)
        disagree += any(slide[c] != proj(c) for c in B.chambers_of(path[0]))
    report(10, disagree == 0 and len(paths) > 0,
           f"{len(paths)} closed even panel paths of length <= 4, {disagree} disagreements")
