"""Apartment complexes and reconstruction of thick buildings from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .building import Building, BuildingError, SimplexRef
from .coxeter import new_coxeter_system

SEARCH_CAP = 1_000_000


@dataclass
class Nerve:
    """Nerve of a covering, given by vertex labels and a membership oracle.

    ``families`` (when known) are the maximal simplices; the oracle answers
    whether a finite set of labels has a common point.
    """

    labels: list
    oracle: Callable[[frozenset], bool]
    families: list[frozenset] | None = None
    source: Building | None = field(default=None, repr=False)
    source_families: dict | None = field(default=None, repr=False)

    def __contains__(self, subset) -> bool:
        return self.oracle(frozenset(subset))

    def to_json(self) -> dict:
        fams = self.families if self.families is not None else maximal_families(self)
        return {"vertices": list(self.labels), "families": [sorted(f) for f in fams]}


def nerve_from_json(obj) -> Nerve:
    fams = [frozenset(f) for f in obj["families"]]

    def oracle(s, fams=fams):
        return any(s <= f for f in fams)

    return Nerve(list(obj["vertices"]), oracle, fams)


def apartment_complex(B: Building, cap: int = 100_000) -> Nerve:
    """AC(B): apartments labelled by index; a family intersects iff it shares a vertex."""
    apts = B.enumerate_apartments(cap)
    by_vertex: dict[SimplexRef, set[int]] = {}
    for k, A in enumerate(apts):
        for c in A.chambers:
            for v in B.chamber_vertices(c):
                by_vertex.setdefault(v, set()).add(k)
    vertex_sets = {v: frozenset(s) for v, s in by_vertex.items()}
    apt_vertices = [frozenset(v for v, s in vertex_sets.items() if k in s) for k in range(len(apts))]

    def oracle(s):
        s = list(s)
        if not s:
            return True
        common = apt_vertices[s[0]]
        for k in s[1:]:
            common = common & apt_vertices[k]
            if not common:
                return False
        return bool(common)

    labels = list(range(len(apts)))
    fams = _maximal(set(vertex_sets.values()))
    return Nerve(labels, oracle, fams, B, vertex_sets)


def _maximal(sets) -> list[frozenset]:
    sets = sorted(set(sets), key=lambda s: (-len(s), sorted(s)))
    out = []
    for s in sets:
        if not any(s < t for t in out):
            out.append(s)
    return sorted(out, key=sorted)


def refine_to_maximal(N: Nerve, seeds) -> list[frozenset]:
    """Grow each seed family by any label that keeps it a simplex, until stable."""
    out = []
    for fam in seeds:
        fam = set(fam)
        changed = True
        while changed:
            changed = False
            for x in N.labels:
                if x not in fam and N.oracle(frozenset(fam | {x})):
                    fam.add(x)
                    changed = True
        out.append(frozenset(fam))
    return _maximal(out)


def search_maximal(N: Nerve, cap: int = SEARCH_CAP) -> list[frozenset]:
    """Enumerate maximal simplices of an abstract nerve by backtracking.

    Works for any downward-closed family; raises once more than ``cap``
    oracle tests have been spent.
    """
    tests = 0

    def simplex(s):
        nonlocal tests
        tests += 1
        if tests > cap:
            raise BuildingError(f"maximal family search exceeded {cap} oracle tests")
        return N.oracle(frozenset(s))

    found = []

    def extend(R, P, X):
        if not P and not X:
            found.append(frozenset(R))
            return
        for v in list(P):
            R2 = R | {v}
            P2 = [p for p in P if p != v and simplex(R2 | {p})]
            X2 = [x for x in X if simplex(R2 | {x})]
            extend(R2, P2, X2)
            P.remove(v)
            X.append(v)

    start = [x for x in N.labels if simplex({x})]
    extend(frozenset(), start, [])
    return _maximal(found)


def maximal_families(N: Nerve) -> list[frozenset]:
    if N.source_families is not None:
        return refine_to_maximal(N, set(N.source_families.values()))
    if N.families is not None:
        return _maximal(N.families)
    return search_maximal(N)


@dataclass
class Reconstruction:
    building: Building
    vertices: list[frozenset]  # reconstructed vertex k <-> family vertices[k]
    edges: set[tuple[int, int]]
    chambers: list[tuple[int, ...]]  # vertex tuples indexed by reconstructed type

    def vertex_of(self, family) -> int:
        return self.vertices.index(frozenset(family))


def reconstruct_building(N: Nerve) -> Reconstruction:
    """Vertices are maximal families; edges by the containment criterion; chambers are maximal cliques."""
    fams = maximal_families(N)
    nv = len(fams)
    if nv < 2:
        raise BuildingError("nerve has fewer than two maximal families; source is not thick")
    edges = set()
    for u, v in itertools.combinations(range(nv), 2):
        inter = fams[u] & fams[v]
        if not inter:
            continue
        if not all(w in (u, v) for w in range(nv) if fams[w] >= inter):
            continue
        # the containment test alone also passes for opposite vertices in
        # rank 2; a simplex shares an apartment with every vertex, which
        # separates the two cases
        if all(fams[w] & inter for w in range(nv)):
            edges.add((u, v))
    adj = {v: set() for v in range(nv)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    cliques = _maximal_cliques(adj)
    sizes = {len(c) for c in cliques}
    if len(sizes) != 1:
        raise BuildingError(f"maximal cliques have inconsistent sizes {sorted(sizes)}")
    (rank,) = sizes
    typing = _type_vertices(cliques, rank, nv)
    chambers = sorted(tuple(sorted(c, key=lambda v: typing[v])) for c in cliques)
    panels = []
    for i in range(rank):
        groups: dict = {}
        for k, ch in enumerate(chambers):
            groups.setdefault(ch[:i] + ch[i + 1:], []).append(k)
        panels.append(list(groups.values()))
    for i in range(rank):
        if any(len(p) < 3 for p in panels[i]):
            raise BuildingError("reconstructed chamber system is not thick")
    W = _coxeter_from_panels(chambers, panels, rank)
    B = Building(W, chambers, panels)
    return Reconstruction(B, fams, edges, chambers)


def _maximal_cliques(adj) -> list[frozenset]:
    out = []

    def bk(R, P, X):
        if not P and not X:
            out.append(frozenset(R))
            return
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in sorted(P - adj[pivot]):
            bk(R | {v}, P & adj[v], X & adj[v])
            P = P - {v}
            X = X | {v}

    bk(set(), set(adj), set())
    return out


def _type_vertices(cliques, rank, nv) -> list[int]:
    """Propagate a type function from one chamber across adjacent chambers."""
    typing = [-1] * nv
    first = sorted(cliques, key=sorted)[0]
    for k, v in enumerate(sorted(first)):
        typing[v] = k
    pending = [c for c in cliques if c != first]
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for c in pending:
            known = [v for v in c if typing[v] != -1]
            if len(known) == rank:
                if len({typing[v] for v in c}) != rank:
                    raise BuildingError("no consistent type function on the reconstructed complex")
                progress = True
            elif len(known) == rank - 1:
                (v,) = [v for v in c if typing[v] == -1]
                missing = set(range(rank)) - {typing[u] for u in known}
                if len(missing) != 1:
                    raise BuildingError("no consistent type function on the reconstructed complex")
                typing[v] = missing.pop()
                progress = True
            else:
                rest.append(c)
        pending = rest
    if pending or -1 in typing:
        raise BuildingError("reconstructed chamber graph is not connected")
    return typing


def _coxeter_from_panels(chambers, panels, rank):
    """m(i,j) is the gallery diameter of an {i,j}-residue."""
    owner = []
    for i in range(rank):
        o = {}
        for k, p in enumerate(panels[i]):
            for c in p:
                o[c] = k
        owner.append(o)
    members = []
    for i in range(rank):
        members.append({k: p for k, p in enumerate(panels[i])})
    M = [[1 if i == j else 2 for j in range(rank)] for i in range(rank)]
    for i, j in itertools.combinations(range(rank), 2):
        start = 0
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for t in (i, j):
                for y in members[t][owner[t][x]]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
        diam = 0
        for s in comp:
            dist = {s: 0}
            q = [s]
            for x in q:
                for t in (i, j):
                    for y in members[t][owner[t][x]]:
                        if y not in dist:
                            dist[y] = dist[x] + 1
                            q.append(y)
            diam = max(diam, max(dist.values()))
        M[i][j] = M[j][i] = diam
    return new_coxeter_system(M)


# ------------------------------------------------------------------ round trip
@dataclass
class RoundTripReport:
    ok: bool
    vertex_map: dict  # source vertex -> reconstructed vertex index
    vertices: int
    type_preserving: bool
    apartments_match: bool
    backtracking_isomorphism: bool
    problems: list[str] = field(default_factory=list)


def verify_round_trip(B: Building) -> RoundTripReport:
    N = apartment_complex(B)
    rec = reconstruct_building(N)
    problems = []
    src_vertices = B.vertices()
    fam_index = {f: k for k, f in enumerate(rec.vertices)}
    vmap = {}
    for v in src_vertices:
        f = N.source_families[v]
        if f not in fam_index:
            problems.append(f"family of {v} is not maximal")
            continue
        vmap[v] = fam_index[f]
    if len(set(vmap.values())) != len(src_vertices) or len(rec.vertices) != len(src_vertices):
        problems.append("vertex dictionary is not a bijection")
    src_edges = _source_edges(B)
    image_edges = {tuple(sorted((vmap[u], vmap[v]))) for u, v in src_edges if u in vmap and v in vmap}
    if image_edges != rec.edges:
        problems.append("1-skeleton adjacency not preserved")
    src_chambers = {frozenset(vmap.get(v) for v in B.chamber_vertices(c)) for c in range(B.n)}
    if src_chambers != {frozenset(ch) for ch in rec.chambers}:
        problems.append("chambers not preserved")
    # apartment A in the reconstruction = vertices whose family contains A
    apts_ok = True
    apts = B.enumerate_apartments()
    for k, A in enumerate(apts):
        src = {vmap[v] for c in A.chambers for v in B.chamber_vertices(c) if v in vmap}
        rec_set = {u for u, f in enumerate(rec.vertices) if k in f}
        if src != rec_set:
            apts_ok = False
            break
    if not apts_ok:
        problems.append("apartment labels not matched")
    rec_type = {}
    for ch in rec.chambers:
        for t, u in enumerate(ch):
            rec_type[u] = t
    type_pairs = {(B.vertex_type(v), rec_type[u]) for v, u in vmap.items()}
    type_preserving = len(type_pairs) == B.rank and len({a for a, _ in type_pairs}) == B.rank
    src_adj, rec_adj = _adjacency(src_vertices, src_edges), _rec_adjacency(rec)
    iso = find_isomorphism(src_adj, rec_adj,
                           {v: B.vertex_type(v) for v in src_vertices}, rec_type) is not None
    if not iso:
        problems.append("backtracking search found no isomorphism")
    return RoundTripReport(not problems, vmap, len(src_vertices), type_preserving, apts_ok, iso, problems)


def _source_edges(B: Building):
    edges = set()
    for c in range(B.n):
        vs = B.chamber_vertices(c)
        for u, v in itertools.combinations(vs, 2):
            edges.add((u, v) if u < v else (v, u))
    return edges


def _adjacency(vertices, edges):
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _rec_adjacency(rec: Reconstruction):
    adj = {k: set() for k in range(len(rec.vertices))}
    for u, v in rec.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def find_isomorphism(adj1, adj2, type1, type2):
    """Backtracking graph isomorphism with degree and type-class pruning.

    Types may be permuted by the isomorphism, but consistently.
    """
    if len(adj1) != len(adj2):
        return None
    order = []
    seen = set()
    for start in sorted(adj1, key=lambda v: -len(adj1[v])):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop(0)
            order.append(x)
            for y in sorted(adj1[x], key=repr):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    mapping: dict = {}
    used: set = set()
    tmap: dict = {}

    def ok(v, w):
        if len(adj1[v]) != len(adj2[w]):
            return False
        t1, t2 = type1[v], type2[w]
        if tmap.get(t1, t2) != t2 or (t2 in tmap.values() and tmap.get(t1) != t2):
            return False
        for u in adj1[v]:
            if u in mapping and mapping[u] not in adj2[w]:
                return False
        mapped_nbrs = sum(1 for u in adj1[v] if u in mapping)
        if mapped_nbrs != sum(1 for x in adj2[w] if x in used):
            return False
        return True

    def rec(k):
        if k == len(order):
            return True
        v = order[k]
        cands = adj2.keys()
        anchor = next((u for u in adj1[v] if u in mapping), None)
        if anchor is not None:
            cands = adj2[mapping[anchor]]
        for w in sorted(cands):
            if w in used or not ok(v, w):
                continue
            new_t = type1[v] not in tmap
            mapping[v] = w
            used.add(w)
            if new_t:
                tmap[type1[v]] = type2[w]
            if rec(k + 1):
                return True
            del mapping[v]
            used.discard(w)
            if new_t:
                del tmap[type1[v]]
        return False

    return dict(mapping) if rec(0) else None
