"""Finite spherical buildings stored as chamber systems.

A building is a set of chambers 0..N-1 together with, for every type i, a
partition of the chambers into i-panels.  Simplices are residues: the
simplex of cotype J through chamber c is the set of chambers reachable from
c by J-adjacencies, so its vertices have the types I - J.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .coxeter import (
    CoxeterError,
    CoxeterSystem,
    block_sum,
    dihedral,
    is_spherical,
    new_coxeter_system,
    opposition_involution,
)

SAMPLED_PAIRS = 10_000
APARTMENT_CAP = 100_000


class BuildingError(ValueError):
    """Building data that violates the chamber-system axioms, or a failed precondition."""


@dataclass(frozen=True, order=True)
class SimplexRef:
    """A simplex, given by the least chamber of its residue and the residue cotype."""

    chamber: int
    cotype: frozenset

    def types(self, rank: int) -> tuple[int, ...]:
        return tuple(k for k in range(rank) if k not in self.cotype)

    def to_json(self):
        return {"chamber": self.chamber, "cotype": sorted(self.cotype)}


@dataclass(frozen=True)
class Apartment:
    chambers: tuple[int, ...]

    def __contains__(self, c):
        return c in self._set

    def __len__(self):
        return len(self.chambers)

    @cached_property
    def _set(self):
        return frozenset(self.chambers)


@dataclass(frozen=True)
class WDistance:
    element: int
    gallery: tuple[int, ...]
    word: tuple[int, ...]


class Building:
    """Chamber system of a (weak or thick) spherical building.

    ``panels[i]`` lists the i-panels, each a sorted tuple of chambers; i-adjacent
    chambers differ exactly in their vertex of type i.
    """

    def __init__(self, W: CoxeterSystem, labels, panels, type_names=None, validate=True):
        self.W = W
        self.labels = list(labels)
        self.n = len(self.labels)
        self.rank = W.rank
        self.panels = [sorted(tuple(sorted(p)) for p in panels[i]) for i in range(self.rank)]
        self.type_names = tuple(type_names) if type_names else tuple(W.labels)
        self.panel_of = []
        for i in range(self.rank):
            owner = [-1] * self.n
            for k, p in enumerate(self.panels[i]):
                for c in p:
                    if owner[c] != -1:
                        raise BuildingError(f"chamber {c} lies in two {i}-panels")
                    owner[c] = k
            if -1 in owner:
                raise BuildingError(f"some chamber lies in no {i}-panel")
            self.panel_of.append(owner)
        self._residues: dict = {}
        self._delta: dict[int, np.ndarray] = {}
        self._parent: dict[int, np.ndarray] = {}
        if validate:
            self._validate()

    # ------------------------------------------------------------------ basics
    def __repr__(self):
        return f"Building(type={is_spherical(self.W)[1]}, chambers={self.n})"

    @property
    def table(self):
        return self.W.table

    @cached_property
    def w0(self) -> int:
        return self.table.longest

    @cached_property
    def max_length(self) -> int:
        return self.table.length(self.w0)

    @cached_property
    def opposition(self) -> tuple[int, ...]:
        return opposition_involution(self.W)

    def panel(self, c: int, i: int) -> tuple[int, ...]:
        return self.panels[i][self.panel_of[i][c]]

    def neighbours(self, c: int):
        """(type, chamber) pairs of chambers adjacent to c."""
        for i in range(self.rank):
            for d in self.panel(c, i):
                if d != c:
                    yield i, d

    def _validate(self):
        if self.n == 0:
            raise BuildingError("building has no chambers")
        for i in range(self.rank):
            for p in self.panels[i]:
                if len(p) < 2:
                    raise BuildingError(f"{i}-panel {p} has fewer than 2 chambers")
        for c in range(self.n):
            for i, j in itertools.combinations(range(self.rank), 2):
                if set(self.panel(c, i)) & set(self.panel(c, j)) != {c}:
                    raise BuildingError(f"chamber {c}: panels of types {i},{j} overlap")
        ok, _ = is_spherical(self.W)
        if not ok:
            raise BuildingError("only spherical buildings are supported")
        reached = self._bfs_order(0)
        if len(reached) != self.n:
            raise BuildingError("chamber graph is not connected")
        # W-distance must be gallery independent; every pair for small buildings
        sources = range(self.n)
        if self.n * self.n > SAMPLED_PAIRS:
            k = max(1, SAMPLED_PAIRS // self.n)
            sources = sorted(random.Random(0).sample(range(self.n), k))
        for c in sources:
            self.delta_row(c)

    def _bfs_order(self, c):
        seen = {c}
        order = [c]
        q = deque([c])
        while q:
            x = q.popleft()
            for _, y in self.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    q.append(y)
        return order

    # ------------------------------------------------------------- distances
    def delta_row(self, c: int) -> np.ndarray:
        """W-distances delta(c, x) for all chambers x, by BFS along minimal galleries."""
        row = self._delta.get(c)
        if row is not None:
            return row
        T = self.table
        row = np.full(self.n, -1, dtype=np.int64)
        dist = np.full(self.n, -1, dtype=np.int64)
        parent = np.full(self.n, -1, dtype=np.int64)
        row[c] = 0
        dist[c] = 0
        q = deque([c])
        while q:
            x = q.popleft()
            for i, y in self.neighbours(x):
                w = T.right[row[x]][i]
                if dist[y] == -1:
                    dist[y] = dist[x] + 1
                    row[y] = w
                    parent[y] = x
                    q.append(y)
                elif dist[y] == dist[x] + 1 and row[y] != w:
                    raise BuildingError(f"W-distance from {c} to {y} depends on the gallery")
        lengths = np.array([T.length(int(w)) for w in row])
        if not np.array_equal(lengths, dist):
            raise BuildingError(f"gallery distances from {c} disagree with W-lengths")
        self._delta[c] = row
        self._parent[c] = parent
        return row

    @cached_property
    def lengths(self) -> np.ndarray:
        T = self.table
        return np.array([T.length(w) for w in range(len(T))], dtype=np.int64)

    @cached_property
    def inverses(self) -> np.ndarray:
        T = self.table
        return np.array([T.inverse(w) for w in range(len(T))], dtype=np.int64)

    def dist_row(self, c: int) -> np.ndarray:
        return self.lengths[self.delta_row(c)]

    def dist(self, c: int, d: int) -> int:
        return int(self.lengths[self.delta_row(c)[d]])

    def delta(self, c: int, d: int) -> int:
        return int(self.delta_row(c)[d])

    def w_distance(self, c: int, d: int) -> WDistance:
        row = self.delta_row(c)
        parent = self._parent[c]
        path = [d]
        while path[-1] != c:
            path.append(int(parent[path[-1]]))
        path.reverse()
        word = tuple(self._adj_type(x, y) for x, y in zip(path, path[1:]))
        return WDistance(int(row[d]), tuple(path), word)

    def _adj_type(self, x, y):
        for i in range(self.rank):
            if self.panel_of[i][x] == self.panel_of[i][y]:
                return i
        raise BuildingError(f"chambers {x},{y} are not adjacent")

    # -------------------------------------------------------------- simplices
    def residue(self, c: int, cotype) -> tuple[int, ...]:
        J = frozenset(cotype)
        key = (c, J)
        res = self._residues.get(key)
        if res is not None:
            return res
        seen = {c}
        q = deque([c])
        while q:
            x = q.popleft()
            for i in J:
                for y in self.panel(x, i):
                    if y not in seen:
                        seen.add(y)
                        q.append(y)
        res = tuple(sorted(seen))
        for x in res:
            self._residues[(x, J)] = res
        return res

    def simplex(self, c: int, cotype) -> SimplexRef:
        J = frozenset(cotype)
        return SimplexRef(self.residue(c, J)[0], J)

    def chambers_of(self, a: SimplexRef) -> tuple[int, ...]:
        return self.residue(a.chamber, a.cotype)

    def vertex(self, c: int, k: int) -> SimplexRef:
        """The type-k vertex of chamber c."""
        return self.simplex(c, frozenset(range(self.rank)) - {k})

    def panel_ref(self, c: int, i: int) -> SimplexRef:
        """The i-panel through c, as a simplex of cotype {i}."""
        return self.simplex(c, {i})

    def all_panels(self, i=None) -> list[SimplexRef]:
        types = range(self.rank) if i is None else [i]
        return [SimplexRef(p[0], frozenset({t})) for t in types for p in self.panels[t]]

    def all_simplices(self) -> list[SimplexRef]:
        """Every nonempty simplex (proper residue), sorted."""
        out = set()
        full = frozenset(range(self.rank))
        for r in range(self.rank):
            for J in itertools.combinations(range(self.rank), r):
                J = frozenset(J)
                if J == full:
                    continue
                for c in range(self.n):
                    out.add(self.simplex(c, J))
        return sorted(out, key=lambda s: (len(s.cotype), sorted(s.cotype), s.chamber), reverse=False)

    def vertices(self) -> list[SimplexRef]:
        out = set()
        for c in range(self.n):
            for k in range(self.rank):
                out.add(self.vertex(c, k))
        return sorted(out, key=lambda v: (self.vertex_type(v), v.chamber))

    def vertex_type(self, v: SimplexRef) -> int:
        (k,) = set(range(self.rank)) - set(v.cotype)
        return k

    def chamber_vertices(self, c: int) -> tuple[SimplexRef, ...]:
        return tuple(self.vertex(c, k) for k in range(self.rank))

    def vertex_label(self, v: SimplexRef) -> str:
        k = self.vertex_type(v)
        c = v.chamber
        lab = self.labels[c]
        if isinstance(lab, tuple) and len(lab) == self.rank:
            return f"{self.type_names[k]}:{lab[k]}"
        return f"{self.type_names[k]}@{c}"

    def simplex_label(self, a: SimplexRef) -> str:
        types = a.types(self.rank)
        return "{" + ",".join(self.vertex_label(self.vertex(a.chamber, k)) for k in types) + "}"

    # ------------------------------------------------------------- projections
    def project_chamber(self, a: SimplexRef, c: int) -> int:
        """The gate proj_a(c): unique chamber of Res(a) nearest to c."""
        res = self.chambers_of(a)
        d = self.dist_row(c)[list(res)]
        best = d.min()
        hits = [x for x, v in zip(res, d) if v == best]
        if len(hits) != 1:
            raise BuildingError(f"projection of {c} onto {a} is not unique")
        return hits[0]

    def face_of(self, chambers) -> SimplexRef:
        """Largest common face of a set of chambers."""
        chambers = list(chambers)
        common = [
            k for k in range(self.rank)
            if len({self.vertex(x, k) for x in chambers}) == 1
        ]
        return self.simplex(chambers[0], frozenset(range(self.rank)) - set(common))

    def project_simplex(self, a: SimplexRef, b: SimplexRef) -> SimplexRef:
        gates = {self.project_chamber(a, c) for c in self.chambers_of(b)}
        return self.face_of(sorted(gates))

    # -------------------------------------------------------------- apartments
    def is_opposite_chambers(self, c: int, d: int) -> bool:
        return self.delta(c, d) == self.w0

    def hull_apartment(self, c: int, d: int) -> Apartment:
        """The unique apartment through the opposite chambers c and d."""
        if not self.is_opposite_chambers(c, d):
            raise BuildingError(f"chambers {c} and {d} are not opposite")
        T = self.table
        dc, dd = self.delta_row(c), self.delta_row(d)
        L = self.lengths
        members = [
            int(x) for x in np.nonzero(L[dc] + L[dd] == self.max_length)[0]
            if T.mul(int(dc[x]), int(self.inverses[dd[x]])) == self.w0
        ]
        A = Apartment(tuple(members))
        self._check_thin(A)
        return A

    def _check_thin(self, A: Apartment):
        if len(A) != len(self.table):
            raise BuildingError(f"apartment has {len(A)} chambers, expected {len(self.table)}")
        for c in A.chambers:
            for i in range(self.rank):
                if sum(1 for x in self.panel(c, i) if x in A) != 2:
                    raise BuildingError("apartment is not thin")

    def opposite_in(self, A: Apartment, c: int) -> int:
        row = self.delta_row(c)
        (x,) = [x for x in A.chambers if row[x] == self.w0]
        return x

    def apartment_containing(self, c: int, d: int) -> Apartment:
        """An apartment through c and d: extend d to a chamber opposite c, take the hull."""
        T = self.table
        u = T.mul(T.inverse(self.delta(c, d)), self.w0)
        dc = self.dist_row(c)
        x = d
        for s in T.words[u]:
            step = [y for y in self.panel(x, s) if dc[y] == dc[x] + 1]
            if not step:
                raise BuildingError(f"no distance-increasing {s}-step from chamber {x}")
            x = step[0]
        return self.hull_apartment(c, x)

    def enumerate_apartments(self, cap: int = APARTMENT_CAP) -> list[Apartment]:
        cached = getattr(self, "_apartments", None)
        if cached is not None:
            if len(cached) > cap:
                raise BuildingError(f"apartment count exceeds cap {cap}")
            return cached
        found: dict[tuple, Apartment] = {}
        covered: set[tuple[int, int]] = set()
        for c in range(self.n):
            opp = np.nonzero(self.delta_row(c) == self.w0)[0]
            for d in opp:
                d = int(d)
                if (c, d) in covered:
                    continue
                A = self.hull_apartment(c, d)
                found[A.chambers] = A
                if len(found) > cap:
                    raise BuildingError(f"apartment count exceeds cap {cap}")
                for x in A.chambers:
                    covered.add((x, self.opposite_in(A, x)))
        self._apartments = sorted(found.values(), key=lambda A: A.chambers)
        return self._apartments

    # --------------------------------------------------------------- opposition
    def antipode(self, A: Apartment, a: SimplexRef) -> SimplexRef:
        """Image of a face of A under the antipodal map of A."""
        c = next(x for x in self.chambers_of(a) if x in A)
        opp_J = frozenset(self.opposition[j] for j in a.cotype)
        return self.simplex(self.opposite_in(A, c), opp_J)

    def are_opposite(self, a: SimplexRef, b: SimplexRef) -> bool:
        key = (a, b)
        cache = self.__dict__.setdefault("_opp_cache", {})
        if key in cache:
            return cache[key]
        A = self.apartment_containing(a.chamber, b.chamber)
        out = self.antipode(A, a) == b
        cache[key] = cache[(b, a)] = out
        return out

    def opposite_simplices(self, a: SimplexRef) -> list[SimplexRef]:
        opp_J = frozenset(self.opposition[j] for j in a.cotype)
        cands = sorted({self.simplex(c, opp_J) for c in range(self.n)})
        return [b for b in cands if self.are_opposite(a, b)]

    # ---------------------------------------------------------------- dumping
    def to_json(self) -> dict:
        return {
            "coxeter": self.W.to_json(),
            "types": list(self.W.labels),
            "type_names": list(self.type_names),
            "chambers": [_jsonable(x) for x in self.labels],
            "panels": {str(i): [list(p) for p in self.panels[i]] for i in range(self.rank)},
        }


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def building_from_json(obj) -> Building:
    W = new_coxeter_system(obj["coxeter"], obj.get("types"))
    labels = [tuple(x) if isinstance(x, list) else x for x in obj["chambers"]]
    panels = [[tuple(p) for p in obj["panels"][str(i)]] for i in range(W.rank)]
    return Building(W, labels, panels, obj.get("type_names"))


# ----------------------------------------------------------------- constructors
def _bipartite_girth_diameter(nodes, adj):
    girth = None
    diameter = 0
    for s in nodes:
        dist = {s: 0}
        parent = {s: None}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
                elif parent[x] != y:
                    cyc = dist[x] + dist[y] + 1
                    if girth is None or cyc < girth:
                        girth = cyc
        if len(dist) != len(nodes):
            return girth, None
        diameter = max(diameter, max(dist.values()))
    return girth, diameter


def building_from_incidence(points, lines, gonality: int) -> Building:
    """Flag chamber system of a generalized m-gon given by points and lines.

    Chambers are flags (point, line-index).  Type 0 vertices are points and
    type 1 vertices are lines, so 0-panels are lines and 1-panels are points.
    """
    m = int(gonality)
    if m < 2:
        raise BuildingError("gonality must be at least 2")
    points = list(points)
    pset = set(points)
    if len(pset) != len(points):
        raise BuildingError("duplicate point identifiers")
    lines = [tuple(l) for l in lines]
    nodes = [("p", p) for p in points] + [("l", k) for k in range(len(lines))]
    adj = {v: [] for v in nodes}
    for k, line in enumerate(lines):
        if len(set(line)) != len(line) or not set(line) <= pset:
            raise BuildingError(f"line {k} has repeated or unknown points")
        for p in line:
            adj[("p", p)].append(("l", k))
            adj[("l", k)].append(("p", p))
    girth, diameter = _bipartite_girth_diameter(nodes, adj)
    if girth != 2 * m or diameter != m:
        raise BuildingError(
            f"not a generalized {m}-gon: incidence graph has girth {girth}, diameter {diameter}"
        )
    flags = sorted((p, k) for k, line in enumerate(lines) for p in line)
    index = {f: n for n, f in enumerate(flags)}
    by_line: dict = {}
    by_point: dict = {}
    for (p, k), n in index.items():
        by_line.setdefault(k, []).append(n)
        by_point.setdefault(p, []).append(n)
    panels = [list(by_line.values()), list(by_point.values())]
    return Building(dihedral(m), flags, panels, ("point", "line"))


def rank_one_building(n: int, label: str = "0") -> Building:
    """A set of n >= 2 chambers forming a single panel."""
    W = new_coxeter_system([[1]], [label])
    return Building(W, list(range(n)), [[tuple(range(n))]])


def coxeter_complex(W: CoxeterSystem) -> Building:
    """The thin building Sigma(W, I): chambers are group elements."""
    ok, _ = is_spherical(W)
    if not ok:
        raise CoxeterError("Coxeter complex of a non-spherical system is infinite")
    T = W.table
    panels = []
    for s in range(W.rank):
        seen = set()
        ps = []
        for w in range(len(T)):
            if w in seen:
                continue
            ws = T.right[w][s]
            seen.update((w, ws))
            ps.append((w, ws))
        panels.append(ps)
    return Building(W, [T.label(w) for w in range(len(T))], panels)


def join(B1: Building, B2: Building) -> Building:
    """Join over the disjoint union of the type sets; chambers are pairs."""
    W = block_sum(B1.W, B2.W)
    n2 = B2.n
    labels = [(a, b) for a in B1.labels for b in B2.labels]
    panels = []
    for i in range(B1.rank):
        panels.append([tuple(c * n2 + y for c in p) for p in B1.panels[i] for y in range(n2)])
    for i in range(B2.rank):
        panels.append([tuple(x * n2 + c for c in p) for p in B2.panels[i] for x in range(B1.n)])
    names = list(B1.type_names)
    for nm in B2.type_names:
        while nm in names:
            nm = nm + "'"
        names.append(nm)
    return Building(W, labels, panels, names)


# ------------------------------------------------------------------- reports
@dataclass
class ThicknessReport:
    min_chambers: int
    max_chambers: int
    is_thick: bool
    mode: str
    panels_checked: int

    def to_json(self):
        return self.__dict__.copy()


def thickness_report(B: Building, apartment: Apartment | None = None) -> ThicknessReport:
    """Direct mode inspects every panel; with an apartment only panels meeting it."""
    if apartment is None:
        sizes = [len(p) for i in range(B.rank) for p in B.panels[i]]
        return ThicknessReport(min(sizes), max(sizes), min(sizes) >= 3, "direct", len(sizes))
    try:
        B._check_thin(apartment)
    except BuildingError as exc:
        raise BuildingError(f"not an apartment: {exc}") from None
    seen = set()
    sizes = []
    for c in apartment.chambers:
        for i in range(B.rank):
            k = (i, B.panel_of[i][c])
            if k not in seen:
                seen.add(k)
                sizes.append(len(B.panel(c, i)))
    return ThicknessReport(min(sizes), max(sizes), min(sizes) >= 3, "single_apartment", len(sizes))


@dataclass
class MorphismReport:
    is_morphism: bool
    is_nondegenerate: bool
    is_epimorphism: bool
    panel_criterion: bool
    image_surjective: bool
    problems: list[str] = field(default_factory=list)

    def to_json(self):
        return self.__dict__.copy()


def check_morphism(B: Building, B2: Building, chamber_map, type_map=None) -> MorphismReport:
    """Check a chamber map over a type correspondence I -> I'.

    A morphism sends i-adjacent chambers to type_map[i]-adjacent or equal chambers.
    The epimorphism verdict uses the panel criterion; the brute-force image
    surjectivity is reported alongside for comparison.
    """
    phi = _as_map(chamber_map, B.n)
    if type_map is None:
        type_map = list(range(B.rank))
    type_map = list(type_map)
    if len(type_map) != B.rank or any(not 0 <= t < B2.rank for t in type_map):
        raise BuildingError("type correspondence must map I into I'")
    if any(not 0 <= phi[c] < B2.n for c in range(B.n)):
        raise BuildingError("map sends a chamber outside the target")
    problems = []
    for i in range(B.rank):
        ti = type_map[i]
        for p in B.panels[i]:
            imgs = {phi[c] for c in p}
            if len({B2.panel_of[ti][x] for x in imgs}) != 1:
                problems.append(f"{i}-panel {p} not mapped into a {ti}-panel")
    is_morphism = not problems
    nondeg = is_morphism and len(set(type_map)) == B.rank == B2.rank
    panel_ok = is_morphism
    if is_morphism:
        for c in range(B.n):
            for i in range(B.rank):
                img = {phi[x] for x in B.panel(c, i)}
                if img != set(B2.panel(phi[c], type_map[i])):
                    panel_ok = False
                    break
            if not panel_ok:
                break
    surj = set(phi) == set(range(B2.n))
    return MorphismReport(is_morphism, nondeg, panel_ok, panel_ok, surj, problems)


def _as_map(chamber_map, n):
    if isinstance(chamber_map, dict):
        missing = [c for c in range(n) if c not in chamber_map]
        if missing:
            raise BuildingError(f"map undefined on chambers {missing[:5]}")
        return [chamber_map[c] for c in range(n)]
    phi = list(chamber_map)
    if len(phi) != n:
        raise BuildingError("map must be defined on every chamber")
    return phi


def is_automorphism(B: Building, chamber_map, type_map) -> bool:
    phi = _as_map(chamber_map, B.n)
    if sorted(phi) != list(range(B.n)) or sorted(type_map) != list(range(B.rank)):
        return False
    for i in range(B.rank):
        for j in range(B.rank):
            if B.W.m(i, j) != B.W.m(type_map[i], type_map[j]):
                return False
    rep = check_morphism(B, B, phi, type_map)
    return rep.is_morphism


@dataclass
class Factor:
    label: str
    types: list[int]
    thin: bool
    thick: bool

    def to_json(self):
        return self.__dict__.copy()


def diagram_factorization(B: Building) -> list[Factor]:
    """Connected components of the diagram, flagged thin (S^0 factors when A1) or thick."""
    out = []
    for comp in B.W.components():
        sub = B.W.restrict(comp)
        _, names = is_spherical(sub)
        sizes = [len(p) for i in comp for p in B.panels[i]]
        thin = all(s == 2 for s in sizes)
        thick = all(s >= 3 for s in sizes)
        label = names[0]
        if thin and label == "A1":
            label = "A1/S0"
        out.append(Factor(label, comp, thin, thick))
    return out


def retraction(B: Building, A: Apartment, c: int) -> list[int]:
    """Retraction onto A centred at chamber c in A, as a chamber map B -> A."""
    if c not in A:
        raise BuildingError("centre chamber must lie in the apartment")
    row = B.delta_row(c)
    by_delta = {int(row[x]): x for x in A.chambers}
    return [by_delta[int(row[x])] for x in range(B.n)]
