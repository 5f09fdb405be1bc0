"""Perspectivities, projectivities and panel projectivity groups.

Permutations of a residue are stored in one-line notation over the residue's
chambers sorted by identifier.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

from .building import Apartment, Building, BuildingError, SimplexRef

GROUP_CAP = 1_000_000


@dataclass(frozen=True)
class Projectivity:
    path: tuple[SimplexRef, ...]
    mapping: dict  # chamber of Res(path[0]) -> chamber of Res(path[-1])

    @property
    def parity(self) -> int:
        return (len(self.path) - 1) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    def __call__(self, c: int) -> int:
        return self.mapping[c]

    def inverse(self) -> "Projectivity":
        return Projectivity(tuple(reversed(self.path)), {v: k for k, v in self.mapping.items()})

    def permutation(self, B: Building) -> tuple[int, ...]:
        """One-line notation; only for closed projectivities."""
        if self.path[0] != self.path[-1]:
            raise BuildingError("permutation form needs a closed path")
        res = B.chambers_of(self.path[0])
        pos = {c: k for k, c in enumerate(res)}
        return tuple(pos[self.mapping[c]] for c in res)


def perspectivity(B: Building, a: SimplexRef, b: SimplexRef) -> Projectivity:
    """[b;a]: Res(a) -> Res(b), c -> proj_b(c)."""
    if not B.are_opposite(a, b):
        raise BuildingError(f"{a} and {b} are not opposite")
    return Projectivity((a, b), {c: B.project_chamber(b, c) for c in B.chambers_of(a)})


def compose_path(B: Building, path) -> Projectivity:
    path = tuple(path)
    if not path:
        raise BuildingError("empty path")
    mapping = {c: c for c in B.chambers_of(path[0])}
    for a, b in zip(path, path[1:]):
        step = perspectivity(B, a, b).mapping
        mapping = {c: step[x] for c, x in mapping.items()}
    return Projectivity(path, mapping)


# ----------------------------------------------------------- Knarr's construction
@dataclass
class KnarrChoices:
    """Choice points of the construction; None means least identifier."""

    rng: random.Random | None = None

    def pick(self, items):
        items = sorted(items)
        if not items:
            raise BuildingError("no admissible choice")
        if self.rng is None:
            return items[0]
        return self.rng.choice(items)


def _knarr_half(B: Building, r: SimplexRef, i: int, j: int, a: int, b: int, c: int, d: int,
                choose: KnarrChoices) -> SimplexRef:
    """The panel t of one half of the construction, with [q;t;r] sending b->d and a->c."""
    A = B.apartment_containing(b, d)
    if not all(x in A for x in (a, c)):
        raise BuildingError("apartment does not contain the gallery")
    jpanel = B.panel_ref(a, j)
    s = B.antipode(A, jpanel)
    outside = [e for e in B.chambers_of(s) if e not in A]
    if not outside:
        raise BuildingError("building is not thick: no chamber of Res(s) outside the apartment")
    e = choose.pick(outside)
    q = B.panel_ref(c, i)
    ts = [B.panel_ref(e, k) for k in range(B.rank)]
    ts = [t for t in ts if B.are_opposite(t, r) and B.are_opposite(t, q)]
    if len(ts) != 1:
        raise BuildingError(f"expected a unique panel of e opposite r and q, found {len(ts)}")
    return ts[0]


def knarr_projectivity(B: Building, r: SimplexRef, a: int, b: int, b2: int,
                       rng: random.Random | None = None) -> Projectivity:
    """Even projectivity [r;t';q;t;r] of Res(r) fixing a and sending b to b2.

    r must be an i-panel (cotype {i}) whose type i is joined to some j in the
    Coxeter diagram.  With ``rng`` the choice points are sampled at random.
    """
    if len(r.cotype) != 1:
        raise BuildingError("r must be a panel")
    (i,) = r.cotype
    res = B.chambers_of(r)
    if len({a, b, b2}) != 3 or not {a, b, b2} <= set(res):
        raise BuildingError("a, b, b' must be three distinct chambers of Res(r)")
    nbrs = B.W.neighbours(i)
    if not nbrs:
        raise BuildingError(f"type {i} is isolated in the Coxeter diagram")
    choose = KnarrChoices(rng)
    j = choose.pick(nbrs)
    c = choose.pick([x for x in B.panel(a, j) if x != a])
    d = choose.pick([x for x in B.panel(c, i) if x != c])
    q = B.panel_ref(c, i)
    t = _knarr_half(B, r, i, j, a, b, c, d, choose)
    t2 = _knarr_half(B, r, i, j, a, b2, c, d, choose)
    proj = compose_path(B, (r, t, q, t2, r))
    if proj(a) != a or proj(b) != b2:
        raise BuildingError("Knarr construction failed to fix a and move b to b'")
    return proj


# -------------------------------------------------------------- group closure
def _compose(p, q):
    """p after q."""
    return tuple(p[x] for x in q)


def closed_projectivities(B: Building, r: SimplexRef, max_len: int) -> dict[tuple, set[int]]:
    """All permutations of Res(r) induced by closed paths of length <= max_len.

    Returns permutation -> set of parities realised.  Paths are explored as
    states (current simplex, induced map) so equal states are merged.
    """
    res = B.chambers_of(r)
    pos = {c: k for k, c in enumerate(res)}
    start = (r, tuple(res))
    seen = {(start, 0)}
    frontier = [start]
    out: dict[tuple, set[int]] = {tuple(range(len(res))): {0}}
    opp_cache: dict = {}
    for step in range(1, max_len + 1):
        nxt = []
        for a, images in frontier:
            if a not in opp_cache:
                opp_cache[a] = B.opposite_simplices(a)
            for b in opp_cache[a]:
                new = tuple(B.project_chamber(b, x) for x in images)
                state = (b, new)
                key = (state, step % 2)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(state)
                if b == r:
                    perm = tuple(pos[x] for x in new)
                    out.setdefault(perm, set()).add(step % 2)
        frontier = nxt
    return out


@dataclass
class PanelGroupReport:
    panel: SimplexRef
    residue: tuple[int, ...]
    generators: list[tuple[tuple[int, ...], int]]  # (permutation, parity)
    order: int
    even_order: int
    transitive: bool
    two_transitive: bool
    even_two_transitive: bool
    max_path_len: int
    type_isolated: bool
    knarr_seeded: bool
    elements: set = field(default_factory=set, repr=False)
    even_elements: set = field(default_factory=set, repr=False)

    def to_json(self):
        return {
            "panel": self.panel.to_json(),
            "residue": list(self.residue),
            "generators": [{"perm": list(p), "parity": par} for p, par in self.generators],
            "order": self.order,
            "even_order": self.even_order,
            "transitive": self.transitive,
            "two_transitive": self.two_transitive,
            "even_two_transitive": self.even_two_transitive,
            "max_path_len": self.max_path_len,
            "type_isolated": self.type_isolated,
            "knarr_seeded": self.knarr_seeded,
        }


def group_closure(gens, n: int, cap: int = GROUP_CAP):
    """Closure of (permutation, parity) generators; returns (all elements, even elements)."""
    ident = (tuple(range(n)), 0)
    seen = {ident}
    q = deque([ident])
    while q:
        p, par = q.popleft()
        for g, gp in gens:
            x = (_compose(g, p), (par + gp) % 2)
            if x not in seen:
                seen.add(x)
                if len(seen) > cap:
                    raise BuildingError(f"group closure exceeds cap {cap}")
                q.append(x)
    elements = {p for p, _ in seen}
    even = {p for p, par in seen if par == 0}
    return elements, even


def is_k_transitive(gens, n: int, k: int) -> bool:
    """Orbit check on ordered k-tuples of distinct points."""
    if n < k:
        return False
    start = tuple(range(k))
    seen = {start}
    q = deque([start])
    while q:
        t = q.popleft()
        for g in gens:
            u = tuple(g[x] for x in t)
            if u not in seen:
                seen.add(u)
                q.append(u)
    total = 1
    for x in range(k):
        total *= n - x
    return len(seen) == total


def projectivity_group(B: Building, r: SimplexRef, max_path_len: int = 4,
                       cap: int = GROUP_CAP) -> PanelGroupReport:
    if max_path_len < 2 or max_path_len % 2:
        raise BuildingError("max_path_len must be even and at least 2")
    res = B.chambers_of(r)
    n = len(res)
    if n > 12:
        raise BuildingError("residue too large for permutation closure")
    closed = closed_projectivities(B, r, max_path_len)
    gens = sorted((p, par) for p, pars in closed.items() for par in pars)
    (i,) = r.cotype if len(r.cotype) == 1 else (None,)
    isolated = i is None or B.W.is_isolated(i)
    thick = all(len(p) >= 3 for t in range(B.rank) for p in B.panels[t])
    knarr = False
    if not isolated and thick and n >= 3:
        for a, b, b2 in itertools.permutations(res, 3):
            g = knarr_projectivity(B, r, a, b, b2).permutation(B)
            if (g, 0) not in gens:
                gens.append((g, 0))
        knarr = True
    elements, even = group_closure(gens, n, cap)
    full_gens = [p for p, _ in gens]
    # even elements form a subgroup; test its action directly on its elements
    even_list = sorted(even)
    return PanelGroupReport(
        panel=r,
        residue=res,
        generators=gens,
        order=len(elements),
        even_order=len(even),
        transitive=is_k_transitive(full_gens, n, 1),
        two_transitive=is_k_transitive(full_gens, n, 2),
        even_two_transitive=is_k_transitive(even_list, n, 2),
        max_path_len=max_path_len,
        type_isolated=isolated,
        knarr_seeded=knarr,
        elements=elements,
        even_elements=even,
    )


# ------------------------------------------------------------------ B(a, b)
@dataclass
class BetweenBuilding:
    a: SimplexRef
    b: SimplexRef
    chambers: tuple[int, ...]
    apartments: list[Apartment]
    pairs: dict  # frozenset{c, d} of Res(a) -> Apartment

    def __contains__(self, c):
        return c in set(self.chambers)


def between_building(B: Building, a: SimplexRef, b: SimplexRef) -> BetweenBuilding:
    """Union of the apartments through the opposite panels a and b."""
    if not B.are_opposite(a, b):
        raise BuildingError(f"{a} and {b} are not opposite")
    res = B.chambers_of(a)
    pairs = {}
    for c, d in itertools.combinations(res, 2):
        A = B.hull_apartment(c, B.project_chamber(b, d))
        pairs[frozenset((c, d))] = A
    apts = sorted(set(pairs.values()), key=lambda A: A.chambers)
    chambers = tuple(sorted({x for A in apts for x in A.chambers}))
    return BetweenBuilding(a, b, chambers, apts, pairs)


def slide_isomorphism(B: Building, a: SimplexRef, b: SimplexRef, b2: SimplexRef,
                      source: BetweenBuilding | None = None,
                      target: BetweenBuilding | None = None) -> dict[int, int]:
    """The isomorphism B(a,b) -> B(a,b') fixing their intersection.

    A chamber x goes to the unique y with delta(x_a, y) = delta(x_a, x) and
    delta(proj_b' x_a, y) = delta(proj_b x_a, x), where x_a = proj_a x.
    """
    if source is None:
        source = between_building(B, a, b)
    if target is None:
        target = between_building(B, a, b2)
    out = {}
    for x in source.chambers:
        xa = B.project_chamber(a, x)
        u = B.delta(xa, x)
        v = B.delta(B.project_chamber(b, xa), x)
        row1 = B.delta_row(xa)
        row2 = B.delta_row(B.project_chamber(b2, xa))
        hits = [y for y in target.chambers if row1[y] == u and row2[y] == v]
        if len(hits) != 1:
            raise BuildingError(f"slide image of chamber {x} is not unique ({len(hits)} candidates)")
        out[x] = hits[0]
    return out


def slide_along_path(B: Building, path) -> dict[int, int]:
    """Composite of slides along a closed path a0, a1, ..., ak = a0 in the opposition graph.

    Slides pivot at a1, ..., a_{k-1} and finally at a0, so the result is an
    automorphism of B(a0, a1).
    """
    path = list(path)
    if len(path) < 3 or path[0] != path[-1]:
        raise BuildingError("need a closed path of length >= 2")
    k = len(path) - 1
    cache: dict = {}

    def bb(x, y):
        if (x, y) not in cache:
            cache[(x, y)] = between_building(B, x, y)
        return cache[(x, y)]

    current = {x: x for x in bb(path[0], path[1]).chambers}
    steps = [(path[m], path[m - 1], path[m + 1]) for m in range(1, k)]
    steps.append((path[0], path[k - 1], path[1]))
    for pivot, frm, to in steps:
        slide = slide_isomorphism(B, pivot, frm, to, bb(pivot, frm), bb(pivot, to))
        current = {x: slide[y] for x, y in current.items()}
    return current
