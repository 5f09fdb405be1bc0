"""Finite metric trees with marked ends.

Lengths are exact ``Fraction`` values.  Leaves flagged as ends stand for
truncated infinite rays; unflagged leaves are truncation boundary.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property


class TreeError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


class MetricTree:
    """A finite tree with positive rational edge lengths.

    Vertices are referred to by index internally; ``ids`` holds the labels
    given by the caller.
    """

    def __init__(self, vertices, edges, ends=()):
        self.ids = list(vertices)
        if len(set(self.ids)) != len(self.ids):
            raise TreeError("duplicate vertex ids")
        self.index = {v: k for k, v in enumerate(self.ids)}
        n = len(self.ids)
        if n == 0:
            raise TreeError("empty tree")
        self.adj: list[dict[int, Fraction]] = [dict() for _ in range(n)]
        for u, v, length in edges:
            if u not in self.index or v not in self.index:
                raise TreeError(f"edge ({u}, {v}) uses an unknown vertex")
            a, b = self.index[u], self.index[v]
            length = as_fraction(length)
            if length <= 0:
                raise TreeError(f"edge ({u}, {v}) has nonpositive length {length}")
            if a == b or b in self.adj[a]:
                raise TreeError(f"loop or repeated edge ({u}, {v})")
            self.adj[a][b] = length
            self.adj[b][a] = length
        m = sum(len(a) for a in self.adj) // 2
        if m != n - 1:
            raise TreeError("edge set contains a cycle" if m >= n else "tree is not connected")
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            raise TreeError("edge set contains a cycle")
        self.ends = frozenset(self.index[e] for e in ends)
        for e in self.ends:
            if len(self.adj[e]) != 1:
                raise TreeError(f"end flag on non-leaf {self.ids[e]}")

    # ---------------------------------------------------------------- basics
    @property
    def n(self) -> int:
        return len(self.ids)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if len(self.adj[v]) == 1]

    def branch_points(self) -> list[int]:
        return [v for v in range(self.n) if len(self.adj[v]) >= 3]

    def boundary_leaves(self) -> list[int]:
        return [v for v in self.leaves() if v not in self.ends]

    def edges(self):
        for a in range(self.n):
            for b, length in sorted(self.adj[a].items()):
                if a < b:
                    yield a, b, length

    def length(self, a: int, b: int) -> Fraction:
        return self.adj[a][b]

    @cached_property
    def _rooted(self):
        """Per-source BFS parents and distances (exact)."""
        parents, dists, hops = [], [], []
        for s in range(self.n):
            par = [-1] * self.n
            dist = [Fraction(0)] * self.n
            hop = [0] * self.n
            seen = [False] * self.n
            seen[s] = True
            q = deque([s])
            while q:
                x = q.popleft()
                for y, length in self.adj[x].items():
                    if not seen[y]:
                        seen[y] = True
                        par[y] = x
                        dist[y] = dist[x] + length
                        hop[y] = hop[x] + 1
                        q.append(y)
            parents.append(par)
            dists.append(dist)
            hops.append(hop)
        return parents, dists, hops

    def vdist(self, a: int, b: int) -> Fraction:
        return self._rooted[1][a][b]

    def hop(self, a: int, b: int) -> int:
        return self._rooted[2][a][b]

    def vertex_path(self, a: int, b: int) -> list[int]:
        par = self._rooted[0][a]
        path = [b]
        while path[-1] != a:
            path.append(par[path[-1]])
        return path[::-1]

    # ---------------------------------------------------------------- points
    def point(self, v) -> "TreePoint":
        """Vertex point from a vertex id."""
        return TreePoint(self.index[v])

    def vpoint(self, k: int) -> "TreePoint":
        return TreePoint(k)

    def edge_point(self, a: int, b: int, offset) -> "TreePoint":
        """Point at distance ``offset`` from ``a`` along the edge (a, b)."""
        offset = as_fraction(offset)
        length = self.adj[a][b]
        if not 0 <= offset <= length:
            raise TreeError(f"offset {offset} outside edge of length {length}")
        if offset == 0:
            return TreePoint(a)
        if offset == length:
            return TreePoint(b)
        if a > b:
            a, b, offset = b, a, length - offset
        return TreePoint(None, (a, b), offset)

    def _anchors(self, p: "TreePoint"):
        if p.vertex is not None:
            return ((p.vertex, Fraction(0)),)
        a, b = p.edge
        return ((a, p.offset), (b, self.adj[a][b] - p.offset))

    def distance(self, p: "TreePoint", q: "TreePoint") -> Fraction:
        if p == q:
            return Fraction(0)
        if p.edge is not None and p.edge == q.edge:
            return abs(p.offset - q.offset)
        return min(da + self.vdist(a, b) + db for a, da in self._anchors(p) for b, db in self._anchors(q))

    def describe(self, p: "TreePoint") -> str:
        if p.vertex is not None:
            return str(self.ids[p.vertex])
        a, b = p.edge
        return f"{self.ids[a]}-{self.ids[b]}@{p.offset}"

    def to_json(self) -> dict:
        return {
            "vertices": list(self.ids),
            "edges": [[self.ids[a], self.ids[b], str(length)] for a, b, length in self.edges()],
            "ends": [self.ids[e] for e in sorted(self.ends)],
        }


@dataclass(frozen=True, order=True)
class TreePoint:
    """A vertex, or a point inside an edge (a, b) with a < b at ``offset`` from a."""

    vertex: int | None
    edge: tuple[int, int] | None = None
    offset: Fraction = Fraction(0)


def tree_from_spec(spec: dict) -> MetricTree:
    """Build a tree from ``{"vertices": [...], "edges": [[u, v, "p/q"]], "ends": [...]}``."""
    try:
        vertices = spec["vertices"]
        edges = [(u, v, Fraction(str(length))) for u, v, length in spec["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise TreeError(f"malformed tree spec: {exc}") from exc
    return MetricTree(vertices, edges, spec.get("ends", ()))


# ------------------------------------------------------------------ geodesics
@dataclass
class Segment:
    points: list[TreePoint]  # start, interior vertices, end
    length: Fraction


def geodesic(T: MetricTree, x: TreePoint, y: TreePoint) -> Segment:
    if x == y:
        return Segment([], Fraction(0))
    if x.edge is not None and x.edge == y.edge:
        return Segment([x, y], abs(x.offset - y.offset))
    best = None
    for a, da in T._anchors(x):
        for b, db in T._anchors(y):
            d = da + T.vdist(a, b) + db
            if best is None or d < best[0]:
                best = (d, a, b)
    d, a, b = best
    pts = [x] + [TreePoint(v) for v in T.vertex_path(a, b)] + [y]
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    return Segment(out, d)


def point_along(T: MetricTree, x: TreePoint, y: TreePoint, t) -> TreePoint:
    """The point of [x, y] at distance t from x."""
    t = as_fraction(t)
    seg = geodesic(T, x, y)
    if t <= 0 or not seg.points:
        return x
    if t >= seg.length:
        return y
    walked = Fraction(0)
    for p, q in zip(seg.points, seg.points[1:]):
        step = T.distance(p, q)
        if walked + step >= t:
            rest = t - walked
            if rest == step:
                return q
            if rest == 0:
                return p
            # p and q lie on a common edge; locate that edge
            a, b = _common_edge(T, p, q)
            pa = T.distance(p, TreePoint(a))
            qa = T.distance(q, TreePoint(a))
            off = pa + rest if qa > pa else pa - rest
            return T.edge_point(a, b, off)
        walked += step
    return y


def _common_edge(T: MetricTree, p: TreePoint, q: TreePoint):
    if p.edge is not None:
        return p.edge
    if q.edge is not None:
        return q.edge
    a, b = p.vertex, q.vertex
    return (a, b) if a < b else (b, a)


def median(T: MetricTree, u: TreePoint, v: TreePoint, w: TreePoint) -> TreePoint:
    """The unique point on all three geodesics between u, v and w."""
    t = (T.distance(u, v) + T.distance(u, w) - T.distance(v, w)) / 2
    return point_along(T, u, v, t)


# ----------------------------------------------------------------- apartments
@dataclass(frozen=True)
class TreeApartment:
    u: int
    v: int
    path: tuple[int, ...]

    @property
    def ends(self) -> frozenset:
        return frozenset((self.u, self.v))

    def reversed(self) -> "TreeApartment":
        return TreeApartment(self.v, self.u, self.path[::-1])


def tree_apartment(T: MetricTree, u: int, v: int) -> TreeApartment:
    if u == v or u not in T.ends or v not in T.ends:
        raise TreeError("an apartment joins two distinct end-flagged leaves")
    return TreeApartment(u, v, tuple(T.vertex_path(u, v)))


def apartments(T: MetricTree) -> list[TreeApartment]:
    """One apartment per unordered pair of ends, oriented from the smaller index."""
    ends = sorted(T.ends)
    return [tree_apartment(T, u, v) for u, v in itertools.combinations(ends, 2)]


def project_to_apartment(T: MetricTree, A: TreeApartment, z: TreePoint) -> TreePoint:
    return median(T, TreePoint(A.u), TreePoint(A.v), z)


def distance_to_apartment(T: MetricTree, A: TreeApartment, z: TreePoint) -> Fraction:
    return T.distance(z, project_to_apartment(T, A, z))


# ------------------------------------------------------------ classification
@dataclass
class StructureReport:
    kind: str  # "0", "I", "II", "inconsistent" or "partial"
    branch_points: list
    ends: list
    boundary: list
    valences: dict
    t: Fraction | None = None
    reasons: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "type": self.kind,
            "branch_points": list(self.branch_points),
            "ends": list(self.ends),
            "boundary": list(self.boundary),
            "valences": {str(k): v for k, v in self.valences.items()},
            "t": None if self.t is None else str(self.t),
            "reasons": list(self.reasons),
        }


def branch_segments(T: MetricTree):
    """Pairs of branch points joined by a path with no branch point inside, with lengths."""
    branch = set(T.branch_points())
    out = []
    for b in sorted(branch):
        for nb in T.adj[b]:
            prev, cur, dist = b, nb, T.adj[b][nb]
            while cur not in branch and T.degree(cur) == 2:
                (nxt,) = [y for y in T.adj[cur] if y != prev]
                dist += T.adj[cur][nxt]
                prev, cur = cur, nxt
            if cur in branch and b < cur:
                out.append((b, cur, dist))
    return out


def leaf_arms(T: MetricTree):
    """(leaf, nearest branch point or None, arm length) for every leaf."""
    branch = set(T.branch_points())
    out = []
    for leaf in T.leaves():
        prev, cur = leaf, next(iter(T.adj[leaf]))
        dist = T.adj[leaf][cur]
        while cur not in branch and T.degree(cur) == 2:
            (nxt,) = [y for y in T.adj[cur] if y != prev]
            dist += T.adj[cur][nxt]
            prev, cur = cur, nxt
        out.append((leaf, cur if cur in branch else None, dist))
    return out


def structure_report(T: MetricTree) -> StructureReport:
    """Classify a faithful truncation as type 0, I, II or inconsistent.

    Type II requires every pair of consecutive branch points to be the same
    distance t apart, and no leaf arm longer than t (a truncated arm of such
    a tree stops before its next branch point).
    """
    ids = T.ids
    branch = T.branch_points()
    rep = StructureReport(
        "partial",
        [ids[b] for b in branch],
        [ids[e] for e in sorted(T.ends)],
        [ids[b] for b in T.boundary_leaves()],
        {ids[b]: T.degree(b) for b in branch},
    )
    if rep.boundary:
        rep.reasons.append("unflagged leaves present; the truncation is not faithful")
        return rep
    if not branch:
        if len(T.ends) == 2:
            rep.kind = "0"
        else:
            rep.kind = "inconsistent"
            rep.reasons.append("no branch point and fewer than two ends")
        return rep
    if len(branch) == 1:
        rep.kind = "I"
        return rep
    segs = branch_segments(T)
    lengths = sorted({d for _, _, d in segs})
    if len(lengths) != 1:
        rep.kind = "inconsistent"
        rep.reasons.append(f"consecutive branch points at distances {[str(x) for x in lengths]}")
        return rep
    t = lengths[0]
    long_arms = [(ids[leaf], str(d)) for leaf, _, d in leaf_arms(T) if d > t]
    if long_arms:
        rep.kind = "inconsistent"
        rep.reasons.append(f"leaf arms longer than the branch spacing {t}: {long_arms}")
        return rep
    rep.kind = "II"
    rep.t = t
    return rep


# ---------------------------------------------------------------- automorphisms
def _centre(T: MetricTree, vertices=None) -> tuple[int, ...]:
    """Centre of the (unweighted) tree on ``vertices`` by repeated leaf removal."""
    alive = set(range(T.n) if vertices is None else vertices)
    deg = {v: sum(1 for y in T.adj[v] if y in alive) for v in alive}
    layer = [v for v in alive if deg[v] <= 1]
    remaining = len(alive)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            alive.discard(v)
            for y in T.adj[v]:
                if y in alive:
                    deg[y] -= 1
                    if deg[y] == 1:
                        nxt.append(y)
        layer = nxt
    return tuple(sorted(alive))


class _Coder:
    """Canonical codes of rooted subtrees, with optional vertex marks."""

    def __init__(self, T: MetricTree, vertices=None, marks=None, flags=True):
        self.T = T
        self.alive = set(range(T.n)) if vertices is None else set(vertices)
        self.marks = marks or {}
        self.flags = flags
        self.memo: dict = {}
        self.centre = _centre(T, self.alive)

    def children(self, v, parent):
        return [y for y in self.T.adj[v] if y != parent and y in self.alive]

    def code(self, v, parent):
        key = (v, parent)
        if key not in self.memo:
            kids = sorted((self.T.adj[v][c], self.code(c, v)) for c in self.children(v, parent))
            flag = 1 if (self.flags and v in self.T.ends) else 0
            self.memo[key] = (self.marks.get(v, -1), flag, tuple(kids))
        return self.memo[key]

    def classes(self, v, parent):
        """Children grouped by (edge length, code), in canonical order."""
        groups: dict = {}
        for c in self.children(v, parent):
            groups.setdefault((self.T.adj[v][c], self.code(c, v)), []).append(c)
        return [sorted(groups[k]) for k in sorted(groups)]

    def roots(self):
        """[(root, parent)] plus whether the two halves of a central edge may swap."""
        if len(self.centre) == 1:
            return [(self.centre[0], None)], False
        a, b = self.centre
        return [(a, b), (b, a)], self.code(a, b) == self.code(b, a)

    def iso(self, a, pa, b, pb, out):
        """Extend ``out`` by the canonical isomorphism of subtree a onto subtree b."""
        out[a] = b
        for ca, cb in zip(self.classes(a, pa), self.classes(b, pb)):
            for x, y in zip(ca, cb):
                self.iso(x, a, y, b, out)
        return out

    def walk(self):
        """(vertex, parent) pairs of the rooted structure."""
        roots, _ = self.roots()
        stack = list(roots)
        while stack:
            v, p = stack.pop()
            yield v, p
            stack.extend((c, v) for c in self.children(v, p))

    def fixed(self):
        """Vertices fixed by every automorphism preserving codes (and marks)."""
        roots, swap = self.roots()
        if swap:
            return set()
        fixed = set()
        stack = list(roots)
        while stack:
            v, p = stack.pop()
            fixed.add(v)
            for cls in self.classes(v, p):
                if len(cls) == 1:
                    stack.append((cls[0], v))
        return fixed

    def order(self) -> int:
        roots, swap = self.roots()
        total = 2 if swap else 1
        for v, p in self.walk():
            for cls in self.classes(v, p):
                total *= math.factorial(len(cls))
        return total


@dataclass
class TreeAutGroup:
    tree: MetricTree
    generators: list[tuple[int, ...]]
    order: int
    vertices: tuple[int, ...]

    def fixed_set(self, marks=()) -> set[int]:
        """Vertices fixed by the stabiliser of ``marks`` (pointwise)."""
        return _fixed_set(self.tree, self.vertices, marks, flags=self._flags)

    _flags: bool = True


def tree_automorphisms(T: MetricTree, vertices=None, flags: bool = True) -> TreeAutGroup:
    """Generators and order of the length- and flag-preserving automorphism group.

    ``vertices`` restricts to an induced subtree (flags are then usually ignored).
    """
    C = _Coder(T, vertices, flags=flags)
    verts = tuple(sorted(C.alive))
    gens = []
    roots, swap = C.roots()

    def perm_from(mapping):
        full = {v: v for v in verts}
        full.update(mapping)
        return tuple(full[v] for v in verts)

    for v, p in C.walk():
        for cls in C.classes(v, p):
            for x, y in zip(cls, cls[1:]):
                m = {}
                C.iso(x, v, y, v, m)
                C.iso(y, v, x, v, m)
                gens.append(perm_from(m))
    if swap:
        (a, b), (b2, a2) = roots
        m = {}
        C.iso(a, b, b, a, m)
        C.iso(b, a, a, b, m)
        gens.append(perm_from(m))
    G = TreeAutGroup(T, gens, C.order(), verts)
    G._flags = flags
    return G


def _fixed_set(T, vertices, marks, flags=True) -> set[int]:
    mk = {v: k for k, v in enumerate(marks)}
    return _Coder(T, vertices, mk, flags).fixed()


def random_automorphism(T: MetricTree, rng: random.Random | None = None) -> list[int]:
    """A uniformly random automorphism of T, as a list image[v]."""
    rng = rng or random.Random()
    C = _Coder(T)
    roots, swap = C.roots()
    image = {}
    if len(roots) == 1:
        pairs = [(roots[0], roots[0])]
    elif swap and rng.random() < 0.5:
        pairs = [(roots[0], roots[1]), (roots[1], roots[0])]
    else:
        pairs = [(roots[0], roots[0]), (roots[1], roots[1])]
    stack = list(pairs)
    while stack:
        (a, pa), (b, pb) = stack.pop()
        image[a] = b
        for ca, cb in zip(C.classes(a, pa), C.classes(b, pb)):
            cb = cb[:]
            rng.shuffle(cb)
            for x, y in zip(ca, cb):
                stack.append(((x, a), (y, b)))
    return [image[v] for v in range(T.n)]


def is_tree_automorphism(T: MetricTree, image) -> bool:
    if sorted(image) != list(range(T.n)):
        return False
    for a, b, length in T.edges():
        x, y = image[a], image[b]
        if T.adj[x].get(y) != length:
            return False
    return all((image[v] in T.ends) == (v in T.ends) for v in range(T.n))


# ----------------------------------------------------------- recovery criteria
CAVEAT = (
    "the isolation and adjacency criteria concern the full infinite tree; "
    "they are checked here against automorphisms of finite truncations"
)


@dataclass
class RecoveryReport:
    mode: str
    isolated: dict  # vertex id -> bool
    artifacts: list  # leaves, excluded as truncation artifacts
    pairs: list  # (x, y, criterion says adjacent, directly adjacent)
    agreements: int
    disagreements: int
    isolation_matches_branching: bool
    vacuous: bool
    caveat: str = CAVEAT

    @property
    def ok(self) -> bool:
        return self.disagreements == 0 and self.isolation_matches_branching

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "isolated": {str(k): v for k, v in self.isolated.items()},
            "artifacts": [str(a) for a in self.artifacts],
            "pairs": [[str(x), str(y), c, d] for x, y, c, d in self.pairs],
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "isolation_matches_branching": self.isolation_matches_branching,
            "vacuous": self.vacuous,
            "caveat": self.caveat,
        }


def _complete_radius(T: MetricTree, core) -> int:
    """Largest R such that every vertex within hop distance < R of ``core`` is a non-leaf."""
    hop = {v: min(T.hop(c, v) for c in core) for v in range(T.n)}
    leaf_hops = [0 if v in core else hop[v] for v in T.leaves()]
    return min(leaf_hops) if leaf_hops else max(hop.values())


def _region(T: MetricTree, core, radius: int):
    return [v for v in range(T.n) if min(T.hop(c, v) for c in core) <= radius]


def local_fixed_set(T: MetricTree, core, marks) -> set[int]:
    """Fixed set of the mark-stabiliser in the automorphism group of the complete ball around ``core``."""
    R = _complete_radius(T, core)
    return _fixed_set(T, _region(T, core, R), marks, flags=False)


def consecutive_branch_points(T: MetricTree, x: int, y: int) -> bool:
    branch = set(T.branch_points())
    return x != y and not any(v in branch for v in T.vertex_path(x, y)[1:-1])


def verify_recovery_criteria(T: MetricTree, mode: str = "local") -> RecoveryReport:
    """Check isolation and the fixed-branch-point adjacency criterion.

    ``mode="local"`` uses, for each vertex or pair, the automorphisms of the
    largest ball (or path neighbourhood) free of leaves in its interior.
    ``mode="global"`` uses the automorphism group of the whole truncation,
    which always fixes the centre.
    """
    if mode not in ("local", "global"):
        raise TreeError(f"unknown mode {mode!r}")
    ids = T.ids
    leaves = set(T.leaves())
    branch = T.branch_points()

    def fixed(core, marks):
        if mode == "global":
            return _fixed_set(T, None, marks)
        return local_fixed_set(T, core, marks)

    isolated = {}
    for x in range(T.n):
        if x in leaves:
            continue
        isolated[ids[x]] = fixed([x], [x]) == {x}
    bset = set(branch)
    matches = all(isolated[ids[x]] == (x in bset) for x in range(T.n) if x not in leaves)
    pairs = []
    agree = disagree = 0
    for x, y in itertools.combinations(branch, 2):
        fb = fixed(T.vertex_path(x, y), [x, y]) & bset
        crit = fb == {x, y}
        direct = consecutive_branch_points(T, x, y)
        pairs.append((ids[x], ids[y], crit, direct))
        if crit == direct:
            agree += 1
        else:
            disagree += 1
    return RecoveryReport(
        mode, isolated, [ids[v] for v in sorted(leaves)], pairs, agree, disagree,
        matches, vacuous=not branch,
    )


# ------------------------------------------------------------------ common ends
@dataclass
class CommonEndReport:
    ends: list  # ends common to every apartment whose leaf lies in the intersection
    artifacts: list  # leaves inside the intersection that are not common ends
    bounded: bool
    empty: bool
    diameter: Fraction | None


def _edge_interval(T, A: TreeApartment, a, b, r):
    """Offsets s in [0, L] along (a, b) with distance < r to A, as (lo, hi, lo_open, hi_open) or None."""
    L = T.adj[a][b]
    on = set(A.path)
    if a in on and b in on:
        return (Fraction(0), L, False, False)
    da = distance_to_apartment(T, A, TreePoint(a))
    db = distance_to_apartment(T, A, TreePoint(b))
    if da <= db:  # distance grows from a: da + s < r
        hi = r - da
        if hi <= 0:
            return None
        return (Fraction(0), min(hi, L), False, hi <= L)
    lo = L - (r - db)
    if lo >= L:
        return None
    return (max(lo, Fraction(0)), L, lo >= 0, False)


def common_end(T: MetricTree, F: list[TreeApartment], r) -> CommonEndReport:
    """The set of points within distance < r of every apartment in F.

    Ends shared by all of F whose leaves lie in the set are reported as
    common ends; other leaves in it are truncation artifacts.  Without a
    common end the set is bounded and its diameter is reported.
    """
    if not F:
        raise TreeError("empty family of apartments")
    r = as_fraction(r)
    shared = frozenset.intersection(*(A.ends for A in F))
    pieces = []
    for a, b, _ in T.edges():
        lo, hi, lo_open, hi_open = Fraction(0), T.adj[a][b], False, False
        ok = True
        for A in F:
            iv = _edge_interval(T, A, a, b, r)
            if iv is None:
                ok = False
                break
            l2, h2, lo2, ho2 = iv
            if l2 > lo or (l2 == lo and lo2):
                lo, lo_open = l2, lo2
            if h2 < hi or (h2 == hi and ho2):
                hi, hi_open = h2, ho2
        if not ok or lo > hi or (lo == hi and (lo_open or hi_open)):
            continue
        pieces.append((a, b, lo, hi, lo_open, hi_open))
    inside_leaves = set()
    for a, b, lo, hi, lo_open, hi_open in pieces:
        if lo == 0 and not lo_open and T.degree(a) == 1:
            inside_leaves.add(a)
        if hi == T.adj[a][b] and not hi_open and T.degree(b) == 1:
            inside_leaves.add(b)
    ends = sorted(v for v in inside_leaves if v in shared)
    artifacts = sorted(v for v in inside_leaves if v not in shared)
    if not pieces:
        return CommonEndReport([], [], True, True, None)
    extremes = []
    for a, b, lo, hi, _, _ in pieces:
        extremes.append(T.edge_point(a, b, lo))
        extremes.append(T.edge_point(a, b, hi))
    diam = max(T.distance(p, q) for p in extremes for q in extremes)
    return CommonEndReport(
        [T.ids[v] for v in ends], [T.ids[v] for v in artifacts], not ends, False, diam
    )


# ------------------------------------------------------------------- builders
def cone_tree(labels, radius=1) -> MetricTree:
    """Star with one end-flagged leaf per label at distance ``radius`` from the centre."""
    labels = list(labels)
    if len(labels) < 2:
        raise TreeError("a cone tree needs at least two ends")
    centre = "o"
    while centre in labels:
        centre += "'"
    r = as_fraction(radius)
    return MetricTree([centre] + labels, [(centre, x, r) for x in labels], labels)


def regular_tree(k: int, depth: int, edge_length=1) -> MetricTree:
    """Ball of the k-regular tree around a vertex, leaves flagged as ends."""
    if k < 2 or depth < 1:
        raise TreeError("need k >= 2 and depth >= 1")
    length = as_fraction(edge_length)
    vertices = [0]
    edges = []
    frontier = [0]
    for d in range(depth):
        nxt = []
        for v in frontier:
            for _ in range(k if v == 0 else k - 1):
                w = len(vertices)
                vertices.append(w)
                edges.append((v, w, length))
                nxt.append(w)
        frontier = nxt
    return MetricTree(vertices, edges, frontier)


def h_tree() -> MetricTree:
    """Branch points x, y at distance 1; x carries ends u, v at length 1, y carries w, z at length 2."""
    one, two = Fraction(1), Fraction(2)
    return MetricTree(
        ["x", "y", "u", "v", "w", "z"],
        [("x", "y", one), ("x", "u", one), ("x", "v", one), ("y", "w", two), ("y", "z", two)],
        ["u", "v", "w", "z"],
    )


def path_tree(length=5, pieces: int = 1) -> MetricTree:
    """A segment of the given length cut into ``pieces`` equal edges, both leaves ends."""
    step = as_fraction(length) / pieces
    vs = list(range(pieces + 1))
    return MetricTree(vs, [(i, i + 1, step) for i in range(pieces)], [0, pieces])
