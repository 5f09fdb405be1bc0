"""Finite-sample coarse geometry on trees and cones.

Unbounded quantifiers are replaced by exhaustive checks over finite
samples.  Any object with a ``distance(p, q)`` method serves as a space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .rtree import MetricTree, TreeApartment, TreeError, TreePoint, apartments


class CoarseError(ValueError):
    pass


# ------------------------------------------------------------------- Hausdorff
def directed_distance(space, U, V):
    """sup over u in U of the distance from u to V."""
    return max(min(space.distance(u, v) for v in V) for u in U)


def hausdorff_distance(space, U, V):
    U, V = list(U), list(V)
    if not U or not V:
        raise CoarseError("Hausdorff distance needs nonempty sets")
    return max(directed_distance(space, U, V), directed_distance(space, V, U))


def dominates(space, U, V, r) -> bool:
    """True iff U lies in the open r-neighbourhood of V."""
    U, V = list(U), list(V)
    if not U or not V:
        raise CoarseError("domination needs nonempty sets")
    return all(min(space.distance(u, v) for v in V) < r for u in U)


# ------------------------------------------------------------------ sampled maps
@dataclass
class SampledMap:
    pairs: list[tuple[Any, Any]]
    source: Any
    target: Any

    def __post_init__(self):
        srcs = [p for p, _ in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise CoarseError("sample sources must be distinct")

    def image(self, points=None):
        if points is None:
            return [q for _, q in self.pairs]
        lookup = dict(self.pairs)
        return [lookup[p] for p in points]

    def compose(self, other: "SampledMap") -> "SampledMap":
        """other after self, on the samples whose images are sources of ``other``."""
        lookup = dict(other.pairs)
        pairs = [(p, lookup[q]) for p, q in self.pairs if q in lookup]
        return SampledMap(pairs, self.source, other.target)


@dataclass
class ControlFit:
    c: Any
    d: Any
    violations: list = field(default_factory=list)
    unit_slope_offset: Any = None
    scale: Any = None


def controlled_fit(f: SampledMap) -> ControlFit:
    """Fit rho(t) = c t + d with c >= 1, d >= 0 bounding all sampled distances.

    (c, d) minimizes rho at the sample diameter D; among the minimizers the
    one with least d is returned.  The objective c D + d(c) is nondecreasing
    in c, so the minimizers form an interval [1, c*] and c* has a closed form.
    """
    if len(f.pairs) < 2:
        raise CoarseError("need at least two samples")
    data = []
    for (x, fx), (y, fy) in itertools.combinations(f.pairs, 2):
        data.append((f.source.distance(x, y), f.target.distance(fx, fy)))
    exact = all(isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)) for a, b in data)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    D = max(a for a, _ in data)
    d1 = max(zero, max(b - a for a, b in data))
    if D == 0:
        return ControlFit(one, d1, [], d1, D)
    c_star = one + d1 / D
    for a, b in data:
        if a < D:
            c_star = min(c_star, (d1 + D - b) / (D - a))
    c_star = max(one, c_star)
    d_star = max(zero, max(b - c_star * a for a, b in data))
    tol = 0 if exact else 1e-12 * max(1.0, float(D))
    violations = [(a, b) for a, b in data if b > c_star * a + d_star + tol]
    return ControlFit(c_star, d_star, violations, d1, D)


# --------------------------------------------------------------- Morse matching
@dataclass
class MatchReport:
    best: TreeApartment
    distance: Any
    runner_up: Any  # math.inf when the target has a single apartment
    minimizers: list[TreeApartment]

    @property
    def margin(self):
        return self.runner_up - self.distance if self.runner_up != math.inf else math.inf


class _TreeSpace:
    def __init__(self, T: MetricTree):
        self.T = T

    def distance(self, p, q):
        return self.T.distance(p, q)


def tree_space(T: MetricTree) -> _TreeSpace:
    return _TreeSpace(T)


def _vertex_row(T: MetricTree, p: TreePoint):
    """Exact distances from p to every vertex, as (integer numerators, common denominator)."""
    row = [T.distance(p, TreePoint(v)) for v in range(T.n)]
    den = 1
    for x in row:
        den = math.lcm(den, x.denominator)
    return np.array([int(x * den) for x in row], dtype=np.int64), den


class MorseMatcher:
    """Reusable matcher against all apartments of a target tree.

    Apartments of T2 are compared through their vertex sets.
    """

    def __init__(self, T2: MetricTree):
        self.T2 = T2
        self.apartments = apartments(T2)
        if not self.apartments:
            raise CoarseError("target tree has no apartments")
        mask = np.zeros((len(self.apartments), T2.n), dtype=bool)
        for k, A in enumerate(self.apartments):
            mask[k, list(A.path)] = True
        self.mask = mask
        self._rows: dict = {}

    def _matrix(self, points):
        rows = []
        for p in points:
            if p not in self._rows:
                self._rows[p] = _vertex_row(self.T2, p)
            rows.append(self._rows[p])
        den = 1
        for _, d in rows:
            den = math.lcm(den, d)
        return np.stack([r * (den // d) for r, d in rows]), den

    def match(self, points) -> MatchReport:
        points = list(points)
        if not points:
            raise CoarseError("no image samples")
        M, den = self._matrix(points)
        big = np.iinfo(np.int64).max // 4
        # dist from each sample to each apartment vertex set: min over masked columns
        masked = np.where(self.mask[None, :, :], M[:, None, :], big)  # samples x apts x vertices
        to_apt = masked.min(axis=2)  # samples x apts
        forward = to_apt.max(axis=0)
        nearest = M.min(axis=0)  # each vertex to its nearest sample
        backward = np.where(self.mask, nearest[None, :], -1).max(axis=1)
        H = np.maximum(forward, backward)
        order = np.argsort(H, kind="stable")
        best_val = H[order[0]]
        minimizers = [self.apartments[k] for k in order if H[k] == best_val]
        rest = [H[k] for k in order if H[k] != best_val]
        runner = Fraction(int(rest[0]), den) if rest else math.inf
        if len(minimizers) > 1:
            runner = Fraction(int(best_val), den)
        return MatchReport(self.apartments[order[0]], Fraction(int(best_val), den), runner, minimizers)


def morse_match(T1: MetricTree, T2: MetricTree, f: SampledMap, A: TreeApartment,
                matcher: MorseMatcher | None = None) -> MatchReport:
    """Apartment of T2 nearest in Hausdorff distance to the image of A's vertices."""
    lookup = dict(f.pairs)
    missing = [v for v in A.path if TreePoint(v) not in lookup]
    if missing:
        raise CoarseError(f"samples do not cover apartment vertices {[T1.ids[v] for v in missing]}")
    matcher = matcher or MorseMatcher(T2)
    return matcher.match([lookup[TreePoint(v)] for v in A.path])


# ------------------------------------------------------------- induced end maps
@dataclass
class EndMapResult:
    ok: bool
    end_map: dict | None  # end id in T1 -> end id in T2
    certificate: tuple | None = None
    reason: str = ""


def induced_end_map(T1: MetricTree, T2: MetricTree, apartment_map) -> EndMapResult:
    """End bijection induced by a bijection between apartments, if sharing ends is preserved.

    ``apartment_map`` maps ordered apartments (or end pairs) of T1 to those of
    T2.  A failure carries a certificate: a pair of apartments whose
    end-sharing is not preserved, or an end whose family has no common image end.
    """
    amap = {}
    for A, B in dict(apartment_map).items():
        a_key = A if isinstance(A, TreeApartment) else tuple(A)
        b_key = B if isinstance(B, TreeApartment) else tuple(B)
        a_ord = (a_key.u, a_key.v) if isinstance(a_key, TreeApartment) else a_key
        b_ord = (b_key.u, b_key.v) if isinstance(b_key, TreeApartment) else b_key
        amap[frozenset(a_ord)] = (a_ord, b_ord)
    src = {A.ends for A in apartments(T1)}
    tgt = {A.ends for A in apartments(T2)}
    if set(amap) != src:
        raise CoarseError("apartment map is not total on the apartments of T1")
    images = [frozenset(b) for _, b in amap.values()]
    if len(set(images)) != len(images) or set(images) != tgt:
        raise CoarseError("apartment map is not a bijection")
    keys = sorted(amap, key=sorted)
    img = {k: frozenset(amap[k][1]) for k in keys}
    for A, B in itertools.combinations(keys, 2):
        if bool(A & B) != bool(img[A] & img[B]):
            return EndMapResult(False, None, (_ids(T1, A), _ids(T1, B)),
                                "end sharing not preserved")
    end_map = {}
    for u in sorted(T1.ends):
        fam = [k for k in keys if u in k]
        common = frozenset.intersection(*(img[k] for k in fam))
        if len(fam) == 1:
            # two ends only: use the orientation of the pair
            (a_ord, b_ord) = amap[fam[0]]
            common = frozenset({b_ord[a_ord.index(u)]})
        if len(common) != 1:
            return EndMapResult(False, None, (T1.ids[u], [_ids(T1, k) for k in fam]),
                                "apartments through an end have no unique common image end")
        (e,) = common
        end_map[u] = e
    if len(set(end_map.values())) != len(end_map):
        return EndMapResult(False, None, None, "induced end map is not injective")
    for k in keys:
        a_ord, b_ord = amap[k]
        if frozenset(end_map[x] for x in a_ord) != frozenset(b_ord):
            return EndMapResult(False, None, (_ids(T1, k),), "apartment image disagrees with its ends")
    return EndMapResult(True, {T1.ids[u]: T2.ids[e] for u, e in end_map.items()})


def _ids(T, key):
    return tuple(sorted(T.ids[x] for x in key))


def apartment_map_from_isometry(T1: MetricTree, T2: MetricTree, image) -> dict:
    """Apartment map (u, v) -> (g u, g v) of a vertex bijection sending ends to ends."""
    out = {}
    for A in apartments(T1):
        gu, gv = image[A.u], image[A.v]
        if gu not in T2.ends or gv not in T2.ends:
            raise TreeError("map does not send ends to ends")
        out[(A.u, A.v)] = (gu, gv)
    return out


def perturbed_isometry(T: MetricTree, image, eps, rng, steps: int = 8) -> SampledMap:
    """Vertex samples of the automorphism ``image``, each moved by at most eps along an edge.

    Offsets are multiples of eps / (steps // 2), so they stay exact.
    """
    eps = Fraction(eps)
    half = max(1, steps // 2)
    pairs = []
    for v in range(T.n):
        w = image[v]
        nb = rng.choice(sorted(T.adj[w]))
        off = eps * Fraction(rng.randint(0, half), half)
        if off > T.adj[w][nb]:
            raise CoarseError("perturbation exceeds an edge length")
        pairs.append((TreePoint(v), T.edge_point(w, nb, off)))
    S = tree_space(T)
    return SampledMap(pairs, S, S)
