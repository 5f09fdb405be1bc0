"""Euclidean cones over spherical buildings.

Points of |B| are carried by simplices with barycentric coordinates.
Geometry is always read through an apartment chart: an apartment through
the relevant chambers is identified with the Coxeter complex by
x -> delta(base, x), and the chart places chamber w at w * C.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .building import (
    Apartment,
    Building,
    BuildingError,
    SimplexRef,
    is_automorphism,
    join,
    rank_one_building,
    thickness_report,
)
from .coxeter import SphericalChart, new_coxeter_system, spherical_chart
from .rtree import MetricTree, cone_tree

COORD_TOL = 1e-12
METRIC_TOL = 1e-9


@dataclass(frozen=True)
class RealizedPoint:
    """Point of |B|: a carrier simplex and positive barycentric coordinates over its vertex types."""

    carrier: SimplexRef
    coords: tuple[float, ...]

    def to_json(self) -> dict:
        return {"carrier": self.carrier.to_json(), "coords": list(self.coords)}


def realized_point(B: Building, carrier: SimplexRef, coords) -> RealizedPoint:
    """Validate and canonicalize: zero coordinates shrink the carrier to a face."""
    types = carrier.types(B.rank)
    coords = [float(x) for x in coords]
    if len(coords) != len(types):
        raise BuildingError(f"carrier has {len(types)} vertices, got {len(coords)} coordinates")
    if any(x < -COORD_TOL for x in coords) or abs(sum(coords) - 1) > COORD_TOL * max(1, len(coords)):
        raise BuildingError("barycentric coordinates must be nonnegative and sum to 1")
    keep = [(k, x) for k, x in zip(types, coords) if x > COORD_TOL]
    if not keep:
        raise BuildingError("all coordinates vanish")
    if len(keep) < len(types):
        J = frozenset(range(B.rank)) - {k for k, _ in keep}
        carrier = B.simplex(carrier.chamber, J)
    total = sum(x for _, x in keep)
    return RealizedPoint(carrier, tuple(x / total for _, x in keep))


def vertex_point(B: Building, c: int, k: int) -> RealizedPoint:
    return RealizedPoint(B.vertex(c, k), (1.0,))


@dataclass(frozen=True)
class ConePoint:
    """Point (p, s) of the cone; radius 0 is the apex, stored with ``point=None``."""

    point: RealizedPoint | None
    radius: float

    @property
    def is_apex(self) -> bool:
        return self.point is None

    def to_json(self) -> dict:
        if self.point is None:
            return {"carrier": None, "coords": [], "radius": 0.0}
        d = self.point.to_json()
        d["radius"] = self.radius
        return d


APEX = ConePoint(None, 0.0)


def cone_point(p: RealizedPoint | None, s: float) -> ConePoint:
    if s < 0:
        raise BuildingError("cone radius must be nonnegative")
    if s == 0 or p is None:
        return APEX
    return ConePoint(p, float(s))


def cone_point_from_json(B: Building, obj) -> ConePoint:
    if obj.get("carrier") is None or float(obj["radius"]) == 0:
        return APEX
    car = obj["carrier"]
    ref = B.simplex(int(car["chamber"]), car["cotype"])
    return cone_point(realized_point(B, ref, obj["coords"]), float(obj["radius"]))


# ------------------------------------------------------------------ charts
def chart_vector(B: Building, chart: SphericalChart, A: Apartment, base: int, p: RealizedPoint) -> np.ndarray:
    """Unit vector of p in the model sphere through apartment A based at chamber ``base``."""
    x = next((c for c in B.chambers_of(p.carrier) if c in A), None)
    if x is None:
        raise BuildingError("carrier of the point is not in the apartment")
    w = B.delta(base, x)
    return chart.point(w, p.carrier.types(B.rank), p.coords)


def cone_vector(B: Building, chart: SphericalChart, A: Apartment, base: int, P: ConePoint) -> np.ndarray:
    if P.is_apex:
        return np.zeros(B.rank)
    return P.radius * chart_vector(B, chart, A, base, P.point)


def angle(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between unit vectors, accurate near 0 and pi."""
    return 2.0 * math.atan2(float(np.linalg.norm(u - v)), float(np.linalg.norm(u + v)))


def spherical_distance(B: Building, chart: SphericalChart, p: RealizedPoint, q: RealizedPoint,
                       chambers: tuple[int, int] | None = None) -> float:
    """Angle between p and q read in an apartment through carrier chambers of both.

    ``chambers`` picks the carrier chambers (default: the least ones); any
    choice gives the same value.
    """
    if p == q:
        return 0.0
    cp, cq = chambers if chambers is not None else (p.carrier.chamber, q.carrier.chamber)
    if cp not in B.chambers_of(p.carrier) or cq not in B.chambers_of(q.carrier):
        raise BuildingError("chosen chambers do not carry the points")
    A = B.apartment_containing(cp, cq)
    u = chart_vector(B, chart, A, cp, p)
    v = chart_vector(B, chart, A, cp, q)
    return angle(u, v)


def cone_distance(B: Building, chart: SphericalChart, P: ConePoint, Q: ConePoint) -> float:
    """Law of cosines, written as (s-t)^2 + 4st sin^2(theta/2) for stability."""
    if P.is_apex:
        return Q.radius
    if Q.is_apex:
        return P.radius
    s, t = P.radius, Q.radius
    theta = spherical_distance(B, chart, P.point, Q.point)
    return math.sqrt((s - t) ** 2 + 4 * s * t * math.sin(theta / 2) ** 2)


@dataclass
class ConeSpace:
    """Distance handle for cone points, for use with the coarse tools."""

    building: Building
    chart: SphericalChart

    def distance(self, P: ConePoint, Q: ConePoint) -> float:
        return cone_distance(self.building, self.chart, P, Q)


def building_chart(B: Building) -> SphericalChart:
    return spherical_chart(B.W)


# ------------------------------------------------------------------ sampling
def random_realized_point(B: Building, rng: random.Random, chamber: int | None = None,
                          full: bool | None = None) -> RealizedPoint:
    """Random point; by default carried by a random face of a random chamber."""
    c = rng.randrange(B.n) if chamber is None else chamber
    if full or (full is None and rng.random() < 0.5):
        types = list(range(B.rank))
    else:
        k = rng.randint(1, B.rank)
        types = sorted(rng.sample(range(B.rank), k))
    weights = [rng.expovariate(1.0) + 1e-6 for _ in types]
    total = sum(weights)
    J = frozenset(range(B.rank)) - set(types)
    return RealizedPoint(B.simplex(c, J), tuple(w / total for w in weights))


def random_cone_point(B: Building, rng: random.Random, max_radius: float = 3.0,
                      chamber: int | None = None) -> ConePoint:
    return cone_point(random_realized_point(B, rng, chamber), rng.uniform(0.05, max_radius))


# ---------------------------------------------------------------- isometries
@dataclass
class ConeIsometry:
    building: Building
    chamber_map: list[int]
    type_map: list[int]
    distortion: float
    samples: int

    def map_point(self, p: RealizedPoint) -> RealizedPoint:
        B = self.building
        types = p.carrier.types(B.rank)
        new_types = [self.type_map[k] for k in types]
        J = frozenset(self.type_map[j] for j in p.carrier.cotype)
        carrier = B.simplex(self.chamber_map[p.carrier.chamber], J)
        coords = tuple(x for _, x in sorted(zip(new_types, p.coords)))
        return RealizedPoint(carrier, coords)

    def __call__(self, P: ConePoint) -> ConePoint:
        if P.is_apex:
            return APEX
        return ConePoint(self.map_point(P.point), P.radius)


def cone_isometry(B: Building, chart: SphericalChart, chamber_map, type_map=None,
                  samples: int = 1000, seed: int = 0) -> ConeIsometry:
    """Extend a building automorphism to the cone and measure distance distortion on samples."""
    type_map = list(range(B.rank)) if type_map is None else list(type_map)
    phi = list(chamber_map)
    if not is_automorphism(B, phi, type_map):
        raise BuildingError("chamber map is not an automorphism")
    iso = ConeIsometry(B, phi, type_map, 0.0, samples)
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        P, Q = random_cone_point(B, rng), random_cone_point(B, rng)
        d0 = cone_distance(B, chart, P, Q)
        d1 = cone_distance(B, chart, iso(P), iso(Q))
        worst = max(worst, abs(d0 - d1))
    iso.distortion = worst
    return iso


# ----------------------------------------------------------------- wall trees
def cone_wall_tree(B: Building, a: SimplexRef, b: SimplexRef, radius=1) -> MetricTree:
    """Star tree with one end per chamber of Res(a), for opposite panels a and b."""
    if len(a.cotype) != 1 or len(b.cotype) != 1:
        raise BuildingError("wall trees are defined for panels")
    if not B.are_opposite(a, b):
        raise BuildingError("panels are not opposite")
    return cone_tree([f"c{c}" for c in B.chambers_of(a)], radius)


# ------------------------------------------------------------ thick points
def residue_building(B: Building, a: SimplexRef) -> Building:
    """Res(a) as a building of type cotype(a)."""
    J = sorted(a.cotype)
    if not J:
        raise BuildingError("a chamber has an empty residue")
    chambers = list(B.chambers_of(a))
    index = {c: k for k, c in enumerate(chambers)}
    W = new_coxeter_system([[B.W.m(i, j) for j in J] for i in J], [B.W.labels[i] for i in J])
    panels = []
    for i in J:
        seen = set()
        ps = []
        for c in chambers:
            p = B.panel(c, i)
            if p in seen:
                continue
            seen.add(p)
            ps.append([index[x] for x in p])
        panels.append(ps)
    return Building(W, chambers, panels, validate=False)


def direction_building(B: Building, p: RealizedPoint) -> Building:
    """Residue at a non-apex cone point: the radial S^0 joined with Res(carrier)."""
    radial = rank_one_building(2, "radial")
    if not p.carrier.cotype:
        return radial
    return join(radial, residue_building(B, p.carrier))


@dataclass
class ApexReport:
    apex_thick: bool
    samples: int
    thick_samples: int
    ok: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return self.__dict__.copy()


def apex_is_unique_thick_point(B: Building, chart: SphericalChart | None = None,
                               samples: int = 200, seed: int = 0) -> ApexReport:
    """The apex residue is B; sampled non-apex points have residues with a thin radial factor.

    A non-thick input gives a report with ``ok`` false instead of raising.
    """
    rng = random.Random(seed)
    apex_thick = thickness_report(B).is_thick
    notes = []
    if not apex_thick:
        notes.append("B is not thick, so the apex residue is not thick")
    if len(B.W.components()) > 1:
        notes.append("B is reducible")
    thick = 0
    for _ in range(samples):
        p = random_realized_point(B, rng)
        X = direction_building(B, p)
        if thickness_report(X).is_thick:
            thick += 1
    if thick:
        notes.append(f"{thick} sampled non-apex points have thick residues")
    return ApexReport(apex_thick, samples, thick, apex_thick and thick == 0, notes)
