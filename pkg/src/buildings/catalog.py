"""Standard small buildings used by the tests, scripts and CLI."""

from __future__ import annotations

import itertools

from .building import Building, building_from_incidence, coxeter_complex, join, rank_one_building
from .coxeter import dihedral, new_coxeter_system


def fano_geometry():
    """PG(2,2): points Z/7, lines {i, i+1, i+3}."""
    points = list(range(7))
    lines = [sorted({i, (i + 1) % 7, (i + 3) % 7}) for i in range(7)]
    return points, lines


def gq22_geometry():
    """W(2): points are 2-subsets of {0..5}, lines are partitions into three 2-subsets."""
    pts = [frozenset(p) for p in itertools.combinations(range(6), 2)]
    index = {p: k for k, p in enumerate(pts)}
    lines = set()
    for a, b, c in itertools.combinations(pts, 3):
        if len(a | b | c) == 6:
            lines.add(tuple(sorted((index[a], index[b], index[c]))))
    return list(range(len(pts))), sorted(lines)


def digon_geometry(n_points=3, n_lines=3):
    points = list(range(n_points))
    return points, [points[:] for _ in range(n_lines)]


def fano() -> Building:
    return building_from_incidence(*fano_geometry(), 3)


def gq22() -> Building:
    return building_from_incidence(*gq22_geometry(), 4)


def digon(n_points=3, n_lines=3) -> Building:
    return building_from_incidence(*digon_geometry(n_points, n_lines), 2)


def thin_hexagon() -> Building:
    return coxeter_complex(dihedral(3))


def thin_square() -> Building:
    return coxeter_complex(dihedral(2))


def a1(n=2) -> Building:
    return rank_one_building(n)


def fano_collineation(B: Building, shift: int = 1):
    """Chamber map of the collineation x -> x + shift (mod 7) on the Fano flag building."""
    _, lines = fano_geometry()
    line_index = {tuple(l): k for k, l in enumerate(lines)}
    index = {lab: n for n, lab in enumerate(B.labels)}
    out = []
    for p, k in B.labels:
        q = (p + shift) % 7
        l2 = tuple(sorted((x + shift) % 7 for x in lines[k]))
        out.append(index[(q, line_index[l2])])
    return out


def fano_polarity(B: Building):
    """Type-swapping automorphism of the Fano flag building.

    Uses the difference set {0, 1, 3}: point x maps to the line
    L_{-x} = {-x, 1-x, 3-x} and line L_k to point -k.  Incidence is
    preserved because x in L_k iff x - k in {0,1,3} iff -k in L_{-x}.
    """
    _, lines = fano_geometry()
    line_of_start = {k: k for k in range(7)}  # lines[k] = {k, k+1, k+3}
    index = {lab: n for n, lab in enumerate(B.labels)}
    out = []
    for p, k in B.labels:
        new_point = (-k) % 7
        new_line = line_of_start[(-p) % 7]
        out.append(index[(new_point, new_line)])
    return out, [1, 0]


def a2_matrix():
    return [[1, 3], [3, 1]]


def coxeter(name: str):
    """A few named Coxeter matrices."""
    table = {
        "A1": [[1]],
        "A2": a2_matrix(),
        "B2": [[1, 4], [4, 1]],
        "G2": [[1, 6], [6, 1]],
        "A1xA1": [[1, 2], [2, 1]],
        "A3": [[1, 3, 2], [3, 1, 3], [2, 3, 1]],
        "B3": [[1, 4, 2], [4, 1, 3], [2, 3, 1]],
        "H3": [[1, 5, 2], [5, 1, 3], [2, 3, 1]],
        "A2xA1": [[1, 3, 2], [3, 1, 2], [2, 2, 1]],
    }
    return new_coxeter_system(table[name])


__all__ = [
    "fano", "gq22", "digon", "thin_hexagon", "thin_square", "a1", "join",
    "fano_geometry", "gq22_geometry", "digon_geometry", "fano_collineation", "fano_polarity",
]
