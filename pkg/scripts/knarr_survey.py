"""Projectivity groups of every panel of a few small buildings."""

import argparse
import json
from collections import Counter

from buildings import catalog
from buildings.building import join, rank_one_building
from buildings.projectivity import projectivity_group

BUILDINGS = {
    "fano": catalog.fano,
    "gq22": catalog.gq22,
    "digon": catalog.digon,
    "hexagon": catalog.thin_hexagon,
    "fano_a1": lambda: join(catalog.fano(), rank_one_building(3, "2")),
}


def survey(name, bound):
    B = BUILDINGS[name]()
    rows = Counter()
    for r in B.all_panels():
        rep = projectivity_group(B, r, bound)
        (i,) = r.cotype
        rows[(B.type_names[i], len(rep.residue), rep.order, rep.even_order,
              rep.two_transitive, rep.knarr_seeded)] += 1
    return [
        {"panel_type": t, "residue": n, "order": o, "even_order": e,
         "two_transitive": tt, "knarr": k, "panels": c}
        for (t, n, o, e, tt, k), c in sorted(rows.items())
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=sorted(BUILDINGS), choices=sorted(BUILDINGS))
    ap.add_argument("--bound", type=int, default=4)
    args = ap.parse_args()
    out = {name: survey(name, args.bound) for name in args.names}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
