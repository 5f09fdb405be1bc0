"""Command-line front end.

Exit status: 0 on success, 1 when the input is rejected by a computation,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .building import (
    Building,
    BuildingError,
    building_from_incidence,
    building_from_json,
    coxeter_complex,
    diagram_factorization,
    join,
    rank_one_building,
    thickness_report,
)
from .coarse import (
    CoarseError,
    MorseMatcher,
    SampledMap,
    controlled_fit,
    morse_match,
    tree_space,
)
from .cone import apex_is_unique_thick_point, building_chart, cone_wall_tree
from .coxeter import CoxeterError, is_spherical, new_coxeter_system
from .nerve import verify_round_trip
from .projectivity import projectivity_group
from .rtree import (
    TreeError,
    TreePoint,
    apartments,
    structure_report,
    tree_automorphisms,
    tree_from_spec,
    verify_recovery_criteria,
)

DOT_CAP = 5000
SUBCOMMANDS = ("build", "inspect", "proj", "reconstruct", "tree", "cone", "coarse", "export")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ loading
def load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def building_from_object(obj) -> Building:
    """Geometry, building dump, Coxeter complex, join or rank-one description."""
    if not isinstance(obj, dict):
        raise BuildingError("input must be a JSON object")
    if "points" in obj and "lines" in obj:
        return building_from_incidence(obj["points"], obj["lines"], obj.get("gonality", 3))
    if "chambers" in obj and "panels" in obj:
        return building_from_json(obj)
    if "join" in obj:
        parts = [building_from_object(x) for x in obj["join"]]
        if len(parts) < 2:
            raise BuildingError("a join needs at least two factors")
        out = parts[0]
        for p in parts[1:]:
            out = join(out, p)
        return out
    if "rank_one" in obj:
        return rank_one_building(int(obj["rank_one"]))
    if "coxeter" in obj:
        return coxeter_complex(new_coxeter_system(obj["coxeter"], obj.get("types")))
    raise BuildingError("unrecognised building description")


def parse_panel(B: Building, text: str):
    """TYPE:INDEX where TYPE is a vertex type name (rank 2) or a panel type number."""
    if ":" not in text:
        raise UsageError(f"--panel expects TYPE:INDEX, got {text!r}")
    kind, idx = text.split(":", 1)
    if kind in B.type_names and not kind.isdigit():
        k = list(B.type_names).index(kind)
        if B.rank != 2:
            raise UsageError("named panels are supported for rank 2 geometries")
        target = _parse_scalar(idx)
        for c, lab in enumerate(B.labels):
            if isinstance(lab, tuple) and lab[k] == target:
                return B.simplex(c, {1 - k})
        raise BuildingError(f"no {kind} with identifier {idx}")
    try:
        i, n = int(kind), int(idx)
    except ValueError:
        raise UsageError(f"unknown panel type {kind!r}") from None
    if not 0 <= i < B.rank:
        raise UsageError(f"panel type {i} out of range")
    panels = B.all_panels(i)
    if not 0 <= n < len(panels):
        raise BuildingError(f"panel index {n} out of range (0..{len(panels) - 1})")
    return panels[n]


def _parse_scalar(s: str):
    try:
        return int(s)
    except ValueError:
        return s


def parse_radius(text: str) -> Fraction:
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--radius expects a rational P/Q, got {text!r}") from None
    if r <= 0:
        raise UsageError("--radius must be positive")
    return r


def parse_tree_point(T, obj) -> TreePoint:
    """A vertex id, or {"edge": [a, b], "offset": "p/q"} measured from a."""
    if isinstance(obj, dict):
        a, b = obj["edge"]
        return T.edge_point(T.index[a], T.index[b], Fraction(str(obj["offset"])))
    if obj not in T.index:
        raise TreeError(f"unknown vertex {obj!r}")
    return T.point(obj)


# ------------------------------------------------------------------ DOT export
def export_dot(B: Building, kind: str = "chamber_graph", panels_only: bool = False) -> str:
    if B.n > DOT_CAP:
        raise BuildingError(f"building has {B.n} chambers, above the export cap {DOT_CAP}")
    colours = ["red", "blue", "darkgreen", "orange", "purple", "brown"]
    lines = ["graph G {"]
    if kind == "chamber_graph":
        for c in range(B.n):
            lines.append(f'  c{c} [label="{_label(B.labels[c])}"];')
        for i in range(B.rank):
            col = colours[i % len(colours)]
            for p in B.panels[i]:
                for a in p:
                    for b in p:
                        if a < b:
                            lines.append(f'  c{a} -- c{b} [label="{B.W.labels[i]}", color={col}];')
    elif kind == "opposition_graph":
        simplices = B.all_panels() if panels_only else B.all_simplices()
        names = {s: f"s{k}" for k, s in enumerate(simplices)}
        for s in simplices:
            lines.append(f'  {names[s]} [label="{B.simplex_label(s)}"];')
        for k, a in enumerate(simplices):
            for b in simplices[k + 1:]:
                if len(b.cotype) == len(a.cotype) and B.are_opposite(a, b):
                    lines.append(f"  {names[a]} -- {names[b]};")
    else:
        raise UsageError(f"unknown graph kind {kind!r}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _label(x) -> str:
    if isinstance(x, tuple):
        return ",".join(str(y) for y in x)
    return str(x)


# ------------------------------------------------------------------ commands
def cmd_build(args, B: Building):
    return B.to_json() if args.json else {
        "chambers": B.n, "rank": B.rank, "types": list(B.W.labels)}


def cmd_inspect(args, B: Building):
    _, names = is_spherical(B.W)
    thick = thickness_report(B)
    out = {
        "chambers": B.n,
        "rank": B.rank,
        "type": "+".join(names),
        "thick": thick.is_thick,
        "panel_sizes": [thick.min_chambers, thick.max_chambers],
        "apartments": len(B.enumerate_apartments()),
        "opposition": list(B.opposition),
        "factors": [f.label for f in diagram_factorization(B)],
    }
    return out


def cmd_proj(args, B: Building):
    if not args.panel:
        raise UsageError("proj needs --panel")
    r = parse_panel(B, args.panel)
    rep = projectivity_group(B, r, args.bound)
    out = rep.to_json()
    if not args.json:
        out = {k: out[k] for k in ("order", "even_order", "transitive", "two_transitive",
                                   "even_two_transitive", "max_path_len")}
        out["panel"] = B.simplex_label(r)
        out["residue_size"] = len(rep.residue)
    return out


def cmd_reconstruct(args, B: Building):
    rep = verify_round_trip(B)
    return {
        "isomorphism": rep.ok,
        "vertices": rep.vertices,
        "type_preserving": rep.type_preserving,
        "apartments_match": rep.apartments_match,
        "problems": rep.problems,
        "vertex_map": {B.vertex_label(v): k for v, k in sorted(rep.vertex_map.items())},
    }


def cmd_tree(args, obj):
    T = tree_from_spec(obj)
    out = {}
    do_all = not (args.classify or args.automorphisms or args.recovery)
    if args.classify or do_all:
        rep = structure_report(T)
        out.update({"type": rep.kind, "branch_points": rep.branch_points, "ends": rep.ends})
        if rep.t is not None:
            out["t"] = str(rep.t)
        if rep.reasons:
            out["reasons"] = rep.reasons
    if args.automorphisms or do_all:
        G = tree_automorphisms(T)
        out["automorphism_order"] = G.order
        out["generators"] = len(G.generators)
    if args.recovery:
        rep = verify_recovery_criteria(T, args.mode)
        out["recovery"] = rep.to_json() if args.json else {
            "agreements": rep.agreements, "disagreements": rep.disagreements,
            "isolation_matches_branching": rep.isolation_matches_branching,
            "vacuous": rep.vacuous}
    return out


def cmd_cone(args, B: Building):
    chart = building_chart(B)
    apex = apex_is_unique_thick_point(B, chart, samples=args.samples)
    out = {"apex_thick": apex.apex_thick, "apex_unique_thick": apex.ok, "notes": apex.notes}
    if args.panel:
        a = parse_panel(B, args.panel)
        opp = B.opposite_simplices(a)
        if not opp:
            raise BuildingError("panel has no opposite panel")
        T = cone_wall_tree(B, a, opp[0], args.radius)
        rep = structure_report(T)
        out["wall_tree"] = {"ends": len(T.ends), "type": rep.kind, "opposite": B.simplex_label(opp[0])}
    return out


def cmd_coarse(args, obj):
    T1 = tree_from_spec(obj["source"])
    T2 = tree_from_spec(obj.get("target", obj["source"]))
    pairs = [(parse_tree_point(T1, p), parse_tree_point(T2, q)) for p, q in obj["pairs"]]
    f = SampledMap(pairs, tree_space(T1), tree_space(T2))
    fit = controlled_fit(f)
    out = {"c": str(fit.c), "d": str(fit.d), "violations": len(fit.violations)}
    matcher = MorseMatcher(T2)
    matches = []
    for A in apartments(T1):
        try:
            rep = morse_match(T1, T2, f, A, matcher)
        except CoarseError:
            continue
        matches.append({
            "apartment": [T1.ids[A.u], T1.ids[A.v]],
            "best": [T2.ids[rep.best.u], T2.ids[rep.best.v]],
            "hausdorff": str(rep.distance),
            "runner_up": str(rep.runner_up),
        })
    out["matches"] = matches
    return out


def cmd_export(args, B: Building):
    text = export_dot(B, args.kind, args.panels_only)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(text)
        return {"written": args.dot, "kind": args.kind}
    return text


# ------------------------------------------------------------------ plumbing
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="buildings", description="Spherical buildings, trees and cones.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", help="input JSON file ('-' for stdin)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    add("build", "validate a geometry and print the building")
    add("inspect", "summary: chambers, thickness, apartments")
    sp = add("proj", "projectivity group of a panel")
    sp.add_argument("--panel", help="TYPE:INDEX, e.g. point:0 or 1:3")
    sp.add_argument("--bound", type=int, default=4, help="maximal closed path length (even)")
    add("reconstruct", "rebuild from the apartment complex and compare")
    sp = add("tree", "metric tree classification and automorphisms")
    sp.add_argument("--classify", action="store_true")
    sp.add_argument("--automorphisms", action="store_true")
    sp.add_argument("--recovery", action="store_true")
    sp.add_argument("--mode", choices=("local", "global"), default="local")
    sp = add("cone", "Euclidean cone checks")
    sp.add_argument("--panel", help="panel whose wall tree is reported")
    sp.add_argument("--radius", type=parse_radius_arg, default=Fraction(1))
    sp.add_argument("--samples", type=int, default=200)
    add("coarse", "controlled fit and apartment matching of a sampled tree map")
    sp = add("export", "DOT export of the chamber or opposition graph")
    sp.add_argument("--kind", choices=("chamber_graph", "opposition_graph"), default="chamber_graph")
    sp.add_argument("--panels-only", action="store_true")
    sp.add_argument("--dot", help="write DOT to this file instead of stdout")
    return p


def parse_radius_arg(text):
    try:
        return parse_radius(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


HANDLERS = {
    "build": (cmd_build, True),
    "inspect": (cmd_inspect, True),
    "proj": (cmd_proj, True),
    "reconstruct": (cmd_reconstruct, True),
    "tree": (cmd_tree, False),
    "cone": (cmd_cone, True),
    "coarse": (cmd_coarse, False),
    "export": (cmd_export, True),
}


def render(result, as_json: bool) -> str:
    if isinstance(result, str):
        return result
    if as_json:
        return json.dumps(result, indent=2, sort_keys=True, default=str) + "\n"
    lines = []
    for k in sorted(result):
        v = result[k]
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True, default=str)
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
        handler, needs_building = HANDLERS[args.command]
        obj = load_json(args.input)
        payload = building_from_object(obj) if needs_building else obj
        result = handler(args, payload)
        out.write(render(result, args.json))
        return 0
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except (BuildingError, CoxeterError, TreeError, CoarseError, OSError, ValueError,
            KeyError, TypeError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
