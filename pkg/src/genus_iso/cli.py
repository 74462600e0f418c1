"""Command-line entry point.

Subcommands: gen, verify, weights dump, match, schema normalize, double.
Exit codes: 0 success, 1 usage error, 2 property failure, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

from . import double_cover, grid_surface, schema
from .cycle_oracle import default_cycle_cap, verify_isolation
from .errors import BudgetExceeded, GenusIsoError
from .matching import construct_pm, has_pm, is_unique_pm
from .weights import combine, elementary_order, elementary_values


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="genus-iso", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--g", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--ensure-pm", action="store_true")
    g.add_argument("--lengths", type=str, default=None,
                   help="comma-separated segment lengths (default: random)")
    g.add_argument("--origin", choices=grid_surface.ORIGIN_CORNERS, default=None)
    g.add_argument("-o", "--output", type=str, default=None)

    v = sub.add_parser("verify", help="check all circulations are nonzero")
    v.add_argument("--instance", required=True)
    v.add_argument("--max-cycles", type=int, default=None)
    v.add_argument("-o", "--output", type=str, default=None)

    w = sub.add_parser("weights", help="weight table utilities")
    w.add_argument("action", choices=["dump"])
    w.add_argument("--instance", required=True)
    w.add_argument("-o", "--output", type=str, default=None)

    m = sub.add_parser("match", help="matching queries on an instance")
    m.add_argument("--instance", required=True)
    m.add_argument("--construct", action="store_true")
    m.add_argument("--unique", action="store_true")
    m.add_argument("-o", "--output", type=str, default=None)

    s = sub.add_parser("schema", help="polygonal schema utilities")
    s.add_argument("action", choices=["normalize"])
    s.add_argument("--word", required=True,
                   help="side labels, '-' suffix for the inverted side")
    s.add_argument("-o", "--output", type=str, default=None)

    d = sub.add_parser("double", help="double cover of a labeled graph")
    d.add_argument("--instance", required=True)
    d.add_argument("--project", action="store_true")
    d.add_argument("--matching", type=str, default=None,
                   help="matching of the doubled graph (JSON list of edges)")
    d.add_argument("-o", "--output", type=str, default=None)
    return p


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_instance(path: str) -> grid_surface.GenusGrid:
    with open(path) as fh:
        return grid_surface.instance_from_json(json.load(fh))


def _vid_json(v):
    return list(v)


def _cmd_gen(args) -> int:
    if args.lengths:
        lengths = tuple(int(x) for x in args.lengths.split(","))
        layout = grid_surface.SegmentLayout(
            g=args.g, m=args.m, lengths=lengths,
            origin_corner=args.origin or "NW")
    else:
        import random
        layout = grid_surface.random_layout(args.g, args.m, random.Random(args.seed))
        if args.origin:
            layout = grid_surface.SegmentLayout(
                g=args.g, m=args.m, lengths=layout.lengths, origin_corner=args.origin)
    G = grid_surface.gen_instance(layout, args.seed, args.density,
                                  ensure_pm=args.ensure_pm)
    _emit(json.dumps(grid_surface.instance_to_json(G), indent=2), args.output)
    return 0


def _cmd_verify(args) -> int:
    G = _load_instance(args.instance)
    cap = args.max_cycles if args.max_cycles is not None else default_cycle_cap()
    report = verify_isolation(G, max_cycles=cap)
    _emit(json.dumps(report.to_json(), indent=2), args.output)
    if report.failures:
        return 2
    if report.budget_exceeded:
        return 3
    return 0


def _cmd_weights(args) -> int:
    G = _load_instance(args.instance)
    W = combine(G)
    names = elementary_order(G.layout.g)
    rows = []
    for e in sorted(G.edges):
        vals = elementary_values(G, e)
        rows.append(["%s--%s" % ("/".join(map(str, e[0])), "/".join(map(str, e[1])))]
                    + [str(x) for x in vals] + [str(W.values[e])])
    import io
    buf = io.StringIO()
    wr = csv.writer(buf)
    wr.writerow(["edge"] + names + ["W"])
    wr.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return 0


def _cmd_match(args) -> int:
    G = _load_instance(args.instance)
    out = {"has_pm": has_pm(G)}
    if out["has_pm"] and (args.construct or args.unique):
        M = construct_pm(G)
        out["min_weight"] = str(M.weight)
        if args.construct:
            out["matching"] = [[_vid_json(u), _vid_json(v)] for (u, v) in sorted(M.edges)]
        if args.unique:
            out["unique"] = is_unique_pm(G)
    elif args.unique:
        out["unique"] = False
    _emit(json.dumps(out, indent=2), args.output)
    return 0


def _cmd_schema(args) -> int:
    w = schema.word(args.word)
    nf, trace = schema.normalize(w)
    inv = schema.invariants(nf)
    doc = {
        "normal_form": str(nf),
        "form_id": schema.is_normal_form(nf),
        "orientable": inv.orientable,
        "euler_characteristic": inv.euler_char,
        "genus": inv.genus,
        "trace": [{"rule": rule, "word": str(wi)} for (rule, wi) in trace],
    }
    _emit(json.dumps(doc, indent=2), args.output)
    return 0


def _cmd_double(args) -> int:
    with open(args.instance) as fh:
        G = double_cover.labeled_from_json(json.load(fh))
    if args.project:
        if not args.matching:
            raise _UsageError("--project needs --matching")
        with open(args.matching) as fh:
            raw = json.load(fh)
        Mp = frozenset(
            (tuple(u) if isinstance(u, list) else u,
             tuple(v) if isinstance(v, list) else v)
            for (u, v) in raw)
        M = double_cover.project_matching(G, Mp)
        _emit(json.dumps([[list(u) if isinstance(u, tuple) else u,
                           list(v) if isinstance(v, tuple) else v]
                          for (u, v) in sorted(M)], indent=2), args.output)
        return 0
    D = double_cover.double(G)
    _emit(json.dumps(double_cover.labeled_to_json(D), indent=2), args.output)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "verify": _cmd_verify,
    "weights": _cmd_weights,
    "match": _cmd_match,
    "schema": _cmd_schema,
    "double": _cmd_double,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.cmd](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except GenusIsoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
