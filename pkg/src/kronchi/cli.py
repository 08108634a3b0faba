"""``kronchi`` command line.

Exit codes: 0 success, 1 a ``verify`` check failed, 2 bad arguments, 3 census over budget.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Sequence

from . import bounds as bounds_mod
from .algebra import format_fraction
from .euler import (
    chi_kronecker,
    chi_partition_pair,
    chi_trivial_aka_closed_form,
    labeled_stable_tree_count,
    t_weight_sum_closed_form,
)
from .partitions import PartitionPair, WeightedPartition
from .quiver import SupportQuiver
from .splitting import refine_to_trivial, split_chains
from .trees import LocalizationTree, automorphism_weighted_sum, cayley_count, default_workers, enumerate_spanning_trees

DEFAULT_BUDGET = 10**8


class BudgetExceeded(Exception):
    pass


def _check_budget(estimate: int, budget: int) -> None:
    if estimate > budget:
        raise BudgetExceeded(f"estimated census size {estimate} exceeds budget {budget}")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def cmd_chi(args) -> int:
    _check_budget(cayley_count(args.a, args.b), args.budget)
    result = chi_kronecker(args.a, args.b, workers=args.workers)
    if args.format == "json":
        doc = result.to_json()
        doc.pop("elapsed")
        if args.at is not None:
            doc["m"] = args.at
            doc["value"] = format_fraction(result.chi(args.at))
        print(_dump(doc))
    elif args.at is not None:
        print(format_fraction(result.chi(args.at)))
    else:
        print(result.chi)
    return 0


def _pair_from_args(source: str, sink: str) -> PartitionPair:
    return PartitionPair(WeightedPartition.parse(source), WeightedPartition.parse(sink))


def cmd_chi_pair(args) -> int:
    pair = _pair_from_args(args.source, args.sink)
    _check_budget(cayley_count(pair.source.hat, pair.sink.hat), args.budget)
    result = chi_partition_pair(pair, workers=args.workers)
    if args.format == "json":
        doc = result.to_json()
        doc.pop("elapsed")
        print(_dump(doc))
    else:
        print(result.chi)
    return 0


def cmd_enumerate(args) -> int:
    if args.pair:
        pair = _pair_from_args(*args.pair)
        if (pair.a, pair.b) != (args.a, args.b):
            raise ValueError(f"pair {pair} does not partition ({args.a},{args.b})")
    else:
        pair = PartitionPair.trivial(args.a, args.b)
    q = SupportQuiver.from_pair(pair)
    _check_budget(cayley_count(len(q.sources), len(q.sinks)), args.budget)
    for t in enumerate_spanning_trees(q, stable_only=args.stable_only):
        if args.format == "json":
            print(json.dumps({"edges": [list(e) for e in t.sorted_edges()]}))
        else:
            print(t.diagram())
            print()
    return 0


def cmd_closed_form(args) -> int:
    a, k = args.a, args.k
    b = k * a + 1
    count = labeled_stable_tree_count(a, k)
    chi = chi_trivial_aka_closed_form(a, k)
    t_closed = t_weight_sum_closed_form(a, k)
    doc = {"a": a, "k": k, "b": b, "count": count, "chi": str(chi), "T": format_fraction(t_closed)}
    if cayley_count(a, b) <= args.budget:
        pair = PartitionPair.trivial(a, b)
        census = chi_partition_pair(pair, workers=args.workers).chi
        t_census = automorphism_weighted_sum(SupportQuiver.from_pair(pair))
        doc["census_chi"] = str(census)
        doc["census_T"] = format_fraction(t_census)
        doc["census"] = "OK" if census == chi and t_census == t_closed else "MISMATCH"
    else:
        doc["census"] = "SKIPPED"
    if args.format == "json":
        print(_dump(doc))
    else:
        print(f"count {count}")
        print(f"chi {chi}")
        print(f"T {doc['T']}")
        print(f"census {doc['census']}")
    return 0 if doc["census"] != "MISMATCH" else 1


def cmd_bounds(args) -> int:
    rows = bounds_mod.bound_table(args.amax, args.m, workers=args.workers)
    if args.format == "json":
        print(_dump([r.row() for r in rows]))
    elif args.format == "csv":
        sys.stdout.write(bounds_mod.table_to_csv(rows))
    else:
        for r in rows:
            row = r.row()
            print(f"({row['a']},{row['b']}) chi={row['chi']} bound={row['upper_bound']} h={row['h']}")
    return 0


def cmd_split_demo(args) -> int:
    with open(args.tree_file) as fh:
        doc = json.load(fh)
    tree = LocalizationTree.from_json(doc)
    chains = split_chains(tree, limit=args.limit)
    targets = refine_to_trivial(tree)
    if args.format == "json":
        out = {
            "chains": [[{"move": mv.to_json(), "tree": t.to_json()} for mv, t in chain] for chain in chains],
            "targets": [t.to_json() for t in targets],
        }
        print(_dump(out))
    else:
        for n, chain in enumerate(chains, 1):
            print(f"chain {n}")
            for mv, t in chain:
                print(f"  split {mv.source} J1={list(mv.j1)} J2={list(mv.j2)}")
                print("    " + t.diagram().replace("\n", "\n    "))
        print(f"{len(targets)} distinct trivial-partition targets")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_checks

    start = time.perf_counter()
    results = run_checks(full=args.full)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        print(_dump([{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        print(f"{len(results) - len(failed)} passed, {len(failed)} failed in {time.perf_counter() - start:.1f}s")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kronchi", description=__doc__.splitlines()[0])
    parser.add_argument("--workers", type=int, default=None, help="worker processes (default: $KRONCHI_WORKERS or 1)")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum labeled census size")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, default="text", choices=("json", "text")):
        p.add_argument("--format", choices=choices, default=default)

    p = sub.add_parser("chi", help="Euler characteristic of M_{a,b}(K(m))")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--at", type=int, metavar="M", help="evaluate at m = M")
    g.add_argument("--symbolic", action="store_true", help="print the polynomial in m (default)")
    fmt(p)
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("chi-pair", help="chi of one partition pair, e.g. chi-pair 1*2 1*1+2*1")
    p.add_argument("source")
    p.add_argument("sink")
    fmt(p)
    p.set_defaults(func=cmd_chi_pair)

    p = sub.add_parser("enumerate", help="list spanning trees of a support quiver")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--pair", nargs=2, metavar=("SOURCE", "SINK"))
    p.add_argument("--stable-only", action="store_true")
    fmt(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("closed-form", help="closed forms for the trivial pair (1*a, 1*(ka+1))")
    p.add_argument("a", type=int)
    p.add_argument("k", type=int)
    fmt(p)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("bounds", help="upper bounds and asymptotic comparison table")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--amax", type=int, required=True)
    fmt(p, default="csv", choices=("csv", "json", "text"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("split-demo", help="refinement chains of a localization tree (JSON file)")
    p.add_argument("tree_file")
    p.add_argument("--limit", type=int, default=100)
    fmt(p)
    p.set_defaults(func=cmd_split_demo)

    p = sub.add_parser("verify", help="run the invariant suites")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", help="small grids (default)")
    g.add_argument("--full", action="store_true")
    fmt(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = default_workers()
    if args.workers < 1 or args.budget < 1:
        parser.error("--workers and --budget must be positive")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"kronchi: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"kronchi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
