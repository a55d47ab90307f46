"""Command-line surface.

Subcommands::

    fct partitions  <instance.json> [--mode symbolwise|type|modsum]
    fct informative <instance.json> [--mode ...] [--n 2,3,4]
    fct solvable    <instance.json>
    fct rate        <instance.json> [--mode ...] [--tol 1e-12] [--seed 0]
    fct verify      [--max-n 4] [--samples 10000] [--seed 0]
    fct examples    [--only <target>] [--tol 1e-12] [--seed 0]

Every command prints a human-readable summary and, with ``--json PATH``,
writes a canonical JSON report that is byte-for-byte reproducible for
identical inputs and flags.  Exit codes: 0 success, 1 validation error,
2 enumeration budget exceeded, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any

from . import __version__, corpus
from .entropy import (
    DEFAULT_TOL,
    conditional_hypergraph_entropy,
    hypergraph_entropy,
    optimal_rate_full_support,
    optimal_rate_restricted_support,
)
from .model import (
    BudgetError,
    Hypergraph,
    Instance,
    InstanceError,
    Partition,
    TypeVector,
    instance_digest,
    load_instance,
    validate_full_support,
)
from .partitions import (
    FunctionFamily,
    check_informative,
    finest_condition1_partition,
    induced_partition,
    replay_condition1_witness,
    replay_condition2_witness,
)
from .solvability import (
    balance_profile,
    compatible_hyperedge,
    enumerate_simple_loops,
    is_solvable,
    maximal_solvable_hyperedges,
)
from .typecalc import ListOfTypes
from .verify import run_all

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BUDGET = 2
EXIT_VERIFY = 3

TABLE_MODES = ("symbolwise", "type", "modsum")

EXAMPLE_TARGETS = (
    "example7",
    "example8",
    "example9",
    "example10",
    "example11",
    "example13",
    "example14",
    "example15",
    "tableI",
    "compatible",
)


# ---------------------------------------------------------------------------
# rendering helpers


def _blocks(part: Partition) -> list[list[int]]:
    return [list(b) for b in part.blocks]


def _edges(graph: Hypergraph) -> list[list[int]]:
    return [sorted(e) for e in graph.edges]


def _provenance(args: argparse.Namespace) -> dict[str, Any]:
    prov: dict[str, Any] = {"tool": "fct", "version": __version__}
    for key in ("tol", "seed", "max_n", "samples", "only", "mode"):
        if hasattr(args, key) and getattr(args, key) is not None:
            prov[key] = getattr(args, key)
    return prov


def _instance_block(inst: Instance) -> dict[str, Any]:
    return {"name": inst.name, "digest": instance_digest(inst)}


def _emit(report: dict[str, Any], args: argparse.Namespace) -> None:
    if getattr(args, "json_path", None):
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
        with open(args.json_path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _load(args: argparse.Namespace) -> Instance:
    return load_instance(args.instance)


# ---------------------------------------------------------------------------
# subcommands


def cmd_partitions(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    inst = _load(args)
    family = FunctionFamily(args.mode, inst.table)
    part = induced_partition(family)
    print(f"induced partition ({args.mode}): {_blocks(part)}")
    report = {
        "command": "partitions",
        "instance": _instance_block(inst),
        "provenance": _provenance(args),
        "results": {"mode": args.mode, "blocks": _blocks(part)},
    }
    return report, EXIT_OK


def cmd_informative(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    inst = _load(args)
    family = FunctionFamily(args.mode, inst.table)
    part = induced_partition(family)
    n_list = [int(tok) for tok in args.n.split(",") if tok]
    print(f"mode {args.mode}, induced partition {_blocks(part)}")
    per_n = []
    for n in n_list:
        rep = check_informative(family, part, n)
        finest = finest_condition1_partition(family, n)
        entry: dict[str, Any] = {
            "n": n,
            "condition1": rep.condition1.passed,
            "condition2": rep.condition2.passed,
            "finest_condition1_blocks": _blocks(finest),
        }
        if rep.condition1.witness is not None:
            w = rep.condition1.witness
            entry["condition1_witness"] = {
                "i": w.i,
                "a": w.a,
                "x": list(w.x_seq),
                "y": list(w.y_seq),
                "a_other": w.a_other,
                "x_other": list(w.x_other),
                "y_other": list(w.y_other),
            }
        if rep.condition2.witness is not None:
            w2 = rep.condition2.witness
            entry["condition2_witness"] = {
                "x": list(w2.x_seq),
                "y": list(w2.y_seq),
                "sigma": list(w2.sigma),
            }
        per_n.append(entry)
        print(
            f"  n={n}: condition1={'pass' if rep.condition1.passed else 'FAIL'} "
            f"condition2={'pass' if rep.condition2.passed else 'FAIL'} "
            f"finest={_blocks(finest)}"
        )
    report = {
        "command": "informative",
        "instance": _instance_block(inst),
        "provenance": _provenance(args),
        "results": {"mode": args.mode, "blocks": _blocks(part), "per_n": per_n},
    }
    return report, EXIT_OK


def cmd_solvable(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    inst = _load(args)
    table = inst.table
    loops = enumerate_simple_loops(table)
    entries = []
    for loop in loops:
        prof = balance_profile(loop, table)
        entries.append(
            {
                "cells": [list(c) for c in loop.cells],
                "balanced": prof.balanced,
                "plus_counts": list(prof.plus_counts),
                "minus_counts": list(prof.minus_counts),
            }
        )
    graph = maximal_solvable_hyperedges(table)
    print(f"simple loops: {len(loops)}")
    for e in entries:
        print(f"  {e['cells']} balanced={e['balanced']}")
    print(f"maximal solvable hyperedges: {_edges(graph)}")
    report = {
        "command": "solvable",
        "instance": _instance_block(inst),
        "provenance": _provenance(args),
        "results": {"loops": entries, "maximal_solvable_hyperedges": _edges(graph)},
    }
    return report, EXIT_OK


def cmd_rate(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    inst = _load(args)
    if validate_full_support(inst.dist):
        family = FunctionFamily(args.mode, inst.table)
        rr = optimal_rate_full_support(family, inst.dist)
    else:
        if args.mode != "type":
            raise InstanceError(
                "restricted-support rates are available for the type mode only"
            )
        rr = optimal_rate_restricted_support(
            inst.table, inst.dist, tol=args.tol, seed=args.seed
        )
    results: dict[str, Any] = {
        "method": rr.method,
        "mode": args.mode,
        "rate": rr.rate,
        "sw_rate": rr.sw_rate,
    }
    if rr.partition is not None:
        results["blocks"] = _blocks(rr.partition)
    if rr.hypergraph is not None:
        results["maximal_solvable_hyperedges"] = _edges(rr.hypergraph)
    if rr.solver is not None:
        results["iterations"] = rr.solver.iterations
        results["residual"] = rr.solver.residual
    print(f"method: {rr.method}")
    print(f"rate: {rr.rate:.9f} bits")
    print(f"sw_rate: {rr.sw_rate:.9f} bits")
    report = {
        "command": "rate",
        "instance": _instance_block(inst),
        "provenance": _provenance(args),
        "results": results,
    }
    return report, EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    checks = run_all(max_n=args.max_n, samples=args.samples, seed=args.seed)
    entries = []
    all_passed = True
    for chk in checks:
        all_passed &= chk.passed
        entries.append({"name": chk.name, "passed": chk.passed, "details": _jsonable(chk.details)})
        print(f"{'PASS' if chk.passed else 'FAIL'} {chk.name}")
    report = {
        "command": "verify",
        "corpus": list(corpus.names()),
        "provenance": _provenance(args),
        "results": {"checks": entries, "passed": all_passed},
    }
    return report, EXIT_OK if all_passed else EXIT_VERIFY


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (TypeVector, ListOfTypes)):
        return repr(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


# ---------------------------------------------------------------------------
# the example gallery


def _binary_entropy(q: float) -> float:
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


def _gallery(tol: float, seed: int) -> list[dict[str, Any]]:
    card = corpus.load("card")
    path = Hypergraph.of(3, [{0, 1}, {1, 2}])
    triangle = Hypergraph.of(3, [{0, 1}, {1, 2}, {0, 2}])
    uniform3 = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
    rows: list[dict[str, Any]] = []

    def add(target, description, expected, computed, ok, tolerance=None):
        rows.append(
            {
                "target": target,
                "description": description,
                "expected": _jsonable(expected),
                "computed": _jsonable(computed),
                "tolerance": tolerance,
                "pass": bool(ok),
            }
        )

    # hypergraph entropy closed forms
    val = hypergraph_entropy(uniform3, path, tol=tol, seed=seed).value
    add("example7", "uniform X on 3 symbols, path edges", 2 / 3, val,
        abs(val - 2 / 3) <= 1e-6, 1e-6)
    val = hypergraph_entropy(uniform3, triangle, tol=tol, seed=seed).value
    expected = math.log2(3) - 1
    add("example8", "uniform X on 3 symbols, all three pairs", expected, val,
        abs(val - expected) <= 1e-6, 1e-6)
    val = conditional_hypergraph_entropy(card.dist, path, tol=tol, seed=seed).value
    expected = (2 / 3) * _binary_entropy(1 / 4)
    add("example9", "card joint, path edges", expected, val,
        abs(val - expected) <= 1e-6, 1e-6)
    val = conditional_hypergraph_entropy(card.dist, triangle, tol=tol, seed=seed).value
    add("example10", "card joint, all three pairs", 0.5, val,
        abs(val - 0.5) <= 1e-6, 1e-6)

    # induced partitions of the five-row table
    tableI = corpus.load("tableI").table
    expected_parts = {
        "symbolwise": [[0], [1, 2], [3], [4]],
        "type": [[0, 4], [1, 2], [3]],
        "modsum": [[0, 4], [1, 2, 3]],
    }
    computed_parts = {
        mode: _blocks(induced_partition(FunctionFamily(mode, tableI)))
        for mode in TABLE_MODES
    }
    add("tableI", "three induced partitions", expected_parts, computed_parts,
        computed_parts == expected_parts)

    # ring_xor informativeness failures with replayable witnesses
    ring = FunctionFamily("ring_xor")
    singletons = Partition((0, 1))
    trivial = Partition((0, 0))
    rep_s = check_informative(ring, singletons, 3)
    rep_t = check_informative(ring, trivial, 3)
    ok = (
        not rep_s.condition1.passed
        and rep_s.condition1.witness is not None
        and replay_condition1_witness(ring, singletons, rep_s.condition1.witness)
        and rep_t.condition1.passed
        and not rep_t.condition2.passed
        and rep_t.condition2.witness is not None
        and replay_condition2_witness(ring, trivial, rep_t.condition2.witness)
    )
    add("example11", "ring_xor fails list condition (singletons) and "
        "permutation condition (trivial) at n=3",
        {"singletons_condition1": False, "trivial_condition1": True,
         "trivial_condition2": False},
        {"singletons_condition1": rep_s.condition1.passed,
         "trivial_condition1": rep_t.condition1.passed,
         "trivial_condition2": rep_t.condition2.passed},
        ok)

    # the two balanced loops of the four-row table
    tableIV = corpus.load("tableIV").table
    loops = enumerate_simple_loops(tableIV)
    expected_sets = [
        {(0, 0), (0, 4), (3, 4), (3, 0)},
        {(0, 1), (0, 3), (2, 3), (2, 2), (1, 2), (1, 1)},
    ]
    got_sets = [set(lp.cells) for lp in loops]
    balanced = all(balance_profile(lp, tableIV).balanced for lp in loops)
    ok = (
        len(loops) == 2
        and all(s in got_sets for s in expected_sets)
        and balanced
    )
    add("example13", "exactly two simple loops, both balanced",
        [sorted(s) for s in expected_sets], [sorted(s) for s in got_sets], ok)

    # maximal solvable hyperedges of the card function
    graph = maximal_solvable_hyperedges(card.table)
    triple_solvable = is_solvable(card.table, (0, 1, 2), None)
    witness_loop = next(
        (
            lp
            for lp in enumerate_simple_loops(card.table)
            if not balance_profile(lp, card.table).balanced
        ),
        None,
    )
    ok = (
        _edges(graph) == [[0, 1], [0, 2], [1, 2]]
        and not triple_solvable
        and witness_loop is not None
    )
    add("example14", "maximal solvable hyperedges of the card function",
        {"edges": [[0, 1], [0, 2], [1, 2]], "triple_solvable": False},
        {"edges": _edges(graph), "triple_solvable": triple_solvable,
         "unbalanced_loop": [list(c) for c in witness_loop.cells]
         if witness_loop else None},
        ok)

    # end-to-end rate for the card game
    rr = optimal_rate_restricted_support(card.table, card.dist, tol=tol, seed=seed)
    ok = abs(rr.rate - 0.5) <= 1e-6 and abs(rr.sw_rate - 1.0) <= 1e-9
    add("example15", "card game: type-mode rate vs plain conditional entropy",
        {"rate": 0.5, "sw_rate": 1.0}, {"rate": rr.rate, "sw_rate": rr.sw_rate},
        ok, 1e-6)

    # compatible hyperedges for the three listed lists of types
    tv = lambda counts: TypeVector(6, counts)
    cases = [
        (((4, 2), (3, 3), (3, 3)), {0, 1}),
        (((4, 2), (4, 2), (3, 3)), {1, 2}),
        (((4, 2), (2, 4), (3, 3)), {1}),
    ]
    got = []
    ok = True
    for counts, expected_set in cases:
        lists = ListOfTypes(tuple(tv(c) for c in counts))
        e = compatible_hyperedge(card.table, lists)
        got.append(sorted(e))
        ok &= e == frozenset(expected_set)
    add("compatible", "compatible hyperedges of three lists of types",
        [[0, 1], [1, 2], [1]], got, ok)

    return rows


def cmd_examples(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    rows = _gallery(args.tol, args.seed)
    if args.only:
        rows = [r for r in rows if r["target"] == args.only]
        if not rows:
            raise InstanceError(
                f"unknown target {args.only!r}; choose from {', '.join(EXAMPLE_TARGETS)}"
            )
    all_passed = all(r["pass"] for r in rows)
    width = max(len(r["target"]) for r in rows)
    for r in rows:
        status = "PASS" if r["pass"] else "FAIL"
        tol = f" (tol {r['tolerance']:g})" if r["tolerance"] else ""
        print(f"{status} {r['target']:<{width}} {r['description']}{tol}")
    print(f"{sum(r['pass'] for r in rows)}/{len(rows)} targets passed")
    report = {
        "command": "examples",
        "provenance": _provenance(args),
        "results": {"rows": rows, "passed": all_passed},
    }
    return report, EXIT_OK if all_passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fct",
        description="optimal message rates for distributed function computation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, instance: bool = True) -> None:
        if instance:
            p.add_argument("instance", help="path to an instance document")
        p.add_argument("--json", dest="json_path", metavar="PATH",
                       help="also write a canonical JSON report")

    p = sub.add_parser("partitions", help="induced partition of a family")
    add_common(p)
    p.add_argument("--mode", choices=TABLE_MODES, default="symbolwise")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("informative", help="informativeness checks per blocklength")
    add_common(p)
    p.add_argument("--mode", choices=TABLE_MODES, default="symbolwise")
    p.add_argument("--n", default="2,3,4", help="comma-separated blocklengths")
    p.set_defaults(func=cmd_informative)

    p = sub.add_parser("solvable", help="simple loops, balance, solvable hyperedges")
    add_common(p)
    p.set_defaults(func=cmd_solvable)

    p = sub.add_parser("rate", help="optimal message rate for an instance")
    add_common(p)
    p.add_argument("--mode", choices=TABLE_MODES, default="type")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("verify", help="run the property sweeps over the corpus")
    add_common(p, instance=False)
    p.add_argument("--max-n", dest="max_n", type=int, default=4,
                   help="blocklength bound for the sweeps (0 empties the suite)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="reproduce the bundled example gallery")
    add_common(p, instance=False)
    p.add_argument("--only", choices=EXAMPLE_TARGETS, default=None)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(report, args)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
