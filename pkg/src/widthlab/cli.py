"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 resource limit, 3 extraction invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import constructions as cons
from . import dot, formats
from . import oracles
from . import terms as tm
from .decompositions import (
    PATHWIDTH_LIMIT,
    TREEWIDTH_LIMIT,
    PathDecomposition,
    exact_pathwidth,
    exact_treewidth,
)
from .errors import (
    ExtractionInvalid,
    InvalidDecomposition,
    TooLarge,
    WidthLabError,
)
from .structures import ColoredStructure, gaifman_graph

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_EXTRACTION = 0, 1, 2, 3

# gadgets up to this size are handed to the membership oracle by the demo
DEMO_ORACLE_UNIVERSE = 5


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_structure(path: str) -> ColoredStructure:
    return formats.structure_from_json(_read(path))


def _load_signature(path: str):
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(doc, dict):
        doc = doc.get("signature", [])
    return formats.signature_from_json(doc)


def _load_term(path: str, signature_path: str | None) -> tm.WidthTerm:
    signature = _load_signature(signature_path) if signature_path else None
    return tm.parse_term(_read(path), signature)


def _budget(args) -> oracles.SearchBudget:
    kwargs = {}
    if getattr(args, "max_universe", None):
        kwargs["max_universe"] = args.max_universe
    if getattr(args, "seconds", None):
        kwargs["max_seconds"] = args.seconds
    return oracles.SearchBudget(**kwargs)


# --------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    term = _load_term(args.term, args.signature)
    sys.stdout.write(formats.structure_to_json(tm.evaluate(term)))
    return EXIT_OK


def cmd_widths(args) -> int:
    a = _load_structure(args.structure)
    g = gaifman_graph(a)
    wanted = [name for name in ("tw", "pw", "ucw", "ucwf") if getattr(args, name)]
    if not wanted:
        wanted = ["tw", "pw"]
    witness_dir = Path(args.witness) if args.witness else None
    if witness_dir:
        witness_dir.mkdir(parents=True, exist_ok=True)
    budget = _budget(args)
    for name in wanted:
        if name in ("tw", "pw"):
            solve = exact_treewidth if name == "tw" else exact_pathwidth
            limit = args.limit or (TREEWIDTH_LIMIT if name == "tw" else PATHWIDTH_LIMIT)
            value, witness = solve(g, limit)
            print(f"{name} {value}")
            if witness_dir:
                (witness_dir / f"{name}.json").write_text(formats.decomposition_to_json(witness))
        else:
            result = oracles.exact_width(a, name == "ucwf", budget)
            if result.exact:
                print(f"{name} {result.k}")
            else:
                why = "bounded search" if result.reason == oracles.BOUNDED else "budget"
                if result.upper is not None:
                    print(f"{name} {result.k}..{result.upper} ({why})")
                else:
                    print(f"{name} ≥ {result.k} ({why})")
            if witness_dir and result.witness is not None:
                (witness_dir / f"{name}.term").write_text(tm.render_term(result.witness) + "\n")
    return EXIT_OK


def cmd_compile(args) -> int:
    a = _load_structure(args.structure).structure
    d = formats.decomposition_from_json(_read(args.decomposition))
    if args.fusion:
        if isinstance(d, PathDecomposition):
            d = d.as_tree()
        term = cons.tree_to_ucwf_term(a, d)
    else:
        if not isinstance(d, PathDecomposition):
            raise InputError("path decomposition required (use --fusion for tree decompositions)")
        term = cons.path_to_ucw_term(a, d)
    sys.stdout.write(tm.render_term(term) + "\n")
    print(f"colors_used ≤ {tm.stats(term).colors_used}", file=sys.stderr)
    return EXIT_OK


def cmd_extract(args) -> int:
    if args.signature:
        term = _load_term(args.term, args.signature)
    else:
        term = tm.parse_term(_read(args.term), cons.GADGET_SIGNATURE)
    leaf = cons.apex_leaf(term) if args.apex in (None, "auto") else args.apex
    try:
        pd = cons.extract_path_decomposition(term, leaf)
    except ExtractionInvalid as exc:
        print("extraction invalid:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_EXTRACTION
    sys.stdout.write(formats.decomposition_to_json(pd))
    return EXIT_OK


def cmd_gadget(args) -> int:
    if args.family is not None:
        gadget = cons.hard_family(args.family)
    else:
        gadget = cons.apex_gadget(_load_structure(args.structure).structure)
    sys.stdout.write(formats.structure_to_json(gadget.inner))
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = gaifman_graph(_load_structure(args.structure))
    if args.path:
        _, d = exact_pathwidth(g, args.limit or PATHWIDTH_LIMIT)
    else:
        _, d = exact_treewidth(g, args.limit or TREEWIDTH_LIMIT)
    sys.stdout.write(formats.decomposition_to_json(d))
    return EXIT_OK


def cmd_dot(args) -> int:
    text = _read(args.file)
    kind = args.kind
    if kind is None:
        stripped = text.lstrip()
        if stripped.startswith("{"):
            kind = "decomposition" if '"kind"' in text else "structure"
        else:
            kind = "term"
    if kind == "structure":
        out = dot.structure_dot(formats.structure_from_json(text))
    elif kind == "decomposition":
        out = dot.decomposition_dot(formats.decomposition_from_json(text))
    else:
        out = dot.term_dot(tm.parse_term(text))
    sys.stdout.write(out)
    return EXIT_OK


@dataclass
class DemoRow:
    claim: str
    expected: str
    value: str
    state: str  # verified / asserted / unknown / violated


def demo_rows(n: int, budget: oracles.SearchBudget | None = None) -> list[DemoRow]:
    """Check the separation claims on the n-th hard-family gadget.

    A row is "verified" only when an exact oracle produced the value.
    """
    budget = budget or oracles.SearchBudget(max_universe=DEMO_ORACLE_UNIVERSE)
    gadget = cons.hard_family(n)
    tree = gaifman_graph(gadget.origin)
    graph = gaifman_graph(gadget.inner)
    rows = []

    def exact(solve, g, limit):
        try:
            return solve(g, limit)[0]
        except TooLarge:
            return None

    pw_tree = exact(exact_pathwidth, tree, PATHWIDTH_LIMIT)
    if pw_tree is None:
        rows.append(DemoRow("pw(T_n)", f"= {n}", "-", "asserted"))
    else:
        rows.append(DemoRow("pw(T_n)", f"= {n}", str(pw_tree), "verified" if pw_tree == n else "violated"))

    tw_expected = 2 if n >= 1 else 1
    tw_gadget = exact(exact_treewidth, graph, TREEWIDTH_LIMIT)
    if tw_gadget is None:
        rows.append(DemoRow("tw(G_gadget)", f"= {tw_expected}", "-", "asserted"))
    else:
        state = "verified" if tw_gadget == tw_expected else "violated"
        rows.append(DemoRow("tw(G_gadget)", f"= {tw_expected}", str(tw_gadget), state))

    pw_gadget = exact(exact_pathwidth, graph, PATHWIDTH_LIMIT)
    if pw_gadget is None:
        rows.append(DemoRow("pw(G_gadget)", f"= {n + 1}", "-", "asserted"))
    else:
        state = "verified" if pw_gadget == n + 1 else "violated"
        rows.append(DemoRow("pw(G_gadget)", f"= {n + 1}", str(pw_gadget), state))

    bound = n + 2
    claim = DemoRow("ucw(gadget)", f"≥ {bound}", "-", "asserted")
    if len(gadget.inner) <= budget.universe_cap(gadget.inner.signature):
        # no at k = n+1 rules out every smaller k as well (UCW_k grows with k)
        result = oracles.membership(
            ColoredStructure.uncolored(gadget.inner), bound - 1, False, budget
        )
        if result.answer == "no":
            claim = DemoRow("ucw(gadget)", f"≥ {bound}", f"≥ {bound}", "verified")
        elif result.answer == "yes":
            claim = DemoRow("ucw(gadget)", f"≥ {bound}", f"≤ {bound - 1}", "violated")
        else:
            claim = DemoRow("ucw(gadget)", f"≥ {bound}", "-", "unknown")
    rows.append(claim)
    return rows


def cmd_demo(args) -> int:
    rows = demo_rows(args.n, _budget(args) if args.max_universe or args.seconds else None)
    gadget_size = 1 + (3 ** (args.n + 1) - 1) // 2
    print(f"hard family n={args.n}: ternary tree T_{args.n} plus apex, {gadget_size} elements")
    print(f"{'claim':<14} {'expected':<9} {'value':<7} state")
    for r in rows:
        print(f"{r.claim:<14} {r.expected:<9} {r.value:<7} {r.state}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="widthlab",
        description="Unary clique-width terms, decompositions and exact width oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a term, print the structure as JSON")
    p.add_argument("term")
    p.add_argument("signature", nargs="?", help="JSON file with a 'signature' entry")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("widths", help="exact tw / pw / ucw / ucwf of a structure")
    p.add_argument("structure")
    for name in ("tw", "pw", "ucw", "ucwf"):
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--limit", type=int, help="vertex limit for the tw/pw solvers")
    p.add_argument("--witness", metavar="DIR", help="write witness files to DIR")
    p.add_argument("--max-universe", type=int, help="oracle universe limit")
    p.add_argument("--seconds", type=float, help="oracle time budget per k")
    p.set_defaults(func=cmd_widths)

    p = sub.add_parser("compile", help="decomposition to term")
    p.add_argument("structure")
    p.add_argument("decomposition")
    p.add_argument("--fusion", action="store_true", help="tree decomposition to a fusion term")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("extract", help="path decomposition from a gadget term")
    p.add_argument("term")
    p.add_argument("--apex", help="apex leaf: preorder index or element id (default: auto)")
    p.add_argument("--signature", help="JSON file with a 'signature' entry (default: R/3)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("gadget", help="apex gadget of a graph structure, or of hard family n")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("structure", nargs="?")
    group.add_argument("--family", type=int, metavar="N")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("decompose", help="optimal tree (default) or path decomposition")
    p.add_argument("structure")
    p.add_argument("--path", action="store_true")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("demo", help="hard-family separation report")
    p.add_argument("n", type=int)
    p.add_argument("--max-universe", type=int)
    p.add_argument("--seconds", type=float)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("dot", help="Graphviz DOT for a structure, decomposition or term")
    p.add_argument("file")
    p.add_argument("--kind", choices=("structure", "decomposition", "term"))
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ExtractionInvalid as exc:
        print(f"error: extraction invalid: {exc}", file=sys.stderr)
        return EXIT_EXTRACTION
    except InvalidDecomposition as exc:
        print(f"error: invalid decomposition: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, formats.FormatError, WidthLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
