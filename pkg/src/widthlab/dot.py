"""Graphviz DOT text for Gaifman graphs, decompositions and term trees."""

from __future__ import annotations

from . import terms as tm
from .decompositions import PathDecomposition, TreeDecomposition
from .structures import ColoredStructure, Structure, gaifman_graph, id_key, sorted_ids


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def structure_dot(a: ColoredStructure | Structure) -> str:
    """Gaifman graph; every tuple becomes a clique on its elements."""
    coloring = a.coloring if isinstance(a, ColoredStructure) else {}
    g = gaifman_graph(a)
    lines = ["graph gaifman {"]
    for v in g.vertices:
        c = coloring.get(v, 0)
        label = f"{v}:{c}" if c else v
        lines.append(f"  {_q(v)} [label={_q(label)}];")
    for u, v in sorted((sorted_ids(e) for e in g.edges), key=lambda e: [id_key(x) for x in e]):
        lines.append(f"  {_q(u)} -- {_q(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def decomposition_dot(d: TreeDecomposition | PathDecomposition) -> str:
    if isinstance(d, PathDecomposition):
        d = d.as_tree()
    lines = ["graph decomposition {", "  node [shape=box];"]
    for n in sorted(d.bags, key=id_key):
        label = "{" + ", ".join(sorted_ids(d.bags[n])) + "}"
        lines.append(f"  {_q(n)} [label={_q(label)}];")
    for n in sorted(d.parent, key=id_key):
        p = d.parent[n]
        if p is not None:
            lines.append(f"  {_q(p)} -- {_q(n)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _label(node) -> str:
    if isinstance(node, tm.Empty):
        return "empty"
    if isinstance(node, tm.Singleton):
        return "one"
    if isinstance(node, tm.DisjointUnion):
        return "u"
    if isinstance(node, tm.Recolor):
        return "rho " + " ".join(f"({c} {d})" for c, d in node.table)
    if isinstance(node, tm.AddRel):
        return f"add {node.symbol}(" + ",".join(map(str, node.colors)) + ")"
    return f"fuse {node.color}"


def term_dot(term: tm.WidthTerm) -> str:
    lines = ["digraph term {", "  node [shape=box];"]
    stack = [(term.root, None)]
    index = 0
    while stack:
        node, parent = stack.pop()
        name = f"n{index}"
        index += 1
        lines.append(f"  {name} [label={_q(_label(node))}];")
        if parent is not None:
            lines.append(f"  {parent} -> {name};")
        stack.extend((c, name) for c in reversed(tm.children(node)))
    lines.append("}")
    return "\n".join(lines) + "\n"
