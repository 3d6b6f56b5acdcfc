"""Constructive transformations between decompositions, terms and gadgets.

* :func:`path_to_ucw_term` compiles a path decomposition of width w into a
  fusion-free term over w + 2 colours.
* :func:`tree_to_ucwf_term` compiles a tree decomposition of width w into a
  term with fusion over w + 2 colours.
* :func:`apex_gadget` encodes a graph as a ternary structure with an apex.
* :func:`extract_path_decomposition` reads a path decomposition of the
  encoded graph back off any term for the gadget.
* :func:`hard_family` builds gadgets over ternary trees of growing path-width.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import terms as tm
from .decompositions import (
    PathDecomposition,
    TreeDecomposition,
    normalize_path,
    validate_decomposition,
)
from .errors import (
    InvalidDecomposition,
    LeafNotApex,
    NotGadgetShaped,
    ExtractionInvalid,
    WrongSignature,
)
from .structures import (
    ColoredStructure,
    Signature,
    Structure,
    Symbol,
    gaifman_graph,
    graph_structure,
    isolated_elements,
    sorted_ids,
)
from .terms import (
    AddRel,
    DisjointUnion,
    Empty,
    Recolor,
    Singleton,
    WidthTerm,
    colored_leaf,
)

GADGET_SIGNATURE = Signature((Symbol("R", 3),))


@dataclass(frozen=True)
class GadgetStructure:
    inner: Structure
    apex: str
    origin: Structure


@dataclass(frozen=True)
class BranchEntry:
    node: tm.Node
    value: ColoredStructure
    isolated: frozenset


def _bag_tuples(a: Structure, bag: frozenset):
    for name, t in a.tuples():
        if bag.issuperset(t):
            yield name, t


def _add_tuples(node, a: Structure, bag, color, done):
    for name, t in _bag_tuples(a, bag):
        if (name, t) not in done:
            done.add((name, t))
            node = AddRel(name, tuple(color[x] for x in t), node)
    return node


def _to_zero(node, elements, color):
    table = tuple(sorted({(color[x], 0) for x in elements if color[x]}))
    return Recolor(table, node) if table else node


def _check(a: Structure, d):
    violations = validate_decomposition(gaifman_graph(a), d)
    if violations:
        raise InvalidDecomposition(violations)


def path_to_ucw_term(a: Structure, pd: PathDecomposition) -> WidthTerm:
    """Compile ``pd`` into a fusion-free term whose value is ``a``, all colours 0.

    Bags are processed left to right.  Elements of the current bag hold
    distinct non-zero colours, elements that left the bag hold colour 0, so
    an ``add`` over the colours of a tuple inside the bag adds that tuple only.
    """
    _check(a, pd)
    if not pd.bags:
        return WidthTerm(Empty(), a.signature)
    color: dict[str, int] = {}
    done: set = set()
    node = None
    previous: frozenset = frozenset()
    for bag in pd.bags:
        leaving = previous - bag
        if node is not None and leaving:
            node = _to_zero(node, leaving, color)
        taken = {color[x] for x in bag & previous}
        free = (c for c in range(1, len(bag) + 1) if c not in taken)
        for x in sorted_ids(bag - previous):
            color[x] = next(free)
            leaf = colored_leaf(color[x])
            node = leaf if node is None else DisjointUnion(node, leaf)
        node = _add_tuples(node, a, bag, color, done)
        previous = bag
    node = _to_zero(node, previous, color)
    return WidthTerm(node, a.signature)


def _assign_tree_colors(td: TreeDecomposition) -> dict[str, int]:
    """Colour vertices top-down so that every bag gets distinct non-zero colours."""
    color: dict[str, int] = {}
    kids = td.children()
    stack = [td.root]
    while stack:
        n = stack.pop()
        bag = td.bags[n]
        taken = {color[x] for x in bag if x in color}
        free = (c for c in range(1, len(bag) + 1) if c not in taken)
        for x in sorted_ids(bag):
            if x not in color:
                color[x] = next(free)
        stack.extend(reversed(kids[n]))
    return color


def tree_to_ucwf_term(a: Structure, td: TreeDecomposition) -> WidthTerm:
    """Compile ``td`` into a term with fusion whose value is ``a``, all colours 0.

    Every vertex gets one colour for the whole term, distinct within each bag.
    A child's subterm, with its departing vertices recoloured to 0, is joined
    to its parent's bag by a union followed by one fuse per shared vertex:
    both copies of a shared vertex carry the same colour and nothing else
    does, so each fuse merges exactly that pair.
    """
    _check(a, td)
    if not td.bags:
        return WidthTerm(Empty(), a.signature)
    color = _assign_tree_colors(td)
    kids = td.children()
    done: set = set()

    # postorder without recursion
    built: dict[str, tm.Node] = {}
    stack = [(td.root, False)]
    while stack:
        n, expanded = stack.pop()
        if not expanded:
            stack.append((n, True))
            stack.extend((c, False) for c in reversed(kids[n]))
            continue
        bag = td.bags[n]
        node = tm.union_all(colored_leaf(color[x]) for x in sorted_ids(bag))
        for c in kids[n]:
            sub = _to_zero(built.pop(c), td.bags[c] - bag, color)
            node = DisjointUnion(node, sub)
            for x in sorted_ids(td.bags[c] & bag):
                node = tm.Fuse(color[x], node)
        built[n] = _add_tuples(node, a, bag, color, done)
    root = _to_zero(built[td.root], td.bags[td.root], color)
    return WidthTerm(root, a.signature)


# --------------------------------------------------------------------------
# apex gadget


def _fresh_apex(universe) -> str:
    if "t" not in universe:
        return "t"
    i = 1
    while f"t{i}" in universe:
        i += 1
    return f"t{i}"


def apex_gadget(a: Structure) -> GadgetStructure:
    """Ternary encoding over ``A + {t}``: R(x, c, y) iff x != y, c in {x, y},
    and either E(x, y) holds or x is the apex."""
    syms = a.signature.symbols
    if len(syms) != 1 or syms[0].arity != 2:
        raise WrongSignature("apex gadget needs a signature with one binary symbol")
    edge = a.relations[syms[0].name]
    t = _fresh_apex(set(a.universe))
    triples = set()
    for x, y in edge:
        if x != y:
            triples.add((x, x, y))
            triples.add((x, y, y))
    for y in a.universe:
        triples.add((t, t, y))
        triples.add((t, y, y))
    inner = Structure(GADGET_SIGNATURE, a.universe + (t,), {"R": triples})
    return GadgetStructure(inner=inner, apex=t, origin=a)


def hard_family(n: int) -> GadgetStructure:
    """Gadget over the ternary tree T_n (T_0 a point, T_j+1 a root over three T_j)."""
    return apex_gadget(ternary_tree(n))


def ternary_tree(n: int) -> Structure:
    if n < 0:
        raise ValueError("depth must be non-negative")
    vertices = ["v"]
    edges = []
    frontier = ["v"]
    for _ in range(n):
        nxt = []
        for p in frontier:
            for i in range(3):
                c = f"{p}{i}"
                vertices.append(c)
                edges.append((p, c))
                nxt.append(c)
        frontier = nxt
    # T_n is built bottom-up in the definition; growing leaves top-down gives the same tree
    return graph_structure(vertices, edges)


def find_apex(s: Structure) -> str | None:
    """The element t with R(t,t,y) and R(t,y,y) for every other y, if unique."""
    if s.signature != GADGET_SIGNATURE:
        return None
    r = s.relations["R"]
    found = [
        t
        for t in s.universe
        if all((t, t, y) in r and (t, y, y) in r for y in s.universe if y != t)
    ]
    return found[0] if len(found) == 1 else None


def gadget_origin(s: Structure, apex: str) -> Structure:
    """Recover the encoded graph, raising NotGadgetShaped if ``s`` is not a gadget."""
    if s.signature != GADGET_SIGNATURE:
        raise NotGadgetShaped("gadget structures have exactly one ternary symbol R")
    rest = tuple(x for x in s.universe if x != apex)
    edges = {(x, y) for (x, c, y) in s.relations["R"] if x != apex and c == x}
    origin = Structure(Signature((Symbol("E", 2),)), rest, {"E": edges})
    rebuilt = apex_gadget(origin)
    expected = {
        tuple(apex if z == rebuilt.apex else z for z in t)
        for t in rebuilt.inner.relations["R"]
    }
    if expected != s.relations["R"]:
        raise NotGadgetShaped("relation R does not follow the gadget definition")
    return origin


# --------------------------------------------------------------------------
# extraction


def leaf_index(which) -> int:
    """Accept a leaf as an int, ``"3"`` or the element id ``"x3"``."""
    if isinstance(which, int):
        return which
    text = str(which)
    if text.startswith("x"):
        text = text[1:]
    if not text.isdigit():
        raise LeafNotApex(f"not a leaf id: {which!r}")
    return int(text)


def branch_trace(term: WidthTerm, leaf: int) -> list[BranchEntry]:
    """Entries from the root down to the ``leaf``-th singleton (preorder)."""
    # locate the path of preorder node indices to the leaf
    path_nodes = []
    count = 0
    stack = [(term.root, [])]
    target_path = None
    index = 0
    while stack:
        node, path = stack.pop()
        path = path + [index]
        index += 1
        if isinstance(node, Singleton):
            if count == leaf:
                target_path = path
                break
            count += 1
        stack.extend((c, path) for c in reversed(tm.children(node)))
    if target_path is None:
        raise LeafNotApex(f"term has no leaf number {leaf}")
    wanted = set(target_path)
    values = {}
    for i, node, value in tm.evaluate_nodes(term):
        if i in wanted:
            values[i] = (node, value)
    for i in target_path:
        node, value = values[i]
        path_nodes.append(BranchEntry(node, value, isolated_elements(value)))
    return path_nodes


def extract_path_decomposition(term: WidthTerm, leaf) -> PathDecomposition:
    """Read a path decomposition of the encoded graph off a gadget term.

    Walking from the root to the apex leaf, each entry contributes the set of
    its isolated elements minus the apex, up to the last entry where the
    apex is isolated.  The result is normalized and validated; a failing
    decomposition is raised as :class:`ExtractionInvalid`, never repaired.
    """
    leaf = leaf_index(leaf)
    value = tm.evaluate(term)
    apex = tm.leaf_id(leaf)
    if apex not in value.universe:
        raise LeafNotApex(f"leaf {leaf} does not survive to the root")
    if find_apex(value.structure) != apex:
        raise LeafNotApex(f"element {apex} of leaf {leaf} is not the gadget apex")
    origin = gadget_origin(value.structure, apex)
    trace = branch_trace(term, leaf)
    last = max(i for i, e in enumerate(trace) if apex in e.isolated)
    pd = normalize_path([e.isolated - {apex} for e in trace[: last + 1]])
    violations = validate_decomposition(gaifman_graph(origin), pd)
    if violations:
        raise ExtractionInvalid(violations, pd)
    return pd


def apex_leaf(term: WidthTerm) -> int:
    """Index of the singleton leaf whose element is the gadget apex."""
    value = tm.evaluate(term)
    apex = find_apex(value.structure)
    if apex is None:
        raise NotGadgetShaped("term value has no unique apex")
    return int(apex[1:])

