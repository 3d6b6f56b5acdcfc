"""Independent oracles and generators shared by the test modules.

Nothing here calls into the solvers it is used to check.
"""

from __future__ import annotations

import itertools
import random

import networkx as nx

from widthlab import terms as tm
from widthlab.structures import (
    ColoredStructure,
    GaifmanGraph,
    Signature,
    Structure,
    Symbol,
    graph_structure,
)


# -- brute force over vertex orderings ------------------------------------


def _adjacency(g: GaifmanGraph):
    adj = {v: set() for v in g.vertices}
    for e in g.edges:
        u, v = tuple(e)
        adj[u].add(v)
        adj[v].add(u)
    return adj


def brute_treewidth(g: GaifmanGraph) -> int:
    """Minimum over all elimination orderings of the max degree at elimination."""
    if not g.vertices:
        return -1
    best = len(g.vertices)
    for order in itertools.permutations(g.vertices):
        adj = {v: set(n) for v, n in _adjacency(g).items()}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            for u in nb:
                adj[u] |= nb - {u}
                adj[u].discard(v)
            if width >= best:
                break
        best = min(best, width)
    return best


def brute_pathwidth(g: GaifmanGraph) -> int:
    """Minimum over all layouts of the largest boundary of a prefix."""
    if not g.vertices:
        return -1
    adj = _adjacency(g)
    best = len(g.vertices)
    for order in itertools.permutations(g.vertices):
        placed = set()
        worst = 0
        for v in order:
            placed.add(v)
            worst = max(worst, sum(1 for u in placed if adj[u] - placed))
            if worst >= best:
                break
        best = min(best, worst)
    return best


def brute_isomorphic(a: ColoredStructure, b: ColoredStructure) -> bool:
    if len(a) != len(b) or a.signature != b.signature:
        return False
    for perm in itertools.permutations(b.universe):
        f = dict(zip(a.universe, perm))
        if any(a.coloring[x] != b.coloring[f[x]] for x in a.universe):
            continue
        if all(
            {tuple(f[x] for x in t) for t in a.relations[n]} == b.relations[n]
            for n in a.signature.names
        ):
            return True
    return False


# -- graph families -------------------------------------------------------


def nx_to_structure(g: nx.Graph) -> Structure:
    return graph_structure([f"v{v}" for v in g.nodes], [(f"v{u}", f"v{v}") for u, v in g.edges])


def atlas_graphs(max_n: int, connected_only: bool):
    """All graphs up to isomorphism on 1..max_n vertices (max_n <= 7)."""
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n == 0 or n > max_n:
            continue
        if connected_only and not nx.is_connected(g):
            continue
        yield g


def all_trees(max_n: int):
    yield nx.empty_graph(1)
    for n in range(2, max_n + 1):
        yield from nx.nonisomorphic_trees(n)


# -- random structures and terms ------------------------------------------


def random_signature(rng: random.Random, max_arity: int = 3) -> Signature:
    count = rng.randint(1, 3)
    return Signature(tuple(Symbol(f"R{i}", rng.randint(1, max_arity)) for i in range(count)))


def random_structure(rng: random.Random, n: int, signature: Signature, density=0.25) -> Structure:
    universe = [f"e{i}" for i in range(n)]
    rels = {}
    for s in signature.symbols:
        tuples = set()
        for t in itertools.product(universe, repeat=s.arity):
            if rng.random() < density / max(1, n ** (s.arity - 2)):
                tuples.add(t)
        rels[s.name] = tuples
    return Structure(signature, universe, rels)


def random_term(
    rng: random.Random,
    signature: Signature,
    k: int,
    max_leaves: int = 12,
    fusion: bool = False,
    stray: float = 0.0,
) -> tm.WidthTerm:
    """Random term with colour literals below k; ``stray`` is the chance of a literal == k."""

    def color():
        return k if rng.random() < stray else rng.randrange(k)

    def build(leaves: int) -> tm.Node:
        if leaves == 0:
            return tm.Empty()
        if leaves == 1 and rng.random() < 0.5:
            return tm.Singleton()
        roll = rng.random()
        if leaves >= 2 and roll < 0.35:
            left = rng.randint(1, leaves - 1)
            return tm.DisjointUnion(build(left), build(leaves - left))
        child = build(leaves)
        if roll < 0.6:
            size = rng.randint(1, k)
            sources = rng.sample(range(k + 1 if stray else k), min(size, k))
            return tm.Recolor(tuple((c, color()) for c in sources), child)
        if roll < 0.85 or not fusion:
            sym = rng.choice(signature.symbols)
            return tm.AddRel(sym.name, tuple(color() for _ in range(sym.arity)), child)
        return tm.Fuse(color(), child)

    return tm.WidthTerm(build(rng.randint(0, max_leaves)), signature)
