"""Tree and path decompositions of Gaifman graphs, plus exact width solvers.

The solvers are exponential subset dynamic programs over bitmasks:
tree-width through elimination orderings, path-width through the vertex
separation number.  Both return a witness decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .errors import EmptyDecomposition, TooLarge
from .structures import GaifmanGraph, id_key, sorted_ids

TREEWIDTH_LIMIT = 16
PATHWIDTH_LIMIT = 18


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree given by a parent map (root maps to ``None``) and one bag per node."""

    parent: Mapping[str, str | None]
    bags: Mapping[str, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "bags", {n: frozenset(b) for n, b in self.bags.items()})

    @property
    def root(self) -> str | None:
        roots = [n for n, p in self.parent.items() if p is None]
        return roots[0] if len(roots) == 1 else None

    def children(self) -> dict[str, list[str]]:
        kids = {n: [] for n in self.parent}
        for n in sorted(self.parent, key=id_key):
            p = self.parent[n]
            if p is not None and p in kids:
                kids[p].append(n)
        return kids


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    def as_tree(self) -> TreeDecomposition:
        parent = {}
        bags = {}
        for i, bag in enumerate(self.bags):
            parent[f"p{i}"] = f"p{i - 1}" if i else None
            bags[f"p{i}"] = bag
        return TreeDecomposition(parent, bags)


Decomposition = Union[TreeDecomposition, PathDecomposition]


def _tree_shape_violations(td: TreeDecomposition) -> list[str]:
    out = []
    if set(td.parent) != set(td.bags):
        out.append("tree nodes and bag keys differ")
    if not td.parent:
        return out
    roots = [n for n, p in td.parent.items() if p is None]
    if len(roots) != 1:
        out.append(f"expected exactly one root, found {len(roots)}")
    for n, p in td.parent.items():
        if p is not None and p not in td.parent:
            out.append(f"node {n!r} has unknown parent {p!r}")
    # every node must reach the root without revisiting
    for n in td.parent:
        seen = set()
        cur = n
        while cur is not None and cur in td.parent:
            if cur in seen:
                out.append(f"cycle through node {n!r}")
                break
            seen.add(cur)
            cur = td.parent[cur]
    return out


def validate_decomposition(g: GaifmanGraph, d: Decomposition) -> list[str]:
    """List every violated decomposition condition; an empty list means valid."""
    td = d.as_tree() if isinstance(d, PathDecomposition) else d
    violations = _tree_shape_violations(td)
    if violations:
        return violations
    vertices = set(g.vertices)
    for n in sorted(td.bags, key=id_key):
        extra = td.bags[n] - vertices
        if extra:
            violations.append(f"bag {n!r} contains non-vertices {sorted_ids(extra)}")
    occurs = {v: [] for v in g.vertices}
    for n, bag in td.bags.items():
        for v in bag:
            if v in occurs:
                occurs[v].append(n)
    for v in g.vertices:
        if not occurs[v]:
            violations.append(f"vertex {v!r} is in no bag")
    for e in sorted(g.edges, key=lambda e: sorted(map(id_key, e))):
        if not any(e <= bag for bag in td.bags.values()):
            u, v = sorted_ids(e)
            violations.append(f"edge {{{u}, {v}}} is not covered by any bag")
    for v in g.vertices:
        nodes = set(occurs[v])
        if len(nodes) <= 1:
            continue
        # inside a tree, a node set is connected iff exactly one member has
        # its parent outside the set
        tops = [n for n in nodes if td.parent[n] not in nodes]
        if len(tops) != 1:
            violations.append(f"bags containing {v!r} are not connected")
    return violations


def width_of(d: Decomposition) -> int:
    bags = d.bags if isinstance(d, PathDecomposition) else list(d.bags.values())
    if not bags:
        raise EmptyDecomposition("decomposition has no bags")
    return max(len(b) for b in bags) - 1


def normalize_path(bags: Sequence) -> PathDecomposition:
    """Drop empty bags and bags contained in a neighbouring bag."""
    out = [frozenset(b) for b in bags if b]
    changed = True
    while changed:
        changed = False
        for i, bag in enumerate(out):
            if (i > 0 and bag <= out[i - 1]) or (i + 1 < len(out) and bag <= out[i + 1]):
                del out[i]
                changed = True
                break
    return PathDecomposition(tuple(out))


def normalize_tree(td: TreeDecomposition) -> TreeDecomposition:
    """Drop empty bags and contract tree edges whose one bag contains the other."""
    parent = dict(td.parent)
    bags = dict(td.bags)

    def kids_of(n):
        return sorted((c for c, q in parent.items() if q == n), key=id_key)

    def drop(n, heir):
        # heir takes over n's parent and n's other children
        for c in kids_of(n):
            if c != heir:
                parent[c] = heir
        if heir != parent[n]:
            parent[heir] = parent[n]
        del parent[n]
        del bags[n]

    changed = True
    while changed:
        changed = False
        for n in sorted(parent, key=id_key):
            p = parent[n]
            kids = kids_of(n)
            if not bags[n]:
                if p is not None:
                    drop(n, p)
                elif kids:
                    drop(n, kids[0])
                else:
                    del parent[n], bags[n]
            elif p is not None and bags[n] <= bags[p]:
                drop(n, p)
            elif p is not None and bags[p] <= bags[n]:
                drop(p, n)
            else:
                continue
            changed = True
            break
    return TreeDecomposition(parent, bags)


# --------------------------------------------------------------------------
# exact solvers


def _bitmask_graph(g: GaifmanGraph):
    order = list(g.vertices)
    index = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for e in g.edges:
        u, v = (index[x] for x in e)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return order, adj


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _q_size(adj, inside: int, v: int) -> int:
    """|Q(S, v)|: vertices outside S + v reachable from v through S."""
    comp = 1 << v
    frontier = comp
    reach = 0
    while frontier:
        nb = 0
        for u in _bits(frontier):
            nb |= adj[u]
        reach |= nb
        frontier = nb & inside & ~comp
        comp |= frontier
    return bin(reach & ~comp & ~inside).count("1")


def decomposition_from_elimination(g: GaifmanGraph, order: Sequence[str]) -> TreeDecomposition:
    """Standard elimination-ordering tree decomposition, normalized."""
    if not g.vertices:
        return TreeDecomposition({}, {})
    adj = g.neighbors()
    position = {v: i for i, v in enumerate(order)}
    filled = {v: set(adj[v]) for v in g.vertices}
    bags = {}
    higher = {}
    for v in order:
        later = {u for u in filled[v] if position[u] > position[v]}
        higher[v] = later
        bags[v] = frozenset(later | {v})
        for u in later:
            filled[u] |= later - {u}
    parent = {}
    roots = []
    for v in order:
        if higher[v]:
            parent[v] = min(higher[v], key=position.__getitem__)
        else:
            roots.append(v)
    # one root per component; chain the component roots together
    parent[roots[-1]] = None
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    names = {v: f"b{i}" for i, v in enumerate(order)}
    return normalize_tree(
        TreeDecomposition(
            {names[v]: (names[p] if p is not None else None) for v, p in parent.items()},
            {names[v]: bag for v, bag in bags.items()},
        )
    )


def exact_treewidth(g: GaifmanGraph, limit_n: int = TREEWIDTH_LIMIT):
    """Return ``(tw, witness)``.  The empty graph has tree-width -1 and no bags."""
    n = len(g.vertices)
    if n > limit_n:
        raise TooLarge(f"exact tree-width limited to {limit_n} vertices, got {n}")
    if n == 0:
        return -1, TreeDecomposition({}, {})
    order, adj = _bitmask_graph(g)
    full = (1 << n) - 1
    # best[S]: min over orderings of S (eliminated first) of the max Q-size
    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = -1
    for s in range(1, full + 1):
        value = n
        pick = -1
        for v in _bits(s):
            rest = s & ~(1 << v)
            cand = best[rest]
            if cand >= value:
                continue
            q = _q_size(adj, rest, v)
            if q > cand:
                cand = q
            if cand < value:
                value, pick = cand, v
        best[s] = value
        choice[s] = pick
    elimination = []
    s = full
    while s:
        v = choice[s]
        elimination.append(v)
        s &= ~(1 << v)
    elimination.reverse()
    td = decomposition_from_elimination(g, [order[i] for i in elimination])
    return best[full], td



def path_from_layout(g: GaifmanGraph, layout: Sequence[str]) -> PathDecomposition:
    """Bag i = {v_i} plus the earlier vertices that still have later neighbours."""
    adj = g.neighbors()
    placed: set[str] = set()
    bags = []
    for v in layout:
        boundary = {u for u in placed if adj[u] - placed}
        bags.append(boundary | {v})
        placed.add(v)
    return normalize_path(bags)


def exact_pathwidth(g: GaifmanGraph, limit_n: int = PATHWIDTH_LIMIT):
    """Return ``(pw, witness)`` via the vertex separation number."""
    n = len(g.vertices)
    if n > limit_n:
        raise TooLarge(f"exact path-width limited to {limit_n} vertices, got {n}")
    if n == 0:
        return -1, PathDecomposition(())
    order, adj = _bitmask_graph(g)
    full = (1 << n) - 1
    boundary = [0] * (1 << n)
    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    for s in range(1, full + 1):
        # boundary of S: members with a neighbour outside S
        boundary[s] = sum(1 for u in _bits(s) if adj[u] & ~s)
        value, pick = n, -1
        for u in _bits(s):
            cand = best[s & ~(1 << u)]
            if cand < value:
                value, pick = cand, u
        best[s] = max(value, boundary[s])
        choice[s] = pick
    layout = []
    s = full
    while s:
        v = choice[s]
        layout.append(v)
        s &= ~(1 << v)
    layout.reverse()
    pd = path_from_layout(g, [order[i] for i in layout])
    return best[full], pd
