"""Finite relational structures, coloured structures and their primitive operations.

Element ids are strings.  Universes are kept sorted under :func:`id_key`, a
natural ordering in which ``x2 < x10``, so every operation is deterministic.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    ArityMismatch,
    DomainNotSubset,
    SignatureMismatch,
    TooLarge,
    UnknownSymbol,
)

_DIGITS = re.compile(r"(\d+)")

ISOMORPHISM_LIMIT = 16


def id_key(element: str) -> tuple:
    """Sort key for element ids: digit runs compare numerically."""
    parts = _DIGITS.split(element)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


def sorted_ids(ids: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(ids, key=id_key))


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Signature:
    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        symbols = tuple(
            s if isinstance(s, Symbol) else Symbol(*s) for s in self.symbols
        )
        object.__setattr__(self, "symbols", symbols)
        seen = set()
        for s in symbols:
            if s.name in seen:
                raise ValueError(f"duplicate relation symbol {s.name!r}")
            if s.arity < 1:
                raise ValueError(f"symbol {s.name!r} must have arity >= 1")
            seen.add(s.name)

    @classmethod
    def of(cls, **arities: int) -> Signature:
        """``Signature.of(E=2)`` builds a signature from keyword arities."""
        return cls(tuple(Symbol(n, a) for n, a in arities.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def arity(self, name: str) -> int:
        for s in self.symbols:
            if s.name == name:
                return s.arity
        raise UnknownSymbol(f"unknown relation symbol {name!r}")

    def __contains__(self, name) -> bool:
        return any(s.name == name for s in self.symbols)

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)


GRAPH_SIGNATURE = Signature.of(E=2)


@dataclass(frozen=True)
class Structure:
    """A finite structure: a universe and one tuple set per relation symbol."""

    signature: Signature
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        universe = sorted_ids(self.universe)
        if len(set(universe)) != len(universe):
            raise ValueError("universe contains duplicate ids")
        members = set(universe)
        rels = {}
        for name in self.relations:
            if name not in self.signature:
                raise UnknownSymbol(f"unknown relation symbol {name!r}")
        for sym in self.signature.symbols:
            tuples = frozenset(tuple(t) for t in self.relations.get(sym.name, ()))
            for t in tuples:
                if len(t) != sym.arity:
                    raise ArityMismatch(
                        f"tuple {t} has length {len(t)}, {sym.name} has arity {sym.arity}"
                    )
                for x in t:
                    if x not in members:
                        raise DomainNotSubset(f"tuple {t} uses {x!r} outside the universe")
            rels[sym.name] = tuples
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "relations", rels)

    def __len__(self):
        return len(self.universe)

    def tuples(self):
        """Yield ``(symbol, tuple)`` for every tuple, in a fixed order."""
        for name in self.signature.names:
            for t in sorted(self.relations[name], key=lambda t: tuple(map(id_key, t))):
                yield name, t

    def holds(self, name: str, *elements: str) -> bool:
        return tuple(elements) in self.relations[name]


@dataclass(frozen=True)
class ColoredStructure:
    structure: Structure
    coloring: Mapping[str, int]

    def __post_init__(self):
        coloring = dict(self.coloring)
        if set(coloring) != set(self.structure.universe):
            raise ValueError("coloring must be defined on exactly the universe")
        for x, c in coloring.items():
            if not isinstance(c, int) or c < 0:
                raise ValueError(f"colour of {x!r} must be a natural number, got {c!r}")
        object.__setattr__(self, "coloring", coloring)

    @classmethod
    def uncolored(cls, structure: Structure) -> ColoredStructure:
        """All elements get colour 0."""
        return cls(structure, {x: 0 for x in structure.universe})

    @property
    def signature(self) -> Signature:
        return self.structure.signature

    @property
    def universe(self) -> tuple[str, ...]:
        return self.structure.universe

    @property
    def relations(self) -> Mapping[str, frozenset]:
        return self.structure.relations

    def __len__(self):
        return len(self.structure)

    def is_k_colored(self, k: int) -> bool:
        return all(c < k for c in self.coloring.values())

    def colors(self) -> set[int]:
        return set(self.coloring.values())


@dataclass(frozen=True)
class GaifmanGraph:
    vertices: tuple[str, ...]
    edges: frozenset = frozenset()

    def __post_init__(self):
        vertices = sorted_ids(self.vertices)
        members = set(vertices)
        edges = set()
        for e in self.edges:
            e = frozenset(e)
            if len(e) != 2:
                raise ValueError(f"edge {set(e)} is not a pair of distinct vertices")
            if not e <= members:
                raise DomainNotSubset(f"edge {set(e)} leaves the vertex set")
            edges.add(e)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(edges))

    def neighbors(self) -> dict[str, set[str]]:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def without(self, vertex: str) -> GaifmanGraph:
        return GaifmanGraph(
            tuple(v for v in self.vertices if v != vertex),
            frozenset(e for e in self.edges if vertex not in e),
        )

    def __len__(self):
        return len(self.vertices)


def graph_structure(vertices: Iterable, edges: Iterable, symbol: str = "E") -> Structure:
    """Encode an undirected graph as a symmetric binary relation."""
    tuples = set()
    for u, v in edges:
        u, v = str(u), str(v)
        tuples.add((u, v))
        tuples.add((v, u))
    return Structure(
        Signature((Symbol(symbol, 2),)),
        tuple(str(v) for v in vertices),
        {symbol: tuples},
    )


def gaifman_graph(s: Structure | ColoredStructure) -> GaifmanGraph:
    if isinstance(s, ColoredStructure):
        s = s.structure
    edges = set()
    for tuples in s.relations.values():
        for t in tuples:
            for u, v in itertools.combinations(set(t), 2):
                edges.add(frozenset((u, v)))
    return GaifmanGraph(s.universe, frozenset(edges))


def _right_renaming(left: Iterable[str], right: Iterable[str]) -> dict[str, str]:
    left, right = set(left), list(right)
    if left.isdisjoint(right):
        return {x: x for x in right}
    tag = "'"
    while any(x + tag in left for x in right):
        tag += "'"
    return {x: x + tag for x in right}


def disjoint_union(a: ColoredStructure, b: ColoredStructure) -> ColoredStructure:
    """Left ids are kept; if ids collide, every right id gets a prime suffix."""
    if a.signature != b.signature:
        raise SignatureMismatch("disjoint union of structures over different signatures")
    rename = _right_renaming(a.universe, b.universe)
    rels = {}
    for name in a.signature.names:
        moved = {tuple(rename[x] for x in t) for t in b.relations[name]}
        rels[name] = a.relations[name] | moved
    coloring = dict(a.coloring)
    coloring.update({rename[x]: c for x, c in b.coloring.items()})
    return ColoredStructure(
        Structure(a.signature, a.universe + tuple(rename.values()), rels), coloring
    )


def recolor(a: ColoredStructure, f: Mapping[int, int]) -> ColoredStructure:
    """Apply ``f`` to every colour; colours missing from ``f`` stay fixed."""
    return ColoredStructure(a.structure, {x: f.get(c, c) for x, c in a.coloring.items()})


def add_relation(a: ColoredStructure, symbol: str, colors) -> ColoredStructure:
    arity = a.signature.arity(symbol)
    colors = tuple(colors)
    if len(colors) != arity:
        raise ArityMismatch(
            f"{symbol} has arity {arity} but {len(colors)} colours were given"
        )
    by_color = defaultdict(list)
    for x, c in a.coloring.items():
        by_color[c].append(x)
    new = set(itertools.product(*(by_color.get(c, ()) for c in colors)))
    if new <= a.relations[symbol]:
        return a
    rels = dict(a.relations)
    rels[symbol] = rels[symbol] | new
    return ColoredStructure(Structure(a.signature, a.universe, rels), a.coloring)


def quotient(a: ColoredStructure, colorset) -> ColoredStructure:
    """Merge all elements whose shared colour lies in ``colorset``.

    Each class is named after its smallest member and keeps the members'
    colour; a tuple of classes holds iff some tuple of members holds.
    """
    colorset = set(colorset)
    groups = defaultdict(list)
    rep = {}
    for x in a.universe:
        c = a.coloring[x]
        if c in colorset:
            groups[c].append(x)
        else:
            rep[x] = x
    for members in groups.values():
        # universe is sorted, so the first member is the smallest
        for x in members:
            rep[x] = members[0]
    universe = sorted_ids(set(rep.values()))
    rels = {
        name: {tuple(rep[x] for x in t) for t in tuples}
        for name, tuples in a.relations.items()
    }
    coloring = {x: a.coloring[x] for x in universe}
    return ColoredStructure(Structure(a.signature, universe, rels), coloring)


def induced_substructure(s: Structure, domain) -> Structure:
    domain = set(domain)
    if not domain <= set(s.universe):
        extra = sorted_ids(domain - set(s.universe))
        raise DomainNotSubset(f"elements {list(extra)} are not in the universe")
    rels = {
        name: {t for t in tuples if domain.issuperset(t)}
        for name, tuples in s.relations.items()
    }
    return Structure(s.signature, tuple(domain), rels)


def restrict(a: ColoredStructure, domain) -> ColoredStructure:
    sub = induced_substructure(a.structure, domain)
    return ColoredStructure(sub, {x: a.coloring[x] for x in sub.universe})


def isolated_elements(a: ColoredStructure) -> frozenset:
    """Elements that are the only holder of their colour (colour 0 included)."""
    counts = Counter(a.coloring.values())
    return frozenset(x for x, c in a.coloring.items() if counts[c] == 1)


def _invariants(a: ColoredStructure) -> dict[str, tuple]:
    """Isomorphism-invariant label per element used to prune candidate images."""
    inv = {x: [a.coloring[x]] for x in a.universe}
    for name in a.signature.names:
        arity = a.signature.arity(name)
        counts = {x: [0] * arity for x in a.universe}
        for t in a.relations[name]:
            for i, x in enumerate(t):
                counts[x][i] += 1
        for x in a.universe:
            inv[x].extend(counts[x])
    return {x: tuple(v) for x, v in inv.items()}


def is_isomorphic(
    a: ColoredStructure, b: ColoredStructure, limit: int = ISOMORPHISM_LIMIT
) -> bool:
    """Colour-preserving isomorphism test by pruned backtracking."""
    if len(a) > limit or len(b) > limit:
        raise TooLarge(f"isomorphism test limited to {limit} elements")
    if a.signature != b.signature or len(a) != len(b):
        return False
    for name in a.signature.names:
        if len(a.relations[name]) != len(b.relations[name]):
            return False
    inv_a, inv_b = _invariants(a), _invariants(b)
    if Counter(inv_a.values()) != Counter(inv_b.values()):
        return False

    classes_b = defaultdict(list)
    for y, key in inv_b.items():
        classes_b[key].append(y)
    # most constrained elements first, then follow Gaifman adjacency
    adj = gaifman_graph(a).neighbors()
    order = []
    remaining = sorted(a.universe, key=lambda x: (len(classes_b[inv_a[x]]), id_key(x)))
    while remaining:
        placed = set(order)
        nxt = next((x for x in remaining if adj[x] & placed), remaining[0])
        order.append(nxt)
        remaining.remove(nxt)
    position = {x: i for i, x in enumerate(order)}
    # check each tuple once, when its last element is mapped
    checks = defaultdict(list)
    for name, tuples in a.relations.items():
        for t in tuples:
            checks[max(position[x] for x in t)].append((name, t))

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        x = order[i]
        for y in classes_b[inv_a[x]]:
            if y in used:
                continue
            mapping[x] = y
            ok = all(
                tuple(mapping[z] for z in t) in b.relations[name]
                for name, t in checks[i]
            )
            if ok:
                used.add(y)
                if extend(i + 1):
                    return True
                used.discard(y)
            del mapping[x]
        return False

    return extend(0)
