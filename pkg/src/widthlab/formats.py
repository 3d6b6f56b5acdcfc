"""JSON file formats for structures and decompositions.

Canonical form: sorted keys, universe in id order, tuples sorted, two-space
indentation, trailing newline.  Writing what was read gives the same bytes.
"""

from __future__ import annotations

import json

from .decompositions import PathDecomposition, TreeDecomposition
from .structures import (
    ColoredStructure,
    Signature,
    Structure,
    Symbol,
    id_key,
    sorted_ids,
)


class FormatError(ValueError):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def signature_from_json(doc) -> Signature:
    try:
        return Signature(tuple(Symbol(str(s["name"]), int(s["arity"])) for s in doc))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad signature: {exc}") from exc


def signature_to_json(sig: Signature):
    return [{"arity": s.arity, "name": s.name} for s in sig.symbols]


def structure_to_json(a: ColoredStructure | Structure) -> str:
    if isinstance(a, Structure):
        a = ColoredStructure.uncolored(a)
    doc = {
        "signature": signature_to_json(a.signature),
        "universe": list(a.universe),
        "relations": {
            name: sorted((list(t) for t in a.relations[name]), key=lambda t: [id_key(x) for x in t])
            for name in a.signature.names
        },
        "coloring": {x: a.coloring[x] for x in a.universe},
    }
    return _dump(doc)


def structure_from_json(text: str) -> ColoredStructure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "universe" not in doc or "signature" not in doc:
        raise FormatError("structure file needs 'signature' and 'universe'")
    sig = signature_from_json(doc["signature"])
    universe = tuple(str(x) for x in doc["universe"])
    rels = {name: {tuple(map(str, t)) for t in tuples} for name, tuples in doc.get("relations", {}).items()}
    try:
        structure = Structure(sig, universe, rels)
        coloring = {x: 0 for x in universe}
        for x, c in doc.get("coloring", {}).items():
            if x not in coloring:
                raise FormatError(f"coloured element {x!r} is not in the universe")
            coloring[x] = c
        return ColoredStructure(structure, coloring)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc


def decomposition_to_json(d: TreeDecomposition | PathDecomposition) -> str:
    if isinstance(d, PathDecomposition):
        nodes = [
            {"bag": list(sorted_ids(bag)), "id": f"p{i}", "parent": f"p{i - 1}" if i else None}
            for i, bag in enumerate(d.bags)
        ]
        return _dump({"kind": "path", "nodes": nodes})
    order = []
    kids = d.children()
    stack = [d.root] if d.root is not None else []
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(reversed(kids[n]))
    nodes = [{"bag": list(sorted_ids(d.bags[n])), "id": n, "parent": d.parent[n]} for n in order]
    return _dump({"kind": "tree", "nodes": nodes})


def decomposition_from_json(text: str) -> TreeDecomposition | PathDecomposition:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") not in ("tree", "path"):
        raise FormatError("decomposition file needs kind 'tree' or 'path'")
    nodes = doc.get("nodes", [])
    try:
        if doc["kind"] == "path":
            return PathDecomposition(tuple(frozenset(map(str, n["bag"])) for n in nodes))
        parent = {str(n["id"]): (None if n.get("parent") is None else str(n["parent"])) for n in nodes}
        bags = {str(n["id"]): frozenset(map(str, n["bag"])) for n in nodes}
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad decomposition node: {exc}") from exc
    if len(parent) != len(nodes):
        raise FormatError("duplicate node ids")
    if nodes and sum(p is None for p in parent.values()) != 1:
        raise FormatError("tree decomposition needs exactly one root (null parent)")
    return TreeDecomposition(parent, bags)
