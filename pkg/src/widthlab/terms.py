"""Width terms: the expression language for unary clique-width, with and without fusion.

Concrete syntax (``;`` starts a comment that runs to end of line)::

    (empty)                      empty structure
    (one)                        single element, colour 0
    (u T1 T2)                    disjoint union
    (rho ((c d) ...) T)          recolour c -> d, unlisted colours fixed
    (add SYM (c0 ... cn-1) T)    add every SYM-tuple whose colours match
    (fuse c T)                   merge all elements of colour c

Leaves are numbered in preorder; the element created by the i-th
``(one)`` is named ``x{i}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from . import structures as st
from .errors import ArityMismatch, TermSyntaxError, UnknownSymbol
from .structures import ColoredStructure, Signature, Structure, Symbol


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Singleton:
    pass


@dataclass(frozen=True)
class DisjointUnion:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Recolor:
    table: tuple[tuple[int, int], ...]
    child: "Node"

    def __post_init__(self):
        table = tuple((int(c), int(d)) for c, d in self.table)
        sources = [c for c, _ in table]
        if len(set(sources)) != len(sources):
            raise ValueError(f"recolour table lists a colour twice: {table}")
        object.__setattr__(self, "table", table)

    def mapping(self) -> dict[int, int]:
        return dict(self.table)


@dataclass(frozen=True)
class AddRel:
    symbol: str
    colors: tuple[int, ...]
    child: "Node"

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))


@dataclass(frozen=True)
class Fuse:
    color: int
    child: "Node"


Node = Union[Empty, Singleton, DisjointUnion, Recolor, AddRel, Fuse]


@dataclass(frozen=True)
class WidthTerm:
    """A term tree together with the signature it is written over."""

    root: Node
    signature: Signature = field(default_factory=lambda: Signature(()))

    def nodes(self) -> Iterator[Node]:
        return iter_nodes(self.root)

    def __str__(self):
        return render_term(self)


@dataclass(frozen=True)
class TermStats:
    colors_used: int
    node_count: int
    fusion_count: int


def children(node: Node) -> tuple:
    if isinstance(node, DisjointUnion):
        return (node.left, node.right)
    if isinstance(node, (Recolor, AddRel, Fuse)):
        return (node.child,)
    return ()


def iter_nodes(node: Node) -> Iterator[Node]:
    """Preorder traversal without recursion (terms can be deep)."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def colored_leaf(color: int) -> Node:
    """A single element carrying ``color``."""
    one = Singleton()
    return one if color == 0 else Recolor(((0, color),), one)


def union_all(nodes) -> Node:
    nodes = list(nodes)
    if not nodes:
        return Empty()
    acc = nodes[0]
    for n in nodes[1:]:
        acc = DisjointUnion(acc, n)
    return acc


# --------------------------------------------------------------------------
# evaluation


def leaf_id(index: int) -> str:
    return f"x{index}"


def _empty_value(signature: Signature) -> ColoredStructure:
    return ColoredStructure(Structure(signature, ()), {})


def _apply(node: Node, values: list[ColoredStructure]) -> ColoredStructure:
    if isinstance(node, DisjointUnion):
        return st.disjoint_union(values[0], values[1])
    (value,) = values
    if isinstance(node, Recolor):
        return st.recolor(value, node.mapping())
    if isinstance(node, AddRel):
        return st.add_relation(value, node.symbol, node.colors)
    if isinstance(node, Fuse):
        return st.quotient(value, {node.color})
    raise TypeError(f"not a term node: {node!r}")


def evaluate_nodes(term: WidthTerm):
    """Evaluate bottom-up, yielding ``(preorder_index, node, value)`` for every node.

    Values are yielded in postorder.  Leaf numbering follows preorder, so
    every subterm value uses the same element ids it has inside the whole term.
    """
    signature = term.signature
    leaf_count = 0
    node_index = 0
    # explicit stack of (node, index, visited); avoids recursion limits
    stack = [(term.root, None, False)]
    results: list[ColoredStructure] = []
    arity_of = {s.name: s.arity for s in signature.symbols}
    while stack:
        node, index, visited = stack.pop()
        if not visited:
            index = node_index
            node_index += 1
            if isinstance(node, Empty):
                value = _empty_value(signature)
                results.append(value)
                yield index, node, value
                continue
            if isinstance(node, Singleton):
                x = leaf_id(leaf_count)
                leaf_count += 1
                value = ColoredStructure(Structure(signature, (x,)), {x: 0})
                results.append(value)
                yield index, node, value
                continue
            if isinstance(node, AddRel):
                if node.symbol not in arity_of:
                    raise UnknownSymbol(f"unknown relation symbol {node.symbol!r}")
                if len(node.colors) != arity_of[node.symbol]:
                    raise ArityMismatch(
                        f"{node.symbol} has arity {arity_of[node.symbol]} "
                        f"but {len(node.colors)} colours were given"
                    )
            stack.append((node, index, True))
            for child in reversed(children(node)):
                stack.append((child, None, False))
        else:
            n = len(children(node))
            args = results[-n:]
            del results[-n:]
            value = _apply(node, args)
            results.append(value)
            yield index, node, value


def evaluate(term: WidthTerm) -> ColoredStructure:
    value = None
    for _, _, value in evaluate_nodes(term):
        pass
    return value


def stats(term: WidthTerm) -> TermStats:
    top = 0
    count = fusions = 0
    for node in term.nodes():
        count += 1
        if isinstance(node, Recolor):
            for c, d in node.table:
                top = max(top, c, d)
        elif isinstance(node, AddRel):
            top = max(top, *node.colors) if node.colors else top
        elif isinstance(node, Fuse):
            fusions += 1
            top = max(top, node.color)
    return TermStats(colors_used=top + 1, node_count=count, fusion_count=fusions)


def validate(term: WidthTerm, k: int, allow_fusion: bool) -> list[str]:
    """Return the rule violations of ``term`` as a k-colour term (empty list means ok)."""
    violations = []

    def literal(c, where):
        if c >= k:
            violations.append(f"colour literal {c} >= k={k} in {where}")

    for node in term.nodes():
        if isinstance(node, Recolor):
            for c, d in node.table:
                literal(c, "rho")
                literal(d, "rho")
        elif isinstance(node, AddRel):
            if node.symbol not in term.signature:
                violations.append(f"unknown relation symbol {node.symbol!r}")
            else:
                arity = term.signature.arity(node.symbol)
                if arity != len(node.colors):
                    violations.append(
                        f"arity mismatch: {node.symbol} has arity {arity}, "
                        f"got {len(node.colors)} colours"
                    )
            for c in node.colors:
                literal(c, "add")
        elif isinstance(node, Fuse):
            if not allow_fusion:
                violations.append("fusion not permitted")
            literal(node.color, "fuse")
    return violations


# --------------------------------------------------------------------------
# concrete syntax

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _tokenize(text: str):
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        if not tok[0].isspace() and tok[0] != ";":
            yield tok, line, col
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    yield None, line, col


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.signature = signature
        self.inferred: dict[str, int] = {}

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok[0] is not None:
            self.pos += 1
        return tok

    def fail(self, message, tok=None):
        _, line, col = tok or self.peek()
        raise TermSyntaxError(message, line, col)

    def expect(self, want):
        tok = self.next()
        if tok[0] != want:
            got = "end of input" if tok[0] is None else repr(tok[0])
            self.fail(f"expected {want!r}, found {got}", tok)
        return tok

    def integer(self):
        tok = self.next()
        if tok[0] is None or not tok[0].isdigit():
            got = "end of input" if tok[0] is None else repr(tok[0])
            self.fail(f"expected a colour (natural number), found {got}", tok)
        return int(tok[0])

    def int_list(self):
        self.expect("(")
        out = []
        while self.peek()[0] != ")":
            out.append(self.integer())
        self.expect(")")
        return out

    def head(self):
        """Read ``(op`` plus the operation's arguments; return (op, args, arity)."""
        self.expect("(")
        tok = self.next()
        op = tok[0]
        if op in ("empty", "one"):
            return op, None, 0
        if op == "u":
            return op, None, 2
        if op == "rho":
            self.expect("(")
            table = []
            while self.peek()[0] == "(":
                pair_tok = self.peek()
                pair = self.int_list()
                if len(pair) != 2:
                    self.fail("recolour entries are pairs (c d)", pair_tok)
                table.append(tuple(pair))
            self.expect(")")
            if len({c for c, _ in table}) != len(table):
                self.fail("recolour table lists a colour twice", tok)
            return op, tuple(table), 1
        if op == "add":
            sym_tok = self.next()
            sym = sym_tok[0]
            if sym is None or sym in "()":
                self.fail("expected a relation symbol", sym_tok)
            colors = tuple(self.int_list())
            self.check_symbol(sym, len(colors), sym_tok)
            return op, (sym, colors), 1
        if op == "fuse":
            return op, self.integer(), 1
        self.fail(f"unknown operation {op!r}" if op else "unexpected end of input", tok)

    @staticmethod
    def build(op, args, kids) -> Node:
        if op == "empty":
            return Empty()
        if op == "one":
            return Singleton()
        if op == "u":
            return DisjointUnion(kids[0], kids[1])
        if op == "rho":
            return Recolor(args, kids[0])
        if op == "add":
            return AddRel(args[0], args[1], kids[0])
        return Fuse(args, kids[0])

    def term(self) -> Node:
        # explicit stack of open operations: [op, args, arity, finished children]
        stack = []
        while True:
            op, args, arity = self.head()
            frame = [op, args, arity, []]
            while len(frame[3]) == frame[2]:
                self.expect(")")
                node = self.build(*frame[:2], frame[3])
                if not stack:
                    return node
                frame = stack[-1]
                frame[3].append(node)
                if len(frame[3]) < frame[2]:
                    break
                stack.pop()
            else:
                stack.append(frame)

    def check_symbol(self, sym, arity, tok):
        if self.signature is not None:
            if sym not in self.signature:
                raise UnknownSymbol(
                    f"unknown relation symbol {sym!r} at line {tok[1]}, column {tok[2]}"
                )
            expected = self.signature.arity(sym)
        else:
            expected = self.inferred.setdefault(sym, arity)
        if expected != arity:
            raise ArityMismatch(
                f"{sym} has arity {expected} but {arity} colours were given "
                f"at line {tok[1]}, column {tok[2]}"
            )


def parse_term(text: str, signature: Signature | None = None) -> WidthTerm:
    """Parse a term.  Without a signature, arities are inferred from ``add`` nodes."""
    p = _Parser(text, signature)
    root = p.term()
    if p.peek()[0] is not None:
        p.fail(f"unexpected trailing input {p.peek()[0]!r}")
    if signature is None:
        signature = Signature(tuple(Symbol(n, a) for n, a in p.inferred.items()))
    return WidthTerm(root, signature)


def render_node(node: Node) -> str:
    # iterative to stay clear of the recursion limit on long left-deep terms
    out: list[str] = []
    stack: list = [node]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Empty):
            out.append("(empty)")
        elif isinstance(item, Singleton):
            out.append("(one)")
        elif isinstance(item, DisjointUnion):
            out.append("(u ")
            stack.extend([")", item.right, " ", item.left])
        elif isinstance(item, Recolor):
            pairs = " ".join(f"({c} {d})" for c, d in item.table)
            out.append(f"(rho ({pairs}) ")
            stack.extend([")", item.child])
        elif isinstance(item, AddRel):
            cols = " ".join(map(str, item.colors))
            out.append(f"(add {item.symbol} ({cols}) ")
            stack.extend([")", item.child])
        elif isinstance(item, Fuse):
            out.append(f"(fuse {item.color} ")
            stack.extend([")", item.child])
        else:
            raise TypeError(f"not a term node: {item!r}")
    return "".join(out)


def render_term(term: WidthTerm | Node) -> str:
    if isinstance(term, WidthTerm):
        term = term.root
    return render_node(term)
