"""Exact ground truth for unary clique-width on tiny structures.

Membership in UCW_k (or UCWF_k with fusion) is decided by saturating the
set of reachable coloured structures, bounded by the target's size and
deduplicated by canonical form.  Every state keeps a parent pointer, so a
positive answer comes with a witness term.

Internally a state is a canonical tuple ``(colours, rel_1, ..., rel_m)``:
``colours[i]`` is the colour of element ``i`` and ``rel_j`` is a sorted
tuple of index tuples.
"""

from __future__ import annotations

import heapq
import itertools
import os
import time
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field

from . import terms as tm
from .errors import TooLarge
from .structures import ColoredStructure, Signature

DEFAULT_MAX_STATES = 5_000_000
DEFAULT_MAX_SECONDS = 60.0
CANONICAL_LIMIT = 5

# reason given when a fusion search runs dry: only intermediate values up to
# a size cap were explored, and fusion can need larger ones
BOUNDED = "bounded"


def default_seconds() -> float:
    return float(os.environ.get("WIDTHLAB_BUDGET_SECONDS", DEFAULT_MAX_SECONDS))


@dataclass(frozen=True)
class SearchBudget:
    """Resource caps; ``max_universe=None`` means 4 for binary, 3 for higher arities."""

    max_universe: int | None = None
    max_states: int = DEFAULT_MAX_STATES
    max_seconds: float = field(default_factory=default_seconds)

    def __post_init__(self):
        for name in ("max_universe", "max_states", "max_seconds"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")

    def universe_cap(self, signature: Signature) -> int:
        if self.max_universe is not None:
            return self.max_universe
        return 4 if signature.max_arity <= 2 else 3


@dataclass(frozen=True)
class Membership:
    answer: str  # "yes", "no" or "unknown"
    witness: tm.WidthTerm | None = None
    states: int = 0
    reason: str = ""

    def __bool__(self):
        return self.answer == "yes"


@dataclass(frozen=True)
class WidthResult:
    """``exact`` tells a true value from a lower bound (budget overrun or bounded fusion search)."""

    k: int
    exact: bool
    witness: tm.WidthTerm | None = None
    reason: str = ""
    # first k with a witness above an inexact k, if one was found
    upper: int | None = None

    def __str__(self):
        if self.exact:
            return str(self.k)
        why = "bounded search" if self.reason == BOUNDED else "budget"
        if self.upper is not None:
            return f"{self.k}..{self.upper} ({why})"
        return f">= {self.k} ({why})"


# --------------------------------------------------------------------------
# canonical forms


def canonical_state(colors, rels):
    """Minimal encoding over all relabellings of elements ``0..n-1``.

    The colour sequence comes first in the encoding, so a minimal relabelling
    always lists colours in ascending order; only permutations inside each
    colour block need to be tried.
    """
    n = len(colors)
    order = sorted(range(n), key=colors.__getitem__)
    blocks = [list(g) for _, g in itertools.groupby(order, key=colors.__getitem__)]
    sorted_colors = tuple(colors[i] for i in order)
    best = None
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        new_index = [0] * n
        pos = 0
        for perm in choice:
            for old in perm:
                new_index[old] = pos
                pos += 1
        enc = tuple(
            tuple(sorted(tuple(new_index[x] for x in t) for t in r)) for r in rels
        )
        if best is None or enc < best:
            best = enc
    return (sorted_colors,) + best


def _state_of(a: ColoredStructure):
    index = {x: i for i, x in enumerate(a.universe)}
    colors = [a.coloring[x] for x in a.universe]
    rels = [
        {tuple(index[x] for x in t) for t in a.relations[name]}
        for name in a.signature.names
    ]
    return colors, rels


def canonical_key(a: ColoredStructure, limit: int = CANONICAL_LIMIT) -> bytes:
    """Isomorphism-complete byte key of a small coloured structure."""
    if len(a) > limit:
        raise TooLarge(f"canonical keys limited to {limit} elements")
    return repr(canonical_state(*_state_of(a))).encode()


# --------------------------------------------------------------------------
# state operations (all return canonical states)


def _union(s, t):
    n = len(s[0])
    rels = [
        set(rs) | {tuple(x + n for x in tup) for tup in rt}
        for rs, rt in zip(s[1:], t[1:])
    ]
    return canonical_state(s[0] + t[0], rels)


def _recolor(s, f):
    return canonical_state(tuple(f[c] for c in s[0]), s[1:])


def _add(s, j, colors):
    by_color = defaultdict(list)
    for i, c in enumerate(s[0]):
        by_color[c].append(i)
    new = set(itertools.product(*(by_color[c] for c in colors)))
    if new <= set(s[1 + j]):
        return None
    rels = list(s[1:])
    rels[j] = set(rels[j]) | new
    return canonical_state(s[0], rels)


def _fuse(s, c):
    members = [i for i, d in enumerate(s[0]) if d == c]
    if len(members) < 2:
        return None
    keep = [i for i, d in enumerate(s[0]) if d != c]
    new_index = {old: new for new, old in enumerate(keep)}
    merged = len(keep)
    for i in members:
        new_index[i] = merged
    colors = [s[0][i] for i in keep] + [c]
    rels = [{tuple(new_index[x] for x in t) for t in r} for r in s[1:]]
    return canonical_state(colors, rels)


# --------------------------------------------------------------------------
# pruning for the fusion-free search


class _Embedder:
    """Decides whether a fusion-free state can still grow into the target.

    Without fusion every element of a state survives into the final value,
    tuples only get added, and elements sharing a colour share it forever.
    So there must be an injection into the target such that state tuples map
    to target tuples, equally coloured elements map to equally coloured
    target elements, and for each colour pattern either the target adds no
    tuple of that pattern beyond the image, or it contains every tuple of
    that pattern (a later ``add`` adds all of them at once).
    """

    def __init__(self, target):
        self.colors = target[0]
        self.rels = [set(r) for r in target[1:]]
        self.n = len(self.colors)
        self.cache: dict = {}

    def __call__(self, s) -> bool:
        hit = self.cache.get(s)
        if hit is None:
            hit = self.cache[s] = self._search(s)
        return hit

    def _search(self, s) -> bool:
        colors = s[0]
        m = len(colors)
        for r, rt in zip(s[1:], self.rels):
            if len(r) > len(rt):
                return False
        # check every state tuple as soon as its last element is placed
        due = [[] for _ in range(m)]
        for j, r in enumerate(s[1:]):
            for t in r:
                due[max(t)].append((j, t))
        image = [0] * m
        used = [False] * self.n
        final: dict = {}

        def place(i) -> bool:
            if i == m:
                return self._patterns_ok(s, image)
            c = colors[i]
            for v in range(self.n):
                if used[v]:
                    continue
                want = final.get(c)
                if want is not None and want != self.colors[v]:
                    continue
                image[i] = v
                if all(tuple(image[x] for x in t) in self.rels[j] for j, t in due[i]):
                    used[v] = True
                    fresh = want is None
                    if fresh:
                        final[c] = self.colors[v]
                    if place(i + 1):
                        return True
                    used[v] = False
                    if fresh:
                        del final[c]
            return False

        return place(0)

    def _patterns_ok(self, s, image) -> bool:
        colors = s[0]
        inside = set(image)
        back = {v: i for i, v in enumerate(image)}
        by_color = defaultdict(list)
        for i, c in enumerate(colors):
            by_color[c].append(image[i])
        for r, rt in zip(s[1:], self.rels):
            mapped = {tuple(image[x] for x in t) for t in r}
            patterns = {
                tuple(colors[back[v]] for v in t)
                for t in rt
                if inside.issuperset(t) and t not in mapped
            }
            for pat in patterns:
                for t in itertools.product(*(by_color[c] for c in pat)):
                    if t not in rt:
                        return False
        return True


# --------------------------------------------------------------------------
# closure search


class _Closure:
    """Saturation of {empty, one} under the width-k operations.

    With ``embed`` set, states that cannot grow into one fixed target are
    dropped.  Without it the closure is target independent, so it can be
    resumed for later targets; :func:`membership` caches such closures.
    """

    def __init__(self, signature, k, allow_fusion, cap, embed=None):
        self.signature = signature
        self.arities = [s.arity for s in signature.symbols]
        self.k = k
        self.allow_fusion = allow_fusion
        self.cap = cap
        self.embed = embed
        self.parent: dict = {}
        self.by_size = defaultdict(list)
        # larger and denser states first: reaches yes-instances sooner, and
        # a no-answer needs the whole closure anyway
        self.heap: list = []
        self.counter = itertools.count()
        empty = ((),) + tuple(() for _ in self.arities)
        one = ((0,),) + tuple(() for _ in self.arities)
        self.admit(empty, ("empty",))
        self.admit(one, ("one",))

    def admit(self, state, how) -> bool:
        if state is None or state in self.parent:
            return False
        if len(state[0]) > self.cap:
            return False
        if self.embed is not None and not self.embed(state):
            return False
        self.parent[state] = how
        weight = sum(len(r) for r in state[1:])
        heapq.heappush(self.heap, (-len(state[0]), -weight, next(self.counter), state))
        return True

    @property
    def exhausted(self) -> bool:
        return not self.heap

    def unary_successors(self, s):
        present = sorted(set(s[0]))
        # recolourings only matter on colours that occur
        for images in itertools.product(range(self.k), repeat=len(present)):
            f = dict(zip(present, images))
            if all(f[c] == c for c in present):
                continue
            yield _recolor(s, f), ("rho", tuple(sorted(f.items())), s)
        for j, arity in enumerate(self.arities):
            for colors in itertools.product(present, repeat=arity):
                yield _add(s, j, colors), ("add", j, colors, s)
        if self.allow_fusion:
            for c in present:
                yield _fuse(s, c), ("fuse", c, s)

    def expand(self) -> None:
        # every successor is generated even once a target shows up: a cached
        # closure is resumed later and must not have lost any of them
        s = heapq.heappop(self.heap)[-1]
        size = len(s[0])
        self.by_size[size].append(s)
        successors = itertools.chain(
            self.unary_successors(s),
            (
                (_union(s, t), ("u", s, t))
                for other in range(self.cap - size + 1)
                for t in self.by_size[other]
            ),
        )
        for state, how in successors:
            self.admit(state, how)

    def search(self, target, budget: SearchBudget) -> Membership:
        start = time.monotonic()
        while target not in self.parent and self.heap:
            self.expand()
            if len(self.parent) > budget.max_states:
                return Membership("unknown", states=len(self.parent), reason="state budget exhausted")
            if time.monotonic() - start > budget.max_seconds:
                return Membership("unknown", states=len(self.parent), reason="time budget exhausted")
        if target in self.parent:
            return Membership("yes", self.witness(target), len(self.parent))
        return Membership("no", states=len(self.parent))

    def witness(self, state) -> tm.WidthTerm:
        memo = {}
        # iterative postorder over parent pointers
        stack = [(state, False)]
        while stack:
            s, ready = stack.pop()
            if s in memo:
                continue
            how = self.parent[s]
            deps = _deps(how)
            if not ready:
                stack.append((s, True))
                stack.extend((d, False) for d in deps if d not in memo)
                continue
            op = how[0]
            if op == "empty":
                node = tm.Empty()
            elif op == "one":
                node = tm.Singleton()
            elif op == "u":
                node = tm.DisjointUnion(memo[how[1]], memo[how[2]])
            elif op == "rho":
                node = tm.Recolor(tuple((c, d) for c, d in how[1] if c != d), memo[how[2]])
            elif op == "add":
                name = self.signature.symbols[how[1]].name
                node = tm.AddRel(name, how[2], memo[how[3]])
            else:
                node = tm.Fuse(how[1], memo[how[2]])
            memo[s] = node
        return tm.WidthTerm(memo[state], self.signature)


_CLOSURES: OrderedDict = OrderedDict()
_CLOSURE_CACHE_SIZE = 16


def _shared_closure(signature, k, allow_fusion, cap) -> _Closure:
    key = (signature, k, allow_fusion, cap)
    closure = _CLOSURES.get(key)
    if closure is None:
        closure = _CLOSURES[key] = _Closure(signature, k, allow_fusion, cap)
        if len(_CLOSURES) > _CLOSURE_CACHE_SIZE:
            _CLOSURES.popitem(last=False)
    _CLOSURES.move_to_end(key)
    return closure


def _deps(how):
    op = how[0]
    if op == "u":
        return [how[1], how[2]]
    if op in ("rho", "fuse"):
        return [how[2]]
    if op == "add":
        return [how[3]]
    return []


def membership(
    a: ColoredStructure,
    k: int,
    allow_fusion: bool = False,
    budget: SearchBudget | None = None,
    prune: bool = True,
    size_slack: int = 0,
) -> Membership:
    """Decide whether ``a`` lies in UCW_k (or UCWF_k when ``allow_fusion``).

    ``prune=False`` turns off the embedding test of the fusion-free search.
    ``size_slack`` lets states grow past the target's size.  Without fusion
    no state can outgrow the target, so "no" is exact.  With fusion an
    exhausted search only answers "unknown" with reason :data:`BOUNDED`.
    """
    budget = budget or SearchBudget()
    cap = budget.universe_cap(a.signature)
    if len(a) > cap:
        return Membership("unknown", reason=f"universe larger than {cap} elements")
    if k < 1 or not a.is_k_colored(k):
        return Membership("no")
    target = canonical_state(*_state_of(a))
    cap = len(a) + size_slack
    if prune and not allow_fusion:
        closure = _Closure(a.signature, k, allow_fusion, cap, _Embedder(target))
    else:
        closure = _shared_closure(a.signature, k, allow_fusion, cap)
    result = closure.search(target, budget)
    if allow_fusion and result.answer == "no":
        # Fusion shrinks values, so a witness may pass through values larger
        # than the target (the uncoloured directed 3-path at k=2 needs four
        # elements).  An exhausted capped closure is therefore not a proof.
        return Membership("unknown", states=result.states, reason=BOUNDED)
    return result


def exact_width(
    a: ColoredStructure, allow_fusion: bool = False, budget: SearchBudget | None = None
) -> WidthResult:
    """Smallest k with membership; a lower bound if the budget runs out first.

    A bounded fusion search keeps climbing after its first "unknown": the
    first k that does produce a witness is reported as ``upper``.
    """
    k = max([1] + [c + 1 for c in a.colors()])
    low = None
    while True:
        result = membership(a, k, allow_fusion, budget)
        if result.answer == "yes":
            if low is None:
                return WidthResult(k, True, result.witness)
            return WidthResult(low, False, result.witness, BOUNDED, upper=k)
        if result.answer == "unknown":
            if low is None:
                low = k
            if result.reason != BOUNDED:
                return WidthResult(low, False, reason=result.reason)
        k += 1
