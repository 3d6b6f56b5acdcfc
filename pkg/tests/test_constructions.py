import networkx as nx
import pytest

from widthlab import terms as tm
from widthlab.constructions import (
    GADGET_SIGNATURE,
    apex_gadget,
    apex_leaf,
    branch_trace,
    extract_path_decomposition,
    find_apex,
    gadget_origin,
    hard_family,
    leaf_index,
    path_to_ucw_term,
    ternary_tree,
    tree_to_ucwf_term,
)
from widthlab.decompositions import (
    PathDecomposition,
    TreeDecomposition,
    exact_pathwidth,
    exact_treewidth,
    validate_decomposition,
    width_of,
)
from widthlab.errors import (
    InvalidDecomposition,
    LeafNotApex,
    NotGadgetShaped,
    WrongSignature,
)
from widthlab.structures import (
    ColoredStructure,
    Signature,
    Structure,
    gaifman_graph,
    graph_structure,
    is_isomorphic,
)

from helpers import all_trees, nx_to_structure


def same_uncoloured(term, a):
    value = tm.evaluate(term)
    return value.is_k_colored(1) and is_isomorphic(value, ColoredStructure.uncolored(a))


P2 = graph_structure("uv", [("u", "v")])
P3 = graph_structure("abc", [("a", "b"), ("b", "c")])
K3 = graph_structure("abc", [("a", "b"), ("b", "c"), ("a", "c")])
STAR = graph_structure("cxyz", [("c", "x"), ("c", "y"), ("c", "z")])
EMPTY = graph_structure([], [])


def spider():
    edges = []
    for leg in range(3):
        edges += [("c", f"a{leg}"), (f"a{leg}", f"b{leg}")]
    return graph_structure(["c"] + [f"{p}{i}" for p in "ab" for i in range(3)], edges)


# -- apex gadget ---------------------------------------------------------------


def test_gadget_of_empty_graph():
    g = apex_gadget(EMPTY)
    assert g.inner.universe == ("t",) and g.apex == "t"
    assert not g.inner.relations["R"]


def test_gadget_of_single_edge():
    g = apex_gadget(P2)
    assert g.inner.relations["R"] == {
        ("u", "u", "v"), ("u", "v", "v"), ("v", "v", "u"), ("v", "u", "u"),
        ("t", "t", "u"), ("t", "u", "u"), ("t", "t", "v"), ("t", "v", "v"),
    }


def test_gadget_of_single_vertex():
    g = apex_gadget(graph_structure("u", []))
    assert g.inner.relations["R"] == {("t", "t", "u"), ("t", "u", "u")}


def test_gadget_matches_definition_by_enumeration():
    a = spider()
    g = apex_gadget(a)
    t = g.apex
    edges = a.relations["E"]
    universe = g.inner.universe
    expected = {
        (x, c, y)
        for x in universe
        for c in universe
        for y in universe
        if x != y and c in (x, y) and ((x, y) in edges or x == t)
    }
    assert g.inner.relations["R"] == expected
    assert g.origin == a


def test_gadget_apex_is_universal_and_removal_gives_back_the_graph():
    for tree in all_trees(7):
        a = nx_to_structure(tree)
        g = apex_gadget(a)
        graph = gaifman_graph(g.inner)
        assert graph.neighbors()[g.apex] == set(a.universe)
        assert graph.without(g.apex) == gaifman_graph(a)


def test_gadget_apex_name_avoids_collisions():
    a = graph_structure(["t", "t1", "u"], [])
    assert apex_gadget(a).apex == "t2"


def test_gadget_wrong_signature():
    with pytest.raises(WrongSignature):
        apex_gadget(Structure(Signature.of(R=3), ["a"]))
    with pytest.raises(WrongSignature):
        apex_gadget(Structure(Signature.of(E=2, F=2), ["a"]))


def test_find_apex_and_origin():
    g = apex_gadget(P3)
    assert find_apex(g.inner) == "t"
    assert gadget_origin(g.inner, "t") == P3
    broken = Structure(GADGET_SIGNATURE, g.inner.universe, {"R": g.inner.relations["R"] - {("a", "a", "b")}})
    with pytest.raises(NotGadgetShaped):
        gadget_origin(broken, "t")


# -- path decomposition to term ------------------------------------------------


def test_compile_empty_path():
    t = path_to_ucw_term(EMPTY, PathDecomposition(()))
    assert t.root == tm.Empty()


def test_compile_single_vertex():
    a = graph_structure("v", [])
    t = path_to_ucw_term(a, PathDecomposition((frozenset("v"),)))
    value = tm.evaluate(t)
    assert len(value) == 1 and list(value.coloring.values()) == [0]


def test_compile_p3():
    pd = PathDecomposition((frozenset("ab"), frozenset("bc")))
    t = path_to_ucw_term(P3, pd)
    assert tm.stats(t).colors_used <= 3
    assert tm.stats(t).fusion_count == 0
    assert tm.validate(t, width_of(pd) + 2, False) == []
    assert same_uncoloured(t, P3)


def test_compile_rejects_invalid_decomposition():
    with pytest.raises(InvalidDecomposition) as info:
        path_to_ucw_term(K3, PathDecomposition((frozenset("ab"), frozenset("bc"))))
    assert info.value.violations


def test_compile_ternary_structure():
    sig = Signature.of(R=3, U=1)
    a = Structure(sig, ["a", "b", "c", "d"], {"R": {("a", "b", "c"), ("b", "c", "d"), ("c", "c", "c")}, "U": {("a",)}})
    pw, pd = exact_pathwidth(gaifman_graph(a))
    t = path_to_ucw_term(a, pd)
    assert tm.validate(t, pw + 2, False) == []
    assert same_uncoloured(t, a)


# -- tree decomposition to fusion term --------------------------------------------


def test_fusion_compile_empty():
    assert tree_to_ucwf_term(EMPTY, TreeDecomposition({}, {})).root == tm.Empty()


def test_fusion_compile_triangle_single_bag():
    td = TreeDecomposition({"r": None}, {"r": set("abc")})
    t = tree_to_ucwf_term(K3, td)
    s = tm.stats(t)
    assert s.colors_used <= 4
    assert s.fusion_count == 0
    assert same_uncoloured(t, K3)


def test_fusion_compile_star():
    td = TreeDecomposition(
        {"r": None, "s": "r", "u": "r"},
        {"r": {"c", "x"}, "s": {"c", "y"}, "u": {"c", "z"}},
    )
    t = tree_to_ucwf_term(STAR, td)
    s = tm.stats(t)
    assert s.colors_used <= 3
    assert s.fusion_count >= 2
    assert tm.validate(t, 3, True) == []
    assert same_uncoloured(t, STAR)


def test_fusion_compile_over_loops_and_ternary_tuples():
    sig = Signature.of(R=3, E=2)
    a = Structure(
        sig,
        ["a", "b", "c", "d", "e"],
        {"R": {("a", "b", "c"), ("c", "d", "d"), ("e", "e", "e")}, "E": {("a", "a"), ("d", "e")}},
    )
    tw, td = exact_treewidth(gaifman_graph(a))
    t = tree_to_ucwf_term(a, td)
    assert tm.validate(t, tw + 2, True) == []
    assert same_uncoloured(t, a)


def test_fusion_compile_rejects_invalid():
    td = TreeDecomposition({"r": None, "s": "r"}, {"r": {"a", "b"}, "s": {"b", "c"}})
    with pytest.raises(InvalidDecomposition):
        tree_to_ucwf_term(K3, td)


# -- extraction ------------------------------------------------------------------


def compiled_gadget(a):
    g = apex_gadget(a)
    pw, pd = exact_pathwidth(gaifman_graph(g.inner))
    return g, path_to_ucw_term(g.inner, pd)


def test_extract_from_gadget_of_empty_graph():
    t = tm.parse_term("(one)", GADGET_SIGNATURE)
    assert extract_path_decomposition(t, 0).bags == ()
    g, compiled = compiled_gadget(EMPTY)
    assert extract_path_decomposition(compiled, apex_leaf(compiled)).bags == ()


@pytest.mark.parametrize("a", [P2, spider()], ids=["P2", "spider"])
def test_extraction_pipeline(a):
    g, t = compiled_gadget(a)
    leaf = apex_leaf(t)
    pd = extract_path_decomposition(t, leaf)
    # bags name the term's elements; the origin read off the value is a copy of a
    origin = gadget_origin(tm.evaluate(t).structure, f"x{leaf}")
    assert is_isomorphic(ColoredStructure.uncolored(origin), ColoredStructure.uncolored(a))
    assert validate_decomposition(gaifman_graph(origin), pd) == []
    assert width_of(pd) <= tm.stats(t).colors_used - 2


def test_extract_accepts_leaf_ids():
    g, t = compiled_gadget(P2)
    leaf = apex_leaf(t)
    assert extract_path_decomposition(t, f"x{leaf}") == extract_path_decomposition(t, leaf)
    assert leaf_index("7") == 7


def test_extract_wrong_leaf():
    g, t = compiled_gadget(P2)
    leaf = apex_leaf(t)
    with pytest.raises(LeafNotApex):
        extract_path_decomposition(t, (leaf + 1) % 3)
    with pytest.raises(LeafNotApex):
        extract_path_decomposition(t, 99)
    with pytest.raises(LeafNotApex):
        leaf_index("apex")


def test_branch_trace_runs_root_to_leaf():
    g, t = compiled_gadget(P3)
    leaf = apex_leaf(t)
    trace = branch_trace(t, leaf)
    assert trace[0].node == t.root
    assert isinstance(trace[-1].node, tm.Singleton)
    assert trace[-1].value.universe == (f"x{leaf}",)
    for parent, child in zip(trace, trace[1:]):
        assert any(c is child.node for c in tm.children(parent.node))


def test_extraction_on_hand_written_term():
    # gadget of a single vertex written directly: apex leaf x1 joined to u = x0
    text = (
        "(rho ((1 0) (2 0)) (add R (2 2 1) (add R (2 1 1)"
        " (u (rho ((0 1)) (one)) (rho ((0 2)) (one))))))"
    )
    t = tm.parse_term(text, GADGET_SIGNATURE)
    assert apex_leaf(t) == 1
    pd = extract_path_decomposition(t, 1)
    assert pd.bags == (frozenset({"x0"}),)


# -- hard family -------------------------------------------------------------------


def test_hard_family_sizes():
    assert [len(hard_family(n).inner) for n in range(3)] == [2, 5, 14]
    assert len(ternary_tree(2)) == 13


def test_hard_family_one():
    tree = gaifman_graph(hard_family(1).origin)
    assert exact_pathwidth(tree)[0] == 1


def test_hard_family_two():
    g = hard_family(2)
    assert exact_pathwidth(gaifman_graph(g.origin))[0] == 2
    assert exact_treewidth(gaifman_graph(g.inner))[0] == 2


def test_ternary_tree_is_a_tree():
    for n in range(4):
        tree = ternary_tree(n)
        g = nx.Graph()
        g.add_nodes_from(tree.universe)
        g.add_edges_from(tree.relations["E"])
        assert nx.is_tree(g)
