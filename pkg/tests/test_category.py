import pytest

from kwald.category import (
    CompositionError,
    Diagram,
    FinCategory,
    Functor,
    StructuralError,
    check_category_axioms,
    check_commutes,
    check_functor,
    cocones_isomorphic,
    free_square,
    group_category,
    is_pushout,
    poset_chain,
    pushout,
    terminal_category,
)
from oracles import commutes_bruteforce


def z_mod(n):
    return group_category(list(range(n)), lambda g, f: (g + f) % n, 0, name=f"Z{n}")


@pytest.mark.parametrize("C", [terminal_category(), poset_chain(1), poset_chain(4), z_mod(2), z_mod(3), free_square()])
def test_valid_categories_pass(C):
    report = check_category_axioms(C)
    assert report.ok, report.violations


def test_terminal_category_shape():
    C = terminal_category()
    assert len(C.objects) == 1 and list(C.morphisms()) == ["id_*"]


def test_associativity_violation_has_witness():
    ends = {"e": ("a", "a"), "x": ("a", "a"), "y": ("a", "a")}
    table = {("x", "x"): "y", ("y", "x"): "x", ("x", "y"): "y", ("y", "y"): "y"}
    C = FinCategory(["a"], ends, {"a": "e"}, table)
    report = check_category_axioms(C)
    assert report.failed("associativity")
    assert not report.failed("identity")


def test_missing_composite_is_a_closure_failure():
    ends = {"id_a": ("a", "a"), "id_b": ("b", "b"), "id_c": ("c", "c"), "f": ("a", "b"), "g": ("b", "c")}
    C = FinCategory("abc", ends, {o: f"id_{o}" for o in "abc"}, {})
    assert check_category_axioms(C).failed("closure")
    with pytest.raises(CompositionError):
        C.compose("f", "g")


def test_table_entry_for_non_composable_pair_raises():
    ends = {"id_a": ("a", "a"), "id_b": ("b", "b"), "f": ("a", "b")}
    C = FinCategory("ab", ends, {"a": "id_a", "b": "id_b"}, {("f", "f"): "f"})
    with pytest.raises(StructuralError):
        check_category_axioms(C)


def test_missing_identity_rejected():
    with pytest.raises(StructuralError):
        FinCategory(["a"], {"f": ("a", "a")}, {}, {})


def test_functors():
    C = poset_chain(3)
    assert check_functor(Functor.identity_functor(C)).ok
    T = terminal_category()
    collapse = Functor(C, T, lambda a: "*", lambda f: "id_*", "collapse")
    assert check_functor(collapse).ok
    # Z/2 -> Z/2 sending the generator to the identity is a functor; to itself, too
    G = z_mod(2)
    assert check_functor(Functor(G, G, lambda a: a, lambda f: 0)).ok
    G3 = z_mod(3)
    bad = Functor(G3, G3, lambda a: a, lambda f: {0: 0, 1: 1, 2: 1}[f], "bad")
    assert check_functor(bad).failed("composition")


def _square(C, top, left):
    D = Diagram(C, {"a": "a", "b": "b", "c": "c", "d": "d"})
    D.add_edge("a", "b", "f")
    D.add_edge("b", "d", "g")
    D.add_edge("a", "c", "h")
    D.add_edge("c", "d", "k")
    if top:
        D.add_edge("a", "d", top)
    return D


def test_free_square_does_not_commute():
    D = _square(free_square(), None, None)
    rep = check_commutes(D)
    assert not rep.commutes and rep.witness[0] == "a" and rep.witness[1] == "d"
    assert commutes_bruteforce(D) is False


def test_commuting_square_and_chain():
    C = FinCategory(
        "abcd",
        {**{f"id_{o}": (o, o) for o in "abcd"}, "f": ("a", "b"), "g": ("b", "d"), "h": ("a", "c"),
         "k": ("c", "d"), "diag": ("a", "d")},
        {o: f"id_{o}" for o in "abcd"},
        {("g", "f"): "diag", ("k", "h"): "diag"},
    )
    D = _square(C, "diag", None)
    assert check_commutes(D).commutes and commutes_bruteforce(D)
    P = poset_chain(4)
    chain = Diagram(P, {i: i for i in range(4)})
    for i in range(4):
        for j in range(i + 1, 4):
            chain.add_edge(i, j, f"{i}<{j}")
    assert check_commutes(chain).commutes and commutes_bruteforce(chain)


def test_diagram_validation():
    D = Diagram(poset_chain(2), {0: 0, 1: 1}, [(0, 1, None)])
    with pytest.raises(StructuralError):
        check_commutes(D)
    D = Diagram(poset_chain(2), {0: 0, 1: 1}, [(0, 1, "id_0")])
    with pytest.raises(StructuralError):
        check_commutes(D)


def test_pushout_in_a_poset_is_the_join():
    P = poset_chain(3)
    cone = pushout(P, ("0<1", "0<2"))
    assert cone.apex == 2
    assert is_pushout(P, "0<1", "0<2", cone)
    assert cocones_isomorphic(P, cone, cone)
