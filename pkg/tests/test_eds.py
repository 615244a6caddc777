import pytest

from mcw import (eds_add_label, eds_forget, eds_join, eds_leaf, eds_optimum,
                 eds_union, parse, run_eds, solve_eds)


def test_eds_leaf():
    S = eds_leaf(1, 2)
    assert S == {(frozenset((1,)), (0, 0), 0),
                 (frozenset(), (1, 0), 0)}
    with pytest.raises(ValueError):
        eds_leaf(0, 2)


def test_eds_forget_drops_unhandled_cover_vertices():
    S = {(frozenset((1,)), (0, 0), 0), (frozenset(), (1, 0), 0)}
    out = eds_forget(S, 1)
    assert out == {(frozenset(), (0, 0), 0)}


def test_eds_add_label_splits_counts():
    S = {(frozenset(), (2, 0), 1)}
    out = eds_add_label(S, 1, 2)
    assert out == {(frozenset(), (2, 0), 1),
                   (frozenset(), (1, 1), 1),
                   (frozenset(), (0, 2), 1)}


def test_eds_union_adds():
    S1 = {(frozenset((1,)), (0, 1), 1)}
    S2 = {(frozenset((2,)), (1, 0), 0)}
    assert eds_union(S1, S2) == {(frozenset((1, 2)), (1, 1), 1)}


def test_eds_join_kills_undominated():
    # both endpoints outside the cover: the join edge is undominated
    S = {(frozenset((1, 2)), (0, 0), 0)}
    assert eds_join(S, 1, 2) == set()
    # unmatched cover vertices on both sides may pair up
    S = {(frozenset(), (1, 1), 0)}
    assert eds_join(S, 1, 2) == {(frozenset(), (1, 1), 0),
                                 (frozenset(), (0, 0), 1)}


def p_expr(n):
    # path v0-...-v(n-1) with a private label per vertex
    node = "(intro v0 (1))"
    for i in range(1, n):
        node = f"(join {i} {i + 1} (union {node} (intro v{i} ({i + 1}))))"
    return parse(node)


def test_eds_known_values():
    assert eds_optimum(p_expr(2)) == 1
    assert eds_optimum(p_expr(4)) == 1     # middle edge dominates P4
    assert eds_optimum(p_expr(7)) == 2
    assert eds_optimum(parse("(intro a (1))")) == 0
    k3 = parse("(join 1 3 (join 2 3 (join 1 2 (union (union "
               "(intro a (1)) (intro b (2))) (intro c (3))))))")
    assert eds_optimum(k3) == 1


def test_solve_eds_threshold():
    e = p_expr(7)
    assert not solve_eds(e, 0)
    assert not solve_eds(e, 1)
    assert solve_eds(e, 2)
    assert solve_eds(e, 7)
    with pytest.raises(ValueError):
        solve_eds(e, -1)


def test_run_eds_stats():
    r = run_eds(p_expr(5))
    assert r.optimum == 2
    assert r.max_set >= 1
