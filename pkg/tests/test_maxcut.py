import pytest

from mcw import (McResult, RedundantExpressionTooLarge, mc_join, mc_leaf,
                 mc_relabel, mc_union, parse, solve_max_cut)
from mcw.maxcut import RedundantJoin


def test_mc_leaf():
    st = mc_leaf(frozenset((1, 2)))
    assert st.classes == [(frozenset((1, 2)), 1)]
    assert st.table == {(0,): 0, (1,): 0}
    with pytest.raises(ValueError):
        mc_leaf(frozenset())


def test_mc_union_merges_classes():
    a = mc_leaf(frozenset((1,)))
    b = mc_leaf(frozenset((1,)))
    u = mc_union(a, b)
    assert u.classes == [(frozenset((1,)), 2)]
    assert set(u.table) == {(0,), (1,), (2,)}


def test_mc_join_counts_cross_edges():
    st = mc_union(mc_leaf(frozenset((1,))), mc_leaf(frozenset((2,))))
    j = mc_join(st, 1, 2)
    # one vertex per side: split assignments gain the single edge
    vals = {vec: val for vec, val in j.table.items()}
    assert vals[(1, 0)] == 1 and vals[(0, 1)] == 1
    assert vals[(0, 0)] == 0 and vals[(1, 1)] == 0


def test_mc_join_redundant_refused():
    st = mc_union(mc_leaf(frozenset((1,))), mc_leaf(frozenset((2,))))
    with pytest.raises(RedundantJoin):
        mc_join(st, 1, 2, irredundant=False)


def test_mc_relabel_merges():
    st = mc_union(mc_leaf(frozenset((1,))), mc_leaf(frozenset((2,))))
    r = mc_relabel(st, 1, frozenset((2,)))
    assert r.classes == [(frozenset((2,)), 2)]


def test_solve_max_cut_known():
    k3 = parse("(join 1 3 (join 2 3 (join 1 2 (union (union "
               "(intro a (1)) (intro b (2))) (intro c (3))))))")
    r = solve_max_cut(k3)
    assert (r.optimum, r.fallback) == (2, False)
    c4 = parse("(join 4 1 (join 3 4 (join 2 3 (join 1 2 "
               "(union (union (union (intro a (1)) (intro b (2))) "
               "(intro c (3))) (intro d (4)))))))")
    r = solve_max_cut(c4)
    assert (r.optimum, r.fallback) == (4, False)
    assert solve_max_cut(parse("(intro a (1))")).optimum == 0


def test_solve_max_cut_budget():
    e = parse("(join 1 2 (union (intro a (1)) (intro b (2))))")
    assert solve_max_cut(e, b=1).answer is True
    assert solve_max_cut(e, b=2).answer is False
    assert solve_max_cut(e).answer is None


def test_redundant_expression_falls_back():
    # join 1x2 twice: the second join re-adds the same edge
    e = parse("(join 1 2 (join 1 2 (union (intro a (1)) (intro b (2)))))")
    r = solve_max_cut(e)
    assert r.fallback
    assert r.optimum == 1


def test_redundant_expression_too_large(monkeypatch):
    monkeypatch.setenv("MCW_ORACLE_CAP", "3")
    parts = "(union (union (union (intro a (1)) (intro b (2))) (intro c (1))) (intro d (2)))"
    e = parse(f"(join 1 2 (join 1 2 {parts}))")
    with pytest.raises(RedundantExpressionTooLarge):
        solve_max_cut(e)
