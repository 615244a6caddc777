import pytest

from mcw import (InstanceTooLarge, MisInstance, TooLarge, audit_gadgets,
                 build_lb, compute_params, evaluate, is_linear, make_F,
                 make_Fprime, make_H, make_Hif, make_T,
                 mis_has_multicolored_is, mis_to_text, oracle_max_cut,
                 pad_mis, parse_mis)
from mcw.lbgen import (hif_layout, mcut_f, mcut_fprime, mcut_h, mcut_hif,
                       mcut_t, pad_k, s_family)


def test_parse_mis_round_trip():
    mis = parse_mis("; comment\nmis 3 2\ne 1 0 2 1\n")
    assert (mis.k_prime, mis.n_prime) == (3, 2)
    assert mis.edges == [(1, 0, 2, 1)]
    assert parse_mis(mis_to_text(mis)).edges == mis.edges


@pytest.mark.parametrize("text", [
    "e 1 0 2 1\n",                       # edge before header
    "mis 3 2\nmis 3 2\n",                # duplicate header
    "mis 3 2\ne 1 0 1 1\n",              # edge inside a part
    "mis 3 2\ne 1 0 4 1\n",              # part out of range
    "mis 3 2\ne 1 0 2 2\n",              # vertex index out of range
    "mis 3 2\ne 1 0 2 1\ne 2 1 1 0\n",   # duplicate edge (reversed)
    "mis 3 2\nz 1\n",                    # unknown record
    "mis 0 2\n",                         # empty part count
])
def test_parse_mis_errors(text):
    with pytest.raises(ValueError):
        parse_mis(text)


def test_mis_has_multicolored_is():
    yes = parse_mis("mis 2 2\ne 1 0 2 0\n")
    assert mis_has_multicolored_is(yes)
    no = parse_mis("mis 2 2\ne 1 0 2 0\ne 1 0 2 1\ne 1 1 2 0\ne 1 1 2 1\n")
    assert not mis_has_multicolored_is(no)
    with pytest.raises(TooLarge):
        mis_has_multicolored_is(MisInstance(30, 3, []), cap=1000)


def test_pad_k():
    assert pad_k(1) == (2, 1)
    assert pad_k(2) == (4, 3)
    assert pad_k(3) == (4, 3)
    assert pad_k(4) == (6, 10)
    assert pad_k(10) == (6, 10)
    assert pad_k(11) == (8, 35)


def test_pad_preserves_mis_answer():
    for text in ("mis 2 2\ne 1 0 2 0\n",
                 "mis 2 2\ne 1 0 2 0\ne 1 0 2 1\ne 1 1 2 0\ne 1 1 2 1\n",
                 "mis 3 3\ne 1 0 2 0\ne 2 1 3 1\n"):
        mis = parse_mis(text)
        padded, k = pad_mis(mis)
        assert padded.k_prime == pad_k(mis.k_prime)[1]
        assert mis_has_multicolored_is(padded) == mis_has_multicolored_is(mis)


def test_s_family():
    S = s_family(4)
    assert S == [frozenset((1, 2)), frozenset((1, 3)), frozenset((1, 4))]


def test_mcut_formulas_match_oracle():
    for C in (1, 2):
        assert oracle_max_cut(make_F("u", "v", C)) == mcut_f(C) == 2 * C
        assert oracle_max_cut(make_Fprime("u", "v", C)) == mcut_fprime(C) == 3 * C
        assert oracle_max_cut(make_T("u", "v", "w", C)) == mcut_t(C) == 8 * C
    assert oracle_max_cut(make_H(1, 1, 1)) == mcut_h(1, 1, 1)
    g = make_Hif(1, 1, ["x1"], "y", "z", 1, 1, 1)
    assert oracle_max_cut(g) == mcut_hif(1, 1, 1, 1, 1)


def test_make_f_shapes():
    f = make_F("u", "v", 3)
    assert f.n == 5 and f.m == 6
    fp = make_Fprime("u", "v", 2)
    assert fp.n == 6 and fp.m == 6
    t = make_T("u", "v", "w", 1)
    assert t.n == 9 and t.m == 9
    with pytest.raises(ValueError):
        make_F("u", "u", 1)
    with pytest.raises(ValueError):
        make_F("u", "v", 0)


def test_hif_layout():
    entry, tc, un = hif_layout(1, 2, 2)
    assert entry == [1, 2]
    assert tc == [3]
    assert un == [4]
    assert set(entry) | set(tc) | set(un) == {1, 2, 3, 4}
    # alpha >= n: no T-columns
    entry, tc, un = hif_layout(2, 1, 2)
    assert tc == [] and un == [2, 3, 4]
    with pytest.raises(ValueError):
        hif_layout(0, 2, 1)     # 2 entries + 1 T-column > 2n = 2


def test_compute_params_minimal():
    p = compute_params(parse_mis("mis 3 2\ne 1 0 2 1\n"))
    assert (p.k, p.k_prime, p.n, p.m) == (4, 3, 1, 1)
    assert p.D == 30
    assert p.C == 901
    assert (p.L1, p.L2, p.L) == (12, 6, 18)
    assert p.N == 4
    assert p.budgets == [341476]
    assert p.b == p.N * 3 * p.C + 2 * p.C + sum(p.budgets) + p.m * p.L == 354108


def test_compute_params_rejects():
    with pytest.raises(ValueError):
        compute_params(parse_mis("mis 3 2\n"))           # m = 0
    with pytest.raises(ValueError):
        compute_params(MisInstance(3, 1, []))            # n' = 1
    with pytest.raises(ValueError):
        compute_params(parse_mis("mis 3 2\ne 1 0 2 1\n"), C_override=0)


def test_build_lb_small_override():
    inst = build_lb(parse_mis("mis 3 2\ne 1 0 2 1\n"),
                    C_override=1, D_override=1)
    assert is_linear(inst.expression)
    g, _ = evaluate(inst.expression)
    assert set(g.vertices) == set(inst.graph.vertices)
    norm = lambda es: {(min(u, v), max(u, v)) for u, v in es}
    assert norm(g.edges) == norm(inst.graph.edges)
    # with D overridden, the A-B edge count still equals the *derived* D
    assert inst.counters["ab_edges"] == 30
    assert inst.counters["outer_fprime"] == inst.params.N
    assert inst.budget == inst.params.b


def test_build_lb_two_edges_override():
    inst = build_lb(parse_mis("mis 3 3\ne 1 0 2 1\ne 2 0 3 2\n"),
                    C_override=1, D_override=1)
    assert is_linear(inst.expression)
    g, _ = evaluate(inst.expression)
    assert set(g.vertices) == set(inst.graph.vertices)
    norm = lambda es: {(min(u, v), max(u, v)) for u, v in es}
    assert norm(g.edges) == norm(inst.graph.edges)


def test_instance_too_large():
    with pytest.raises(InstanceTooLarge):
        build_lb(parse_mis("mis 3 2\ne 1 0 2 1\n"), max_vertices=100)


def test_audit_report_shape():
    rep = audit_gadgets(1, 1, 1)
    assert rep.ok
    d = rep.to_dict()
    assert d["C"] == 1 and d["ok"] is True
    assert d["counts"]["fail"] == 0
    assert all({"gadget", "item", "status", "detail"} == set(it)
               for it in d["items"])
