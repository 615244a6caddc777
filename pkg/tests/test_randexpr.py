import pytest

from mcw import (GenerationFailed, GeneratorProfile, evaluate, expr_equal,
                 gen_random_expr, serialize, validate)
from mcw.expr import Intro, iter_nodes


def test_determinism():
    a = gen_random_expr(8, 3, 17)
    b = gen_random_expr(8, 3, 17)
    assert expr_equal(a, b)
    assert serialize(a) == serialize(b)
    c = gen_random_expr(8, 3, 18)
    assert not expr_equal(a, c)


def test_validity_and_vertex_count():
    for seed in range(30):
        e = gen_random_expr(7, 3, seed)
        assert validate(e).ok
        g, _ = evaluate(e)
        assert g.n == 7
        intros = [n for n in iter_nodes(e.root) if isinstance(n, Intro)]
        assert len(intros) == 7


def test_irredundant_profile():
    prof = GeneratorProfile(irredundant_only=True)
    from mcw import solve_max_cut
    for seed in range(20):
        e = gen_random_expr(9, 3, seed, prof)
        r = solve_max_cut(e)
        assert not r.fallback


def test_bad_args():
    with pytest.raises(ValueError):
        gen_random_expr(0, 2, 0)
    with pytest.raises(ValueError):
        gen_random_expr(3, 0, 0)


def test_generation_failure_possible():
    # with joins forced constantly on a single label, attempts run out
    prof = GeneratorProfile(p_join=1.0, p_relabel=0.0, max_failures=5)
    with pytest.raises(GenerationFailed):
        gen_random_expr(4, 1, 0, prof)
