"""Max Cut on multi-k-expressions, n^O(2^k).

Vertices with equal label sets are interchangeable for every future join, so
the DP tracks, per label-set class, only how many of its vertices sit on
side 1.  A state is a vector of per-class side-1 counts; its value is the
best number of crossed edges realizable with those counts.  This is exactly
the clique-width cut DP run on the implicit 2^k-expression in which each
label set is a single label.

The counting step at a join is only sound when the join's edges are all new
(irredundant); evaluate() flags this per node.  On a redundant join we refuse
(RedundantJoin) and the driver falls back to the brute-force oracle when the
graph is small enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .expr import Intro, Join, MultiExpr, Relabel, Union, evaluate
from .graphs import CAP_MAXCUT, _cap, oracle_max_cut, simple_from_labeled


class RedundantJoin(Exception):
    pass


class RedundantExpressionTooLarge(Exception):
    pass


@dataclass(slots=True)
class ClassState:
    classes: list     # of (frozenset label set, n_S), pairwise distinct sets
    table: dict       # tuple of per-class side-1 counts -> best crossed edges


def mc_leaf(S: frozenset) -> ClassState:
    if not S:
        raise ValueError("intro with an empty label set")
    return ClassState([(frozenset(S), 1)], {(0,): 0, (1,): 0})


def mc_union(A: ClassState, B: ClassState) -> ClassState:
    pos: dict = {}
    classes = []
    for s, n in A.classes:
        pos[s] = len(classes)
        classes.append([s, n])
    b_map = []
    for s, n in B.classes:
        p = pos.get(s)
        if p is None:
            pos[s] = len(classes)
            b_map.append(len(classes))
            classes.append([s, n])
        else:
            classes[p][1] += n
            b_map.append(p)
    width = len(classes)
    a_width = len(A.classes)
    table: dict = {}
    for ca, va in A.table.items():
        for cb, vb in B.table.items():
            vec = list(ca) + [0] * (width - a_width)
            for q, c in enumerate(cb):
                vec[b_map[q]] += c
            key = tuple(vec)
            val = va + vb
            if table.get(key, -1) < val:
                table[key] = val
    return ClassState([(s, n) for s, n in classes], table)


def mc_join(A: ClassState, i: int, j: int, irredundant: bool = True) -> ClassState:
    """Add cross edges between i-classes and j-classes; every state's value
    grows by the exact number of fresh crossed edges, which is well defined
    only for irredundant joins."""
    if not irredundant:
        raise RedundantJoin(f"join {i} {j} re-adds existing edges")
    with_i = [p for p, (s, _) in enumerate(A.classes) if i in s]
    with_j = [p for p, (s, _) in enumerate(A.classes) if j in s]
    if set(with_i) & set(with_j):
        raise ValueError(f"join {i} {j}: some class holds both labels")
    ni = sum(A.classes[p][1] for p in with_i)
    nj = sum(A.classes[p][1] for p in with_j)
    table = {}
    for vec, val in A.table.items():
        ci = sum(vec[p] for p in with_i)
        cj = sum(vec[p] for p in with_j)
        table[vec] = val + ci * (nj - cj) + (ni - ci) * cj
    return ClassState(list(A.classes), table)


def mc_relabel(A: ClassState, i: int, S: frozenset) -> ClassState:
    pos: dict = {}
    classes = []
    cmap = []
    for s, n in A.classes:
        if i in s:
            s = (s - {i}) | S
        p = pos.get(s)
        if p is None:
            pos[s] = len(classes)
            cmap.append(len(classes))
            classes.append([s, n])
        else:
            classes[p][1] += n
            cmap.append(p)
    width = len(classes)
    table: dict = {}
    for vec, val in A.table.items():
        out = [0] * width
        for q, c in enumerate(vec):
            out[cmap[q]] += c
        key = tuple(out)
        if table.get(key, -1) < val:
            table[key] = val
    return ClassState([(s, n) for s, n in classes], table)


@dataclass(slots=True)
class McResult:
    optimum: int
    answer: Optional[bool]
    fallback: bool
    max_table: int = 0


def solve_max_cut(e: MultiExpr, b: Optional[int] = None) -> McResult:
    g, ann = evaluate(e)
    max_table = 0
    try:
        res: dict = {}
        stack = [(e.root, False)]
        while stack:
            node, done = stack.pop()
            if not done:
                stack.append((node, True))
                if isinstance(node, Union):
                    stack.append((node.right, False))
                    stack.append((node.left, False))
                elif isinstance(node, (Join, Relabel)):
                    stack.append((node.child, False))
                continue
            if isinstance(node, Intro):
                st = mc_leaf(node.labels)
            elif isinstance(node, Union):
                st = mc_union(res.pop(id(node.left)), res.pop(id(node.right)))
            elif isinstance(node, Join):
                st = mc_join(res.pop(id(node.child)), node.i, node.j,
                             irredundant=bool(ann[node].irredundant))
            else:
                st = mc_relabel(res.pop(id(node.child)), node.i, node.new)
            if len(st.table) > max_table:
                max_table = len(st.table)
            res[id(node)] = st
        root = res.pop(id(e.root))
        optimum = max(root.table.values())
        fallback = False
    except RedundantJoin:
        if g.n > _cap(CAP_MAXCUT):
            raise RedundantExpressionTooLarge(
                f"redundant join and {g.n} vertices exceeds the oracle cap")
        optimum = oracle_max_cut(simple_from_labeled(g))
        fallback = True
    answer = None if b is None else optimum >= b
    return McResult(optimum, answer, fallback, max_table)
