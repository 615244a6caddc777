"""Hamiltonian Cycle on multi-k-expressions, n^O(k).

Partial solutions are path packings abstracted to auxiliary multigraphs on
the label set: one edge per path, endpoints = a chosen label per path end
(loops for single-vertex paths).  Families of these multigraphs are pushed
bottom-up through the normalized expression and shrunk after every step by
keeping one representative per (degree vector, component partition) class.

The driver tries every edge uv of the evaluated graph: u and v get private
labels k+1 and k+2, and the answer is yes iff some family member at the root
is a single edge {k+1, k+2} (a Hamiltonian u-v path closed by uv).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .expr import Intro, Join, MultiExpr, Relabel, Union, evaluate, normalize
from .graphs import (AuxMultigraph, TooLarge, components, degree_vector,
                     pair_table)


@dataclass(slots=True)
class AuxFamily:
    k: int                  # order k' of every member
    members: frozenset      # of multiplicity tuples (see graphs.pair_table)

    def __len__(self):
        return len(self.members)

    def multigraphs(self):
        return [AuxMultigraph(self.k, t) for t in sorted(self.members)]


def family_from_multigraphs(ms) -> AuxFamily:
    ms = list(ms)
    if not ms:
        raise ValueError("cannot infer order from an empty family")
    k = ms[0].k
    return AuxFamily(k, frozenset(m.mult for m in ms))


# ---------------------------------------------------------------------------
# reduce

def _reduce_key(k: int, t: tuple):
    m = AuxMultigraph(k, t)
    return degree_vector(m), components(m)


def _reduce_set(k: int, members) -> frozenset:
    best: dict = {}
    for t in members:
        key = _reduce_key(k, t)
        cur = best.get(key)
        if cur is None or t < cur:
            best[key] = t
    return frozenset(best.values())


def reduce(F: AuxFamily) -> AuxFamily:
    """One representative per (degree vector, components) class; the
    representative is the lexicographically smallest multiplicity tuple."""
    return AuxFamily(F.k, _reduce_set(F.k, F.members))


def family_size_bound(n: int, kp: int) -> float:
    """Cardinality bound for reduced families: n^k' * 2^(k'(log2 k' + 1))."""
    import math
    return n ** kp * 2 ** (kp * (math.log2(kp) + 1))


# ---------------------------------------------------------------------------
# per-node-type operations

def leaf_family(i: int, kp: int) -> AuxFamily:
    if not 1 <= i <= kp:
        raise ValueError(f"label {i} out of range 1..{kp}")
    idx, pairs = pair_table(kp)
    mult = [0] * len(pairs)
    mult[idx[(i, i)]] = 1
    return AuxFamily(kp, frozenset({tuple(mult)}))


def _positions_with(k: int, i: int):
    idx, _ = pair_table(k)
    return [idx[(min(a, i), max(a, i))] for a in range(1, k + 1)]


def forget_family(F: AuxFamily, i: int) -> AuxFamily:
    pos = _positions_with(F.k, i)
    keep = frozenset(t for t in F.members if all(t[p] == 0 for p in pos))
    return AuxFamily(F.k, keep)


def add_label_family(F: AuxFamily, i: int, j: int, use_reduce: bool = True) -> AuxFamily:
    """All ways to move some i-incident edges over to j when label j is added
    to every i-holder: for each label a not in {i,j}, q_a of the {a,i} edges
    become {a,j}; q_j of the {i,j} edges become loops at j; of the i-loops,
    q1 become {i,j} edges and q2 become j-loops."""
    if i == j:
        raise ValueError("add_label_family requires i != j")
    k = F.k
    idx, _ = pair_table(k)
    ii = idx[(i, i)]
    ij = idx[(min(i, j), max(i, j))]
    jj = idx[(j, j)]
    others = [a for a in range(1, k + 1) if a != i and a != j]
    pos_ai = [idx[(min(a, i), max(a, i))] for a in others]
    pos_aj = [idx[(min(a, j), max(a, j))] for a in others]
    out = set()
    for t in F.members:
        ranges = [range(t[p] + 1) for p in pos_ai]
        for qs in product(*ranges):
            base = list(t)
            for q, pai, paj in zip(qs, pos_ai, pos_aj):
                base[pai] -= q
                base[paj] += q
            for qj in range(t[ij] + 1):
                for q1 in range(t[ii] + 1):
                    for q2 in range(t[ii] - q1 + 1):
                        m = list(base)
                        m[ij] += q1 - qj
                        m[jj] += q2 + qj
                        m[ii] -= q1 + q2
                        out.add(tuple(m))
    if use_reduce:
        out = _reduce_set(k, out)
    return AuxFamily(k, frozenset(out))


def union_family(F1: AuxFamily, F2: AuxFamily, use_reduce: bool = True) -> AuxFamily:
    if F1.k != F2.k:
        raise ValueError("union_family requires equal orders")
    out = {tuple(a + b for a, b in zip(t1, t2))
           for t1 in F1.members for t2 in F2.members}
    if use_reduce:
        out = _reduce_set(F1.k, out)
    return AuxFamily(F1.k, frozenset(out))


def join_family(F: AuxFamily, i: int, j: int, vx: int,
                use_reduce: bool = True) -> AuxFamily:
    """Iterate A -> A + {i,j} (combine one i-incident and one distinct
    j-incident path-edge into one {a,b} edge) for up to vx-1 rounds with a
    fixpoint early exit."""
    if i == j:
        raise ValueError("join_family requires i != j")
    k = F.k
    idx, _ = pair_table(k)
    labels = range(1, k + 1)
    pos_i = {a: idx[(min(a, i), max(a, i))] for a in labels}
    pos_j = {b: idx[(min(b, j), max(b, j))] for b in labels}
    cur = _reduce_set(k, F.members) if use_reduce else frozenset(F.members)
    for _ in range(max(vx - 1, 0)):
        new = set(cur)
        for t in cur:
            for a in labels:
                pi = pos_i[a]
                if not t[pi]:
                    continue
                for b in labels:
                    pj = pos_j[b]
                    if not t[pj] or (pj == pi and t[pj] < 2):
                        continue
                    m = list(t)
                    m[pi] -= 1
                    m[pj] -= 1
                    m[idx[(min(a, b), max(a, b))]] += 1
                    new.add(tuple(m))
        if use_reduce:
            new = _reduce_set(k, new)
        else:
            new = frozenset(new)
        if new == cur:
            break
        cur = new
    return AuxFamily(k, frozenset(cur))


def root_accepts(F: AuxFamily, lu: int, lv: int) -> bool:
    """True iff some member is a single edge with endpoint set {lu, lv}."""
    idx, _ = pair_table(F.k)
    p = idx[(min(lu, lv), max(lu, lv))]
    return any(sum(t) == 1 and t[p] == 1 for t in F.members)


# ---------------------------------------------------------------------------
# driver

@dataclass(slots=True)
class HcRun:
    answer: bool
    edges_tried: int
    max_family: int


def _dp_for_edge(root, kp: int, u, v, lu: int, lv: int,
                 use_reduce: bool, stats: HcRun) -> AuxFamily:
    """Bottom-up family DP over the normalized tree, with the intros of u and
    v rewritten on the fly to private labels lu/lv plus an add-label step."""
    res: dict = {}    # id(node) -> (AuxFamily, vx)
    stack = [(root, False)]
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
            (i,) = node.labels
            if node.vertex == u:
                fam = add_label_family(leaf_family(lu, kp), lu, i, use_reduce)
            elif node.vertex == v:
                fam = add_label_family(leaf_family(lv, kp), lv, i, use_reduce)
            else:
                fam = leaf_family(i, kp)
            vx = 1
        elif isinstance(node, Union):
            fl, vl = res.pop(id(node.left))
            fr, vr = res.pop(id(node.right))
            fam = union_family(fl, fr, use_reduce)
            vx = vl + vr
        elif isinstance(node, Join):
            fc, vx = res.pop(id(node.child))
            fam = join_family(fc, node.i, node.j, vx, use_reduce)
        else:  # Relabel, normalized: forget or add
            fc, vx = res.pop(id(node.child))
            if not node.new:
                fam = forget_family(fc, node.i)
            else:
                extra = (node.new - {node.i})
                if len(node.new) != 2 or node.i not in node.new or len(extra) != 1:
                    raise ValueError("expression is not normalized")
                fam = add_label_family(fc, node.i, next(iter(extra)), use_reduce)
        if len(fam) > stats.max_family:
            stats.max_family = len(fam)
        res[id(node)] = (fam, vx)
    fam, _ = res.pop(id(root))
    return fam


def run_hc(e: MultiExpr, use_reduce: bool = True) -> HcRun:
    g, _ = evaluate(e)
    stats = HcRun(False, 0, 0)
    if g.n < 3:
        return stats
    norm = normalize(e)
    k = e.k
    kp = k + 2
    lu, lv = k + 1, k + 2
    for a, b in sorted(g.edges):
        stats.edges_tried += 1
        fam = _dp_for_edge(norm.root, kp, a, b, lu, lv, use_reduce, stats)
        if root_accepts(fam, lu, lv):
            stats.answer = True
            break
    return stats


def solve_hc(e: MultiExpr, use_reduce: bool = True) -> bool:
    return run_hc(e, use_reduce).answer


# ---------------------------------------------------------------------------
# red-blue Eulerian trail checker (test utility backing the representation
# relation: a family member is "completable" with a blue multigraph if the
# combined multigraph has a closed walk using every edge once with colors
# alternating red/blue)

def _expand(M: AuxMultigraph):
    out = []
    _, pairs = pair_table(M.k)
    for (a, b), c in zip(pairs, M.mult):
        out.extend([(a, b)] * c)
    return out


def check_red_blue_eulerian(R: AuxMultigraph, B: AuxMultigraph) -> bool:
    red = _expand(R)
    blue = _expand(B)
    if len(red) + len(blue) > 12:
        raise TooLarge(f"{len(red) + len(blue)} edges exceeds the 12-edge cap")
    if len(red) != len(blue):
        return False   # alternation on a closed walk forces equal counts
    if not red:
        return True
    total = len(red) + len(blue)

    def dfs(start, cur, use_red, used_r, used_b, count):
        if count == total:
            return cur == start
        edges, used = (red, used_r) if use_red else (blue, used_b)
        for i, (a, b) in enumerate(edges):
            if used >> i & 1:
                continue
            nxts = ()
            if a == cur:
                nxts = (b,)
                if b == cur and a != b:
                    nxts = (b,)
            elif b == cur:
                nxts = (a,)
            if a == b == cur:
                nxts = (a,)
            for nxt in nxts:
                if use_red:
                    if dfs(start, nxt, False, used_r | 1 << i, used_b, count + 1):
                        return True
                else:
                    if dfs(start, nxt, True, used_r, used_b | 1 << i, count + 1):
                        return True
        return False

    a, b = red[0]
    starts = [(a, b)] if a == b else [(a, b), (b, a)]
    for start, nxt in starts:
        if dfs(start, nxt, False, 1, 0, 1):
            return True
    return False
