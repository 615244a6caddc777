"""Simple graphs, label multigraphs, text IO, and brute-force oracles.

The oracles are exponential-time reference implementations with hard size
caps (TooLarge beyond them); they exist to verify the expression-driven
solvers, not to be fast.  Caps can be lowered (never raised) with the
MCW_ORACLE_CAP environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, NamedTuple, Optional

from .expr import LabeledGraph


class TooLarge(Exception):
    pass


CAP_HAM = 22
CAP_MATCHING = 22
CAP_EDS = 18
CAP_MAXCUT = 26


def _cap(default: int) -> int:
    env = os.environ.get("MCW_ORACLE_CAP")
    if env:
        try:
            return min(default, int(env))
        except ValueError:
            pass
    return default


def _check_cap(n: int, default: int, what: str):
    cap = _cap(default)
    if n > cap:
        raise TooLarge(f"{what}: {n} vertices exceeds cap {cap}")


# ---------------------------------------------------------------------------
# Simple graphs

@dataclass(slots=True)
class SimpleGraph:
    vertices: list                      # ids, fixed order
    edges: set = field(default_factory=set)   # of (u, v), u < v

    def __post_init__(self):
        vs = set(self.vertices)
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at {u!r} in a simple graph")
            if u not in vs or v not in vs:
                raise ValueError(f"edge ({u!r}, {v!r}) references a missing vertex")
            norm.add((u, v) if u < v else (v, u))
        self.edges = norm

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency_masks(self):
        """(index map, list of neighbor bitmasks)."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        adj = [0] * len(self.vertices)
        for u, v in self.edges:
            adj[idx[u]] |= 1 << idx[v]
            adj[idx[v]] |= 1 << idx[u]
        return idx, adj


def simple_from_labeled(g: LabeledGraph) -> SimpleGraph:
    return SimpleGraph(list(g.vertices), set(g.edges))


# ---------------------------------------------------------------------------
# Graph text format: "g n m k", "v <id> <label>*", "e <id> <id>"

def graph_to_text(g: LabeledGraph) -> str:
    lines = [f"g {len(g.vertices)} {len(g.edges)} {g.k}"]
    for v in g.vertices:
        labels = " ".join(str(l) for l in sorted(g.lab.get(v, ())))
        lines.append(f"v {v}" + (f" {labels}" if labels else ""))
    for u, v in sorted(g.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> LabeledGraph:
    vertices: list = []
    edges: set = set()
    lab: dict = {}
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "g":
                header = (int(parts[1]), int(parts[2]), int(parts[3]))
            elif tag == "v":
                vid = parts[1]
                if vid in lab:
                    raise ValueError(f"duplicate vertex {vid!r}")
                vertices.append(vid)
                lab[vid] = frozenset(int(x) for x in parts[2:])
            elif tag == "e":
                u, v = parts[1], parts[2]
                if u not in lab or v not in lab:
                    raise ValueError(f"edge references unknown vertex: {u} {v}")
                if u == v:
                    raise ValueError(f"loop at {u!r}")
                edges.add((u, v) if u < v else (v, u))
            else:
                raise ValueError(f"unknown record {tag!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"graph text line {lineno}: {exc}") from exc
    if header is None:
        raise ValueError("graph text: missing 'g' header")
    n, m, k = header
    if n != len(vertices) or m != len(edges):
        raise ValueError(f"graph text: header says n={n} m={m}, "
                         f"found {len(vertices)}/{len(edges)}")
    return LabeledGraph(vertices, edges, lab, k)


# ---------------------------------------------------------------------------
# Auxiliary multigraphs (loops allowed) on vertex set [k']

class AuxMultigraph(NamedTuple):
    """Multiplicity-matrix multigraph on [k']; mult is a flat tuple over the
    unordered pairs (a, b), a <= b, in the order given by pair_table(k)."""
    k: int
    mult: tuple

    def m(self, a: int, b: int) -> int:
        idx, _ = pair_table(self.k)
        return self.mult[idx[(a, b) if a <= b else (b, a)]]

    def edge_count(self) -> int:
        return sum(self.mult)


@lru_cache(maxsize=None)
def pair_table(k: int):
    """(index dict {(a,b): pos}, pair list) for 1 <= a <= b <= k."""
    pairs = [(a, b) for a in range(1, k + 1) for b in range(a, k + 1)]
    return {p: i for i, p in enumerate(pairs)}, pairs


def aux_from_edges(k: int, edges: Iterable) -> AuxMultigraph:
    idx, pairs = pair_table(k)
    mult = [0] * len(pairs)
    for a, b in edges:
        mult[idx[(a, b) if a <= b else (b, a)]] += 1
    return AuxMultigraph(k, tuple(mult))


def degree_vector(M: AuxMultigraph) -> tuple:
    """Per-label degrees; each loop contributes two."""
    deg = [0] * M.k
    _, pairs = pair_table(M.k)
    for (a, b), c in zip(pairs, M.mult):
        if not c:
            continue
        if a == b:
            deg[a - 1] += 2 * c
        else:
            deg[a - 1] += c
            deg[b - 1] += c
    return tuple(deg)


def components(M: AuxMultigraph) -> tuple:
    """Partition of [k'] into connectivity blocks (loops connect nothing);
    returned as a sorted tuple of sorted tuples."""
    parent = list(range(M.k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    _, pairs = pair_table(M.k)
    for (a, b), c in zip(pairs, M.mult):
        if c and a != b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    blocks: dict = {}
    for x in range(1, M.k + 1):
        blocks.setdefault(find(x), []).append(x)
    return tuple(sorted(tuple(sorted(b)) for b in blocks.values()))


# ---------------------------------------------------------------------------
# Oracles

def oracle_hamiltonian_path(G: SimpleGraph, u, v) -> bool:
    """Held-Karp subset DP for a Hamiltonian u-v path."""
    n = G.n
    _check_cap(n, CAP_HAM, "oracle_hamiltonian_path")
    idx, adj = G.adjacency_masks()
    if u not in idx or v not in idx:
        raise ValueError("endpoint not in graph")
    if u == v:
        return n == 1
    iu, iv = idx[u], idx[v]
    full = (1 << n) - 1
    start = 1 << iu
    dp = {start: start}           # visited mask -> bitmask of possible last vertices
    for mask in range(start, full + 1):
        lasts = dp.get(mask)
        if not lasts:
            continue
        while lasts:
            lb = lasts & -lasts
            lasts ^= lb
            last = lb.bit_length() - 1
            nxt = adj[last] & ~mask
            while nxt:
                nb = nxt & -nxt
                nxt ^= nb
                nm = mask | nb
                dp[nm] = dp.get(nm, 0) | nb
    return bool(dp.get(full, 0) >> iv & 1)


def oracle_hamiltonian_cycle(G: SimpleGraph) -> bool:
    n = G.n
    _check_cap(n, CAP_HAM, "oracle_hamiltonian_cycle")
    if n < 3:
        return False
    deg = {v: 0 for v in G.vertices}
    for a, b in G.edges:
        deg[a] += 1
        deg[b] += 1
    if min(deg.values(), default=0) < 2:
        return False
    for a, b in sorted(G.edges):
        if oracle_hamiltonian_path(G, a, b):
            return True
    return False


def _matching_masks(adj, active: int, memo: dict) -> int:
    """Max matching size on the vertices of `active`, branching on the lowest
    vertex that still has a neighbor."""
    key = active
    got = memo.get(key)
    if got is not None:
        return got
    v = -1
    rest = active
    while rest:
        b = rest & -rest
        cand = b.bit_length() - 1
        if adj[cand] & active:
            v = cand
            break
        rest ^= b
    if v < 0:
        memo[key] = 0
        return 0
    vb = 1 << v
    best = _matching_masks(adj, active ^ vb, memo)   # leave v unmatched
    nbrs = adj[v] & active
    while nbrs:
        ub = nbrs & -nbrs
        nbrs ^= ub
        best = max(best, 1 + _matching_masks(adj, active ^ vb ^ ub, memo))
    memo[key] = best
    return best


def oracle_max_matching(G: SimpleGraph) -> int:
    _check_cap(G.n, CAP_MATCHING, "oracle_max_matching")
    _, adj = G.adjacency_masks()
    return _matching_masks(adj, (1 << G.n) - 1, {})


def oracle_eds(G: SimpleGraph) -> int:
    """Minimum edge dominating set = min over vertex covers S of |S| - nu(G[S])."""
    n = G.n
    _check_cap(n, CAP_EDS, "oracle_eds")
    if not G.edges:
        return 0
    _, adj = G.adjacency_masks()
    full = (1 << n) - 1
    memo: dict = {}
    best = None
    for s in range(full + 1):
        comp = full ^ s
        # S is a vertex cover iff its complement is independent
        ok = True
        rest = comp
        while rest:
            b = rest & -rest
            rest ^= b
            if adj[b.bit_length() - 1] & comp:
                ok = False
                break
        if not ok:
            continue
        val = s.bit_count() - _matching_masks(adj, s, memo)
        if best is None or val < best:
            best = val
    return best


def oracle_eds_direct(G: SimpleGraph) -> int:
    """Direct minimum over edge subsets whose endpoints cover every edge.
    Cross-check oracle; subsets are tried by increasing size, so the cost is
    C(m, opt) rather than 2^m."""
    edges = sorted(G.edges)
    m = len(edges)
    if m == 0:
        return 0
    idx = {v: i for i, v in enumerate(G.vertices)}
    edge_masks = [(1 << idx[u]) | (1 << idx[v]) for u, v in edges]
    # an edge set D dominates iff every edge has an endpoint in V(D)
    examined = 0
    for size in range(1, m + 1):
        examined += comb(m, size)
        if examined > 5_000_000:
            raise TooLarge(f"oracle_eds_direct: {m} edges, optimum > {size - 1}")
        for pick in combinations(range(m), size):
            vs = 0
            for p in pick:
                vs |= edge_masks[p]
            if all(em & vs for em in edge_masks):
                return size
    return m


def oracle_max_cut(G: SimpleGraph) -> int:
    """Max crossed edges over all 2-partitions; vertex 0 pinned to side 1
    (valid by side-swap symmetry)."""
    n = G.n
    _check_cap(n, CAP_MAXCUT, "oracle_max_cut")
    if n <= 1 or not G.edges:
        return 0
    _, adj = G.adjacency_masks()
    full = (1 << n) - 1
    cur = 0          # side-2 membership mask; bit 0 stays 0
    crossed = 0
    best = 0
    for g in range(1, 1 << (n - 1)):
        v = (g & -g).bit_length()        # flip vertex index in 1..n-1
        vb = 1 << v
        av = adj[v]
        cur ^= vb
        on2 = (av & cur).bit_count()
        on1 = (av & ~cur & full).bit_count()
        crossed += (on1 - on2) if (cur & vb) else (on2 - on1)
        if crossed > best:
            best = crossed
    return best


def enumerate_cuts(G: SimpleGraph, pins: Optional[dict] = None):
    """Yield (side2_mask, crossed) over all assignments of the unpinned
    vertices; `pins` maps vertex id -> 1 or 2.  Without pins, all assignments
    of all vertices are enumerated (no symmetry halving).  Bit i of the mask
    corresponds to G.vertices[i] being on side 2.  Gray-code walk.
    """
    n = G.n
    _check_cap(n, CAP_MAXCUT, "enumerate_cuts")
    idx, adj = G.adjacency_masks()
    pins = pins or {}
    base = 0
    for v, side in pins.items():
        if side == 2:
            base |= 1 << idx[v]
    free = [i for i in range(n) if G.vertices[i] not in pins]
    cur = base
    crossed = sum(1 for u, v in G.edges
                  if ((cur >> idx[u]) ^ (cur >> idx[v])) & 1)
    yield cur, crossed
    full = (1 << n) - 1
    for g in range(1, 1 << len(free)):
        v = free[(g & -g).bit_length() - 1]
        vb = 1 << v
        av = adj[v]
        cur ^= vb
        on2 = (av & cur).bit_count()
        on1 = (av & ~cur & full).bit_count()
        crossed += (on1 - on2) if (cur & vb) else (on2 - on1)
        yield cur, crossed
