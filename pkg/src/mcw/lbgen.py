"""Max Cut hardness instance generator.

Compiles a Multicolored Independent Set (MIS) instance into a Max Cut
instance (G*, budget b) whose treelike structure is witnessed by a linear
multi-expression over O(k') labels, plus brute-force auditors for the
building-block gadgets.

Gadgets (C >= 1 parallel paths; D column height; n part size - 1):
  F(u, v)       C vertex-disjoint length-2 paths; mcut = 2C
  F'(u, v)      C vertex-disjoint length-3 paths; mcut = 3C
  T(u, v, w)    F'(u,v) + F'(w,u) + F'(v,w); mcut = 8C
  H             complete 2n-partite graph over 2n columns of D vertices with
                F-gadgets between consecutive column vertices
  H-if_{a,t}    H + F-gadgets from t columns to entries x_1..x_t, plus
                max(n-a, 0) r-vertices tied to y and T-gadgets to z; cut-optimal
                partitions with y,z together put at most a entries opposite

The instance G* consists of anchor vertices d1/d2/d2', per-MIS-edge copies of
thickened clique/anti-matching blocks A_S(j), B_S(j) over the set families
S (k/2-subsets of [k] containing 1) and their complements, and five H-if
gadgets per copy checking the "picked representative" arithmetic.

Both builders (graph and expression) derive every vertex name from the same
helpers, so their outputs can be compared edge-for-edge by id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Optional

from .expr import Intro, Join, MultiExpr, Relabel, Union
from .graphs import (CAP_MAXCUT, SimpleGraph, TooLarge, _cap, enumerate_cuts,
                     oracle_max_cut)


class InstanceTooLarge(Exception):
    pass


DEFAULT_MAX_VERTICES = 2_000_000


# ---------------------------------------------------------------------------
# MIS instances

@dataclass
class MisInstance:
    """k' parts of n' vertices u_i^g (g in 0..n'-1); edges (i1, g1, i2, g2)."""
    k_prime: int
    n_prime: int
    edges: list

    def __post_init__(self):
        if self.k_prime < 1 or self.n_prime < 1:
            raise ValueError("k' >= 1 and n' >= 1 required")
        n = self.n_prime - 1
        seen = set()
        for e in self.edges:
            i1, a, i2, b = e
            if not (1 <= i1 <= self.k_prime and 1 <= i2 <= self.k_prime):
                raise ValueError(f"edge {e}: part index out of range")
            if i1 == i2:
                raise ValueError(f"edge {e}: parts must be independent sets")
            if not (0 <= a <= n and 0 <= b <= n):
                raise ValueError(f"edge {e}: vertex index out of range 0..{n}")
            key = frozenset(((i1, a), (i2, b)))
            if key in seen:
                raise ValueError(f"edge {e}: duplicate")
            seen.add(key)

    @property
    def n(self) -> int:
        return self.n_prime - 1

    @property
    def m(self) -> int:
        return len(self.edges)


def parse_mis(text: str) -> MisInstance:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "mis":
                if header is not None:
                    raise ValueError("duplicate header")
                header = (int(parts[1]), int(parts[2]))
            elif parts[0] == "e":
                if header is None:
                    raise ValueError("edge before 'mis' header")
                edges.append((int(parts[1]), int(parts[2]),
                              int(parts[3]), int(parts[4])))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"mis line {lineno}: {exc}") from exc
    if header is None:
        raise ValueError("mis input: missing 'mis' header")
    return MisInstance(header[0], header[1], edges)


def mis_to_text(mis: MisInstance) -> str:
    lines = [f"mis {mis.k_prime} {mis.n_prime}"]
    for i1, a, i2, b in mis.edges:
        lines.append(f"e {i1} {a} {i2} {b}")
    return "\n".join(lines) + "\n"


def mis_has_multicolored_is(mis: MisInstance, cap: int = 2_000_000) -> bool:
    """Brute force: is there one vertex per part with no edge inside the pick?"""
    if mis.n_prime ** mis.k_prime > cap:
        raise TooLarge(f"{mis.n_prime}^{mis.k_prime} picks exceeds cap {cap}")
    bad = [set() for _ in range(mis.k_prime + 1)]
    for i1, a, i2, b in mis.edges:
        hi, lo = max(i1, i2), min(i1, i2)
        glo, ghi = (a, b) if i1 < i2 else (b, a)
        bad[hi].add((lo, glo, ghi))
    for pick in product(range(mis.n_prime), repeat=mis.k_prime):
        ok = True
        for hi in range(2, mis.k_prime + 1):
            for lo, glo, ghi in bad[hi]:
                if pick[lo - 1] == glo and pick[hi - 1] == ghi:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def pad_k(k_prime: int):
    """Smallest even k with (k choose k/2)/2 >= k_prime, and that quotient."""
    k = 2
    while comb(k, k // 2) // 2 < k_prime:
        k += 2
    return k, comb(k, k // 2) // 2


def pad_mis(mis: MisInstance):
    """Pad the part count up to (k choose k/2)/2 for the smallest fitting even
    k; the new parts are isolated, so the MIS answer is preserved."""
    k, kp = pad_k(mis.k_prime)
    if kp == mis.k_prime:
        return mis, k
    return MisInstance(kp, mis.n_prime, list(mis.edges)), k


# ---------------------------------------------------------------------------
# set families and parameters

def s_family(k: int):
    """All k/2-subsets of [k] containing 1, in sorted order."""
    return [frozenset((1,) + rest)
            for rest in combinations(range(2, k + 1), k // 2 - 1)]


def mcut_f(C: int) -> int:
    return 2 * C


def mcut_fprime(C: int) -> int:
    return 3 * C


def mcut_t(C: int) -> int:
    return 8 * C


def mcut_h(n: int, D: int, C: int) -> int:
    return 2 * n * (D - 1) * mcut_f(C) + n * n * D * D


def mcut_hif(alpha: int, t: int, n: int, D: int, C: int) -> int:
    rcnt = max(n - alpha, 0)
    return mcut_h(n, D, C) + (t + rcnt) * mcut_f(C) + rcnt * mcut_t(C)


_Z_KINDS = ("z1lt", "z1gt", "z2lt", "z2gt")


def _edge_gadgets(edge, n: int):
    """The existing z-gadgets of one MIS edge: (kind, alpha_g, which-part,
    complement?) in emission order z1lt, z1gt, z2lt, z2gt."""
    i1, a, i2, b = edge
    out = []
    if a != 0:
        out.append(("z1lt", a - 1, i1, False))
    if a != n:
        out.append(("z1gt", n - (a + 1), i1, True))
    if b != 0:
        out.append(("z2lt", b - 1, i2, False))
    if b != n:
        out.append(("z2gt", n - (b + 1), i2, True))
    return out


@dataclass
class ReductionParams:
    k: int
    k_prime: int
    n: int
    m: int
    C: int
    D: int
    L1: int
    L2: int
    L: int
    N: int
    b: int
    budgets: list                   # per MIS edge
    S: list                         # the family of k/2-sets containing 1
    S_tilde: list                   # their complements
    blocks: list                    # S1, S1~, S2, S2~, ... (row/col block order)
    C_override: Optional[int] = None
    D_override: Optional[int] = None
    mis: Optional[MisInstance] = None

    def block_idx(self, S) -> int:
        return self._idx[S]

    def __post_init__(self):
        self._idx = {S: i + 1 for i, S in enumerate(self.blocks)}

    def to_dict(self) -> dict:
        return {
            "k": self.k, "k_prime": self.k_prime, "n": self.n, "m": self.m,
            "C": self.C, "D": self.D, "L1": self.L1, "L2": self.L2,
            "L": self.L, "N": self.N, "b": self.b, "budgets": self.budgets,
            "C_override": self.C_override, "D_override": self.D_override,
        }


def compute_params(mis: MisInstance, C_override: Optional[int] = None,
                   D_override: Optional[int] = None) -> ReductionParams:
    if mis.n_prime < 2:
        raise ValueError("n' > 1 required")
    if mis.m == 0:
        raise ValueError("the reduction is defined per edge; m >= 1 required")
    mis, k = pad_mis(mis)
    kp = mis.k_prime
    n, m = mis.n, mis.m
    S = s_family(k)
    assert len(S) == kp
    full = frozenset(range(1, k + 1))
    S_tilde = [full - s for s in S]
    blocks = []
    for s, st in zip(S, S_tilde):
        blocks.extend((s, st))
    D = D_override if D_override is not None else \
        m * (4 * kp * comb(n, 2) + 2 * kp * (2 * kp - 1) * n * n)
    C = C_override if C_override is not None else D * D * comb(2 * n, 2) + 1
    if C < 1 or D < 1:
        raise ValueError(f"C={C}, D={D}: both must be >= 1")
    L1 = kp * (2 * kp - 2) * n * n
    L2 = 2 * kp * n * n
    L = L1 + L2
    N = 1 + m * kp * n + (m - 1) * 2 * kp * n
    budgets = []
    for edge in mis.edges:
        gads = _edge_gadgets(edge, n)
        zsize = len(gads)
        bj = mcut_hif(zsize - 1, zsize, n, D, C)
        for _, alpha_g, _, _ in gads:
            bj += mcut_hif(alpha_g, n, n, D, C)
        budgets.append(bj)
    b = N * mcut_fprime(C) + mcut_f(C) + sum(budgets) + m * L
    return ReductionParams(k, kp, n, m, C, D, L1, L2, L, N, b, budgets,
                           S, S_tilde, blocks, C_override, D_override, mis)


# ---------------------------------------------------------------------------
# naming (shared between the graph builder and the expression emitter)

D1, D2, D2P = "d1", "d2", "d2p"


def _sname(S) -> str:
    return "S" + "".join(str(x) for x in sorted(S))


def a_name(S, i: int, j: int) -> str:
    return f"a.{_sname(S)}.i{i}.j{j}"


def b_name(S, i: int, j: int) -> str:
    return f"b.{_sname(S)}.i{i}.j{j}"


def z_vertex_name(kind: str, j: int) -> str:
    return f"{kind}.j{j}"


def hif_id(kind: str, j: int) -> str:
    return f"hif.{kind}.j{j}"


def col_name(gid: str, i: int, q: int) -> str:
    return f"{gid}.p{i}.{q}"


def r_vertex_name(gid: str, t: int) -> str:
    return f"{gid}.r{t}"


def f_internal(u: str, v: str, c: int) -> str:
    return f"F.{u}--{v}.{c}"


def fp_internal(u: str, v: str, c: int, side: str) -> str:
    return f"Fp.{u}--{v}.{c}.{side}"


def hif_layout(alpha: int, t: int, n: int):
    """Column index assignment: entries 1..t, T-columns n+1..n+cnt, the rest
    (unattached) ascending."""
    rcnt = max(n - alpha, 0)
    if t + rcnt > 2 * n:
        raise ValueError(f"H-if: t={t} entries + {rcnt} T-columns exceed 2n={2*n}")
    entry_cols = list(range(1, t + 1))
    t_cols = list(range(n + 1, n + rcnt + 1))
    taken = set(entry_cols) | set(t_cols)
    assert len(taken) == t + rcnt
    un_cols = [i for i in range(1, 2 * n + 1) if i not in taken]
    return entry_cols, t_cols, un_cols


# ---------------------------------------------------------------------------
# graph-side builders

class GraphBuilder:
    def __init__(self, max_vertices: Optional[int] = None):
        self.vertices: list = []
        self.roles: dict = {}
        self.edges: set = set()
        self.max_vertices = max_vertices

    def add(self, name: str, role: str):
        if name in self.roles:
            raise ValueError(f"duplicate vertex name {name!r}")
        self.roles[name] = role
        self.vertices.append(name)
        if self.max_vertices is not None and len(self.vertices) > self.max_vertices:
            raise InstanceTooLarge(
                f"more than {self.max_vertices} vertices; raise max_vertices")

    def edge(self, u: str, v: str):
        if u == v:
            raise ValueError(f"loop at {u!r}")
        self.edges.add((u, v) if u < v else (v, u))

    def graph(self) -> SimpleGraph:
        return SimpleGraph(list(self.vertices), set(self.edges))


def graft_f(gb: GraphBuilder, u: str, v: str, C: int, role: str = "F"):
    for c in range(1, C + 1):
        x = f_internal(u, v, c)
        gb.add(x, role)
        gb.edge(u, x)
        gb.edge(x, v)


def graft_fprime(gb: GraphBuilder, u: str, v: str, C: int, role: str = "Fp"):
    for c in range(1, C + 1):
        l = fp_internal(u, v, c, "l")
        r = fp_internal(u, v, c, "r")
        gb.add(l, role)
        gb.add(r, role)
        gb.edge(u, l)
        gb.edge(l, r)
        gb.edge(r, v)


def graft_t(gb: GraphBuilder, u: str, v: str, w: str, C: int, role: str = "T"):
    graft_fprime(gb, u, v, C, role)
    graft_fprime(gb, w, u, C, role)
    graft_fprime(gb, v, w, C, role)


def graft_hif(gb: GraphBuilder, gid: str, alpha: int, t: int, entries,
              y: str, z: str, n: int, D: int, C: int):
    if t < 1 or alpha < 0:
        raise ValueError("H-if requires t >= 1 and alpha >= 0")
    if len(entries) != t or len(set(entries)) != t:
        raise ValueError("H-if requires t distinct entries")
    entry_cols, t_cols, _ = hif_layout(alpha, t, n)
    cols = []
    for i in range(1, 2 * n + 1):
        col = [col_name(gid, i, q) for q in range(1, D + 1)]
        for p in col:
            gb.add(p, "col")
        cols.append(col)
    for col in cols:
        for q in range(D - 1):
            graft_f(gb, col[q], col[q + 1], C)
    for i in range(2 * n):
        for i2 in range(i + 1, 2 * n):
            for p in cols[i]:
                for p2 in cols[i2]:
                    gb.edge(p, p2)
    for pos, i in enumerate(entry_cols):
        graft_f(gb, cols[i - 1][-1], entries[pos], C)
    for tpos, i in enumerate(t_cols, 1):
        rv = r_vertex_name(gid, tpos)
        gb.add(rv, "r")
        graft_f(gb, rv, y, C)
        graft_t(gb, cols[i - 1][-1], rv, z, C)


def _standalone(endpoints):
    gb = GraphBuilder()
    for v in endpoints:
        gb.add(v, "endpoint")
    return gb


def make_F(u: str, v: str, C: int) -> SimpleGraph:
    if C < 1 or u == v:
        raise ValueError("C >= 1 and distinct endpoints required")
    gb = _standalone([u, v])
    graft_f(gb, u, v, C)
    return gb.graph()


def make_Fprime(u: str, v: str, C: int) -> SimpleGraph:
    if C < 1 or u == v:
        raise ValueError("C >= 1 and distinct endpoints required")
    gb = _standalone([u, v])
    graft_fprime(gb, u, v, C)
    return gb.graph()


def make_T(u: str, v: str, w: str, C: int) -> SimpleGraph:
    if C < 1 or len({u, v, w}) != 3:
        raise ValueError("C >= 1 and distinct endpoints required")
    gb = _standalone([u, v, w])
    graft_t(gb, u, v, w, C)
    return gb.graph()


def make_H(n: int, D: int, C: int, gid: str = "H") -> SimpleGraph:
    if n < 1 or D < 1 or C < 1:
        raise ValueError("n, D, C >= 1 required")
    gb = GraphBuilder()
    cols = []
    for i in range(1, 2 * n + 1):
        col = [col_name(gid, i, q) for q in range(1, D + 1)]
        for p in col:
            gb.add(p, "col")
        cols.append(col)
    for col in cols:
        for q in range(D - 1):
            graft_f(gb, col[q], col[q + 1], C)
    for i in range(2 * n):
        for i2 in range(i + 1, 2 * n):
            for p in cols[i]:
                for p2 in cols[i2]:
                    gb.edge(p, p2)
    return gb.graph()


def make_Hif(alpha: int, t: int, entries, y: str, z: str,
             n: int, D: int, C: int, gid: str = "hif") -> SimpleGraph:
    if alpha > t:
        raise ValueError("alpha <= t required")
    gb = _standalone(list(entries) + [y, z])
    graft_hif(gb, gid, alpha, t, entries, y, z, n, D, C)
    return gb.graph()


# ---------------------------------------------------------------------------
# the instance

@dataclass
class LbInstance:
    graph: SimpleGraph
    budget: int
    params: ReductionParams
    provenance: dict                      # vertex -> role
    counters: dict = field(default_factory=dict)
    expression: Optional[MultiExpr] = None


def build_instance(mis: MisInstance, C_override: Optional[int] = None,
                   D_override: Optional[int] = None,
                   max_vertices: int = DEFAULT_MAX_VERTICES) -> LbInstance:
    p = compute_params(mis, C_override, D_override)
    mis = p.mis
    n, m, C, D = p.n, p.m, p.C, p.D
    gb = GraphBuilder(max_vertices)
    outer_fp = 0
    ab_edges = 0

    gb.add(D1, "anchor")
    gb.add(D2, "anchor")
    gb.add(D2P, "anchor")
    graft_fprime(gb, D1, D2, C)
    outer_fp += 1
    graft_f(gb, D2P, D2, C)

    for j in range(1, m + 1):
        # cliques A_S(j), B_S(j) over all blocks
        for S in p.blocks:
            avs = [a_name(S, i, j) for i in range(1, n + 1)]
            bvs = [b_name(S, i, j) for i in range(1, n + 1)]
            for v in avs:
                gb.add(v, "a")
            for v in bvs:
                gb.add(v, "b")
            for x, y in combinations(avs, 2):
                gb.edge(x, y)
            for x, y in combinations(bvs, 2):
                gb.edge(x, y)
            ab_edges += 2 * comb(n, 2)
        # F' between a_S and a_S~ per S in the family
        full = frozenset(range(1, p.k + 1))
        for S in p.S:
            for i in range(1, n + 1):
                graft_fprime(gb, a_name(S, i, j), a_name(full - S, i, j), C)
                outer_fp += 1
        # thickened anti-matching: a_S b_T for all T != S~
        for S in p.blocks:
            for T in p.blocks:
                if T == full - S:
                    continue
                for i in range(1, n + 1):
                    for i2 in range(1, n + 1):
                        gb.edge(a_name(S, i, j), b_name(T, i2, j))
                        ab_edges += 1
        # z-vertices and the five H-if gadgets
        edge = mis.edges[j - 1]
        gads = _edge_gadgets(edge, n)
        zvs = []
        for kind, alpha_g, part, compl in gads:
            zv = z_vertex_name(kind, j)
            gb.add(zv, "z")
            zvs.append(zv)
            Sx = p.S[part - 1]
            if compl:
                Sx = full - Sx
            entries = [a_name(Sx, i, j) for i in range(1, n + 1)]
            graft_hif(gb, hif_id(kind, j), alpha_g, n, entries, D2, zv, n, D, C)
        graft_hif(gb, hif_id("Z", j), len(zvs) - 1, len(zvs), zvs,
                  D2, D2P, n, D, C)
        # chains to the next copy
        if j < m:
            for S in p.blocks:
                for i in range(1, n + 1):
                    graft_fprime(gb, b_name(S, i, j), a_name(S, i, j + 1), C)
                    outer_fp += 1

    counters = {"outer_fprime": outer_fp, "ab_edges": ab_edges,
                "n_vertices": len(gb.vertices), "n_edges": len(gb.edges)}
    return LbInstance(gb.graph(), p.b, p, dict(gb.roles), counters)


# ---------------------------------------------------------------------------
# the linear multi-expression

def label_table(k_prime: int):
    """Label ids: exclusion row labels Rc_x / Ro_x for the 2k' blocks (current
    and previous copy), then the fixed auxiliary labels."""
    lab = {}
    nxt = 1
    for x in range(1, 2 * k_prime + 1):
        lab[f"Rc{x}"] = nxt
        nxt += 1
    for x in range(1, 2 * k_prime + 1):
        lab[f"Ro{x}"] = nxt
        nxt += 1
    for name in ("w1", "w2", "w2p", "f", "fpl", "fpr", "fple", "fpre",
                 "a", "ab", "b", "bb", "ao", "abo", "bo", "bbo",
                 "c1", "c2", "c3", "c4", "c5",
                 "c1o", "c2o", "c3o", "c4o", "c5o",
                 "p", "r", "z1", "z2", "z3", "z4"):
        lab[name] = nxt
        nxt += 1
    return lab, nxt - 1


class _Emitter:
    """Builds a right-growing linear expression: every Union has a literal
    Intro right child."""

    def __init__(self, max_vertices: Optional[int] = None):
        self.node = None
        self.nv = 0
        self.max_vertices = max_vertices

    def intro(self, name: str, labels):
        leaf = Intro(name, frozenset(labels))
        self.node = leaf if self.node is None else Union(self.node, leaf)
        self.nv += 1
        if self.max_vertices is not None and self.nv > self.max_vertices:
            raise InstanceTooLarge(
                f"more than {self.max_vertices} vertices; raise max_vertices")

    def join(self, i: int, j: int):
        self.node = Join(i, j, self.node)

    def relabel(self, i: int, to):
        self.node = Relabel(i, frozenset(to), self.node)

    def forget(self, i: int):
        self.relabel(i, ())


def _emit_f_internals(em, lab, u, v, C):
    for c in range(1, C + 1):
        em.intro(f_internal(u, v, c), (lab["f"],))


def _emit_fp(em, lab, u, v, C, left_label, right_label):
    """F'(u, v), attached via the labels currently held exactly by u and v."""
    for c in range(1, C + 1):
        em.intro(fp_internal(u, v, c, "l"), (lab["fpl"], lab["fple"]))
        em.intro(fp_internal(u, v, c, "r"), (lab["fpr"], lab["fpre"]))
        em.join(lab["fple"], lab["fpre"])
        em.forget(lab["fple"])
        em.forget(lab["fpre"])
    em.join(left_label, lab["fpl"])
    em.forget(lab["fpl"])
    em.join(right_label, lab["fpr"])
    em.forget(lab["fpr"])


def _emit_col_attached(em, lab, gid, i, D, C, colL, colOldL,
                       entry, entry_label, first_col):
    """One H-if column whose D-th vertex carries an F-gadget to `entry`."""
    for q in range(1, D + 1):
        pn = col_name(gid, i, q)
        em.intro(pn, (lab["p"], colL))
        if q > 1:
            em.join(lab["p"], lab["f"])
            em.forget(lab["f"])
        nxt = col_name(gid, i, q + 1) if q < D else entry
        _emit_f_internals(em, lab, pn, nxt, C)
        em.join(lab["p"], lab["f"])
        em.forget(lab["p"])
    em.join(entry_label, lab["f"])
    em.forget(lab["f"])
    if not first_col:
        em.join(colOldL, colL)
    em.relabel(colL, (colOldL,))


def _emit_col_unattached(em, lab, gid, i, D, C, colL, colOldL, first_col):
    for q in range(1, D + 1):
        pn = col_name(gid, i, q)
        em.intro(pn, (lab["p"], colL))
        if q > 1:
            em.join(lab["p"], lab["f"])
            em.forget(lab["f"])
        if q < D:
            _emit_f_internals(em, lab, pn, col_name(gid, i, q + 1), C)
            em.join(lab["p"], lab["f"])
        em.forget(lab["p"])
    if not first_col:
        em.join(colOldL, colL)
    em.relabel(colL, (colOldL,))


def _emit_t_column(em, lab, gid, tpos, i, D, C, colL, colOldL, z_vertex,
                   z_label):
    """One H-if column ending in a T-gadget: fresh r, F'(p_D, r), F'(z, p_D),
    F'(r, z), F(r, d2)."""
    rv = r_vertex_name(gid, tpos)
    em.intro(rv, (lab["r"],))
    for q in range(1, D + 1):
        pn = col_name(gid, i, q)
        em.intro(pn, (lab["p"], colL))
        if q > 1:
            em.join(lab["p"], lab["f"])
            em.forget(lab["f"])
        if q < D:
            _emit_f_internals(em, lab, pn, col_name(gid, i, q + 1), C)
            em.join(lab["p"], lab["f"])
            em.forget(lab["p"])
    pD = col_name(gid, i, D)
    _emit_fp(em, lab, pD, rv, C, lab["p"], lab["r"])
    _emit_fp(em, lab, z_vertex, pD, C, z_label, lab["p"])
    em.forget(lab["p"])
    _emit_fp(em, lab, rv, z_vertex, C, lab["r"], z_label)
    _emit_f_internals(em, lab, rv, D2, C)
    em.join(lab["r"], lab["f"])
    em.join(lab["f"], lab["w2"])
    em.forget(lab["f"])
    em.forget(lab["r"])
    em.join(colOldL, colL)
    em.relabel(colL, (colOldL,))


_Z_TRIPLE = {"z1lt": ("c1", "c1o", "z1"), "z1gt": ("c3", "c3o", "z3"),
             "z2lt": ("c2", "c2o", "z2"), "z2gt": ("c4", "c4o", "z4")}


def build_expression(mis: MisInstance, C_override: Optional[int] = None,
                     D_override: Optional[int] = None,
                     max_vertices: int = DEFAULT_MAX_VERTICES) -> MultiExpr:
    p = compute_params(mis, C_override, D_override)
    mis = p.mis
    n, m, C, D, kp = p.n, p.m, p.C, p.D, p.k_prime
    lab, n_labels = label_table(kp)
    full = frozenset(range(1, p.k + 1))
    Rc = [lab[f"Rc{x}"] for x in range(1, 2 * kp + 1)]
    Ro = [lab[f"Ro{x}"] for x in range(1, 2 * kp + 1)]
    em = _Emitter(max_vertices)

    em.intro(D1, (lab["w1"],))
    em.intro(D2, (lab["w2"],))
    _emit_fp(em, lab, D1, D2, C, lab["w1"], lab["w2"])
    em.forget(lab["w1"])
    em.intro(D2P, (lab["w2p"],))
    _emit_f_internals(em, lab, D2P, D2, C)
    em.join(lab["f"], lab["w2p"])
    em.join(lab["f"], lab["w2"])
    em.forget(lab["f"])

    def excl(S):
        """The exclusion label set marking membership in every row block but
        S's own: a single join on Rc/Ro[x] hits all blocks except block x+1."""
        own = p.block_idx(S)
        return [Rc[x] for x in range(2 * kp) if x + 1 != own]

    for j in range(1, m + 2):
        if j <= m:
            edge = mis.edges[j - 1]
            gads = _edge_gadgets(edge, n)
            gad_of = {kind: (alpha_g, part, compl)
                      for kind, alpha_g, part, compl in gads}
        for S in p.S:
            Sb = full - S
            for i in range(1, n + 1):
                if j <= m:
                    an = a_name(S, i, j)
                    em.intro(an, tuple(excl(S)) + (lab["a"],))
                    for kind, target, tlabel in (("z1lt", an, lab["a"]),
                                                 ("z2lt", an, lab["a"])):
                        info = gad_of.get(kind)
                        if info and p.S[info[1] - 1] == S:
                            cl, clo, _ = _Z_TRIPLE[kind]
                            _emit_col_attached(
                                em, lab, hif_id(kind, j), i, D, C,
                                lab[cl], lab[clo], target, tlabel, i == 1)
                    abn = a_name(Sb, i, j)
                    em.intro(abn, tuple(excl(Sb)) + (lab["ab"],))
                    for kind in ("z1gt", "z2gt"):
                        info = gad_of.get(kind)
                        if info and p.S[info[1] - 1] == S:
                            cl, clo, _ = _Z_TRIPLE[kind]
                            _emit_col_attached(
                                em, lab, hif_id(kind, j), i, D, C,
                                lab[cl], lab[clo], abn, lab["ab"], i == 1)
                    _emit_fp(em, lab, an, abn, C, lab["a"], lab["ab"])
                if j >= 2:
                    bn = b_name(S, i, j - 1)
                    em.intro(bn, (lab["b"],))
                    if j <= m:
                        _emit_fp(em, lab, bn, a_name(S, i, j), C,
                                 lab["b"], lab["a"])
                    bbn = b_name(Sb, i, j - 1)
                    em.intro(bbn, (lab["bb"],))
                    if j <= m:
                        _emit_fp(em, lab, bbn, a_name(Sb, i, j), C,
                                 lab["bb"], lab["ab"])
                # clique accumulation
                if j <= m:
                    if i > 1:
                        em.join(lab["a"], lab["ao"])
                    em.relabel(lab["a"], (lab["ao"],))
                    if i > 1:
                        em.join(lab["ab"], lab["abo"])
                    em.relabel(lab["ab"], (lab["abo"],))
                if j >= 2:
                    if i > 1:
                        em.join(lab["b"], lab["bo"])
                    em.relabel(lab["b"], (lab["bo"],))
                    if i > 1:
                        em.join(lab["bb"], lab["bbo"])
                    em.relabel(lab["bb"], (lab["bbo"],))
            # i == n: the anti-matching joins, one per finished B-block:
            # rows A_T(j-1) with T != S~ are exactly the Ro[idx(S~)] holders
            if j >= 2:
                em.join(Ro[p.block_idx(Sb) - 1], lab["bo"])
                em.join(Ro[p.block_idx(S) - 1], lab["bbo"])
            if j <= m:
                em.forget(lab["ao"])
                em.forget(lab["abo"])
            if j >= 2:
                em.forget(lab["bo"])
                em.forget(lab["bbo"])
        # copy handover of the row labels
        if j >= 2:
            for x in range(2 * kp):
                em.forget(Ro[x])
        if j <= m:
            for x in range(2 * kp):
                em.relabel(Rc[x], (Ro[x],))
        # completion: T-columns and unattached columns of the z-gadgets, then
        # the H-if(Z) gadget threaded through the z-vertices
        if j > m:
            continue
        zpos = 0
        for kind, alpha_g, _, _ in gads:
            cl, clo, zl = _Z_TRIPLE[kind]
            gid = hif_id(kind, j)
            zv = z_vertex_name(kind, j)
            zpos += 1
            em.intro(zv, (lab[zl],))
            _, t_cols, un_cols = hif_layout(alpha_g, n, n)
            for tpos, ci in enumerate(t_cols, 1):
                _emit_t_column(em, lab, gid, tpos, ci, D, C,
                               lab[cl], lab[clo], zv, lab[zl])
            for ci in un_cols:
                _emit_col_unattached(em, lab, gid, ci, D, C,
                                     lab[cl], lab[clo], False)
            em.forget(lab[clo])
            _emit_col_attached(em, lab, hif_id("Z", j), zpos, D, C,
                               lab["c5"], lab["c5o"], zv, lab[zl], zpos == 1)
            em.forget(lab[zl])
        t = zpos
        _, t_colsZ, un_colsZ = hif_layout(t - 1, t, n)
        gidZ = hif_id("Z", j)
        for ci in un_colsZ:
            _emit_col_unattached(em, lab, gidZ, ci, D, C,
                                 lab["c5"], lab["c5o"], False)
        for tpos, ci in enumerate(t_colsZ, 1):
            _emit_t_column(em, lab, gidZ, tpos, ci, D, C,
                           lab["c5"], lab["c5o"], D2P, lab["w2p"])
        em.forget(lab["c5o"])

    em.forget(lab["w2"])
    em.forget(lab["w2p"])
    return MultiExpr(em.node, n_labels)


def build_lb(mis: MisInstance, C_override: Optional[int] = None,
             D_override: Optional[int] = None,
             max_vertices: int = DEFAULT_MAX_VERTICES) -> LbInstance:
    """Instance plus its expression."""
    inst = build_instance(mis, C_override, D_override, max_vertices)
    inst.expression = build_expression(mis, C_override, D_override,
                                       max_vertices)
    return inst


# ---------------------------------------------------------------------------
# gadget audits

@dataclass
class AuditItem:
    gadget: str
    item: str
    status: str                  # "pass" | "fail" | "skipped"
    detail: str = ""

    def to_dict(self) -> dict:
        return {"gadget": self.gadget, "item": self.item,
                "status": self.status, "detail": self.detail}


@dataclass
class AuditReport:
    C: int
    D: int
    n: int
    items: list

    @property
    def ok(self) -> bool:
        return all(it.status != "fail" for it in self.items)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for it in self.items:
            out[it.status] += 1
        return out

    def to_dict(self) -> dict:
        return {"C": self.C, "D": self.D, "n": self.n,
                "ok": self.ok, "counts": self.counts(),
                "items": [it.to_dict() for it in self.items]}


def _pinned_max(g: SimpleGraph, pins: dict) -> int:
    return max(c for _, c in enumerate_cuts(g, pins))


def _check(items, gadget, item, got, want):
    if got == want:
        items.append(AuditItem(gadget, item, "pass", f"{got}"))
    else:
        items.append(AuditItem(gadget, item, "fail",
                               f"got {got}, want {want}"))


def _check_le(items, gadget, item, got, bound):
    if got <= bound:
        items.append(AuditItem(gadget, item, "pass", f"{got} <= {bound}"))
    else:
        items.append(AuditItem(gadget, item, "fail",
                               f"got {got} > bound {bound}"))


def _audit_f(items, C):
    g = make_F("u", "v", C)
    _check(items, "F", "mcut", oracle_max_cut(g), mcut_f(C))
    _check(items, "F", "same-side-max",
           _pinned_max(g, {"u": 1, "v": 1}), mcut_f(C))
    _check(items, "F", "diff-side-max",
           _pinned_max(g, {"u": 1, "v": 2}), mcut_f(C) - C)


def _audit_fprime(items, C):
    g = make_Fprime("u", "v", C)
    _check(items, "Fp", "mcut", oracle_max_cut(g), mcut_fprime(C))
    _check(items, "Fp", "diff-side-max",
           _pinned_max(g, {"u": 1, "v": 2}), mcut_fprime(C))
    _check(items, "Fp", "same-side-max",
           _pinned_max(g, {"u": 1, "v": 1}), mcut_fprime(C) - C)


def _audit_t(items, C):
    g = make_T("u", "v", "w", C)
    cap = _cap(CAP_MAXCUT)
    if g.n > cap:
        items.append(AuditItem("T", "all", "skipped",
                               f"{g.n} vertices > cap {cap}"))
        return
    _check(items, "T", "mcut", oracle_max_cut(g), mcut_t(C))
    for s1, s2, s3 in product((1, 2), repeat=3):
        pins = {"u": s1, "v": s2, "w": s3}
        constant = s1 == s2 == s3
        want = mcut_t(C) - 2 * C if constant else mcut_t(C)
        name = "same-side-max" if constant else f"pins-{s1}{s2}{s3}-max"
        _check(items, "T", name, _pinned_max(g, pins), want)


def _c_in_regime(C, D, n) -> bool:
    """The D^2 loss bounds are proved via C > D^2 * (2n choose 2) (the
    defining equation of C); outside that regime they can genuinely fail."""
    return C > D * D * comb(2 * n, 2)


def _audit_h(items, C, D, n):
    g = make_H(n, D, C)
    cap = _cap(CAP_MAXCUT)
    if g.n > cap:
        items.append(AuditItem("H", "all", "skipped",
                               f"{g.n} vertices > cap {cap}"))
        return
    want = mcut_h(n, D, C)
    idx = {v: i for i, v in enumerate(g.vertices)}
    col_masks = []
    for i in range(1, 2 * n + 1):
        mask = 0
        for q in range(1, D + 1):
            mask |= 1 << idx[col_name("H", i, q)]
        col_masks.append(mask)
    best = -1
    best_viol = -1
    for cut, crossed in enumerate_cuts(g):
        whole = True
        on1 = 0
        for mask in col_masks:
            part = cut & mask
            if part == 0:
                on1 += 1
            elif part != mask:
                whole = False
                break
        viol = not (whole and on1 == n)
        if crossed > best:
            best = crossed
        if viol and crossed > best_viol:
            best_viol = crossed
    _check(items, "H", "mcut", best, want)
    _check_le(items, "H", "violating-suboptimal", best_viol, want - 1)
    if _c_in_regime(C, D, n):
        _check_le(items, "H", "column-violation-loss", best_viol, want - D * D)
    else:
        items.append(AuditItem("H", "column-violation-loss", "skipped",
                               f"C={C} <= D^2*(2n choose 2); D^2 loss bound "
                               "not claimed outside the C regime"))
    for chosen in combinations(range(2 * n), n):
        pins = {}
        for i in range(2 * n):
            side = 1 if i in chosen else 2
            for q in range(1, D + 1):
                pins[col_name("H", i + 1, q)] = side
        got = max(c for _, c in enumerate_cuts(g, pins))
        _check(items, "H", f"column-split-{''.join(str(i + 1) for i in chosen)}",
               got, want)


def _audit_hif(items, C, D, n, alpha, t):
    tag = f"Hif(a={alpha},t={t})"
    entries = [f"x{i}" for i in range(1, t + 1)]
    g = make_Hif(alpha, t, entries, "y", "z", n, D, C)
    cap = _cap(CAP_MAXCUT)
    if g.n > cap:
        items.append(AuditItem(tag, "all", "skipped",
                               f"{g.n} vertices > cap {cap}"))
        return
    want = mcut_hif(alpha, t, n, D, C)
    _check(items, tag, "mcut", oracle_max_cut(g), want)
    idx = {v: i for i, v in enumerate(g.vertices)}
    ebits = [1 << idx[x] for x in entries]
    best = -1
    best_viol = -1
    for cut, crossed in enumerate_cuts(g, {"y": 2, "z": 2}):
        on1 = sum(1 for bit in ebits if not cut & bit)
        if crossed > best:
            best = crossed
        if on1 > alpha and crossed > best_viol:
            best_viol = crossed
    _check(items, tag, "mcut-yz-together", best, want)
    _check_le(items, tag, "overflow-suboptimal", best_viol, want - 1)
    if _c_in_regime(C, D, n):
        _check_le(items, tag, "entry-overflow-loss", best_viol, want - D * D)
    else:
        items.append(AuditItem(tag, "entry-overflow-loss", "skipped",
                               f"C={C} <= D^2*(2n choose 2); D^2 loss bound "
                               "not claimed outside the C regime"))
    # Extendability: with y,z together, exactly n columns go to side 1 --
    # the beta entry columns, the n-alpha T-columns, and alpha-beta unattached
    # ones -- which is only possible for max(t-n, 0) <= beta <= min(alpha, n)
    # (both extra bounds bite only for t > n or alpha > n, outside the
    # lemma's stated alpha <= t <= n).
    beta_lo = max(t - n, 0)
    for assign in product((1, 2), repeat=t):
        beta = sum(1 for s in assign if s == 1)
        if beta > alpha:
            continue
        pins = dict(zip(entries, assign), y=2, z=2)
        got = _pinned_max(g, pins)
        name = f"extend-{''.join(map(str, assign))}"
        if beta_lo <= beta <= n:
            _check(items, tag, name, got, want)
        else:
            _check_le(items, tag, name + "-deficit", got, want - 1)
    # With z opposite y the T-gadgets are free, so any beta with
    # max(t-n, 0) <= beta <= n extends to an optimal partition.
    for assign in product((1, 2), repeat=t):
        beta = sum(1 for s in assign if s == 1)
        pins = dict(zip(entries, assign), y=2, z=1)
        got = _pinned_max(g, pins)
        name = f"z-opposite-{''.join(map(str, assign))}"
        if beta_lo <= beta <= n:
            _check(items, tag, name, got, want)
        else:
            _check_le(items, tag, name + "-deficit", got, want - 1)


def audit_gadgets(C: int, D: int, n: int) -> AuditReport:
    """Brute-force every gadget lemma item at the given parameters; items
    whose gadget exceeds the exact-Max-Cut cap are reported as skipped."""
    if C < 1 or D < 1 or n < 1:
        raise ValueError("C, D, n >= 1 required")
    items: list = []
    if C <= D * D * comb(2 * n, 2):
        items.append(AuditItem("params", "C-large-enough", "skipped",
                               f"C={C} <= D^2*(2n choose 2); audit-mode only"))
    _audit_f(items, C)
    _audit_fprime(items, C)
    _audit_t(items, C)
    _audit_h(items, C, D, n)
    configs = [(alpha, n) for alpha in range(n + 1)]
    configs += [(t - 1, t) for t in range(n + 1, min(2 * n, 4) + 1)]
    for alpha, t in configs:
        _audit_hif(items, C, D, n, alpha, t)
    return AuditReport(C, D, n, items)
