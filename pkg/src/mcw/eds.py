"""Edge Dominating Set on multi-k-expressions, n^O(k).

A partial solution is a vertex-cover candidate S plus a matching M inside it;
its footprint is (I, psi, ell): the labels seen outside S, per-label counts
of unmatched S-vertices, and |M|.  A fresh star label k+1 is attached to
every vertex at its intro so unmatched cover vertices stay countable after
their working labels are forgotten.  The minimum EDS size is the smallest
ell + sum(psi) over root footprints (matched pairs plus one private edge per
unmatched cover vertex).
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Intro, Join, MultiExpr, Relabel, Union, normalize

# A footprint is (I: frozenset of labels, psi: tuple of k+1 counts, ell: int).
# A FootprintSet is a python set of such triples.


def eds_leaf(i: int, kp: int) -> set:
    """Vertex outside the cover (labels seen: {i}) or inside it, unmatched."""
    if not 1 <= i <= kp:
        raise ValueError(f"label {i} out of range 1..{kp}")
    psi0 = tuple(0 for _ in range(kp))
    psi1 = tuple(1 if a == i else 0 for a in range(1, kp + 1))
    return {(frozenset((i,)), psi0, 0), (frozenset(), psi1, 0)}


def eds_forget(S: set, i: int) -> set:
    out = set()
    for I, psi, ell in S:
        if psi[i - 1] > 0:
            continue   # an unmatched cover vertex would lose its only handle
        out.add((I - {i}, psi, ell))
    return out


def eds_add_label(S: set, i: int, j: int) -> set:
    """Label j is added to every i-holder: any r of the i-counted unmatched
    cover vertices may be accounted under j instead."""
    if i == j:
        raise ValueError("eds_add_label requires i != j")
    out = set()
    for I, psi, ell in S:
        I2 = I | {j} if i in I else I
        pi = psi[i - 1]
        for r in range(pi + 1):
            p = list(psi)
            p[i - 1] = pi - r
            p[j - 1] += r
            out.add((I2, tuple(p), ell))
    return out


def eds_union(S1: set, S2: set) -> set:
    out = set()
    for I1, p1, l1 in S1:
        for I2, p2, l2 in S2:
            out.add((I1 | I2, tuple(a + b for a, b in zip(p1, p2)), l1 + l2))
    return out


def eds_join(S: set, i: int, j: int) -> set:
    """Join edges must be dominated: footprints where both i and j were seen
    outside the cover die; otherwise r new matching edges can pair unmatched
    i-cover vertices with unmatched j-cover vertices."""
    if i == j:
        raise ValueError("eds_join requires i != j")
    out = set()
    for I, psi, ell in S:
        if i in I and j in I:
            continue
        cap = min(psi[i - 1], psi[j - 1])
        for r in range(cap + 1):
            p = list(psi)
            p[i - 1] -= r
            p[j - 1] -= r
            out.add((I, tuple(p), ell + r))
    return out


@dataclass(slots=True)
class EdsRun:
    optimum: int
    max_set: int


def run_eds(e: MultiExpr) -> EdsRun:
    """Footprint DP over the normalized expression; returns the exact minimum
    edge dominating set size."""
    norm = normalize(e)
    k = e.k
    star = k + 1
    kp = k + 1
    res: dict = {}
    max_set = 0
    stack = [(norm.root, False)]
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
            # the star label rides along from the very start:
            # rho_{i -> {i, star}} directly above the leaf
            fps = eds_add_label(eds_leaf(i, kp), i, star)
        elif isinstance(node, Union):
            a = res.pop(id(node.left))
            b = res.pop(id(node.right))
            fps = eds_union(a, b)
        elif isinstance(node, Join):
            fps = eds_join(res.pop(id(node.child)), node.i, node.j)
        else:
            child = res.pop(id(node.child))
            if not node.new:
                fps = eds_forget(child, node.i)
            else:
                extra = node.new - {node.i}
                if len(node.new) != 2 or node.i not in node.new or len(extra) != 1:
                    raise ValueError("expression is not normalized")
                fps = eds_add_label(child, node.i, next(iter(extra)))
        if len(fps) > max_set:
            max_set = len(fps)
        res[id(node)] = fps
    root = res.pop(id(norm.root))
    best = min(ell + sum(psi) for _, psi, ell in root)
    return EdsRun(best, max_set)


def eds_optimum(e: MultiExpr) -> int:
    return run_eds(e).optimum


def solve_eds(e: MultiExpr, t: int) -> bool:
    if t < 0:
        raise ValueError("budget must be non-negative")
    return run_eds(e).optimum <= t
