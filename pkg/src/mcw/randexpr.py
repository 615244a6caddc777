"""Random valid multi-k-expressions for differential testing.

The generator maintains, per partial expression, the holders map
(label -> vertices) and the edge set, so joins are only emitted when the
precondition holds (and, in irredundant mode, when every created edge is
new).  Output is deterministic for fixed (n, k, seed, profile).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .expr import Intro, Join, MultiExpr, Relabel, Union


class GenerationFailed(Exception):
    pass


@dataclass(frozen=True)
class GeneratorProfile:
    p_join: float = 0.45         # probability of a join attempt per step
    p_relabel: float = 0.25      # probability of a relabel per step
    max_intro_labels: int = 2
    extra_ops: int = 3           # join/relabel attempts after the last union
    max_failures: int = 500      # total failed join attempts before giving up
    irredundant_only: bool = False


DEFAULT_PROFILE = GeneratorProfile()


class _Part:
    __slots__ = ("node", "holders", "nv")

    def __init__(self, node, holders, nv):
        self.node = node
        self.holders = holders      # label -> set of vertex ids
        self.nv = nv


def _try_join(part: _Part, edges: set, k: int, rng: random.Random,
              irredundant_only: bool) -> bool:
    labels = [l for l, vs in part.holders.items() if vs]
    if len(labels) < 2:
        return False
    i, j = rng.sample(labels, 2)
    hi, hj = part.holders[i], part.holders[j]
    if hi & hj:
        return False
    new = []
    for u in hi:
        for v in hj:
            e = (u, v) if u < v else (v, u)
            if e in edges:
                if irredundant_only:
                    return False
            else:
                new.append(e)
    part.node = Join(i, j, part.node)
    edges.update(new)
    return True


def _relabel(part: _Part, k: int, rng: random.Random):
    i = rng.randint(1, k)
    kind = rng.random()
    if kind < 0.35:
        s = frozenset()                                   # forget
    elif kind < 0.7 and k > 1:
        j = rng.choice([x for x in range(1, k + 1) if x != i])
        s = frozenset((i, j))                             # add
    elif k > 1:
        j = rng.choice([x for x in range(1, k + 1) if x != i])
        s = frozenset((j,))                               # rename
    else:
        s = frozenset((i,))                               # no-op
    part.node = Relabel(i, s, part.node)
    src = part.holders.pop(i, None)
    if src:
        for t in s:
            part.holders.setdefault(t, set()).update(src)


def gen_random_expr(n: int, k: int, seed: int,
                    profile: GeneratorProfile = DEFAULT_PROFILE) -> MultiExpr:
    """A valid expression with exactly n Intro leaves over labels [k]."""
    if n < 1 or k < 1:
        raise ValueError("n >= 1 and k >= 1 required")
    rng = random.Random(f"{n}:{k}:{seed}")
    parts = []
    for v in range(n):
        nlab = rng.randint(1, max(1, min(k, profile.max_intro_labels)))
        labels = frozenset(rng.sample(range(1, k + 1), nlab))
        parts.append(_Part(Intro(f"v{v}", labels),
                           {l: {f"v{v}"} for l in labels}, 1))
    edges: set = set()
    failures = 0
    while len(parts) > 1:
        r = rng.random()
        if r < profile.p_join:
            part = rng.choice(parts)
            if not _try_join(part, edges, k, rng, profile.irredundant_only):
                failures += 1
                if failures > profile.max_failures:
                    raise GenerationFailed(
                        f"{failures} failed join attempts (n={n}, k={k}, seed={seed})")
        elif r < profile.p_join + profile.p_relabel:
            _relabel(rng.choice(parts), k, rng)
        else:
            a = parts.pop(rng.randrange(len(parts)))
            b = parts.pop(rng.randrange(len(parts)))
            holders = a.holders
            for l, vs in b.holders.items():
                holders.setdefault(l, set()).update(vs)
            a.node = Union(a.node, b.node)
            a.nv += b.nv
            a.holders = holders
            parts.append(a)
    part = parts[0]
    for _ in range(profile.extra_ops):
        if rng.random() < 0.5:
            if not _try_join(part, edges, k, rng, profile.irredundant_only):
                failures += 1
                if failures > profile.max_failures:
                    raise GenerationFailed(
                        f"{failures} failed join attempts (n={n}, k={k}, seed={seed})")
        else:
            _relabel(part, k, rng)
    return MultiExpr(part.node, k)
