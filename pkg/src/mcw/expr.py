"""Multi-k-expressions: AST, parsing, validation, evaluation, normalization.

An expression builds a labeled graph bottom-up from four operations:

* ``(intro v (l1 l2 ...))``   -- introduce vertex ``v`` holding the given labels
* ``(union e1 e2)``           -- disjoint union
* ``(join i j e)``            -- add all edges between i-holders and j-holders
* ``(relabel i (S...) e)``    -- replace label i by the set S wherever it occurs

``(relabel i () e)`` forgets label i; ``(relabel i (i j) e)`` adds label j to
every i-holder.  A ``(mcw k ...)`` wrapper declares the label budget; without
it the maximum label mentioned is used.

Everything here is iterative (explicit stacks): generated lower-bound
expressions are right-leaning trees with hundreds of thousands of nodes, far
beyond the interpreter's recursion limit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union as _U

Label = int
LabelSet = frozenset  # of Label


class ExprError(Exception):
    """Base class for expression-level errors."""


class ParseError(ExprError):
    def __init__(self, line: int, col: int, reason: str):
        super().__init__(f"parse error at {line}:{col}: {reason}")
        self.line = line
        self.col = col
        self.reason = reason


class UnknownLabel(ParseError):
    """A label exceeds the declared k of the (mcw k ...) wrapper."""


class DuplicateVertexId(ExprError):
    pass


class JoinPreconditionViolated(ExprError):
    pass


# ---------------------------------------------------------------------------
# AST
#
# eq=False: identity semantics.  Structural comparison of deep trees would
# recurse; use expr_equal() instead.  Identity hashing also lets annotation
# maps key directly on nodes.

@dataclass(eq=False, slots=True)
class Intro:
    vertex: str
    labels: LabelSet


@dataclass(eq=False, slots=True)
class Union:
    left: "Node"
    right: "Node"


@dataclass(eq=False, slots=True)
class Join:
    i: Label
    j: Label
    child: "Node"


@dataclass(eq=False, slots=True)
class Relabel:
    i: Label
    new: LabelSet
    child: "Node"


Node = _U[Intro, Union, Join, Relabel]


@dataclass(eq=False, slots=True)
class MultiExpr:
    """A rooted expression tree plus its declared label budget k."""
    root: Node
    k: int


@dataclass(slots=True)
class LabeledGraph:
    vertices: list          # vertex ids, in introduction order
    edges: set              # of (u, v) tuples with u < v
    lab: dict               # vertex id -> frozenset of labels (may be empty)
    k: int

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(slots=True)
class NodeAnnotation:
    nv: int                       # |V_x|
    ne: int                       # |E_x|
    irredundant: Optional[bool] = None   # Join nodes only


@dataclass(slots=True)
class ValidationReport:
    findings: list = field(default_factory=list)   # of (kind, message)

    @property
    def ok(self) -> bool:
        return not self.findings

    def messages(self) -> list:
        return [m for _, m in self.findings]


# ---------------------------------------------------------------------------
# Traversal helpers

def iter_nodes(root: Node) -> Iterator[Node]:
    """Preorder iteration, iterative."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Union):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (Join, Relabel)):
            stack.append(node.child)


def node_count(e: MultiExpr) -> int:
    return sum(1 for _ in iter_nodes(e.root))


def expr_equal(a: MultiExpr, b: MultiExpr) -> bool:
    """Structural equality without recursion."""
    if a.k != b.k:
        return False
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        if type(x) is not type(y):
            return False
        if isinstance(x, Intro):
            if x.vertex != y.vertex or x.labels != y.labels:
                return False
        elif isinstance(x, Union):
            stack.append((x.left, y.left))
            stack.append((x.right, y.right))
        elif isinstance(x, Join):
            if x.i != y.i or x.j != y.j:
                return False
            stack.append((x.child, y.child))
        else:
            if x.i != y.i or x.new != y.new:
                return False
            stack.append((x.child, y.child))
    return True


def max_label(root: Node) -> int:
    best = 0
    for node in iter_nodes(root):
        if isinstance(node, Intro):
            if node.labels:
                best = max(best, max(node.labels))
        elif isinstance(node, Join):
            best = max(best, node.i, node.j)
        elif isinstance(node, Relabel):
            best = max(best, node.i, *(node.new or {0}))
    return best


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"\(|\)|;[^\n]*|[^\s();]+|\s+")
_VID_RE = re.compile(r"[A-Za-z0-9_.-]+\Z")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = []          # (token, offset)
        pos = 0
        for m in _TOKEN_RE.finditer(text):
            if m.start() != pos:
                self._err(pos, f"unexpected character {text[pos]!r}")
            pos = m.end()
            t = m.group()
            if t.isspace() or t.startswith(";"):
                continue
            self.toks.append((t, m.start()))
        if pos != len(text):
            self._err(pos, f"unexpected character {text[pos]!r}")
        self.idx = 0

    def _linecol(self, offset: int):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def _err(self, offset: int, reason: str, cls=ParseError):
        line, col = self._linecol(offset)
        raise cls(line, col, reason)

    def error(self, reason: str, cls=ParseError):
        if self.idx < len(self.toks):
            off = self.toks[self.idx][1]
        else:
            off = len(self.text)
        self._err(off, reason, cls)

    def peek(self, ahead: int = 0):
        i = self.idx + ahead
        return self.toks[i][0] if i < len(self.toks) else None

    def next(self) -> str:
        if self.idx >= len(self.toks):
            self._err(len(self.text), "unexpected end of input")
        t, _ = self.toks[self.idx]
        self.idx += 1
        return t

    def expect(self, t: str):
        got = self.next()
        if got != t:
            self.idx -= 1
            self.error(f"expected {t!r}, got {got!r}")

    def integer(self) -> int:
        t = self.next()
        if not re.fullmatch(r"\d+", t):
            self.idx -= 1
            self.error(f"expected an integer, got {t!r}")
        return int(t)

    def label(self, declared_k: Optional[int]) -> int:
        v = self.integer()
        if v < 1:
            self.idx -= 1
            self.error("labels are positive integers")
        if declared_k is not None and v > declared_k:
            self.idx -= 1
            self.error(f"label {v} exceeds declared k={declared_k}", UnknownLabel)
        return v

    def vid(self) -> str:
        t = self.next()
        if not _VID_RE.match(t):
            self.idx -= 1
            self.error(f"invalid vertex id {t!r}")
        return t

    def at_end(self) -> bool:
        return self.idx >= len(self.toks)


def parse(text: str) -> MultiExpr:
    """Parse expression-file text into a MultiExpr.

    Raises ParseError (with line/col) on malformed input and UnknownLabel if a
    label exceeds a declared ``(mcw k ...)`` budget.
    """
    ts = _Tokens(text)
    declared = None
    wrapped = False
    if ts.peek() == "(" and ts.peek(1) == "mcw":
        ts.next()
        ts.next()
        declared = ts.integer()
        if declared < 1:
            ts.error("declared k must be >= 1")
        wrapped = True
    root = _parse_node(ts, declared)
    if wrapped:
        ts.expect(")")
    if not ts.at_end():
        ts.error(f"trailing input {ts.peek()!r}")
    k = declared if declared is not None else max(1, max_label(root))
    return MultiExpr(root, k)


def _parse_node(ts: _Tokens, declared: Optional[int]) -> Node:
    frames = []  # ['union', first_or_None] | ['join', i, j] | ['relabel', i, S]
    node: Optional[Node] = None
    while True:
        if node is None:
            ts.expect("(")
            head = ts.next()
            if head == "intro":
                v = ts.vid()
                ts.expect("(")
                labels = []
                while ts.peek() != ")":
                    labels.append(ts.label(declared))
                ts.next()
                if not labels:
                    ts.error("intro requires at least one label")
                ts.expect(")")
                node = Intro(v, frozenset(labels))
            elif head == "union":
                frames.append(["union", None])
                continue
            elif head == "join":
                i = ts.label(declared)
                j = ts.label(declared)
                if i == j:
                    ts.error("join labels must differ")
                frames.append(["join", i, j])
                continue
            elif head == "relabel":
                i = ts.label(declared)
                ts.expect("(")
                s = []
                while ts.peek() != ")":
                    s.append(ts.label(declared))
                ts.next()
                frames.append(["relabel", i, frozenset(s)])
                continue
            else:
                ts.error(f"unknown operator {head!r}")
        if not frames:
            return node
        top = frames[-1]
        if top[0] == "union":
            if top[1] is None:
                top[1] = node
                node = None
                continue
            ts.expect(")")
            node = Union(top[1], node)
        elif top[0] == "join":
            ts.expect(")")
            node = Join(top[1], top[2], node)
        else:
            ts.expect(")")
            node = Relabel(top[1], top[2], node)
        frames.pop()


# ---------------------------------------------------------------------------
# Serialization

def _fmt_labels(labels) -> str:
    return "(" + " ".join(str(l) for l in sorted(labels)) + ")"


def serialize(e: MultiExpr) -> str:
    """Canonical one-line form, always with the (mcw k ...) wrapper."""
    out = [f"(mcw {e.k} "]
    stack: list = [")", e.root]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            out.append(x)
        elif isinstance(x, Intro):
            out.append(f"(intro {x.vertex} {_fmt_labels(x.labels)})")
        elif isinstance(x, Union):
            out.append("(union ")
            stack.extend([")", x.right, " ", x.left])
        elif isinstance(x, Join):
            out.append(f"(join {x.i} {x.j} ")
            stack.extend([")", x.child])
        else:
            out.append(f"(relabel {x.i} {_fmt_labels(x.new)} ")
            stack.extend([")", x.child])
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# Evaluation engine (shared by evaluate() and validate())

def _describe(node: Node) -> str:
    if isinstance(node, Intro):
        return f"intro {node.vertex}"
    if isinstance(node, Union):
        return "union"
    if isinstance(node, Join):
        return f"join {node.i} {node.j}"
    return f"relabel {node.i}"


def _run(e: MultiExpr, strict: bool):
    """Bottom-up evaluation.

    Per-subtree state is a holders map label -> set of vertex ids; a vertex's
    final label set is recovered from the root holders.  Relabel moves holder
    classes wholesale, so the cost is proportional to class sizes, not to the
    subtree.  Union merges smaller maps into larger ones.
    """
    k = e.k
    findings = []
    ann: dict = {}
    edges: set = set()
    vertex_order: list = []
    seen: set = set()
    states: dict = {}   # id(node) -> holders

    def flag(kind, msg, node):
        if strict:
            if kind == "join-precondition":
                raise JoinPreconditionViolated(msg)
            if kind == "duplicate-vertex":
                raise DuplicateVertexId(msg)
            raise ExprError(msg)
        findings.append((kind, msg))

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
            v = node.vertex
            if v in seen:
                flag("duplicate-vertex", f"duplicate vertex id {v!r}", node)
            else:
                seen.add(v)
                vertex_order.append(v)
            for l in node.labels:
                if not 1 <= l <= k:
                    flag("label-range", f"label {l} out of range 1..{k} at {_describe(node)}", node)
            holders = {l: {v} for l in node.labels}
            ann[node] = NodeAnnotation(1, 0)
        elif isinstance(node, Union):
            ha = states.pop(id(node.left))
            hb = states.pop(id(node.right))
            if len(ha) < len(hb):
                ha, hb = hb, ha
            for l, vs in hb.items():
                cur = ha.get(l)
                if cur is None:
                    ha[l] = vs
                elif len(cur) >= len(vs):
                    cur.update(vs)
                else:
                    vs.update(cur)
                    ha[l] = vs
            holders = ha
            la, lb = ann[node.left], ann[node.right]
            ann[node] = NodeAnnotation(la.nv + lb.nv, la.ne + lb.ne)
        elif isinstance(node, Join):
            holders = states.pop(id(node.child))
            i, j = node.i, node.j
            if i == j:
                flag("join-labels", f"join with i == j == {i}", node)
            for l in (i, j):
                if not 1 <= l <= k:
                    flag("label-range", f"label {l} out of range 1..{k} at {_describe(node)}", node)
            hi = holders.get(i, ())
            hj = holders.get(j, ())
            bad = set(hi) & set(hj) if hi and hj else ()
            if bad:
                flag("join-precondition",
                     f"join {i} {j}: vertex {sorted(bad)[0]!r} holds both labels", node)
            irred = True
            added = 0
            for u in hi:
                for v in hj:
                    if u == v:
                        continue  # only reachable in non-strict mode
                    edge = (u, v) if u < v else (v, u)
                    if edge in edges:
                        irred = False
                    else:
                        edges.add(edge)
                        added += 1
            ca = ann[node.child]
            ann[node] = NodeAnnotation(ca.nv, ca.ne + added, irred)
        else:  # Relabel
            holders = states.pop(id(node.child))
            i = node.i
            if not 1 <= i <= k:
                flag("label-range", f"label {i} out of range 1..{k} at {_describe(node)}", node)
            for l in node.new:
                if not 1 <= l <= k:
                    flag("label-range", f"label {l} out of range 1..{k} at {_describe(node)}", node)
            src = holders.pop(i, None)
            if src:
                for s in node.new:
                    cur = holders.get(s)
                    if cur is None:
                        # reuse src for one target to avoid a copy
                        holders[s] = set(src) if s != max(node.new) else src
                    else:
                        cur.update(src)
            ca = ann[node.child]
            ann[node] = NodeAnnotation(ca.nv, ca.ne)
        states[id(node)] = holders

    root_holders = states.pop(id(e.root))
    lab = {v: [] for v in vertex_order}
    for l, vs in root_holders.items():
        for v in vs:
            lab[v].append(l)
    labf = {v: frozenset(ls) for v, ls in lab.items()}
    graph = LabeledGraph(vertex_order, edges, labf, k)
    return graph, ann, findings


def evaluate(e: MultiExpr):
    """Evaluate to (LabeledGraph, {node: NodeAnnotation}).

    Raises JoinPreconditionViolated / DuplicateVertexId / ExprError on invalid
    input (defense in depth; run validate() first for a full report).
    """
    graph, ann, _ = _run(e, strict=True)
    return graph, ann


def validate(e: MultiExpr) -> ValidationReport:
    """Collect all findings (duplicate ids, join violations, label ranges)."""
    _, _, findings = _run(e, strict=False)
    return ValidationReport(findings)


# ---------------------------------------------------------------------------
# Normalization

def normalize(e: MultiExpr) -> MultiExpr:
    """Rewrite so every Intro has one label and every Relabel is a forget
    (S = empty) or an add (S = {i, j}).

    Uses the add-then-forget decomposition: apply ρ_{i→{i,j}} for each j in S
    ascending, then ρ_{i→∅} iff i ∉ S.  Identity relabels vanish.  Node count
    grows by at most a factor (k+1).
    """
    new: dict = {}   # id(old node) -> new subtree
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
            labels = sorted(node.labels)
            base = labels[0]
            out: Node = Intro(node.vertex, frozenset((base,)))
            for extra in labels[1:]:
                out = Relabel(base, frozenset((base, extra)), out)
        elif isinstance(node, Union):
            out = Union(new.pop(id(node.left)), new.pop(id(node.right)))
        elif isinstance(node, Join):
            out = Join(node.i, node.j, new.pop(id(node.child)))
        else:
            out = new.pop(id(node.child))
            i = node.i
            for j in sorted(node.new - {i}):
                out = Relabel(i, frozenset((i, j)), out)
            if i not in node.new:
                out = Relabel(i, frozenset(), out)
        new[id(node)] = out
    return MultiExpr(new.pop(id(e.root)), e.k)


def is_normalized(e: MultiExpr) -> bool:
    for node in iter_nodes(e.root):
        if isinstance(node, Intro) and len(node.labels) != 1:
            return False
        if isinstance(node, Relabel):
            s = node.new
            if s and not (len(s) == 2 and node.i in s):
                return False
    return True


def is_linear(e: MultiExpr) -> bool:
    """True iff every Union has a literal Intro child."""
    for node in iter_nodes(e.root):
        if isinstance(node, Union):
            if not isinstance(node.left, Intro) and not isinstance(node.right, Intro):
                return False
    return True
