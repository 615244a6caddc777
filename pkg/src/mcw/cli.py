"""mcw: command-line front end.

Exit codes: 0 success/yes, 1 decision-no (or failed check), 2 usage/IO error,
3 solver refusal (instance too large / redundant expression).

JSON output (--json) is deterministic: keys sorted, no timings unless
--timings is passed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .eds import run_eds
from .expr import (ExprError, MultiExpr, ParseError, evaluate, is_linear,
                   iter_nodes, node_count, normalize, parse, serialize,
                   validate)
from .graphs import (TooLarge, graph_from_text, graph_to_text,
                     oracle_eds, oracle_hamiltonian_cycle, oracle_max_cut,
                     simple_from_labeled)
from .hamcycle import run_hc
from .lbgen import (InstanceTooLarge, audit_gadgets, build_instance,
                    build_expression, parse_mis)
from .maxcut import RedundantExpressionTooLarge, solve_max_cut
from .randexpr import (DEFAULT_PROFILE, GenerationFailed, GeneratorProfile,
                       gen_random_expr)


@dataclass
class RunResult:
    command: str
    answer: object = None
    optimum: object = None
    stats: dict = field(default_factory=dict)
    fallback: object = None
    timings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self, with_timings: bool) -> dict:
        out = {"command": self.command}
        if self.answer is not None:
            out["answer"] = self.answer
        if self.optimum is not None:
            out["optimum"] = self.optimum
        if self.fallback is not None:
            out["fallback"] = self.fallback
        if self.stats:
            out["stats"] = self.stats
        out.update(self.extra)
        if with_timings:
            out["timings_ms"] = self.timings
        return out


def _emit(args, res: RunResult, human_lines):
    if args.json:
        print(json.dumps(res.to_dict(args.timings), sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_expr(path: str) -> MultiExpr:
    return parse(_read(path))


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    e = _load_expr(args.expr)
    report = validate(e)
    res = RunResult("validate", answer=report.ok,
                    extra={"findings": report.findings})
    _emit(args, res, [f"{'ok' if report.ok else 'invalid'}"]
          + [f"  {f}" for f in report.findings])
    return 0 if report.ok else 1


def cmd_normalize(args) -> int:
    t0 = time.monotonic()
    e = _load_expr(args.expr)
    norm = normalize(e)
    text = serialize(norm)
    res = RunResult("normalize", extra={"expr": text,
                                        "nodes": node_count(norm)})
    res.timings["normalize"] = (time.monotonic() - t0) * 1000
    if args.output:
        Path(args.output).write_text(text + "\n")
        _emit(args, res if args.json else RunResult(
            "normalize", extra={"nodes": node_count(norm)}),
            [f"wrote {args.output} ({node_count(norm)} nodes)"])
    else:
        _emit(args, res, [text])
    return 0


def cmd_eval(args) -> int:
    t0 = time.monotonic()
    e = _load_expr(args.expr)
    g, _ = evaluate(e)
    text = graph_to_text(g)
    res = RunResult("eval", stats={"n": g.n, "m": g.m, "k": g.k},
                    extra={"graph": text})
    res.timings["eval"] = (time.monotonic() - t0) * 1000
    if args.output:
        Path(args.output).write_text(text)
        _emit(args, res, [f"wrote {args.output} (n={g.n} m={g.m})"])
    else:
        _emit(args, res, [text.rstrip("\n")])
    return 0


def cmd_solve_hc(args) -> int:
    t0 = time.monotonic()
    e = _load_expr(args.expr)
    run = run_hc(e, use_reduce=not args.no_reduce)
    res = RunResult("solve hc", answer=run.answer,
                    stats={"edges_tried": run.edges_tried,
                           "max_family": run.max_family})
    res.timings["solve"] = (time.monotonic() - t0) * 1000
    _emit(args, res, [f"hamiltonian-cycle: {'yes' if run.answer else 'no'}"])
    return 0 if run.answer else 1


def cmd_solve_eds(args) -> int:
    t0 = time.monotonic()
    e = _load_expr(args.expr)
    run = run_eds(e)
    answer = None if args.budget is None else run.optimum <= args.budget
    res = RunResult("solve eds", answer=answer, optimum=run.optimum,
                    stats={"max_set": run.max_set})
    res.timings["solve"] = (time.monotonic() - t0) * 1000
    lines = [f"eds optimum: {run.optimum}"]
    if answer is not None:
        lines.append(f"<= {args.budget}: {'yes' if answer else 'no'}")
    _emit(args, res, lines)
    return 0 if answer in (None, True) else 1


def cmd_solve_maxcut(args) -> int:
    t0 = time.monotonic()
    e = _load_expr(args.expr)
    run = solve_max_cut(e, args.budget)
    res = RunResult("solve maxcut", answer=run.answer, optimum=run.optimum,
                    fallback=run.fallback, stats={"max_table": run.max_table})
    res.timings["solve"] = (time.monotonic() - t0) * 1000
    lines = [f"maxcut optimum: {run.optimum}"
             + (" (oracle fallback)" if run.fallback else "")]
    if run.answer is not None:
        lines.append(f">= {args.budget}: {'yes' if run.answer else 'no'}")
    _emit(args, res, lines)
    return 0 if run.answer in (None, True) else 1


def cmd_oracle(args) -> int:
    g = simple_from_labeled(graph_from_text(_read(args.graph)))
    t0 = time.monotonic()
    if args.problem == "hc":
        ans = oracle_hamiltonian_cycle(g)
        res = RunResult("oracle hc", answer=ans)
        _emit(args, res, [f"hamiltonian-cycle: {'yes' if ans else 'no'}"])
        return 0 if ans else 1
    if args.problem == "eds":
        opt = oracle_eds(g)
        res = RunResult("oracle eds", optimum=opt)
    else:
        opt = oracle_max_cut(g)
        res = RunResult(f"oracle {args.problem}", optimum=opt)
    res.timings["oracle"] = (time.monotonic() - t0) * 1000
    _emit(args, res, [f"{args.problem} optimum: {opt}"])
    return 0


def cmd_gen_lb(args) -> int:
    mis = parse_mis(_read(args.mis))
    t0 = time.monotonic()
    inst = build_instance(mis, args.override_C, args.override_D,
                          args.max_vertices)
    e = build_expression(mis, args.override_C, args.override_D,
                         args.max_vertices)
    prefix = args.output
    Path(prefix + ".expr").write_text(serialize(e) + "\n")
    g = inst.graph
    lines = [f"g {g.n} {g.m} 0"]
    lines += [f"v {v}" for v in g.vertices]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    Path(prefix + ".graph").write_text("\n".join(lines) + "\n")
    meta = {"budget": inst.budget, "params": inst.params.to_dict(),
            "counters": inst.counters, "expr_nodes": node_count(e),
            "linear": is_linear(e)}
    Path(prefix + ".json").write_text(
        json.dumps(meta, sort_keys=True, indent=1) + "\n")
    res = RunResult("gen lb", extra=meta)
    res.timings["build"] = (time.monotonic() - t0) * 1000
    _emit(args, res, [f"wrote {prefix}.expr/.graph/.json "
                      f"(n={g.n} m={g.m} b={inst.budget})"])
    return 0


def cmd_gen_random(args) -> int:
    profile = GeneratorProfile(irredundant_only=args.irredundant)
    out = []
    for i in range(args.count):
        e = gen_random_expr(args.n, args.k, args.seed + i, profile)
        out.append(serialize(e))
    res = RunResult("gen random", extra={"exprs": out})
    if args.output:
        Path(args.output).write_text("\n".join(out) + "\n")
        _emit(args, res, [f"wrote {args.output} ({args.count} expressions)"])
    else:
        _emit(args, res, out)
    return 0


def cmd_check_gadgets(args) -> int:
    rep = audit_gadgets(args.C, args.D, args.n)
    d = rep.to_dict()
    lines = [f"audit C={args.C} D={args.D} n={args.n}: "
             f"{'ok' if rep.ok else 'FAILED'} {rep.counts()}"]
    lines += [f"  {it.status:7s} {it.gadget} {it.item} {it.detail}"
              for it in rep.items if it.status != "pass" or args.verbose]
    if args.json:
        print(json.dumps(d, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# fuzz

def _splice_out(e: MultiExpr, victim) -> MultiExpr:
    """Rebuild with `victim` removed: an op node is replaced by its child, an
    Intro-bearing union by its other side."""
    from .expr import Intro, Join, Relabel, Union

    def rebuild(node):
        if node is victim:
            if isinstance(node, (Join, Relabel)):
                return node.child          # splice the op out
            return None                    # drop the Intro / subtree
        if isinstance(node, Intro):
            return node
        if isinstance(node, Union):
            l = rebuild(node.left)
            r = rebuild(node.right)
            if l is None:
                return r
            if r is None:
                return l
            if l is node.left and r is node.right:
                return node
            return Union(l, r)
        child = rebuild(node.child)
        if child is None:
            return None
        if child is node.child:
            return node
        if isinstance(node, Join):
            return Join(node.i, node.j, child)
        return Relabel(node.i, node.new, child)
    root = rebuild(e.root)
    if root is None:
        return None
    return MultiExpr(root, e.k)


def _minimize(e: MultiExpr, still_failing) -> MultiExpr:
    """Greedy: repeatedly drop any single node while the case keeps failing."""
    import sys as _sys
    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(200000)
    try:
        changed = True
        while changed:
            changed = False
            for node in list(iter_nodes(e.root)):
                if node is e.root:
                    continue
                cand = _splice_out(e, node)
                if cand is None or not validate(cand).ok:
                    continue
                try:
                    if still_failing(cand):
                        e = cand
                        changed = True
                        break
                except Exception:
                    continue
        return e
    finally:
        _sys.setrecursionlimit(old)


def _fuzz_case(which: str, e: MultiExpr):
    """(solver value, oracle value) for one expression."""
    g, _ = evaluate(e)
    sg = simple_from_labeled(g)
    if which == "hc":
        return run_hc(e).answer, oracle_hamiltonian_cycle(sg)
    if which == "eds":
        return run_eds(e).optimum, oracle_eds(sg)
    return solve_max_cut(e).optimum, oracle_max_cut(sg)


def cmd_fuzz(args) -> int:
    which = ["hc", "eds", "maxcut"] if args.which == "all" else [args.which]
    mismatches = []
    ran = 0
    for i in range(args.count):
        profile = GeneratorProfile(irredundant_only=True) \
            if "maxcut" in which else DEFAULT_PROFILE
        try:
            e = gen_random_expr(args.n, args.k, args.seed + i, profile)
        except GenerationFailed:
            continue
        for w in which:
            ran += 1
            got, want = _fuzz_case(w, e)
            if got != want:
                def fails(cand, w=w):
                    a, b = _fuzz_case(w, cand)
                    return a != b
                small = _minimize(e, fails)
                text = serialize(small)
                path = Path(args.out)
                path.mkdir(parents=True, exist_ok=True)
                f = path / f"fuzz-{w}-seed{args.seed + i}.expr"
                f.write_text(text + "\n")
                mismatches.append({"which": w, "seed": args.seed + i,
                                   "got": got, "want": want,
                                   "expr": text, "file": str(f)})
    res = RunResult("fuzz", answer=not mismatches,
                    stats={"cases": ran, "mismatches": len(mismatches)},
                    extra={"failures": mismatches})
    lines = [f"fuzz: {ran - len(mismatches)}/{ran} agree"]
    for mm in mismatches:
        lines.append(f"  MISMATCH {mm['which']} seed={mm['seed']} "
                     f"got={mm['got']} want={mm['want']} -> {mm['file']}")
    _emit(args, res, lines)
    return 0 if not mismatches else 1


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcw")
    ap.add_argument("--json", action="store_true",
                    help="machine-readable output")
    ap.add_argument("--timings", action="store_true",
                    help="include wall-clock timings in JSON output")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate")
    p.add_argument("expr")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("normalize")
    p.add_argument("expr")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eval")
    p.add_argument("expr")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solve")
    ssub = p.add_subparsers(dest="problem", required=True)
    q = ssub.add_parser("hc")
    q.add_argument("expr")
    q.add_argument("--no-reduce", action="store_true")
    q.set_defaults(func=cmd_solve_hc)
    q = ssub.add_parser("eds")
    q.add_argument("expr")
    q.add_argument("--budget", type=int)
    q.set_defaults(func=cmd_solve_eds)
    q = ssub.add_parser("maxcut")
    q.add_argument("expr")
    q.add_argument("--budget", type=int)
    q.set_defaults(func=cmd_solve_maxcut)

    p = sub.add_parser("oracle")
    osub = p.add_subparsers(dest="problem", required=True)
    for name in ("hc", "eds", "maxcut"):
        q = osub.add_parser(name)
        q.add_argument("graph")
        q.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen")
    gsub = p.add_subparsers(dest="what", required=True)
    q = gsub.add_parser("lb")
    q.add_argument("--mis", required=True)
    q.add_argument("--override-C", type=int, dest="override_C")
    q.add_argument("--override-D", type=int, dest="override_D")
    q.add_argument("--max-vertices", type=int, default=2_000_000)
    q.add_argument("-o", "--output", required=True,
                   help="output prefix for .expr/.graph/.json")
    q.set_defaults(func=cmd_gen_lb)
    q = gsub.add_parser("random")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=1)
    q.add_argument("--irredundant", action="store_true")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("check")
    csub = p.add_subparsers(dest="what", required=True)
    q = csub.add_parser("gadgets")
    q.add_argument("--C", type=int, required=True)
    q.add_argument("--D", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("-v", "--verbose", action="store_true")
    q.set_defaults(func=cmd_check_gadgets)

    p = sub.add_parser("fuzz")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--which", choices=("hc", "eds", "maxcut", "all"),
                   default="all")
    p.add_argument("--out", default="fuzz-failures")
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (TooLarge, InstanceTooLarge, RedundantExpressionTooLarge) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ExprError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def run():
    raise SystemExit(main())
