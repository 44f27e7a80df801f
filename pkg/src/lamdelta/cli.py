"""Command-line front end.

Exit status: 0 ok, 1 law or certificate violation, 2 user error (syntax,
typing, arguments), 3 resource limit (fuel or node bound).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .concrete import ParseError, parse, parse_context, parse_formula, show, show_context, show_formula
from .conjfree import DisjPresent, cf_context, cf_formula, cf_term, simulate_sequence_cf
from .demorgan import SimulationError, dm_context, dm_formula, dm_term, simulate_sequence
from .enumerate import GenSpec, enumerate_terms
from .harness import SUITES, default_spec, run_suite
from .rewrite import FuelExhausted, NotARedex, RuleId, Verdict, normalize, reduction_graph, system
from .traceio import (
    TraceMismatch, certificate_json, graph_dot, graph_json,
    read_trace, trace_lines,
)
from .typecheck import SystemId, TypeCheckError, infer

OK, VIOLATION, USER_ERROR, RESOURCE = 0, 1, 2, 3


class UserError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None


def _context(arg) -> dict:
    if not arg:
        return {}
    text = _read(arg) if Path(arg).is_file() else arg
    return parse_context(text.strip())


def _term(args):
    gamma = _context(args.ctx)
    src = args.expr if args.expr is not None else _read(args.file)
    t = parse(src, scope=gamma)
    return gamma, t


def _rules(args) -> frozenset:
    rules = set(system(SystemId(args.system)))
    for name in (args.aux or "").split(","):
        if name.strip():
            try:
                rules.add(RuleId.parse(name.strip()))
            except ValueError as exc:
                raise UserError(str(exc)) from None
    return frozenset(rules)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    gamma, t = _term(args)
    print(show_formula(infer(gamma, t)))
    return OK


def cmd_reduce(args) -> int:
    gamma, t = _term(args)
    infer(gamma, t)
    try:
        trace = normalize(gamma, t, _rules(args), args.strategy, args.fuel)
        status = OK
    except FuelExhausted as exc:
        trace = exc.trace
        status = RESOURCE
    _emit(trace_lines(trace), args.trace)
    if args.trace:
        print(show(trace.end))
    if status == RESOURCE:
        print(f"fuel exhausted after {len(trace)} steps", file=sys.stderr)
    return status


def _maps(name):
    if name == "demorgan":
        return dm_term, dm_context, dm_formula, simulate_sequence
    return cf_term, cf_context, cf_formula, simulate_sequence_cf


def cmd_translate(args) -> int:
    gamma, t = _term(args)
    term_map, ctx_map, formula_map, _ = _maps(args.map)
    a = infer(gamma, t)
    image = term_map(gamma, t)
    if gamma:
        print(show_context(ctx_map(gamma)))
    print(show(image))
    print(show_formula(formula_map(a)))
    return OK


def cmd_simulate(args) -> int:
    gamma, t = _term(args)
    infer(gamma, t)
    _, _, _, simulate = _maps(args.map)
    s = read_trace(gamma, _read(args.trace), start=t)
    cert = simulate(gamma, s)
    _emit(json.dumps(certificate_json(cert), sort_keys=True, indent=2, ensure_ascii=False) + "\n", args.out)
    return OK if cert.ok and cert.bound_holds else VIOLATION


def cmd_replay(args) -> int:
    gamma, t = _term(args)
    text = _read(args.trace)
    s = read_trace(gamma, text, start=t)
    out = trace_lines(s)
    _emit(out, args.out)
    if args.strict and out != text:
        print("replayed trace differs from the input", file=sys.stderr)
        return VIOLATION
    return OK


def cmd_graph(args) -> int:
    gamma, t = _term(args)
    infer(gamma, t)
    g = reduction_graph(gamma, t, _rules(args), node_bound=args.bound)
    print(json.dumps(graph_json(g), sort_keys=True, ensure_ascii=False))
    if args.dot:
        Path(args.dot).write_text(graph_dot(g), encoding="utf-8")
    if g.verdict is Verdict.BOUND_EXCEEDED:
        return RESOURCE
    return OK if g.verdict is Verdict.EXHAUSTED_ACYCLIC else VIOLATION


def _seed() -> int:
    return int(os.environ.get("LDK_SEED", "0"))


def cmd_enumerate(args) -> int:
    spec = GenSpec(
        system=SystemId(args.system), size_bound=args.bound,
        context=tuple(_context(args.ctx).items()) if args.ctx else GenSpec().context,
        type_filter=parse_formula(args.type) if args.type else None,
    )
    rows = list(enumerate_terms(spec))
    if args.sample is not None and args.sample < len(rows):
        rows = random.Random(_seed()).sample(rows, args.sample)
    for _, t, a in rows:
        print(f"{show(t)}\t{show_formula(a)}")
    return OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise UserError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    reports = []
    for name in names:
        rep = run_suite(name, default_spec(name, args.bound))
        data = rep.to_json()
        data["bound"] = args.bound
        data["seed"] = _seed()
        reports.append(data)
        mark = "ok" if rep.passed else "FAILED"
        print(f"{name}: {mark} ({rep.cases_run} cases, {rep.failure_count} failures, {rep.elapsed:.1f}s)")
    payload = reports[0] if len(reports) == 1 else {"reports": reports}
    if args.json:
        out = Path(args.json)
        out.write_text(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        figdir = Path(args.figures) if args.figures else out.parent
        _figures(reports, figdir, out.stem)
    elif args.figures:
        _figures(reports, Path(args.figures), "verify")
    return OK if all(r["passed"] for r in reports) else VIOLATION


def _figures(reports, figdir: Path, stem: str):
    from .plots import report_figure, summary_figure

    figdir.mkdir(parents=True, exist_ok=True)
    for r in reports:
        report_figure(r, figdir / f"{stem}-{r['suite']}.png")
    if len(reports) > 1:
        summary_figure(reports, figdir / f"{stem}-summary.png")


# ---------------------------------------------------------------------------
# Argument parsing


def _add_source(p):
    p.add_argument("file", nargs="?", default="-", help="term file, '-' for stdin")
    p.add_argument("-e", "--expr", help="term text instead of a file")
    p.add_argument("--ctx", help="context file or inline 'x:A, y:B'")


def _add_system(p, aux=True):
    p.add_argument("--system", choices=[s.value for s in SystemId], default="full")
    if aux:
        p.add_argument("--aux", help="comma-separated auxiliary rules (rho3,rho4,kappa,iota)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lamdelta", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="typecheck and print the formula")
    _add_source(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="normalize and emit the trace")
    _add_source(p)
    _add_system(p)
    p.add_argument("--strategy", choices=["lo", "li"], default="lo")
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("translate", help="apply a proof translation")
    _add_source(p)
    p.add_argument("--map", choices=["demorgan", "conjfree"], required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("simulate", help="certify a reduction sequence")
    _add_source(p)
    p.add_argument("--map", choices=["demorgan", "conjfree"], required=True)
    p.add_argument("--trace", required=True, help="JSON-lines source trace")
    p.add_argument("--out", help="write the certificate here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="replay a trace and re-emit it")
    _add_source(p)
    p.add_argument("--trace", required=True)
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true", help="fail unless the output equals the input byte for byte")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("graph", help="build the reduction graph")
    _add_source(p)
    _add_system(p)
    p.add_argument("--bound", type=int, default=100_000, help="node bound")
    p.add_argument("--dot", help="write a Graphviz file here")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("enumerate", help="list the corpus")
    _add_system(p, aux=False)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--type", help="keep terms of this formula")
    p.add_argument("--ctx", help="context file or inline declarations")
    p.add_argument("--sample", type=int, help="random sample of this size (seeded by LDK_SEED)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run a harness suite")
    p.add_argument("--suite", required=True, help="suite name or 'all'")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--json", help="write the report here; figures go alongside")
    p.add_argument("--figures", help="directory for figures")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, TypeCheckError, DisjPresent, UserError, TraceMismatch, NotARedex) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USER_ERROR
    except SimulationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return VIOLATION


if __name__ == "__main__":
    sys.exit(main())
