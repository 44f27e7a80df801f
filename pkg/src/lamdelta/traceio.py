"""JSON forms of traces, certificates and graphs."""

from __future__ import annotations

import json

from .concrete import parse, show
from .rewrite import RuleId, Trace, step
from .syntax import alpha_eq


class TraceMismatch(ValueError):
    pass


def trace_records(trace: Trace) -> list:
    out = [{"step": 0, "rule": None, "pos": None, "term": show(trace.start)}]
    for i, s in enumerate(trace.steps, 1):
        out.append({"step": i, "rule": s.rule.value, "pos": list(s.position), "term": show(s.after)})
    return out


def dumps_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def trace_lines(trace: Trace) -> str:
    return "".join(dumps_line(r) + "\n" for r in trace_records(trace))


def read_trace(gamma, text: str, start=None) -> Trace:
    """Replay a JSON-lines trace.  Each recorded term must match the replayed
    one up to alpha; a step-0 record gives the start term unless ``start``
    is passed."""
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if records and records[0].get("rule") is None:
        head = records.pop(0)
        if start is None:
            start = parse(head["term"], scope=gamma)
        elif not alpha_eq(start, parse(head["term"], scope=gamma)):
            raise TraceMismatch("trace starts at a different term")
    if start is None:
        raise TraceMismatch("trace has no start term")
    steps = []
    cur = start
    for r in records:
        s = step(gamma, cur, tuple(r["pos"]), RuleId.parse(r["rule"]))
        if "term" in r and not alpha_eq(s.after, parse(r["term"], scope=gamma)):
            raise TraceMismatch(f"step {r.get('step')} does not reach the recorded term")
        steps.append(s)
        cur = s.after
    return Trace(start, tuple(steps))


def certificate_json(cert) -> dict:
    return {
        "source": trace_records(cert.source),
        "target": trace_records(cert.target),
        "rho4": trace_records(cert.rho4),
        "m": cert.m,
        "ok": cert.ok,
        "bound_holds": cert.bound_holds,
        "systems": list(cert.systems),
    }


def graph_json(g) -> dict:
    longest = g.longest_path() if g.verdict.value == "ExhaustedAndAcyclic" else None
    return {
        "verdict": g.verdict.value,
        "nodes": len(g.nodes),
        "edges": len(g.edges),
        "longest_path": longest,
        "normal_forms": [show(t) for t in g.normal_forms()],
        "witness": list(g.witness),
    }


def graph_dot(g) -> str:
    lines = ["digraph reductions {", "  node [shape=box, fontname=monospace];"]
    for i, t in enumerate(g.nodes):
        lines.append(f"  n{i} [label={json.dumps(show(t), ensure_ascii=False)}];")
    for s, d, rule, pos in g.edges:
        label = f"{rule.label} {list(pos)}"
        lines.append(f"  n{s} -> n{d} [label={json.dumps(label, ensure_ascii=False)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
