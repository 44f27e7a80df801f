"""Batch checks of every lemma and theorem over an enumerated corpus."""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, replace

from .concrete import show, show_context
from .conjfree import (
    CannotPostpone, cf_context, cf_formula, cf_term, expand_rho1bot,
    postpone_kappa, postpone_rho3,
    purify_sequence, simulate_sequence_cf, simulate_step_cf,
)
from .demorgan import (
    SimulationError, commute_rho4, dm_context, dm_formula, dm_term,
    simulate_sequence, simulate_step,
)
from .enumerate import GenSpec, enumerate_terms
from .rewrite import (
    RHO1BOT_RULES, RuleId, Trace, Verdict, check_trace,
    reduction_graph, redexes, step, system,
)
from .syntax import alpha_eq, free_vars, size, subst
from .typecheck import SystemId, in_system, infer

R = RuleId

TRACE_LENGTH = 10
TRACE_CAP = 16


@dataclass
class Failure:
    input: str
    law: str
    witness: str


@dataclass
class Report:
    suite: str
    cases_run: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    stats: Counter = field(default_factory=Counter)
    # failures beyond this many are counted in stats but not stored
    keep: int = 50

    @property
    def passed(self) -> bool:
        return not self.failures and not self.stats.get("failures_dropped")

    @property
    def failure_count(self) -> int:
        return len(self.failures) + self.stats.get("failures_dropped", 0)

    def fail(self, gamma, t, law: str, witness: str = ""):
        self.stats[f"law:{law}"] += 1
        if len(self.failures) < self.keep:
            self.failures.append(Failure(_show_input(gamma, t), law, witness))
        else:
            self.stats["failures_dropped"] += 1

    def merge(self, other: "Report") -> "Report":
        out = Report(self.suite, self.cases_run + other.cases_run, keep=self.keep)
        out.failures = (self.failures + other.failures)[: self.keep]
        out.stats = self.stats + other.stats
        dropped = len(self.failures) + len(other.failures) - len(out.failures)
        if dropped:
            out.stats["failures_dropped"] += dropped
        out.elapsed = self.elapsed + other.elapsed
        return out

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "cases_run": self.cases_run,
            "passed": self.passed,
            "failure_count": self.failure_count,
            "failures": [asdict(f) for f in self.failures],
            "elapsed": round(self.elapsed, 3),
            "stats": dict(sorted(self.stats.items())),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False)


def _show_input(gamma, t) -> str:
    return f"{show_context(gamma)} |- {show(t)}"


def _rules(trace: Trace) -> str:
    return " ".join(f"{s.rule.value}@{list(s.position)}" for s in trace.steps)


# ---------------------------------------------------------------------------
# Trace exploration


def maximal_traces(gamma, t, rules, length: int = TRACE_LENGTH, cap: int = TRACE_CAP):
    """Maximal traces of at most ``length`` steps, depth first in redex order.

    Returns ``(traces, capped)``; ``capped`` is True when the cap on the
    number of traces stopped the search.  Traces reaching ``length`` while
    not normal are returned as they are and count as capped.
    """
    out = []
    capped = False

    def go(cur, steps):
        nonlocal capped
        if len(out) >= cap:
            capped = True
            return
        found = redexes(gamma, cur, rules)
        if not found or len(steps) == length:
            if found:
                capped = True
            out.append(Trace(t, tuple(steps)))
            return
        for pos, rule in found:
            st = step(gamma, cur, pos, rule)
            go(st.after, steps + [st])
            if len(out) >= cap:
                capped = True
                return

    go(t, [])
    return out, capped


# ---------------------------------------------------------------------------
# Suites


def _subject_reduction(spec, rep):
    rules = system(spec.system)
    for g, t, a in enumerate_terms(spec):
        rep.cases_run += 1
        for pos, rule in redexes(g, t, rules):
            st = step(g, t, pos, rule)
            rep.stats["steps"] += 1
            try:
                b = infer(g, st.after)
            except Exception as exc:
                rep.fail(g, t, "reduct is typable", f"{rule.value}@{list(pos)}: {exc}")
                continue
            if b != a:
                rep.fail(g, t, "type preserved", f"{rule.value}@{list(pos)} gives {show(st.after)}")
            elif not in_system(st.after, spec.system):
                rep.fail(g, t, "reduct stays in the system", f"{rule.value}@{list(pos)}")


def _subst_pairs(spec, n_bound):
    small = replace(spec, size_bound=n_bound)
    by_type: dict = {}
    for _, n, b in enumerate_terms(small):
        by_type.setdefault(b, []).append(n)
    for g, m, _ in enumerate_terms(spec):
        for x in sorted(free_vars(m)):
            for n in by_type.get(g[x], ()):
                yield g, m, x, n


def _subst_lemma(spec, rep, translate, n_bound):
    for g, m, x, n in _subst_pairs(spec, n_bound):
        rep.cases_run += 1
        lhs = translate(g, subst(m, x, n))
        rhs = subst(translate(g, m), x, translate(g, n))
        if not alpha_eq(lhs, rhs):
            rep.fail(g, m, "translation commutes with substitution", f"[{show(n)}/{x}]: {show(lhs)} vs {show(rhs)}")


def _soundness(spec, rep, translate, ctx_map, formula_map, target):
    for g, t, a in enumerate_terms(spec):
        rep.cases_run += 1
        image = translate(g, t)
        try:
            b = infer(ctx_map(g), image)
        except Exception as exc:
            rep.fail(g, t, "image is typable", str(exc))
            continue
        if b != formula_map(a):
            rep.fail(g, t, "image has the mapped type", show(image))
        if not in_system(image, target):
            rep.fail(g, t, "image lies in the target system", show(image))


def _dm_profile(rule, c_is_bot, res) -> str | None:
    """The step-count profile claimed for each source rule; None if met."""
    rules = [s.rule for s in res.target.steps]
    n_res = len(res.residual)
    if rule in (R.BETA_IMP, R.BETA_CONJ, R.RHO1_IMP, R.RHO1BOT_IMP, R.RHO1_CONJ, R.RHO1BOT_CONJ, R.RHO2):
        ok = rules == [rule] and n_res == 0
        claim = "one step with the same label"
    elif rule is R.RHO1BOT_DISJ:
        ok = rules == [R.RHO1BOT_IMP] and n_res == 0
        claim = "one rho1bot_imp step"
    elif rule is R.BETA_DISJ:
        if c_is_bot:
            ok = len(rules) == 3 and all(r in (R.BETA_IMP, R.BETA_CONJ) for r in rules) and n_res == 0
            claim = "three beta steps"
        else:
            ok = len(rules) == 4 and rules[-1] is R.RHO2 and n_res == 0
            claim = "three beta steps then rho2"
    elif rule in (R.PI_IMP, R.PI_CONJ):
        ok = len(rules) == 3 and rules[1:] == [R.BETA_IMP, R.BETA_IMP] and n_res == 0
        claim = "one rho1 step then two beta_imp steps"
    else:
        ok = rules == [R.RHO1BOT_IMP] and n_res == 1
        claim = "one rho1bot_imp step plus one rho4 residual"
    return None if ok else claim


_DM_ITEM = {
    R.RHO1BOT_DISJ: 2, R.BETA_DISJ: 3, R.PI_IMP: 3, R.PI_CONJ: 3, R.PI_DISJ: 4, R.RHO1_DISJ: 4,
}


def _type_at(g, t, pos):
    from .typecheck import context_at
    from .syntax import subterm

    return infer(context_at(g, t, pos), subterm(t, pos), strict=False)


def _step_dm(spec, rep):
    from .syntax import BOT

    for g, t, _ in enumerate_terms(spec):
        for pos, rule in redexes(g, t, system(SystemId.FULL)):
            rep.cases_run += 1
            st = step(g, t, pos, rule)
            try:
                res = simulate_step(g, st)
            except SimulationError as exc:
                rep.fail(g, t, "step simulates", f"{rule.value}@{list(pos)}: {exc}")
                continue
            gt = dm_context(g)
            if not (check_trace(gt, res.target) and check_trace(gt, res.residual)):
                rep.fail(g, t, "simulation replays", f"{rule.value}@{list(pos)}")
                continue
            if res.item != _DM_ITEM.get(rule, 1):
                rep.fail(g, t, "theorem item matches", f"{rule.value}: item {res.item}")
            c_is_bot = _type_at(g, t, pos) == BOT
            claim = _dm_profile(rule, c_is_bot, res)
            tag = f"{rule.value}{'@bot' if c_is_bot else ''}"
            rep.stats[f"profile:{tag}:{len(res.target)}+{len(res.residual)}"] += 1
            if claim:
                rep.fail(
                    g, t, f"profile of {tag}: {claim}",
                    f"got {_rules(res.target)} with {len(res.residual)} rho4 residual steps",
                )


def _step_cf(spec, rep):
    from .syntax import BOT

    target_rules = system(SystemId.SMALL) | {R.RHO1BOT_IMP}
    for g, t, _ in enumerate_terms(spec):
        for pos, rule in redexes(g, t, system(SystemId.DISJFREE)):
            rep.cases_run += 1
            st = step(g, t, pos, rule)
            try:
                res = simulate_step_cf(g, st)
            except SimulationError as exc:
                rep.fail(g, t, "step simulates", f"{rule.value}@{list(pos)}: {exc}")
                continue
            gt = cf_context(g)
            if not (check_trace(gt, res.target) and check_trace(gt, res.residual)):
                rep.fail(g, t, "simulation replays", f"{rule.value}@{list(pos)}")
                continue
            c_is_bot = _type_at(g, t, pos) == BOT
            tag = f"{rule.value}{'@bot' if c_is_bot else ''}"
            rep.stats[f"profile:{tag}:{len(res.target)}+{len(res.residual)}"] += 1
            if any(s.rule not in target_rules for s in res.target.steps):
                rep.fail(g, t, "target rules in small+rho1bot_imp", _rules(res.target))
            if rule is R.RHO1_CONJ:
                if res.item != 2:
                    rep.fail(g, t, "theorem item matches", f"{rule.value}: item {res.item}")
                rules = [s.rule for s in res.target.steps]
                if rules != [R.RHO1BOT_IMP] or len(res.residual) != 1:
                    rep.fail(
                        g, t, f"profile of {tag}: one rho1bot_imp step plus one rho4 residual",
                        f"got {_rules(res.target)} with {len(res.residual)} rho4 residual steps",
                    )
            elif res.item != 1 or len(res.target) == 0 or res.residual.steps:
                rep.fail(g, t, f"profile of {tag}: nonempty trace reaching the image", _rules(res.target))


def _traces(spec, rep, rules):
    for g, t, _ in enumerate_terms(spec):
        traces, capped = maximal_traces(g, t, rules)
        if capped:
            rep.stats["trace_cap_hits"] += 1
        for s in traces:
            yield g, t, s


def _seq(spec, rep, simulate, source_rules):
    for g, t, s in _traces(spec, rep, source_rules):
        rep.cases_run += 1
        rep.stats["source_steps"] += len(s)
        try:
            cert = simulate(g, s)
        except SimulationError as exc:
            rep.fail(g, t, "sequence simulates", f"{_rules(s)}: {exc}")
            continue
        rep.stats["target_steps"] += len(cert.target)
        rep.stats["rho4_chain_steps"] += len(cert.rho4)
        if not cert.bound_holds:
            rep.fail(g, t, "|s'| >= |s| - m", f"{_rules(s)}: {len(cert.target)} < {len(s)} - {cert.m}")
        if not cert.ok:
            rep.fail(g, t, "certificate closes and replays", _rules(s))


def _seq_dm(spec, rep):
    _seq(spec, rep, simulate_sequence, system(SystemId.FULL))


def _seq_cf(spec, rep):
    _seq(spec, rep, simulate_sequence_cf, system(SystemId.DISJFREE))


def _seeded_commutation():
    from .concrete import parse, parse_context

    g = parse_context("y:Bot, h:~Bot")
    return g, parse("h (delta k:~Bot. k y)", g)


def _commutation(spec, rep):
    rules = system(spec.system)
    items = [(g, t) for g, t, _ in enumerate_terms(spec)]
    items.append(_seeded_commutation())
    for g, t in items:
        found = redexes(g, t, rules | {R.RHO4})
        rho4s = [p for p, r in found if r is R.RHO4]
        others = [(p, r) for p, r in found if r is not R.RHO4]
        for a in rho4s:
            s4 = step(g, t, a, R.RHO4)
            for b, rule in others:
                rep.cases_run += 1
                sr = step(g, t, b, rule)
                try:
                    moved, closing = commute_rho4(g, t, s4, sr)
                except SimulationError as exc:
                    rep.fail(g, t, "peak closes", f"rho4@{list(a)} vs {rule.value}@{list(b)}: {exc}")
                    continue
                if rule is R.RHO2 and not moved.steps:
                    rep.stats["rho2_erasure_case"] += 1


def _postponement(spec, rep):
    base = system(SystemId.SMALL)
    for g, t, _ in enumerate_terms(spec):
        found = redexes(g, t, {R.RHO3, R.KAPPA})
        for a, aux in found:
            first = step(g, t, a, aux)
            follow = base | {R.KAPPA, R.IOTA} if aux is R.RHO3 else base | {R.IOTA}
            for b, rule in redexes(g, first.after, follow):
                rep.cases_run += 1
                second = step(g, first.after, b, rule)
                fn = postpone_rho3 if aux is R.RHO3 else postpone_kappa
                try:
                    leading, trailing = fn(g, first, second)
                except CannotPostpone as exc:
                    rep.fail(g, t, f"{aux.value} postpones past {rule.value}", f"{aux.value}@{list(a)} then {rule.value}@{list(b)}: {exc}")
                    continue
                if leading.rule is R.KAPPA and rule is not R.KAPPA:
                    rep.stats["exceptional_kappa"] += 1
                if any(s.rule is not aux for s in trailing.steps):
                    rep.fail(g, t, "trailing uses only the postponed rule", _rules(trailing))


def _purify(spec, rep):
    small = system(SystemId.SMALL)
    for g, t, s in _traces(spec, rep, system(SystemId.DISJFREE)):
        try:
            cert = simulate_sequence_cf(g, s)
        except SimulationError:
            rep.stats["skipped_unsimulated"] += 1
            continue
        gt = cf_context(g)
        src = cert.target
        rep.cases_run += 1
        try:
            out = purify_sequence(gt, src)
        except (CannotPostpone, SimulationError) as exc:
            rep.fail(g, t, "purification succeeds", f"{_rules(src)}: {exc}")
            continue
        rep.stats["iota_steps"] += out.iota
        rep.stats["rho3_steps"] += out.rho3
        if not out.ok:
            rep.fail(g, t, "n' >= |s| - m - i", f"{len(out.trace)} < {out.bound}")
        if any(st.rule not in small for st in out.trace.steps) or not check_trace(gt, out.trace):
            rep.fail(g, t, "purified trace replays in the small system", _rules(out.trace))


def _sn(spec, rep, image=None, image_rules=None):
    rules = system(spec.system)
    for g, t, _ in enumerate_terms(spec):
        rep.cases_run += 1
        gr = reduction_graph(g, t, rules)
        rep.stats[f"verdict:{gr.verdict.value}"] += 1
        rep.stats["nodes"] += len(gr.nodes)
        rep.stats["max_nodes"] = max(rep.stats["max_nodes"], len(gr.nodes))
        if gr.verdict is not Verdict.EXHAUSTED_ACYCLIC:
            rep.fail(g, t, "finite acyclic reduction graph", gr.verdict.value)
            continue
        if image is not None:
            gi, ti = image(g, t)
            gr2 = reduction_graph(gi, ti, image_rules)
            rep.stats[f"image_verdict:{gr2.verdict.value}"] += 1
            rep.stats["max_image_nodes"] = max(rep.stats["max_image_nodes"], len(gr2.nodes))
            if gr2.verdict is not Verdict.EXHAUSTED_ACYCLIC:
                rep.fail(g, t, "image has a finite acyclic reduction graph", gr2.verdict.value)


def _sn_full(spec, rep):
    _sn(spec, rep, lambda g, t: (dm_context(g), dm_term(g, t)), system(SystemId.DISJFREE))


def _sn_disjfree(spec, rep):
    _sn(spec, rep, lambda g, t: (cf_context(g), cf_term(g, t)), system(SystemId.SMALL))


def _sn_small(spec, rep):
    _sn(spec, rep)


def _termination(spec, rep, rules):
    for g, t, _ in enumerate_terms(spec):
        rep.cases_run += 1
        gr = reduction_graph(g, t, rules)
        longest = gr.longest_path() if gr.verdict is Verdict.EXHAUSTED_ACYCLIC else None
        if longest is None:
            rep.fail(g, t, "finite acyclic graph", gr.verdict.value)
            continue
        rep.stats["max_length"] = max(rep.stats["max_length"], longest)
        if longest > size(t):
            rep.fail(g, t, "longest trace <= size", f"{longest} > {size(t)}")


def _eq1(spec, rep):
    for g, t, _ in enumerate_terms(spec):
        for pos, rule in redexes(g, t, RHO1BOT_RULES):
            rep.cases_run += 1
            st = step(g, t, pos, rule)
            rep.stats[f"rule:{rule.value}"] += 1
            try:
                e = expand_rho1bot(g, st)
            except SimulationError as exc:
                rep.fail(g, t, "expansion reaches the rho1bot contractum", str(exc))
                continue
            if not alpha_eq(e.end, st.after):
                rep.fail(g, t, "expansion reaches the rho1bot contractum", _rules(e))


SUITES = {
    "subject-reduction": _subject_reduction,
    "subst-lemma-dm": lambda s, r: _subst_lemma(s, r, dm_term, SUBST_N_BOUND),
    "subst-lemma-cf": lambda s, r: _subst_lemma(s, r, cf_term, SUBST_N_BOUND),
    "soundness-dm": lambda s, r: _soundness(s, r, dm_term, dm_context, dm_formula, SystemId.DISJFREE),
    "soundness-cf": lambda s, r: _soundness(s, r, cf_term, cf_context, cf_formula, SystemId.SMALL),
    "thm-translation-step-dm": _step_dm,
    "thm-translation-seq-dm": _seq_dm,
    "lemma-commutation": _commutation,
    "thm-translation-step-cf": _step_cf,
    "thm-translation-seq-cf": _seq_cf,
    "lemma-postponement": _postponement,
    "purify": _purify,
    "sn-full": _sn_full,
    "sn-disjfree": _sn_disjfree,
    "sn-small": _sn_small,
    "rho2-termination": lambda s, r: _termination(s, r, {R.RHO2}),
    "rho3-iota-termination": lambda s, r: _termination(s, r, {R.RHO3, R.IOTA}),
    "derived-rule-eq1": _eq1,
}

SUBST_N_BOUND = 4

# the system each suite draws its corpus from
SUITE_SYSTEM = {
    "subject-reduction": SystemId.FULL,
    "subst-lemma-dm": SystemId.FULL,
    "subst-lemma-cf": SystemId.DISJFREE,
    "soundness-dm": SystemId.FULL,
    "soundness-cf": SystemId.DISJFREE,
    "thm-translation-step-dm": SystemId.FULL,
    "thm-translation-seq-dm": SystemId.FULL,
    "lemma-commutation": SystemId.DISJFREE,
    "thm-translation-step-cf": SystemId.DISJFREE,
    "thm-translation-seq-cf": SystemId.DISJFREE,
    "lemma-postponement": SystemId.SMALL,
    "purify": SystemId.DISJFREE,
    "sn-full": SystemId.FULL,
    "sn-disjfree": SystemId.DISJFREE,
    "sn-small": SystemId.SMALL,
    "rho2-termination": SystemId.FULL,
    "rho3-iota-termination": SystemId.SMALL,
    "derived-rule-eq1": SystemId.FULL,
}


def default_spec(name: str, bound: int, **kw) -> GenSpec:
    return GenSpec(system=SUITE_SYSTEM[name], size_bound=bound, **kw)


def run_suite(name: str, spec: GenSpec) -> Report:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    rep = Report(name)
    t0 = time.perf_counter()
    SUITES[name](spec, rep)
    rep.elapsed = time.perf_counter() - t0
    return rep
