"""Command-line front end.

Exit codes: 0 ok, 1 check failed (postcondition, equivalence, profile,
outline), 2 input error, 3 exploration incomplete within the depth bound.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import axioms as ax
from .equiv import check_sim, trace_equiv
from .explore import (DEFAULT_DEPTH, MODELS, check_postcondition, final_outcomes, format_trace,
                      make_machine, reach)
from .lang import ParseError, Program, _parse_vals, builtin_path, format_expr, parse_litmus
from .logic import check_wlp_laws, disjunctivity_reverse_witness
from .ppso import MUTANTS
from .proof import check_outline, parse_outline

SCHEMA = 1
OK, FAILED, INPUT_ERROR, INCOMPLETE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read_source(name: str, suffix: str) -> str:
    """A file path, or the name of a file shipped with the package."""
    if os.path.exists(name):
        with open(name, encoding="utf-8") as f:
            return f.read()
    shipped = builtin_path(name if "." in name else name + suffix)
    if shipped.is_file():
        return shipped.read_text(encoding="utf-8")
    raise InputError(f"no such file: {name}")


def load_program(name: str) -> Program:
    return parse_litmus(_read_source(name, ".litmus"))


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands

def _explore(args):
    p = load_program(args.file)
    exp = reach(p, args.model, args.depth, seed=args.seed)
    return p, exp, sorted(final_outcomes(exp), key=lambda o: o.registers)


def _outcome_lines(outs) -> list[str]:
    return [f"  {o or '(no registers)'}    via {format_trace(o.witness)}" for o in outs]


def _outcome_json(outs) -> list[dict]:
    return [{"registers": dict(o.registers), "witness": format_trace(o.witness)} for o in outs]


def cmd_run(args) -> int:
    p, exp, outs = _explore(args)
    verdict = check_postcondition(exp)
    post = format_expr(p.post) if p.post is not None else None
    lines = [f"{p.name or args.file} under {args.model.upper()}: "
             f"{len(exp.configs)} configurations, {len(outs)} outcomes"
             + ("" if exp.complete else " (incomplete)")]
    lines += _outcome_lines(outs)
    if post is not None:
        lines.append(f"post {post}: {verdict.status}")
        if verdict.counterexample is not None:
            lines.append(f"  counterexample: {verdict.counterexample}")
    payload = {"command": "run", "program": p.name, "model": args.model,
               "complete": exp.complete, "configurations": len(exp.configs),
               "outcomes": _outcome_json(outs), "post": post, "verdict": verdict.status}
    if verdict.counterexample is not None:
        payload["counterexample"] = _outcome_json([verdict.counterexample])[0]
    _emit(args, payload, "\n".join(lines))
    return {"holds": OK, "fails": FAILED, "unknown": INCOMPLETE}[verdict.status]


def cmd_outcomes(args) -> int:
    p, exp, outs = _explore(args)
    lines = [f"{len(outs)} outcomes" + ("" if exp.complete else " (incomplete)")]
    lines += _outcome_lines(outs)
    _emit(args, {"command": "outcomes", "program": p.name, "model": args.model,
                 "complete": exp.complete, "outcomes": _outcome_json(outs)}, "\n".join(lines))
    return OK if exp.complete else INCOMPLETE


def cmd_equiv(args) -> int:
    p = load_program(args.file)
    pp = make_machine(p, "ppso", mutant=args.mutant) if args.mutant else None
    rep = trace_equiv(p, args.depth, ppso_machine=pp, seed=args.seed)
    text = {"equivalent": "trace-equivalent", "different": "not trace-equivalent",
            "unknown": "unknown (depth bound reached)"}[rep.status]
    text += f" (PSO {rep.counts['pso']} traces, PPSO {rep.counts['ppso']} traces)"
    if rep.distinguishing is not None:
        text += f"\ndistinguishing trace, only in {rep.only_in.upper()}:\n  " \
                f"{format_trace(rep.distinguishing)}"
    _emit(args, {"command": "equiv", "program": p.name, "mutant": args.mutant, **rep.to_json()},
          text)
    return {"equivalent": OK, "different": FAILED, "unknown": INCOMPLETE}[rep.status]


def cmd_check_sim(args) -> int:
    p = load_program(args.file)
    reps = check_sim(p, args.depth)
    lines = [f"{r.check}: {'holds' if r.holds else 'FAILS'} ({r.checked} checks)"
             + (f"\n  {r.failure}" if r.failure else "") for r in reps]
    _emit(args, {"command": "check-sim", "program": p.name,
                 "results": [r.to_json() for r in reps]}, "\n".join(lines))
    return OK if all(r.holds for r in reps) else FAILED


def _globals_list(text: str) -> tuple[str, ...]:
    names = tuple(n for n in text.replace(",", " ").split() if n)
    if not names or len(set(names)) != len(names):
        raise InputError(f"bad --globals {text!r}")
    return names


def cmd_axioms(args) -> int:
    try:
        vals = _parse_vals(args.vals, 0, 0)
    except ParseError as e:
        raise InputError(f"bad --vals {args.vals!r}: {e.message}") from None
    names = args.axiom or list(ax.AXIOMS)
    for n in names:
        if n not in ax.LEVELS:
            raise InputError(f"unknown axiom {n!r}; choose from {', '.join(ax.AXIOMS)}")
    try:
        u = ax.build_universe(args.threads, _globals_list(args.globals), vals, args.cap,
                              max_states=args.max_states, seed=args.seed)
    except ax.UniverseTooLarge as e:
        raise InputError(str(e)) from None
    start = time.perf_counter()
    reports = ax.check_all(u, [n for n in ax.AXIOMS if n in names])
    elapsed = time.perf_counter() - start
    payload = ax.report_json(u, reports, timing=args.timing)
    payload.pop("schema")
    lines = [f"universe: {len(u.threads)} threads, globals {' '.join(u.globals)}, "
             f"vals {list(u.vals)}, pending cap {u.cap}, {len(u.states)} states"]
    for r in reports:
        lines.append(f"  {r.axiom:<4} {r.level:<11} {r.verdict.upper():<4} ({r.instances} instances)")
        if r.counterexample:
            cx = r.counterexample
            lines.append(f"       params {cx['params']}")
            lines.append(f"       state  {cx['state']}")
            for w in cx["witness"]:
                lines.append(f"       via    {w}")
    ok = payload["expected_profile"]
    lines.append(f"expected profile (all pass except MP): {'yes' if ok else 'NO'}"
                 + (f"  [{elapsed:.2f}s]" if args.timing else ""))
    _emit(args, {"command": "axioms", **payload}, "\n".join(lines))
    return OK if ok else FAILED


def cmd_prove(args) -> int:
    outline = parse_outline(_read_source(args.file, ".outline"))
    try:
        rep = check_outline(outline, args.universe)
    except ValueError as e:
        raise InputError(str(e)) from None
    lines = [f"{outline.program.name or args.file}: {len(rep.triples)} triples over "
             f"{rep.states} states ({rep.universe} universe)"]
    for f in rep.failures:
        where = f"line {f.line}: " if f.line else ""
        lines.append(f"  FAIL {where}{f.kind} triple {{{f.pre}}} {f.command} @{f.thread} {{{f.post}}}")
        if f.context:
            lines.append(f"       {f.context}")
        if f.witness:
            lines.append(f"       state     {f.witness['state']}")
            lines.append(f"       successor {f.witness['successor']}")
    for pr in rep.problems:
        lines.append(f"  FAIL {pr['kind']}: {pr['assertion']} at {pr['state']}")
    lines.append("outline valid" if rep.valid else "outline INVALID")
    payload = rep.to_json()
    payload.pop("schema")
    _emit(args, {"command": "prove", "program": outline.program.name, **payload}, "\n".join(lines))
    return OK if rep.valid else FAILED


def cmd_check_wlp_laws(args) -> int:
    reps = check_wlp_laws(args.samples, args.states, args.seed if args.seed is not None else 0)
    wit = disjunctivity_reverse_witness()
    lines = [f"  {r.law:<22} {'holds' if r.holds else 'FAILS'} ({r.samples} samples)" for r in reps]
    lines.append("disjunctivity reverse inclusion: "
                 + ("counterexample found" if wit else "no counterexample found"))
    ok = all(r.holds for r in reps) and wit is not None
    _emit(args, {"command": "check-wlp-laws",
                 "laws": [{"law": r.law, "holds": r.holds, "samples": r.samples,
                           "counterexample": r.counterexample} for r in reps],
                 "disjunctivity_reverse_witness": wit}, "\n".join(lines))
    return OK if ok else FAILED


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None,
                        help="shuffle successor/search order (results must not change)")
    explore = argparse.ArgumentParser(add_help=False)
    explore.add_argument("file", help="litmus file, or the name of a shipped test (mp, sb, ...)")
    explore.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    parser = argparse.ArgumentParser(prog="pso-litmus",
                                     description="PSO / PPSO litmus explorer and axiom checker")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("run", cmd_run, "explore and check the postcondition"),
                            ("outcomes", cmd_outcomes, "list final register outcomes")):
        sp = sub.add_parser(name, parents=[common, explore], help=help_)
        sp.add_argument("--model", choices=MODELS, default="pso")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("equiv", parents=[common, explore], help="compare PSO and PPSO traces")
    sp.add_argument("--mutant", choices=MUTANTS, default=None,
                    help="test hook: run PPSO with a deliberately wrong rule")
    sp.set_defaults(func=cmd_equiv)

    sp = sub.add_parser("check-sim", parents=[common, explore],
                        help="forward/backward simulation and freshness checks")
    sp.set_defaults(func=cmd_check_sim)

    sp = sub.add_parser("axioms", parents=[common], help="check the axiom hierarchy")
    sp.add_argument("--threads", type=int, default=2)
    sp.add_argument("--globals", default="x y")
    sp.add_argument("--vals", default="0..1")
    sp.add_argument("--cap", type=int, default=2, help="max pending writes in the universe")
    sp.add_argument("--axiom", action="append", help="check only this axiom (repeatable)")
    sp.add_argument("--max-states", type=int, default=ax.DEFAULT_MAX_STATES)
    sp.add_argument("--timing", action="store_true", help="include timings in the report")
    sp.set_defaults(func=cmd_axioms)

    sp = sub.add_parser("prove", parents=[common], help="check an Owicki-Gries proof outline")
    sp.add_argument("file", help="outline file, or the name of a shipped outline (mp-fence, ...)")
    sp.add_argument("--universe", default="reachable", help="reachable or cap:N")
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("check-wlp-laws", parents=[common], help="sample the wlp laws")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--states", type=int, default=6)
    sp.set_defaults(func=cmd_check_wlp_laws)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "depth", 0) < 0:
        print("error: --depth must be non-negative", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
