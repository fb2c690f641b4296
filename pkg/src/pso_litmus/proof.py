"""Owicki-Gries proof outlines checked with the finite wlp engine.

States are ``LState(lst, sigma)`` pairs.  A triple ``{P} c @t {Q}`` holds
when every universe state satisfying P has all its c-successors in Q.
Successors are computed exactly from the PPSO machine, so they may fall
outside the universe; assertions are evaluated on them directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from .explore import initial_config, reach
from .lang import (FENCE, Assign, AssertionMark, Command, Fnc, ParseError, Program, Rd, Read,
                   Skip, Wr, Write, action_universe, eval_expr, format_command, parse_sections)
from .local import LocalState
from .logic import (TRUE, AssertionEvaluator, Assertion, LState, assertion_instances,
                    beta_closure, check_assertion_signature, check_beta_stable, conj,
                    format_assertion, parse_assertion)
from .ppso import PpsoMachine


@dataclass
class ThreadOutline:
    assertions: list[Assertion]
    commands: list[Command]
    lines: list[int] = field(default_factory=list)  # source line of each command
    assertion_lines: list[int] = field(default_factory=list)


@dataclass
class ProofOutline:
    program: Program
    threads: list[ThreadOutline]
    init: Assertion = TRUE
    final: Assertion = TRUE


ATOMIC_OUTLINE = (Skip, Fnc, Assign, Read, Write)


def parse_outline(text: str) -> ProofOutline:
    """Parse a litmus file with `{ assertion }` annotations.

    Every thread alternates assertions and atomic statements, starting and
    ending with an assertion.  `init:` and `final:` headers hold assertions.
    """
    prog, items_by_thread, src = parse_sections(text, allow_assertions=True)
    regs = prog.all_registers()

    def parse_checked(tokens_or_text, line, col):
        a = parse_assertion(tokens_or_text, line, col)
        check_assertion_signature(a, prog.globals, prog.n_threads, regs)
        return a

    threads = []
    for t, items in enumerate(items_by_thread, start=1):
        out = ThreadOutline([], [])
        expect_assertion = True
        for it in items:
            if isinstance(it, AssertionMark):
                if not expect_assertion:
                    raise ParseError(f"thread {t}: two assertions in a row", it.line, it.col)
                out.assertions.append(parse_checked(it.tokens, it.line, it.col))
                out.assertion_lines.append(it.line)
                expect_assertion = False
            else:
                if expect_assertion:
                    raise ParseError(f"thread {t}: statement without a pre-assertion",
                                     it.line, it.col)
                if not isinstance(it.command, ATOMIC_OUTLINE):
                    raise ParseError(f"thread {t}: outline statements must be atomic",
                                     it.line, it.col)
                out.commands.append(it.command)
                out.lines.append(it.line)
                expect_assertion = True
        if expect_assertion:
            line = out.lines[-1] if out.lines else 0
            raise ParseError(f"thread {t}: outline must end with an assertion", line, 1)
        threads.append(out)
    init = final = TRUE
    if "init" in src.headers:
        init = parse_checked(*src.headers["init"])
    if "final" in src.headers:
        final = parse_checked(*src.headers["final"])
    return ProofOutline(prog, threads, init, final)


def load_outline(path) -> ProofOutline:
    with open(path, encoding="utf-8") as f:
        return parse_outline(f.read())


# ---------------------------------------------------------------------------
# Universes of (lst, sigma) states

@dataclass
class ProofUniverse:
    program: Program
    machine: PpsoMachine
    states: frozenset
    kind: str
    evaluator: AssertionEvaluator = field(repr=False, default=None)

    def __post_init__(self):
        if self.evaluator is None:
            self.evaluator = AssertionEvaluator(self.machine, self.program.vals)
        self.order = sorted(self.states)

    def holds(self, a: Assertion, st: LState) -> bool:
        return self.evaluator.holds(a, st)

    def eval(self, a: Assertion) -> frozenset:
        return frozenset(s for s in self.order if self.holds(a, s))

    def describe(self, st: LState) -> str:
        regs = ", ".join(f"{r}={v}" for ls in st.lst for r, v in ls.items())
        return f"[{regs}] {self.machine.describe(st.sigma)}"


def _set_reg(lst: tuple, t: int, reg: str, v: int) -> tuple:
    return lst[:t - 1] + (lst[t - 1].set(reg, v),) + lst[t:]


def reachable_universe(p: Program, depth: int = 10_000) -> ProofUniverse:
    """Reachable (lst, sigma) pairs, flush-closed, plus one step of every action."""
    m = PpsoMachine(p.globals, p.n_threads)
    exp = reach(p, "ppso", depth, machine=m)
    base = {LState(c.lst, s) for c in exp.configs for s in m.flush_closure(c.sigma)}
    extra = set()
    for st in base:
        for t in p.tids:
            own = p.registers[t - 1]
            for a in action_universe(p):
                if isinstance(a, Rd) and a.reg not in own:
                    continue
                lst = _set_reg(st.lst, t, a.reg, a.val) if isinstance(a, Rd) else st.lst
                for s2 in m.image(st.sigma, t, a):
                    for s3 in m.flush_closure(s2):
                        extra.add(LState(lst, s3))
    return ProofUniverse(p, m, frozenset(base | extra), "reachable")


def cap_universe(p: Program, cap: int) -> ProofUniverse:
    """Every memory state with at most `cap` pending entries, times all register values."""
    m = PpsoMachine(p.globals, p.n_threads)
    sigmas = m.all_states(p.vals, cap)
    per_thread = [[LocalState(zip(regs, vs)) for vs in itertools.product(p.vals, repeat=len(regs))]
                  for regs in p.registers]
    states = frozenset(LState(lst, s) for lst in itertools.product(*per_thread) for s in sigmas)
    return ProofUniverse(p, m, states, f"cap:{cap}")


def build_proof_universe(p: Program, spec: str = "reachable") -> ProofUniverse:
    if spec == "reachable":
        return reachable_universe(p)
    if spec.startswith("cap:"):
        try:
            cap = int(spec[4:])
        except ValueError:
            raise ValueError(f"bad universe {spec!r}; use reachable or cap:N") from None
        return cap_universe(p, cap)
    raise ValueError(f"bad universe {spec!r}; use reachable or cap:N")


# ---------------------------------------------------------------------------
# Triples

def command_actions(c: Command, ls: LocalState, vals) -> list:
    """Memory actions an atomic command can perform from local state `ls`."""
    if isinstance(c, Read):
        return [Rd(c.var, c.reg, v) for v in vals]
    if isinstance(c, Write):
        return [Wr(c.var, eval_expr(c.expr, ls))]
    if isinstance(c, Fnc):
        return [FENCE]
    return []


def successors(u: ProofUniverse, c: Command, t: int, st: LState) -> frozenset:
    m, vals = u.machine, u.program.vals
    if isinstance(c, Skip):
        return frozenset([st])
    if isinstance(c, Assign):
        return frozenset([LState(_set_reg(st.lst, t, c.reg, eval_expr(c.expr, st.lst[t - 1])),
                                 st.sigma)])
    if not isinstance(c, ATOMIC_OUTLINE):
        raise ValueError(f"not an atomic command: {format_command(c)}")
    out = set()
    for a in command_actions(c, st.lst[t - 1], vals):
        lst = _set_reg(st.lst, t, a.reg, a.val) if isinstance(a, Rd) else st.lst
        out.update(LState(lst, s2) for s2 in m.image(st.sigma, t, a))
    return frozenset(out)


@dataclass
class TripleResult:
    holds: bool
    thread: int
    command: str
    pre: str
    post: str
    kind: str = "local"
    line: int = 0
    witness: dict | None = None
    context: str = ""

    def to_json(self) -> dict:
        d = {"holds": self.holds, "kind": self.kind, "thread": self.thread,
             "command": self.command, "line": self.line, "pre": self.pre, "post": self.post}
        if self.context:
            d["context"] = self.context
        if self.witness:
            d["witness"] = self.witness
        return d


def check_hoare_triple(P: Assertion, t: int, com: Command, Q: Assertion,
                       universe: ProofUniverse, kind: str = "local", line: int = 0) -> TripleResult:
    """P is contained in wlp(T(t, a), Q) for every action a of `com`.

    Raises ValueError when an assertion names an unknown variable, thread or
    register, or when `com` is not atomic.
    """
    prog = universe.program
    for a in (P, Q):
        check_assertion_signature(a, prog.globals, prog.n_threads, prog.all_registers())
    text = format_command(com).rstrip(";")
    res = TripleResult(True, t, text, format_assertion(P), format_assertion(Q), kind, line)
    for st in universe.order:
        if not universe.holds(P, st):
            continue
        for nxt in sorted(successors(universe, com, t, st)):
            if not universe.holds(Q, nxt):
                res.holds = False
                res.witness = {"state": universe.describe(st), "successor": universe.describe(nxt)}
                return res
    return res


@dataclass
class OutlineReport:
    valid: bool
    universe: str
    states: int
    triples: list[TripleResult] = field(default_factory=list)
    failures: list[TripleResult] = field(default_factory=list)
    problems: list[dict] = field(default_factory=list)

    def first_failure(self):
        return self.failures[0] if self.failures else (self.problems[0] if self.problems else None)

    def to_json(self) -> dict:
        return {"schema": 1, "valid": self.valid, "universe": self.universe,
                "states": self.states, "triples_checked": len(self.triples),
                "beta": "FL* (flush closure)",
                "failures": [f.to_json() for f in self.failures], "problems": self.problems}


def check_local_correctness(o: ProofOutline, universe: ProofUniverse) -> list[TripleResult]:
    out = []
    for t, th in enumerate(o.threads, start=1):
        for i, com in enumerate(th.commands):
            out.append(check_hoare_triple(th.assertions[i], t, com, th.assertions[i + 1],
                                          universe, "local", th.lines[i]))
    return out


def check_global_correctness(o: ProofOutline, universe: ProofUniverse) -> list[TripleResult]:
    """Every assertion of a thread is stable under every command of every other thread."""
    out = []
    for t, th in enumerate(o.threads, start=1):
        for t2, other in enumerate(o.threads, start=1):
            if t == t2:
                continue
            for i, com in enumerate(other.commands):
                P = other.assertions[i]
                for R in th.assertions:
                    r = check_hoare_triple(conj(R, P), t2, com, R, universe, "interference",
                                           other.lines[i])
                    r.context = f"assertion {format_assertion(R)} of thread {t}"
                    out.append(r)
    return out


def check_outline(o: ProofOutline, universe: ProofUniverse | str = "reachable") -> OutlineReport:
    if isinstance(universe, str):
        universe = build_proof_universe(o.program, universe)
    rep = OutlineReport(True, universe.kind, len(universe.states))
    m = universe.machine
    init_cfg = initial_config(o.program, m)
    init = LState(init_cfg.lst, init_cfg.sigma)
    if not universe.holds(o.init, init):
        rep.problems.append({"kind": "init", "assertion": format_assertion(o.init),
                             "state": universe.describe(init)})
    for t, th in enumerate(o.threads, start=1):
        if not universe.holds(th.assertions[0], init):
            rep.problems.append({"kind": "thread-init", "thread": t,
                                 "assertion": format_assertion(th.assertions[0]),
                                 "state": universe.describe(init)})
    rep.triples = check_local_correctness(o, universe) + check_global_correctness(o, universe)
    rep.failures = [r for r in rep.triples if not r.holds]
    finals = conj(*[th.assertions[-1] for th in o.threads])
    exp = reach(o.program, "ppso", machine=m)
    for c in sorted(exp.terminals(), key=repr):
        st = LState(c.lst, c.sigma)
        if universe.holds(finals, st) and not universe.holds(o.final, st):
            rep.problems.append({"kind": "final", "assertion": format_assertion(o.final),
                                 "state": universe.describe(st)})
            break
    rep.valid = not rep.failures and not rep.problems
    return rep


# ---------------------------------------------------------------------------
# beta-stability of the view assertions

@dataclass
class StabilityResult:
    assertion: str
    holds: bool
    size: int
    witness: dict | None = None


def check_view_stability(p: Program, universe: ProofUniverse | None = None) -> list[StabilityResult]:
    """Every view assertion over the program's signature is FL*-stable.

    Runs on the memory states of the proof universe (flush-closed by
    construction) using the restricted flush closure as beta.
    """
    u = universe or reachable_universe(p)
    m = u.machine
    sigmas = sorted({st.sigma for st in u.states})
    if not m.is_flush_closed(frozenset(sigmas)):
        raise ValueError("universe memory states are not flush-closed")
    beta = beta_closure(sigmas, m)
    out = []
    for a in assertion_instances(p.globals, p.vals, p.n_threads):
        pred = u.evaluator.eval(a, sigmas)
        ok = check_beta_stable(pred, beta)
        res = StabilityResult(format_assertion(a), ok, len(pred))
        if not ok:
            s = next(s for s in sorted(pred) if not beta.image(s) <= pred)
            bad = min(beta.image(s) - pred)
            res.witness = {"state": m.describe(s), "flushed": m.describe(bad)}
        out.append(res)
    return out
