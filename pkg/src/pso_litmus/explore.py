"""Program plus memory semantics, and bounded exhaustive exploration."""

from __future__ import annotations

import math
import random
import sys
from dataclasses import dataclass, field
from typing import Iterable

from .lang import Command, If, Program, Seq, Skip, While, eval_expr, is_memory_action
from .local import LocalState, thread_steps
from .ppso import PpsoMachine
from .pso import PsoMachine

DEFAULT_DEPTH = 10_000
MODELS = ("pso", "ppso")


def make_machine(p: Program, model: str, mutant: str | None = None):
    if model == "pso":
        if mutant:
            raise ValueError("mutants exist only for the ppso model")
        return PsoMachine(p.globals, p.n_threads)
    if model == "ppso":
        return PpsoMachine(p.globals, p.n_threads, mutant=mutant)
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


@dataclass(frozen=True)
class Config:
    pi: tuple[Command, ...]
    lst: tuple[LocalState, ...]
    sigma: object

    def terminal(self) -> bool:
        return all(isinstance(c, Skip) for c in self.pi)

    def registers(self) -> dict[str, int]:
        env: dict[str, int] = {}
        for ls in self.lst:
            env.update(ls)
        return env


def initial_config(p: Program, machine) -> Config:
    lst = tuple(LocalState.zero(regs) for regs in p.registers)
    return Config(tuple(p.threads), lst, machine.initial())


def combined_steps(c: Config, machine, vals) -> frozenset:
    """All (thread, label, successor) triples of the lifted semantics.

    Memory actions go through T(t, a), so flushes happen implicitly before
    each action.  Silent and local steps leave memory unchanged.
    """
    out = set()
    for t in range(1, len(c.pi) + 1):
        for label, pi2, lst2 in thread_steps(c.pi, c.lst, t, vals):
            if is_memory_action(label):
                for sigma2 in machine.image(c.sigma, t, label):
                    out.add((t, label, Config(pi2, lst2, sigma2)))
            else:
                out.add((t, label, Config(pi2, lst2, c.sigma)))
    return frozenset(out)


@dataclass
class Exploration:
    program: Program
    machine: object
    initial: Config
    configs: frozenset
    complete: bool
    depth: int
    parent: dict = field(repr=False, default_factory=dict)

    @property
    def model(self) -> str:
        return self.machine.model

    def terminals(self) -> list[Config]:
        return [c for c in self.configs if c.terminal()]

    def witness(self, c: Config) -> tuple:
        path = []
        while c in self.parent:
            prev, t, label = self.parent[c]
            path.append((t, label))
            c = prev
        return tuple(reversed(path))

    def memory_states(self) -> frozenset:
        return frozenset(c.sigma for c in self.configs)


def _ordered(steps, rng):
    steps = sorted(steps, key=repr)
    if rng is not None:
        rng.shuffle(steps)
    return steps


def reach(p: Program, model: str = "pso", depth: int = DEFAULT_DEPTH,
          seed: int | None = None, machine=None) -> Exploration:
    """Breadth-first exploration up to `depth` steps.

    The result is complete when the frontier empties within the bound.
    `seed` shuffles successor order; the reachable set does not depend on it.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    machine = machine or make_machine(p, model)
    rng = random.Random(seed) if seed is not None else None
    init = initial_config(p, machine)
    seen = {init}
    parent: dict = {}
    frontier = [init]
    level = 0
    while frontier and level < depth:
        nxt = []
        for c in frontier:
            for t, label, c2 in _ordered(combined_steps(c, machine, p.vals), rng):
                if c2 not in seen:
                    seen.add(c2)
                    parent[c2] = (c, t, label)
                    nxt.append(c2)
        frontier = nxt
        level += 1
    complete = not frontier or all(not combined_steps(c, machine, p.vals) for c in frontier)
    return Exploration(p, machine, init, frozenset(seen), complete, depth, parent)


@dataclass(frozen=True)
class Outcome:
    """Final register valuation; the witness and memory are informational."""

    registers: tuple[tuple[str, int], ...]
    witness: tuple = field(compare=False, default=())
    flushed: bool = field(compare=False, default=True)

    def value(self, reg: str) -> int:
        return dict(self.registers)[reg]

    def values(self, regs: Iterable[str]) -> tuple[int, ...]:
        d = dict(self.registers)
        return tuple(d[r] for r in regs)

    def __str__(self):
        return " ".join(f"{r}={v}" for r, v in self.registers)


def final_outcomes(exp: Exploration) -> frozenset[Outcome]:
    """Register valuations of terminal configs, one witness each."""
    best: dict = {}
    for c in sorted(exp.terminals(), key=lambda c: (len(exp.witness(c)), repr(c))):
        regs = tuple(sorted(c.registers().items()))
        if regs not in best:
            best[regs] = Outcome(regs, exp.witness(c), c.sigma.pending() == 0)
    return frozenset(best.values())


@dataclass
class Verdict:
    status: str  # "holds", "fails" or "unknown"
    counterexample: Outcome | None = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def check_postcondition(exp: Exploration, post=None) -> Verdict:
    post = exp.program.post if post is None else post
    if not exp.complete:
        return Verdict("unknown")
    if post is None:
        return Verdict("holds")
    bad = [o for o in final_outcomes(exp) if not eval_expr(post, dict(o.registers))]
    if bad:
        return Verdict("fails", min(bad, key=lambda o: o.registers))
    return Verdict("holds")


def replay(p: Program, machine, witness: tuple) -> frozenset:
    """Configs reachable from the initial one along the witness labels."""
    current = {initial_config(p, machine)}
    for t, label in witness:
        current = {c2 for c in current for t2, l2, c2 in combined_steps(c, machine, p.vals)
                   if t2 == t and l2 == label}
    return frozenset(current)


def replays_to(p: Program, machine, outcome: Outcome) -> bool:
    return any(c.terminal() and tuple(sorted(c.registers().items())) == outcome.registers
               for c in replay(p, machine, outcome.witness))


@dataclass
class TraceSet:
    traces: frozenset
    complete: bool


def traces(p: Program, model: str = "pso", depth: int = DEFAULT_DEPTH,
           machine=None, seed: int | None = None) -> TraceSet:
    """Memory-action traces of complete runs within `depth` steps.

    A trace is a tuple of (thread, action) pairs; silent and local steps
    are dropped.
    """
    machine = machine or make_machine(p, model)
    rng = random.Random(seed) if seed is not None else None
    memo: dict = {}
    state = {"complete": True}

    def go(c: Config, left: int) -> frozenset:
        # once the bound cannot cut a run short, the result depends on c alone
        key = c if left >= sum(map(step_bound, c.pi)) else (c, left)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if c.terminal():
            res = frozenset([()])
        elif left == 0:
            if combined_steps(c, machine, p.vals):
                state["complete"] = False
            res = frozenset()
        else:
            acc = set()
            for t, label, c2 in _ordered(combined_steps(c, machine, p.vals), rng):
                tails = go(c2, left - 1)
                if is_memory_action(label):
                    acc.update(((t, label),) + tail for tail in tails)
                else:
                    acc.update(tails)
            res = frozenset(acc)
        memo[key] = res
        return res

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * min(depth, 100_000) + 1000))
    try:
        result = go(initial_config(p, machine), depth)
    finally:
        sys.setrecursionlimit(limit)
    return TraceSet(result, state["complete"])


def step_bound(c: Command) -> float:
    """Upper bound on the steps a residue can still take (inf with loops)."""
    if isinstance(c, Skip):
        return 0
    if isinstance(c, Seq):
        return step_bound(c.first) + step_bound(c.second) + 1
    if isinstance(c, If):
        return 1 + max(step_bound(c.then), step_bound(c.orelse))
    if isinstance(c, While):
        return math.inf
    return 1


def format_trace(trace: tuple) -> str:
    return " ; ".join(f"{a}@{t}" for t, a in trace) or "<empty>"
