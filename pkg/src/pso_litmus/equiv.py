"""Trace equivalence and simulation checks between PSO and PPSO.

All checks run over explored state spaces, so a pass certifies the
simulation conditions only on the states actually reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .explore import DEFAULT_DEPTH, format_trace, make_machine, reach, traces
from .lang import Program, action_universe
from .ppso import erase, freshness_violation


@dataclass
class EquivReport:
    status: str  # "equivalent", "different" or "unknown"
    distinguishing: tuple | None = None
    only_in: str | None = None
    counts: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.status == "equivalent"

    def to_json(self) -> dict:
        d = {"status": self.status, "trace_counts": self.counts}
        if self.distinguishing is not None:
            d["distinguishing_trace"] = format_trace(self.distinguishing)
            d["only_in"] = self.only_in
        return d


def trace_equiv(p: Program, depth: int = DEFAULT_DEPTH, pso_machine=None,
                ppso_machine=None, seed: int | None = None) -> EquivReport:
    a = traces(p, "pso", depth, machine=pso_machine, seed=seed)
    b = traces(p, "ppso", depth, machine=ppso_machine, seed=seed)
    counts = {"pso": len(a.traces), "ppso": len(b.traces)}
    diff = a.traces ^ b.traces
    if diff:
        # a difference among complete runs is conclusive only if both sides finished
        t = min(diff, key=lambda tr: (len(tr), repr(tr)))
        status = "different" if a.complete and b.complete else "unknown"
        return EquivReport(status, t, "pso" if t in a.traces else "ppso", counts)
    if not (a.complete and b.complete):
        return EquivReport("unknown", counts=counts)
    return EquivReport("equivalent", counts=counts)


@dataclass
class SimReport:
    check: str
    holds: bool
    checked: int
    failure: dict | None = None

    def to_json(self) -> dict:
        d = {"check": self.check, "holds": self.holds, "checked": self.checked}
        if self.failure:
            d["failure"] = self.failure
        return d


@dataclass
class Spaces:
    """Explored configurations and flush-closed memory spaces of both models."""

    program: Program
    pso: object
    ppso: object
    pso_states: frozenset
    ppso_states: frozenset

    @property
    def complete(self) -> bool:
        return self.pso.complete and self.ppso.complete


def explore_both(p: Program, depth: int = DEFAULT_DEPTH, ppso_machine=None) -> Spaces:
    e1 = reach(p, "pso", depth)
    e2 = reach(p, "ppso", depth, machine=ppso_machine)
    return Spaces(p, e1, e2, e1.machine.close(e1.memory_states()),
                  e2.machine.close(e2.memory_states()))


def _spaces(p, depth, spaces):
    return spaces if spaces is not None else explore_both(p, depth)


def check_forward_sim(p: Program, depth: int = DEFAULT_DEPTH, spaces: Spaces | None = None) -> SimReport:
    """Erasure is a forward simulation from PPSO to PSO on explored states.

    For each explored PPSO state and every action of the program's action
    universe, each PPSO successor must erase to a PSO successor of the
    erased state.
    """
    sp = _spaces(p, depth, spaces)
    pso, pp = sp.pso.machine, sp.ppso.machine
    checked = 0
    init = erase(pp.initial())
    if init != pso.initial():
        return SimReport("forward", False, 0, {"reason": "initial state does not erase to I_PSO"})
    actions = action_universe(p)
    for s1 in sorted(sp.ppso_states):
        s2 = erase(s1)
        for t in pp.threads:
            for a in actions:
                target = pso.image(s2, t, a)
                for s1n in pp.image(s1, t, a):
                    checked += 1
                    if erase(s1n) not in target:
                        return SimReport("forward", False, checked, {
                            "thread": t, "action": str(a), "ppso": pp.describe(s1),
                            "ppso_next": pp.describe(s1n), "pso": pso.describe(s2)})
    return SimReport("forward", True, checked)


def check_backward_sim(p: Program, depth: int = DEFAULT_DEPTH, spaces: Spaces | None = None) -> SimReport:
    """The converse of erasure is a backward simulation from PSO to PPSO.

    For each explored PSO transition (s1, s1') and each explored PPSO state
    u' erasing to s1', some PPSO state u erasing to s1 must step to u'.
    Candidates u range over every timestamp interleaving of s1.
    """
    sp = _spaces(p, depth, spaces)
    pso, pp = sp.pso.machine, sp.ppso.machine
    by_erasure: dict = {}
    for u in sp.ppso_states:
        by_erasure.setdefault(erase(u), []).append(u)
    checked = 0
    # totality of B over explored PSO states and configurations
    for s in sorted(sp.pso_states):
        if s not in by_erasure:
            return SimReport("backward", False, checked,
                             {"reason": "no explored PPSO state erases to", "pso": pso.describe(s)})
    pp_configs = {(c.pi, c.lst, erase(c.sigma)) for c in sp.ppso.configs}
    for c in sp.pso.configs:
        checked += 1
        if (c.pi, c.lst, c.sigma) not in pp_configs:
            return SimReport("backward", False, checked,
                             {"reason": "PSO configuration with no PPSO counterpart",
                              "pso": pso.describe(c.sigma)})
    for u in by_erasure.get(pso.initial(), []):
        if u not in pp.initial_states():
            return SimReport("backward", False, checked,
                             {"reason": "B relates the initial state to a non-initial one",
                              "ppso": pp.describe(u)})
    lifts_cache: dict = {}
    actions = action_universe(p)
    for s1 in sorted(sp.pso_states):
        for t in pso.threads:
            for a in actions:
                for s1n in pso.image(s1, t, a):
                    for un in by_erasure.get(s1n, ()):
                        checked += 1
                        if s1 not in lifts_cache:
                            lifts_cache[s1] = pp.lifts(s1)
                        if not any(un in pp.image(u, t, a) for u in lifts_cache[s1]):
                            return SimReport("backward", False, checked, {
                                "thread": t, "action": str(a), "pso": pso.describe(s1),
                                "pso_next": pso.describe(s1n), "ppso_next": pp.describe(un)})
    return SimReport("backward", True, checked)


def check_freshness_invariant(p: Program, depth: int = DEFAULT_DEPTH,
                              spaces: Spaces | None = None, states=None) -> SimReport:
    """Freshness of last timestamps in every explored PPSO state."""
    if states is None:
        sp = _spaces(p, depth, spaces)
        states, machine = sp.ppso_states, sp.ppso.machine
    else:
        machine = make_machine(p, "ppso")
    checked = 0
    for s in sorted(states):
        checked += 1
        why = freshness_violation(s)
        if why:
            return SimReport("freshness", False, checked, {"state": machine.describe(s), "reason": why})
    return SimReport("freshness", True, checked)


def check_sim(p: Program, depth: int = DEFAULT_DEPTH) -> list[SimReport]:
    sp = explore_both(p, depth)
    return [check_forward_sim(p, spaces=sp), check_backward_sim(p, spaces=sp),
            check_freshness_invariant(p, spaces=sp)]
