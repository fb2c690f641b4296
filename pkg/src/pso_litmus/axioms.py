"""Brute-force checks of the view-based axioms over finite PPSO universes.

A universe is every canonical PPSO state with at most ``cap`` pending
entries.  Flushes and reads never add entries, so the universe is closed
under them; writes can leave it, and those successors are dropped (every
relation is restricted to ``U x U``).  Existential sides of inclusions
(the right-hand sides of C2, C3, SV1, RW1, RW2) are searched on the exact
machine, so a witness may pass through states outside the universe.  A
pass is therefore a bounded certificate for the given signature, not a
proof.

Each axiom is checked twice over: in bulk with the relation algebra of
``logic``, and pointwise (used to replay counterexamples) by a separate
interpreter that reads successor images straight from the machine.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .lang import (FENCE, BExpr, Cmp, Fence, Lit, Not, Or, And, Rd, Reg, Wr, action_key,
                   eval_expr, format_expr, substitute, var)
from .local import LocalState
from .logic import ImageRel, LState, Rel, dis, dom, wlp
from .ppso import PpsoMachine, PpsoState

LEVELS = {
    "C1": "Core", "C2": "Core", "C3": "Core", "C4": "Core",
    "SV1": "SharedVars", "SV2": "SharedVars",
    "RW1": "SharedVars", "RW2": "SharedVars", "RW3": "SharedVars", "RW4": "SharedVars",
    "RW5": "SharedVars", "RW6": "SharedVars", "RW7": "SharedVars",
    "FNC": "Fences", "MP": "MsgPassing",
}
AXIOMS = tuple(LEVELS)
REGISTER = "r"
DEFAULT_MAX_STATES = 200_000
# RW1 is only quantified over distinct threads: with t == t' a thread's own
# write can be flushed ahead of another thread's older entry, and the read
# that follows cannot be moved in front of the write.
DISTINCT_THREADS = frozenset({"RW1"})


class UniverseTooLarge(ValueError):
    pass


def universe_size(n_threads: int, n_globals: int, n_vals: int, cap: int) -> int:
    """Closed-form count of canonical states with at most `cap` entries."""
    slots = n_threads * n_globals
    return sum(n_vals ** n_globals * (slots * n_vals) ** n for n in range(cap + 1))


class AxiomUniverse:
    """Finite PPSO universe with T, interf, beta and vmax materialised lazily."""

    def __init__(self, n_threads: int = 2, globals_: Sequence[str] = ("x", "y"),
                 vals: Sequence[int] = (0, 1), cap: int = 2, register: str = REGISTER,
                 max_states: int = DEFAULT_MAX_STATES, sync=None,
                 distinct_threads=DISTINCT_THREADS, seed: int | None = None):
        if cap < 0:
            raise ValueError("pending cap must be non-negative")
        size = universe_size(n_threads, len(globals_), len(vals), cap)
        if size > max_states:
            raise UniverseTooLarge(f"universe would have {size} states (limit {max_states})")
        self.machine = PpsoMachine(globals_, n_threads)
        self.globals = tuple(globals_)
        self.vals = tuple(vals)
        self.cap = cap
        self.threads = self.machine.threads
        self.order = sorted(self.machine.all_states(self.vals, cap))
        self.states = frozenset(self.order)
        self.initial = self.machine.initial_states()
        acts = [Wr(x, v) for x in self.globals for v in self.vals]
        acts += [Rd(x, register, v) for x in self.globals for v in self.vals]
        self.actions = tuple(sorted(acts, key=action_key)) + (FENCE,)
        self.seed = seed
        if seed is not None:
            # shuffled search order; verdicts must not depend on it
            rng = random.Random(seed)
            rng.shuffle(self.order)
            acts = list(self.actions)
            rng.shuffle(acts)
            self.actions = tuple(acts)
        self.sync = frozenset(sync) if sync is not None else frozenset(
            (w, r) for w in self.writes() for r in self.reads() if w.var == r.var and w.val == r.val)
        self.distinct_threads = frozenset(distinct_threads)
        self._rels: dict = {}
        self._beta: Rel | None = None

    # -- action subsets --------------------------------------------------

    def reads(self, x: str | None = None, v: int | None = None):
        return [a for a in self.actions if isinstance(a, Rd)
                and (x is None or a.var == x) and (v is None or a.val == v)]

    def writes(self, x: str | None = None):
        return [a for a in self.actions if isinstance(a, Wr) and (x is None or a.var == x)]

    def on_var(self, x: str):
        return [a for a in self.actions if var(a) == x]

    # -- pointwise images (restricted to U) --------------------------------

    def t_img(self, s, t, a) -> frozenset:
        return self.machine.image(s, t, a) & self.states

    def interf_img(self, s, t, a) -> frozenset:
        # T restricted to U, then flushes (which never leave U)
        if not isinstance(a, Wr):
            return frozenset([s])
        return self.machine.close(self.t_img(s, t, a))

    def x_t_img(self, s, t, a) -> frozenset:
        return self.machine.image(s, t, a)

    def x_interf_img(self, s, t, a) -> frozenset:
        return self.machine.interf_image(s, t, a)

    def beta_img(self, s) -> frozenset:
        return self.machine.flush_closure(s)

    def in_vmax(self, s, t, a) -> bool:
        return self.machine.in_vmax(s, t, a)

    # -- bulk relations --------------------------------------------------

    def T(self, t: int, a) -> Rel:
        key = ("T", t, a)
        if key not in self._rels:
            self._rels[key] = Rel.from_image(self.order, lambda s: self.t_img(s, t, a))
        return self._rels[key]

    def T_union(self, t: int, actions) -> Rel:
        out = Rel()
        for a in actions:
            out = out | self.T(t, a)
        return out

    def interf(self, t: int, a) -> Rel:
        key = ("I", t, a)
        if key not in self._rels:
            self._rels[key] = Rel.from_image(self.order, lambda s: self.interf_img(s, t, a))
        return self._rels[key]

    def XT(self, t: int, a) -> ImageRel:
        """Exact T(t, a); successors may leave the universe."""
        key = ("XT", t, a)
        if key not in self._rels:
            self._rels[key] = ImageRel(lambda s: self.x_t_img(s, t, a))
        return self._rels[key]

    def Xinterf(self, t: int, a) -> ImageRel:
        key = ("XI", t, a)
        if key not in self._rels:
            self._rels[key] = ImageRel(lambda s: self.x_interf_img(s, t, a))
        return self._rels[key]

    @property
    def Xbeta(self) -> ImageRel:
        if "XB" not in self._rels:
            self._rels["XB"] = ImageRel(self.machine.flush_closure)
        return self._rels["XB"]

    @property
    def beta(self) -> Rel:
        if self._beta is None:
            self._beta = Rel.from_image(self.order, self.beta_img)
        return self._beta

    def vmax(self, t: int, a) -> frozenset:
        key = ("V", t, a)
        if key not in self._rels:
            self._rels[key] = frozenset(s for s in self.order if self.in_vmax(s, t, a))
        return self._rels[key]

    def impossible(self, t: int, x: str, v: int) -> frozenset:
        return dis(self.T_union(t, self.reads(x, v)), self.states)

    def definite(self, t: int, x: str, v: int) -> frozenset:
        out = self.states
        for u in self.vals:
            if u != v:
                out = out & self.impossible(t, x, u)
        return out

    def max_view(self, t: int, x: str) -> frozenset:
        out = self.states
        for a in self.on_var(x):
            out = out & self.vmax(t, a)
        return out

    # -- reporting -------------------------------------------------------

    def signature(self) -> dict:
        return {"model": "ppso", "threads": len(self.threads), "globals": list(self.globals),
                "vals": list(self.vals), "pending_cap": self.cap, "states": len(self.states),
                "beta": "FL* (flush closure)", "relations": "restricted to the universe",
                "distinct_threads": sorted(self.distinct_threads),
                "sync": "all same-variable equal-value (write, read) pairs"
                        if self.sync == AxiomUniverse._default_sync(self) else "custom"}

    def _default_sync(self):
        return frozenset((w, r) for w in self.writes() for r in self.reads()
                         if w.var == r.var and w.val == r.val)

    def describe(self, s) -> str:
        return self.machine.describe(s)


def build_universe(threads: int = 2, globals_: Sequence[str] = ("x", "y"),
                   vals: Sequence[int] = (0, 1), pending_cap: int = 2, **kw) -> AxiomUniverse:
    return AxiomUniverse(threads, globals_, vals, pending_cap, **kw)


# ---------------------------------------------------------------------------
# Axiom instances

def _pairs(u, distinct: bool = False):
    return [(t, t2) for t in u.threads for t2 in u.threads if not (distinct and t == t2)]


def _different_vars(a, b) -> bool:
    """var(a) != var(b), read as: both defined and distinct (fence has no variable)."""
    return var(a) is not None and var(b) is not None and var(a) != var(b)


def _instances(name: str, u: AxiomUniverse) -> Iterator[dict]:
    A = u.actions
    if name in ("C1", "C3"):
        for t in u.threads:
            for a in A:
                yield {"t": t, "a": a}
    elif name in ("C2", "FNC"):
        for t, t2 in _pairs(u):
            for a in A:
                yield {"t": t, "t2": t2, "a": a}
    elif name == "C4":
        for t in u.threads:
            for a in A:
                for b in A:
                    yield {"t": t, "a": a, "b": b}
    elif name in ("SV1", "SV2"):
        for t, t2 in _pairs(u, name in u.distinct_threads):
            for a in A:
                for b in A:
                    if _different_vars(a, b):
                        yield {"t": t, "t2": t2, "a": a, "b": b}
    elif name == "RW1":
        for t, t2 in _pairs(u, name in u.distinct_threads):
            for x in u.globals:
                for ar in u.reads(x):
                    for aw in u.writes(x):
                        if ar.val != aw.val:
                            yield {"t": t, "t2": t2, "a_r": ar, "a_w": aw}
    elif name in ("RW2", "RW3"):
        for t, t2 in _pairs(u):
            for a in A:
                if var(a) is None:
                    continue
                for ar in u.reads(var(a)):
                    yield {"t": t, "t2": t2, "a": a, "a_r": ar}
    elif name in ("RW4", "RW6"):
        for t in u.threads:
            for x in u.globals:
                yield {"t": t, "x": x}
    elif name == "RW5":
        for t in u.threads:
            for aw in u.writes():
                yield {"t": t, "a_w": aw}
    elif name == "RW7":
        for t, t2 in _pairs(u):
            if t == t2:
                continue
            for x in u.globals:
                acts = u.on_var(x)
                for aw in u.writes(x):
                    for ar in u.reads(x, aw.val):
                        for a in acts:
                            yield {"t": t, "t2": t2, "a_w": aw, "a_r": ar, "a": a}
    elif name == "MP":
        for t, t2 in _pairs(u):
            if t == t2:
                continue
            for aw, ar in sorted(u.sync, key=lambda p: (action_key(p[0]), action_key(p[1]))):
                for b in A:
                    if _different_vars(b, aw):
                        yield {"t": t, "t2": t2, "a_w": aw, "a_r": ar, "b": b}
    else:
        raise KeyError(f"unknown axiom {name!r}; choose from {', '.join(AXIOMS)}")


# ---------------------------------------------------------------------------
# Bulk evaluation: returns (state, witness) of the least violation or None

def _first_outside(u, lhs: frozenset, rhs: frozenset):
    bad = lhs - rhs
    return min(bad) if bad else None


def _rel_violation(u, lhs: Rel, rhs: Rel):
    """Least source state with an lhs-successor missing from rhs."""
    for s in u.order:
        missing = lhs.image(s) - rhs.image(s)
        if missing:
            return s, [min(missing)]
    return None


def _wlp_violation(u, pre: frozenset, rel: Rel, post: frozenset):
    w = wlp(rel, post, u.states)
    s = _first_outside(u, pre, w)
    if s is None:
        return None
    return s, [min(rel.image(s) - post)]


def _bulk(name: str, u: AxiomUniverse, p: dict):
    U = u.states
    if name == "C1":
        s = _first_outside(u, u.initial & U, u.vmax(p["t"], p["a"]))
        return None if s is None else (s, [])
    if name == "C2":
        t, t2, a = p["t"], p["t2"], p["a"]
        T1, beta = u.T(t, a), u.Xbeta
        target = T1 if t == t2 else u.XT(t2, a).compose(beta)
        for s in sorted(u.vmax(t, a)):
            reach = target.image(s) if t != t2 else None
            for s1 in sorted(T1.image(s)):
                if t == t2:
                    continue  # tau = s1 itself
                if not (beta.image(s1) & reach):
                    return s, [s1]
        return None
    if name == "C3":
        t, a = p["t"], p["a"]
        return _rel_violation(u, u.T(t, a), u.Xbeta.compose(u.Xinterf(t, a)).compose(u.Xbeta))
    if name == "C4":
        t, a, b = p["t"], p["a"], p["b"]
        return _wlp_violation(u, u.vmax(t, a), u.interf(t, b), u.vmax(t, a))
    if name == "SV1":
        t, t2, a, b = p["t"], p["t2"], p["a"], p["b"]
        return _rel_violation(u, u.interf(t2, b).compose(u.T(t, a)),
                              u.XT(t, a).compose(u.Xinterf(t2, b)))
    if name == "SV2":
        t, t2, a, b = p["t"], p["t2"], p["a"], p["b"]
        return _wlp_violation(u, u.vmax(t, a), u.interf(t2, b), u.vmax(t, a))
    if name == "RW1":
        t, t2, ar, aw = p["t"], p["t2"], p["a_r"], p["a_w"]
        return _rel_violation(u, u.interf(t2, aw).compose(u.T(t, ar)),
                              u.XT(t, ar).compose(u.Xinterf(t2, aw)))
    if name == "RW2":
        t, t2, a, ar = p["t"], p["t2"], p["a"], p["a_r"]
        return _rel_violation(u, u.interf(t2, ar).compose(u.T(t, a)),
                              u.XT(t, a).compose(u.Xinterf(t2, ar)))
    if name == "RW3":
        t, t2, a, ar = p["t"], p["t2"], p["a"], p["a_r"]
        return _wlp_violation(u, u.vmax(t, a), u.interf(t2, ar), u.vmax(t, a))
    if name == "RW4":
        s = _first_outside(u, U, dom(u.T_union(p["t"], u.reads(p["x"])), U))
        return None if s is None else (s, [])
    if name == "RW5":
        t, aw = p["t"], p["a_w"]
        readable = dom(u.T_union(t, u.reads(aw.var, aw.val)), U)
        return _wlp_violation(u, U, u.T(t, aw), readable)
    if name == "RW6":
        t, x = p["t"], p["x"]
        known = frozenset().union(*(u.definite(t, x, v) for v in u.vals))
        s = _first_outside(u, u.max_view(t, x), known)
        return None if s is None else (s, [])
    if name == "RW7":
        t, t2, aw, ar, a = p["t"], p["t2"], p["a_w"], p["a_r"], p["a"]
        pre = u.vmax(t, aw) & dis(u.T(t2, ar), U)
        return _nested_violation(u, pre, u.T(t, aw), u.T(t2, ar), u.vmax(t2, a))
    if name == "FNC":
        t, t2, a = p["t"], p["t2"], p["a"]
        return _wlp_violation(u, u.vmax(t, a), u.T(t, FENCE), u.vmax(t2, a))
    if name == "MP":
        t, t2, aw, ar, b = p["t"], p["t2"], p["a_w"], p["a_r"], p["b"]
        inner = wlp(u.T(t2, ar), u.vmax(t2, b), U)
        pre = u.vmax(t, b) & inner
        return _nested_violation(u, pre, u.T(t, aw), u.T(t2, ar), u.vmax(t2, b))
    raise KeyError(name)


def _nested_violation(u, pre, R1: Rel, R2: Rel, post):
    """Violation of pre <= wlp(R1, wlp(R2, post)), with a two-step witness."""
    inner = wlp(R2, post, u.states)
    outer = wlp(R1, inner, u.states)
    s = _first_outside(u, pre, outer)
    if s is None:
        return None
    s1 = min(R1.image(s) - inner)
    s2 = min(R2.image(s1) - post)
    return s, [s1, s2]


# ---------------------------------------------------------------------------
# Pointwise interpreter, used for replay

def holds_at(name: str, u: AxiomUniverse, p: dict, s, exact: bool = False) -> bool:
    """Evaluate one axiom instance at one state from machine images only.

    With `exact`, universally quantified successors are not restricted to
    the universe either, so the instance is judged on the unbounded machine.
    """
    T = u.x_t_img if exact else u.t_img
    I = u.x_interf_img if exact else u.interf_img
    vm = u.in_vmax

    def wlp_at(step: Callable, state, post: Callable) -> bool:
        return all(post(n) for n in step(state))

    if name == "C1":
        return s not in u.initial or vm(s, p["t"], p["a"])
    if name == "C2":
        t, t2, a = p["t"], p["t2"], p["a"]
        if not vm(s, t, a):
            return True
        via_t2 = set()
        for m in u.x_t_img(s, t2, a):
            via_t2 |= u.beta_img(m)
        return all(u.beta_img(s1) & via_t2 for s1 in T(s, t, a))
    if name == "C3":
        t, a = p["t"], p["a"]
        over = set()
        for m in u.beta_img(s):
            for m2 in u.x_interf_img(m, t, a):
                over |= u.beta_img(m2)
        return T(s, t, a) <= over
    if name in ("C4", "SV2", "RW3"):
        t, a = p["t"], p["a"]
        other = p.get("b", p.get("a_r"))
        tt = p.get("t2", t)
        return not vm(s, t, a) or wlp_at(lambda x: I(x, tt, other), s, lambda n: vm(n, t, a))
    if name in ("SV1", "RW1", "RW2"):
        t, t2 = p["t"], p["t2"]
        a = p.get("a", p.get("a_r"))
        b = p["b"] if name == "SV1" else (p["a_w"] if name == "RW1" else p["a_r"])
        if name == "RW1":
            a = p["a_r"]
        lhs = {n2 for n in I(s, t2, b) for n2 in T(n, t, a)}
        rhs = {n2 for n in u.x_t_img(s, t, a) for n2 in u.x_interf_img(n, t2, b)}
        return lhs <= rhs
    if name == "RW4":
        return any(T(s, p["t"], a) for a in u.reads(p["x"]))
    if name == "RW5":
        t, aw = p["t"], p["a_w"]
        return all(any(T(n, t, a) for a in u.reads(aw.var, aw.val)) for n in T(s, t, aw))
    if name == "RW6":
        t, x = p["t"], p["x"]
        if not all(vm(s, t, a) for a in u.on_var(x)):
            return True
        readable = {v for v in u.vals if any(T(s, t, a) for a in u.reads(x, v))}
        return len(readable) <= 1
    if name == "RW7":
        t, t2, aw, ar, a = p["t"], p["t2"], p["a_w"], p["a_r"], p["a"]
        if not (vm(s, t, aw) and not T(s, t2, ar)):
            return True
        return all(vm(n2, t2, a) for n in T(s, t, aw) for n2 in T(n, t2, ar))
    if name == "FNC":
        t, t2, a = p["t"], p["t2"], p["a"]
        return not vm(s, t, a) or all(vm(n, t2, a) for n in T(s, t, FENCE))
    if name == "MP":
        t, t2, aw, ar, b = p["t"], p["t2"], p["a_w"], p["a_r"], p["b"]
        if not (vm(s, t, b) and all(vm(n, t2, b) for n in T(s, t2, ar))):
            return True
        return all(vm(n2, t2, b) for n in T(s, t, aw) for n2 in T(n, t2, ar))
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Reports

@dataclass
class AxiomReport:
    axiom: str
    level: str
    verdict: str  # "pass" or "fail"
    instances: int = 0
    seconds: float = 0.0
    counterexample: dict | None = None
    universe: dict = field(default_factory=dict)
    raw: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self, timing: bool = False) -> dict:
        d = {"axiom": self.axiom, "level": self.level, "verdict": self.verdict,
             "instances": self.instances, "universe": self.universe}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if timing:
            d["seconds"] = round(self.seconds, 4)
        return d


def _param_json(p: dict) -> dict:
    return {k: (str(v) if not isinstance(v, (int, str)) else v) for k, v in p.items()}


def check_axiom(name: str, u: AxiomUniverse) -> AxiomReport:
    if name not in LEVELS:
        raise KeyError(f"unknown axiom {name!r}; choose from {', '.join(AXIOMS)}")
    start = time.perf_counter()
    count = 0
    for p in _instances(name, u):
        count += 1
        hit = _bulk(name, u, p)
        if hit is not None:
            s, witness = hit
            cx = {"params": _param_json(p), "state": u.describe(s),
                  "witness": [u.describe(w) for w in witness],
                  "state_json": u.machine.to_json(s)}
            return AxiomReport(name, LEVELS[name], "fail", count, time.perf_counter() - start,
                               cx, u.signature(), (p, s, tuple(witness)))
    return AxiomReport(name, LEVELS[name], "pass", count, time.perf_counter() - start,
                       None, u.signature())


def replay(report: AxiomReport, u: AxiomUniverse) -> bool:
    """True iff a failing report's counterexample falsifies the axiom pointwise."""
    if report.raw is None:
        return False
    p, s, _ = report.raw
    return s in u.states and not holds_at(report.axiom, u, p, s)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PSO_LITMUS_THREADS", "1")))
    except ValueError:
        return 1


def check_all(u: AxiomUniverse, names: Sequence[str] = AXIOMS,
              workers: int | None = None) -> list[AxiomReport]:
    """Run every axiom; results follow hierarchy order whatever the parallelism."""
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [check_axiom(n, u) for n in names]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda n: check_axiom(n, u), names))


def mp_falsifiable(u: AxiomUniverse) -> bool:
    """Whether the universe is big enough to contain an MP counterexample."""
    return len(u.threads) >= 2 and len(u.globals) >= 2 and len(u.vals) >= 2 and u.cap >= 2


def expected_profile(u: AxiomUniverse, reports: Sequence[AxiomReport]) -> bool:
    """Everything passes except MP, which fails whenever it can."""
    by = {r.axiom: r for r in reports}
    others = all(r.passed for n, r in by.items() if n != "MP")
    if "MP" not in by:
        return others
    return others and (by["MP"].passed != mp_falsifiable(u))


def report_json(u: AxiomUniverse, reports: Sequence[AxiomReport], timing: bool = False) -> dict:
    levels: dict[str, list[str]] = {}
    for r in reports:
        levels.setdefault(r.level, []).append(r.axiom)
    return {"schema": 1, "universe": u.signature(), "levels": levels,
            # the universe is recorded once at top level
            "results": [{k: v for k, v in r.to_json(timing).items() if k != "universe"}
                        for r in reports],
            "expected_profile": expected_profile(u, reports),
            "mp_falsifiable": mp_falsifiable(u)}


# ---------------------------------------------------------------------------
# The concrete message-passing construction

def mp_construction(u: AxiomUniverse) -> dict:
    """Re-check the textbook MP counterexample inside universe `u`.

    Thread 1 has written x := 1 (one pending entry); it then writes
    y := 1 with a timestamp below x's, thread 2 reads y = 1 after y's
    flush and is not view maximal on x.
    """
    m = u.machine
    x, y = u.globals[0], u.globals[1]
    xi, yi = m.index(x), m.index(y)
    aw, ar, b = Wr(y, 1), Rd(y, REGISTER, 1), Wr(x, 1)
    sigma = m.initial().with_buffer(1, xi, ((1, 1),))
    sigma1 = sigma.map_ranks(lambda q: q + 1).with_buffer(1, yi, ((1, 1),))
    sigma2 = m.flush(sigma1, 1, y)
    p = {"t": 1, "t2": 2, "a_w": aw, "a_r": ar, "b": b}
    return {
        "sigma_in_vmax_1_b": m.in_vmax(sigma, 1, b),
        "read_disabled": not u.t_img(sigma, 2, ar),
        "step_write": sigma1 in u.t_img(sigma, 1, aw),
        "step_read": sigma2 in u.t_img(sigma1, 2, ar),
        "final_not_vmax_2_b": not m.in_vmax(sigma2, 2, b),
        "violates": not holds_at("MP", u, p, sigma),
        "states": [m.describe(sigma), m.describe(sigma1), m.describe(sigma2)],
    }


def matches_mp_shape(u: AxiomUniverse, report: AxiomReport) -> bool:
    """Does a failing MP report have the textbook shape, up to renaming?

    The intermediate state must hold exactly two pending entries, both in
    the writer's buffers, with the entry on var(b) stamped above the entry
    on var(a_w).
    """
    if report.axiom != "MP" or report.raw is None:
        return False
    p, _, witness = report.raw
    if not witness:
        return False
    mid: PpsoState = witness[0]
    t, bx, wx = p["t"], var(p["b"]), p["a_w"].var
    if bx is None or mid.pending() != 2:
        return False
    m = u.machine
    own = {x: mid.buffer(t, m.index(x)) for x in u.globals}
    if sum(len(b) for b in own.values()) != 2:
        return False
    if len(own[bx]) != 1 or len(own[wx]) != 1:
        return False
    return own[bx][0][1] > own[wx][0][1]


# ---------------------------------------------------------------------------
# Register substitution rule

def random_register_pred(rng: random.Random, regs: Sequence[str], vals: Sequence[int],
                         depth: int = 2) -> BExpr:
    if depth == 0 or rng.random() < 0.4:
        op = rng.choice(("=", "!="))
        return Cmp(op, Reg(rng.choice(regs)), Lit(rng.choice(vals)))
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return Not(random_register_pred(rng, regs, vals, depth - 1))
    cls = And if kind == "and" else Or
    return cls(random_register_pred(rng, regs, vals, depth - 1),
               random_register_pred(rng, regs, vals, depth - 1))


def check_eq1(u: AxiomUniverse, registers: Sequence[str] = ("r1", "r2"), samples: int = 50,
              seed: int = 0, preds: Sequence[BExpr] | None = None) -> AxiomReport:
    """e[r:=v] is contained in wlp(T(t, rd(x, r, v)), e) on (registers, memory) states.

    The read relation on such states updates register r and moves memory
    by T(t, rd(x, r, v)).
    """
    start = time.perf_counter()
    regs = tuple(registers)
    lsts = [(LocalState(zip(regs, vs)),) for vs in itertools.product(u.vals, repeat=len(regs))]
    states = [LState(l, s) for l in lsts for s in u.order]
    rng = random.Random(seed)
    preds = list(preds) if preds is not None else [
        random_register_pred(rng, regs, u.vals) for _ in range(samples)]
    count = 0
    for r in regs:
        for t in u.threads:
            for x in u.globals:
                for v in u.vals:
                    a = Rd(x, r, v)
                    # successor register maps of each state; memory is irrelevant to e
                    steps = {}
                    for st in states:
                        if u.t_img(st.sigma, t, a):
                            steps.setdefault(st.lst[0], []).append(st)
                    for e in preds:
                        count += 1
                        sub = substitute(e, r, v)
                        for ls, sts in steps.items():
                            if eval_expr(sub, ls) and not eval_expr(e, ls.set(r, v)):
                                cx = {"expr": format_expr(e), "reg": r, "thread": t,
                                      "action": str(a),
                                      "state": repr(ls) + " " + u.describe(sts[0].sigma)}
                                return AxiomReport("Eq1", "Core", "fail", count,
                                                   time.perf_counter() - start, cx,
                                                   u.signature())
    return AxiomReport("Eq1", "Core", "pass", count, time.perf_counter() - start, None,
                       u.signature())
