"""Finite predicate-transformer engine and view-based assertions.

Predicates are finite sets of states and relations are finite sets of pairs.
``wlp(R, P, U)`` is the set of states of ``U`` all of whose ``R``-successors
lie in ``P``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from . import lang
from .lang import (FENCE, BExpr, ParseError, Rd, Token, TokenStream, Wr, eval_expr,
                   parse_bexpr, parse_bool_atom, registers_of, tokenize)

State = Hashable
StateSet = frozenset


@dataclass(frozen=True, order=True)
class LState:
    """Register valuations of every thread paired with a memory state."""

    lst: tuple
    sigma: object


# ---------------------------------------------------------------------------
# Relations

class Rel:
    """Finite binary relation, stored as a successor map."""

    __slots__ = ("_succ",)

    def __init__(self, succ: Mapping[State, Iterable[State]] | None = None):
        self._succ: dict[State, frozenset] = {}
        for s, targets in (succ or {}).items():
            targets = frozenset(targets)
            if targets:
                self._succ[s] = targets

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[State, State]]) -> "Rel":
        succ: dict[State, set] = {}
        for a, b in pairs:
            succ.setdefault(a, set()).add(b)
        return cls(succ)

    @classmethod
    def from_image(cls, domain: Iterable[State], image: Callable[[State], Iterable[State]]):
        return cls({s: image(s) for s in domain})

    @classmethod
    def identity(cls, universe: Iterable[State]) -> "Rel":
        return cls({s: (s,) for s in universe})

    def image(self, s: State) -> frozenset:
        return self._succ.get(s, frozenset())

    def image_of(self, states: Iterable[State]) -> frozenset:
        """Relational image R[S]."""
        out: set = set()
        for s in states:
            out |= self.image(s)
        return frozenset(out)

    def domain(self) -> frozenset:
        return frozenset(self._succ)

    def range(self) -> frozenset:
        return self.image_of(self._succ)

    def pairs(self) -> Iterator[tuple[State, State]]:
        for s, targets in self._succ.items():
            for t in targets:
                yield s, t

    def __iter__(self):
        return self.pairs()

    def __len__(self):
        return sum(len(t) for t in self._succ.values())

    def __contains__(self, pair) -> bool:
        a, b = pair
        return b in self.image(a)

    def __eq__(self, other):
        if not isinstance(other, Rel):
            return NotImplemented
        return self._succ == other._succ

    def __le__(self, other: "Rel") -> bool:
        return all(t <= other.image(s) for s, t in self._succ.items())

    def __or__(self, other: "Rel") -> "Rel":
        keys = set(self._succ) | set(other._succ)
        return Rel({k: self.image(k) | other.image(k) for k in keys})

    def __and__(self, other: "Rel") -> "Rel":
        return Rel({k: t & other.image(k) for k, t in self._succ.items()})

    def __repr__(self):
        return f"Rel({len(self)} pairs over {len(self._succ)} sources)"

    def compose(self, other: "Rel") -> "Rel":
        """Forward composition ``self ; other``."""
        return Rel({s: other.image_of(t) for s, t in self._succ.items()})

    def converse(self) -> "Rel":
        return Rel.from_pairs((b, a) for a, b in self.pairs())

    def restrict(self, universe: frozenset) -> "Rel":
        """Keep only pairs with both components in `universe`."""
        return Rel({s: t & universe for s, t in self._succ.items() if s in universe})

    def restrict_domain(self, states: frozenset) -> "Rel":
        return Rel({s: t for s, t in self._succ.items() if s in states})

    def first_difference(self, other: "Rel", key=None):
        """Least pair of ``self`` missing from ``other`` (None if included)."""
        missing = [(a, b) for a, b in self.pairs() if b not in other.image(a)]
        if not missing:
            return None
        return min(missing, key=key) if key else min(missing, key=repr)


class ImageRel(Rel):
    """Relation given by a successor function over an unbounded state space.

    Only images can be asked for; composition stays lazy.
    """

    __slots__ = ("_fn", "_memo")

    def __init__(self, fn: Callable[[State], Iterable[State]]):
        super().__init__()
        self._fn = fn
        self._memo: dict = {}

    def image(self, s: State) -> frozenset:
        hit = self._memo.get(s)
        if hit is None:
            hit = self._memo[s] = frozenset(self._fn(s))
        return hit

    def compose(self, other: Rel) -> "ImageRel":
        return ImageRel(lambda s: other.image_of(self.image(s)))

    def pairs(self):
        raise TypeError("an ImageRel has no finite pair set")

    def __repr__(self):
        return "ImageRel(...)"


def compose(*rels: Rel) -> Rel:
    return reduce(Rel.compose, rels)


def union(rels: Iterable[Rel]) -> Rel:
    return reduce(Rel.__or__, rels, Rel())


def reflexive_transitive_closure(step: Callable[[State], Iterable[State]],
                                 universe: Iterable[State]) -> Rel:
    """``step*`` over `universe`, which is assumed closed under `step`."""
    succ = {}
    for s in universe:
        seen = {s}
        todo = [s]
        while todo:
            for n in step(todo.pop()):
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
        succ[s] = seen
    return Rel(succ)


# ---------------------------------------------------------------------------
# wlp

def wlp(rel: Rel, pred: Iterable[State], universe: Iterable[State]) -> StateSet:
    """Weakest liberal precondition of `pred` under `rel`, within `universe`."""
    pred = pred if isinstance(pred, (set, frozenset)) else frozenset(pred)
    return frozenset(s for s in universe if rel.image(s) <= pred)


def dis(rel: Rel, universe: Iterable[State]) -> StateSet:
    """States of `universe` where `rel` has no successor."""
    return wlp(rel, frozenset(), universe)


def dom(rel: Rel, universe: Iterable[State]) -> StateSet:
    return frozenset(s for s in universe if rel.image(s))


# ---------------------------------------------------------------------------
# wlp law checks on random finite relations

WLP_LAWS = ("non-aborting", "anti-monotonicity", "composition", "relation-application",
            "conjunctivity", "disjunctivity")


@dataclass
class LawReport:
    law: str
    holds: bool
    samples: int
    counterexample: dict | None = None


def _random_rel(rng: random.Random, universe: Sequence[int], density: float) -> Rel:
    return Rel.from_pairs((a, b) for a in universe for b in universe if rng.random() < density)


def _random_set(rng: random.Random, universe: Sequence[int]) -> frozenset:
    return frozenset(s for s in universe if rng.random() < 0.5)


def _subrel(rng: random.Random, rel: Rel) -> Rel:
    return Rel.from_pairs(p for p in rel.pairs() if rng.random() < 0.6)


def check_wlp_laws(samples: int = 1000, n_states: int = 6, seed: int = 0) -> list[LawReport]:
    """Check the six standard wlp laws on randomly sampled relations/predicates.

    Equalities are checked as set equality and inclusions as subset.
    """
    rng = random.Random(seed)
    U = tuple(range(n_states))
    reports = {law: LawReport(law, True, 0) for law in WLP_LAWS}

    def record(law, ok, **witness):
        rep = reports[law]
        rep.samples += 1
        if not ok and rep.holds:
            rep.holds = False
            rep.counterexample = {k: _jsonable(v) for k, v in witness.items()}

    for _ in range(samples):
        density = rng.choice((0.1, 0.25, 0.5))
        R = _random_rel(rng, U, density)
        R2 = _random_rel(rng, U, density)
        P, Q = _random_set(rng, U), _random_set(rng, U)
        universe = frozenset(U)
        record("non-aborting", wlp(R, universe, U) == universe, R=R)
        Rsub = _subrel(rng, R)
        Psup = P | _random_set(rng, U)
        record("anti-monotonicity", wlp(R, P, U) <= wlp(Rsub, Psup, U),
               R=R, R_sub=Rsub, P=P, P_sup=Psup)
        record("composition", wlp(R, wlp(R2, P, U), U) == wlp(R.compose(R2), P, U),
               R=R, R2=R2, P=P)
        record("relation-application", R.image_of(wlp(R, P, U)) <= P, R=R, P=P)
        record("conjunctivity", wlp(R, P, U) & wlp(R, Q, U) == wlp(R, P & Q, U),
               R=R, P=P, Q=Q)
        record("disjunctivity", wlp(R, P, U) | wlp(R, Q, U) <= wlp(R, P | Q, U),
               R=R, P=P, Q=Q)
    return [reports[law] for law in WLP_LAWS]


def disjunctivity_reverse_witness(max_states: int = 3):
    """Smallest (R, P, Q) with wlp(R, P|Q) not contained in wlp(R,P) | wlp(R,Q)."""
    for n in range(1, max_states + 1):
        U = tuple(range(n))
        all_pairs = [(a, b) for a in U for b in U]
        subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(U, k)]
        for k in range(len(all_pairs) + 1):
            for pairs in itertools.combinations(all_pairs, k):
                R = Rel.from_pairs(pairs)
                for P in subsets:
                    for Q in subsets:
                        lhs = wlp(R, P | Q, U)
                        rhs = wlp(R, P, U) | wlp(R, Q, U)
                        if not lhs <= rhs:
                            return {"universe": U, "R": sorted(R.pairs()),
                                    "P": sorted(P), "Q": sorted(Q),
                                    "state": min(lhs - rhs)}
    return None


def _jsonable(v):
    if isinstance(v, Rel):
        return sorted(v.pairs())
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    return v


# ---------------------------------------------------------------------------
# beta candidate: flush sequences

def beta_closure(universe: Iterable[State], machine) -> Rel:
    """Reflexive-transitive closure of single flush steps, restricted to `universe`."""
    universe = frozenset(universe)
    return reflexive_transitive_closure(
        lambda s: (n for n in machine.flush_successors(s) if n in universe), universe)


def check_beta_stable(pred: Iterable[State], beta: Rel,
                      universe: Iterable[State] | None = None) -> bool:
    """P is beta-stable iff P is contained in wlp(beta, P)."""
    pred = frozenset(pred)
    return pred <= wlp(beta, pred, pred if universe is None else universe)


# ---------------------------------------------------------------------------
# Assertions

@dataclass(frozen=True)
class Impossible:
    """[x != v]@t : thread t cannot read v from x, now or after any flushes."""
    var: str
    val: int
    tid: int


@dataclass(frozen=True)
class Definite:
    """[x == v]@t : every value other than v is impossible for t."""
    var: str
    val: int
    tid: int


@dataclass(frozen=True)
class MaxView:
    """max(x)@t : thread t is view maximal on x."""
    var: str
    tid: int


@dataclass(frozen=True)
class Synced:
    """[x = v]@t : definite value v together with a maximal view."""
    var: str
    val: int
    tid: int


@dataclass(frozen=True)
class CondObs:
    """<y = u>[x = v]@t : if t reads u from y, then [x = v]@t holds afterwards."""
    obs_var: str
    obs_val: int
    var: str
    val: int
    tid: int


@dataclass(frozen=True)
class RegPred:
    expr: BExpr


@dataclass(frozen=True)
class AAnd:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class AOr:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class ANot:
    operand: "Assertion"


@dataclass(frozen=True)
class Const:
    value: bool


Assertion = Union[Impossible, Definite, MaxView, Synced, CondObs, RegPred, AAnd, AOr, ANot, Const]
TRUE = Const(True)
FALSE = Const(False)

_VIEW_ATOMS = (Impossible, Definite, MaxView, Synced, CondObs)


def conj(*parts: Assertion) -> Assertion:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    return reduce(AAnd, parts)


def format_assertion(a: Assertion, prec: int = 0) -> str:
    if isinstance(a, Impossible):
        return f"[{a.var} != {a.val}]@{a.tid}"
    if isinstance(a, Definite):
        return f"[{a.var} == {a.val}]@{a.tid}"
    if isinstance(a, MaxView):
        return f"max({a.var})@{a.tid}"
    if isinstance(a, Synced):
        return f"[{a.var} = {a.val}]@{a.tid}"
    if isinstance(a, CondObs):
        return f"<{a.obs_var} = {a.obs_val}>[{a.var} = {a.val}]@{a.tid}"
    if isinstance(a, RegPred):
        s = lang.format_expr(a.expr)
        return f"({s})" if prec and isinstance(a.expr, (lang.And, lang.Or, lang.Implies)) else s
    if isinstance(a, Const):
        return "true" if a.value else "false"
    if isinstance(a, ANot):
        return f"!{format_assertion(a.operand, 3)}"
    p, sym = (2, "&") if isinstance(a, AAnd) else (1, "|")
    s = f"{format_assertion(a.left, p)} {sym} {format_assertion(a.right, p + 1)}"
    return f"({s})" if p < prec else s


class _AssertionParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    def parse(self) -> Assertion:
        a = self._or()
        if self.ts.peek().kind != "eof":
            raise self.ts.error(f"unexpected {self.ts.peek().text!r} in assertion")
        return a

    def _or(self):
        left = self._and()
        while self.ts.at("|", "or"):
            self.ts.next()
            left = AOr(left, self._and())
        return left

    def _and(self):
        left = self._not()
        while self.ts.at("&", "and"):
            self.ts.next()
            left = AAnd(left, self._not())
        return left

    def _not(self):
        if self.ts.at("!", "not"):
            self.ts.next()
            return ANot(self._not())
        return self._atom()

    def _tid(self) -> int:
        self.ts.expect("@")
        return int(self.ts.expect_kind("int", "thread id").text)

    def _int(self) -> int:
        neg = self.ts.accept("-") is not None
        v = int(self.ts.expect_kind("int", "value").text)
        return -v if neg else v

    def _bracket(self):
        self.ts.expect("[")
        x = self.ts.expect_kind("ident", "global variable").text
        op = self.ts.next()
        if op.text not in ("!=", "==", "="):
            raise ParseError(f"expected '!=', '==' or '=', found {op.text!r}", op.line, op.col)
        v = self._int()
        self.ts.expect("]")
        return x, op.text, v

    def _atom(self):
        ts = self.ts
        if ts.at("["):
            x, op, v = self._bracket()
            t = self._tid()
            return {"!=": Impossible, "==": Definite, "=": Synced}[op](x, v, t)
        if ts.at("<"):
            ts.next()
            y = ts.expect_kind("ident", "global variable").text
            ts.expect("=")
            u = self._int()
            ts.expect(">")
            x, op, v = self._bracket()
            if op != "=":
                raise ts.error("conditional observation needs a synced value [x = v]")
            return CondObs(y, u, x, v, self._tid())
        if ts.at("max"):
            ts.next()
            ts.expect("(")
            x = ts.expect_kind("ident", "global variable").text
            ts.expect(")")
            return MaxView(x, self._tid())
        if ts.accept("true"):
            return TRUE
        if ts.accept("false"):
            return FALSE
        if ts.at("("):
            save = ts.pos
            ts.next()
            try:
                inner = self._or()
                ts.expect(")")
                if not ts.at("=", "==", "!=", "<", "<=", ">", ">=", "in", "+", "-", "*"):
                    return inner
            except ParseError:
                pass
            ts.pos = save
        return RegPred(parse_bool_atom(ts))


def parse_assertion(text_or_tokens, line: int = 1, col: int = 1) -> Assertion:
    """Parse assertion syntax: ``[x != v]@t``, ``[x == v]@t``, ``max(x)@t``,
    ``[x = v]@t``, ``<y = u>[x = v]@t``, register predicates, ``&``, ``|``,
    ``!``, ``true``/``false``."""
    if isinstance(text_or_tokens, str):
        tokens = tokenize(text_or_tokens, line, col)
    else:
        tokens = list(text_or_tokens)
    return _AssertionParser(TokenStream(tokens)).parse()


def assertion_atoms(a: Assertion) -> Iterator[Assertion]:
    if isinstance(a, (AAnd, AOr)):
        yield from assertion_atoms(a.left)
        yield from assertion_atoms(a.right)
    elif isinstance(a, ANot):
        yield from assertion_atoms(a.operand)
    else:
        yield a


def check_assertion_signature(a: Assertion, globals_, n_threads: int, registers) -> None:
    for atom in assertion_atoms(a):
        if isinstance(atom, _VIEW_ATOMS):
            names = [atom.var] + ([atom.obs_var] if isinstance(atom, CondObs) else [])
            for x in names:
                if x not in globals_:
                    raise ParseError(f"unknown global {x!r} in assertion")
            if not 1 <= atom.tid <= n_threads:
                raise ParseError(f"unknown thread {atom.tid} in assertion")
        elif isinstance(atom, RegPred):
            for r in registers_of(atom.expr):
                if r not in registers:
                    raise ParseError(f"unknown register {r!r} in assertion")


class UndefinedView(Exception):
    """Raised when a view-maximality assertion is evaluated without vmax."""


class AssertionEvaluator:
    """Evaluates assertions on memory states or on (lst, sigma) states.

    Membership is computed from the machine's exact successor images, so
    nested wlp's are exact even where successors leave the ambient universe.
    States with ``sigma``/``lst`` attributes are projected: view atoms read
    ``sigma``, register predicates read ``lst``.
    """

    def __init__(self, machine, vals: Sequence[int]):
        self.machine = machine
        self.vals = tuple(vals)
        self._cache: dict = {}

    def holds(self, a: Assertion, state) -> bool:
        key = (a, state)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._holds(a, state)
        return hit

    def _holds(self, a, state) -> bool:
        sigma = getattr(state, "sigma", state)
        if isinstance(a, Const):
            return a.value
        if isinstance(a, AAnd):
            return self.holds(a.left, state) and self.holds(a.right, state)
        if isinstance(a, AOr):
            return self.holds(a.left, state) or self.holds(a.right, state)
        if isinstance(a, ANot):
            return not self.holds(a.operand, state)
        if isinstance(a, RegPred):
            lst = getattr(state, "lst", None)
            if lst is None:
                raise TypeError("register predicate evaluated on a bare memory state")
            env = {}
            for ls in lst:
                env.update(ls)
            return bool(eval_expr(a.expr, env))
        if isinstance(a, Impossible):
            return not self.machine.readable(sigma, a.tid, a.var, a.val)
        if isinstance(a, Definite):
            return all(self.holds(Impossible(a.var, u, a.tid), sigma)
                       for u in self.vals if u != a.val)
        if isinstance(a, MaxView):
            vmax = getattr(self.machine, "max_view", None)
            if vmax is None:
                raise UndefinedView(f"view maximality is undefined for {type(self.machine).__name__}")
            return vmax(sigma, a.tid, a.var)
        if isinstance(a, Synced):
            return (self.holds(Definite(a.var, a.val, a.tid), sigma)
                    and self.holds(MaxView(a.var, a.tid), sigma))
        if isinstance(a, CondObs):
            target = Synced(a.var, a.val, a.tid)
            read = Rd(a.obs_var, "_", a.obs_val)
            return all(self.holds(target, s2) for s2 in self.machine.image(sigma, a.tid, read))
        raise TypeError(f"not an assertion: {a!r}")

    def eval(self, a: Assertion, universe: Iterable) -> StateSet:
        return frozenset(s for s in universe if self.holds(a, s))


def eval_assertion(a: Assertion, universe: Iterable, machine, vals: Sequence[int]) -> StateSet:
    return AssertionEvaluator(machine, vals).eval(a, universe)


def assertion_instances(globals_, vals, n_threads) -> list[Assertion]:
    """Every view assertion over a signature, CondObs included."""
    out: list[Assertion] = []
    for t in range(1, n_threads + 1):
        for x in globals_:
            out.append(MaxView(x, t))
            for v in vals:
                out += [Impossible(x, v, t), Definite(x, v, t), Synced(x, v, t)]
                for y in globals_:
                    for u in vals:
                        out.append(CondObs(y, u, x, v, t))
    return out


# ---------------------------------------------------------------------------
# Lemmas relating beta-stability and per-action stability

@dataclass
class LemmaReport:
    lemma: str
    holds: bool
    checked: int
    counterexample: dict | None = None


def check_stability_lemmas(universe, samples: int = 200, seed: int = 0,
                           preds: Sequence[frozenset] | None = None) -> list[LemmaReport]:
    """Check, on beta-stable predicates of a view universe, that

    * interference stability implies transition stability (any action),
    * beta-stability implies fence stability,
    * beta-stability implies read stability.

    `universe` provides ``states``, ``threads``, ``actions``, ``beta``,
    ``T(t, a)`` and ``interf(t, a)``.
    """
    rng = random.Random(seed)
    states = sorted(universe.states)
    stable: list[frozenset] = list(preds or [])
    stable += [frozenset(), frozenset(states)]
    beta = universe.beta
    for _ in range(samples):
        seed_set = [s for s in states if rng.random() < rng.choice((0.02, 0.1, 0.3))]
        # downward closure under beta gives a beta-stable predicate
        stable.append(beta.image_of(seed_set))
    stable = [p for p in dict.fromkeys(stable) if check_beta_stable(p, beta, universe.states)]

    reports = {k: LemmaReport(k, True, 0) for k in ("interf-implies-T", "fence", "read")}

    def note(name, ok, **cx):
        rep = reports[name]
        rep.checked += 1
        if not ok and rep.holds:
            rep.holds, rep.counterexample = False, cx

    U = universe.states
    for P in stable:
        for t in universe.threads:
            for a in universe.actions:
                T = universe.T(t, a)
                t_stable = P <= wlp(T, P, U)
                if P <= wlp(universe.interf(t, a), P, U):
                    note("interf-implies-T", t_stable, thread=t, action=str(a), size=len(P))
                if a == FENCE:
                    note("fence", t_stable, thread=t, size=len(P))
                if isinstance(a, Rd):
                    note("read", t_stable, thread=t, action=str(a), size=len(P))
    return list(reports.values())
