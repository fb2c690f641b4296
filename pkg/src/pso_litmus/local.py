"""Memory-model independent step relation of a single thread, and its lifting."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Iterable, NamedTuple, Sequence

from .lang import (FENCE, SKIP, TAU, Assign, Command, EvalError, ExtAction, Fnc, If, Lit,
                   LocalAssign, Rd, Read, Seq, Skip, While, Wr, Write, eval_expr)


class LocalState(Mapping):
    """Immutable register valuation of one thread."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Iterable[tuple[str, int]] | Mapping[str, int] = ()):
        if isinstance(items, Mapping):
            items = items.items()
        self._items = tuple(sorted(items))
        self._hash = hash(self._items)

    @classmethod
    def zero(cls, registers: Iterable[str]) -> "LocalState":
        return cls((r, 0) for r in registers)

    def __getitem__(self, reg):
        for r, v in self._items:
            if r == reg:
                return v
        raise KeyError(reg)

    def __iter__(self):
        return (r for r, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, LocalState):
            return self._items == other._items
        return NotImplemented

    def __lt__(self, other):
        return self._items < other._items

    def set(self, reg: str, value: int) -> "LocalState":
        d = dict(self._items)
        d[reg] = value
        return LocalState(d)

    def __repr__(self):
        return "{" + ", ".join(f"{r}={v}" for r, v in self._items) + "}"


class ThreadStep(NamedTuple):
    label: ExtAction
    next: Command
    next_ls: LocalState


def _checked(value, vals):
    if value not in vals:
        raise EvalError(f"value {value} leaves the declared domain {tuple(vals)}")
    return value


def local_steps(c: Command, ls: LocalState, vals: Sequence[int]) -> frozenset[ThreadStep]:
    """All steps of command `c` in local state `ls`.

    Reads branch over every value of the domain; the memory model prunes them
    later.  ``skip`` has no steps.
    """
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, Fnc):
        return frozenset([ThreadStep(FENCE, SKIP, ls)])
    if isinstance(c, Assign):
        v = _checked(eval_expr(c.expr, ls), vals)
        label = LocalAssign(c.reg, v) if isinstance(c.expr, Lit) else TAU
        return frozenset([ThreadStep(label, SKIP, ls.set(c.reg, v))])
    if isinstance(c, Read):
        return frozenset(ThreadStep(Rd(c.var, c.reg, v), SKIP, ls.set(c.reg, v)) for v in vals)
    if isinstance(c, Write):
        v = _checked(eval_expr(c.expr, ls), vals)
        return frozenset([ThreadStep(Wr(c.var, v), SKIP, ls)])
    if isinstance(c, Seq):
        if isinstance(c.first, Skip):
            return frozenset([ThreadStep(TAU, c.second, ls)])
        return frozenset(ThreadStep(s.label, Seq(s.next, c.second), s.next_ls)
                         for s in local_steps(c.first, ls, vals))
    if isinstance(c, If):
        branch = c.then if eval_expr(c.cond, ls) else c.orelse
        return frozenset([ThreadStep(TAU, branch, ls)])
    if isinstance(c, While):
        if eval_expr(c.cond, ls):
            return frozenset([ThreadStep(TAU, Seq(c.body, c), ls)])
        return frozenset([ThreadStep(TAU, SKIP, ls)])
    raise TypeError(f"not a command: {c!r}")


def thread_steps(pi: tuple[Command, ...], lst: tuple[LocalState, ...], t: int,
                 vals: Sequence[int]):
    """Lift the steps of thread `t` (1-based) to the whole program residue."""
    if not 1 <= t <= len(pi):
        raise KeyError(f"unknown thread {t}")
    i = t - 1
    out = set()
    for step in local_steps(pi[i], lst[i], vals):
        out.add((step.label, pi[:i] + (step.next,) + pi[i + 1:],
                 lst[:i] + (step.next_ls,) + lst[i + 1:]))
    return frozenset(out)
