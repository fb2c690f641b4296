"""Standard PSO machine: one FIFO value buffer per (thread, global)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .lang import Fence, Rd, Wr
from .logic import Rel


@dataclass(frozen=True, order=True)
class PsoState:
    """Shared memory ``s`` (indexed like the globals) and buffers ``wb[t-1][x]``.

    Buffers list the oldest entry first.
    """

    s: tuple[int, ...]
    wb: tuple[tuple[tuple[int, ...], ...], ...]

    def buffer(self, t: int, xi: int) -> tuple:
        return self.wb[t - 1][xi]

    def pending(self) -> int:
        return sum(len(b) for row in self.wb for b in row)

    def with_buffer(self, t: int, xi: int, buf: tuple) -> "PsoState":
        row = self.wb[t - 1]
        row = row[:xi] + (buf,) + row[xi + 1:]
        return PsoState(self.s, self.wb[:t - 1] + (row,) + self.wb[t:])

    def with_memory(self, xi: int, v: int) -> "PsoState":
        return PsoState(self.s[:xi] + (v,) + self.s[xi + 1:], self.wb)


class BufferMachine:
    """Behaviour shared by the PSO and PPSO machines.

    Subclasses provide ``initial``, ``read_value``, ``write_step``, ``flush``
    and ``entry_value``.  Successor images are exact and memoised per state.
    """

    model = "?"

    def __init__(self, globals_: Sequence[str], n_threads: int):
        self.globals = tuple(globals_)
        self.n_threads = n_threads
        self.threads = tuple(range(1, n_threads + 1))
        self._index = {x: i for i, x in enumerate(self.globals)}
        self._closure: dict = {}
        self._image: dict = {}

    # -- signature ---------------------------------------------------------

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"undeclared global {x!r}") from None

    def empty_buffers(self):
        return tuple(tuple(() for _ in self.globals) for _ in self.threads)

    # -- single steps ------------------------------------------------------

    def buffers_empty(self, sigma, t: int) -> bool:
        return not any(sigma.wb[t - 1])

    def action_step(self, sigma, t: int, a) -> frozenset:
        """States reachable by the action step alone (no flushes)."""
        if isinstance(a, Rd):
            return frozenset([sigma]) if self.read_value(sigma, t, a.var) == a.val else frozenset()
        if isinstance(a, Wr):
            return self.write_step(sigma, t, a.var, a.val)
        if isinstance(a, Fence):
            return frozenset([sigma]) if self.fence_enabled(sigma, t) else frozenset()
        raise TypeError(f"not a memory action: {a!r}")

    def fence_enabled(self, sigma, t: int) -> bool:
        return self.buffers_empty(sigma, t)

    def flush_successors(self, sigma) -> frozenset:
        out = set()
        for t in self.threads:
            for x in self.globals:
                n = self.flush(sigma, t, x)
                if n is not None:
                    out.add(n)
        return frozenset(out)

    def flush_closure(self, sigma) -> frozenset:
        """All states reachable from `sigma` by zero or more flushes."""
        hit = self._closure.get(sigma)
        if hit is None:
            seen = {sigma}
            for n in self.flush_successors(sigma):
                seen |= self.flush_closure(n)
            hit = self._closure[sigma] = frozenset(seen)
        return hit

    def close(self, states: Iterable) -> frozenset:
        """Smallest flush-closed superset of `states`."""
        out: set = set()
        for s in states:
            out |= self.flush_closure(s)
        return frozenset(out)

    def is_flush_closed(self, states: frozenset) -> bool:
        return all(self.flush_successors(s) <= states for s in states)

    # -- T(t, a) = FL* ; step ---------------------------------------------

    def image(self, sigma, t: int, a) -> frozenset:
        key = (sigma, t, a)
        hit = self._image.get(key)
        if hit is None:
            out: set = set()
            for mid in self.flush_closure(sigma):
                out |= self.action_step(mid, t, a)
            hit = self._image[key] = frozenset(out)
        return hit

    def transition(self, universe: Iterable, t: int, a) -> Rel:
        """T(t, a) from every state of a flush-closed universe."""
        universe = frozenset(universe)
        if not self.is_flush_closed(universe):
            raise ValueError("universe is not closed under flushes")
        return Rel.from_image(universe, lambda s: self.image(s, t, a))

    def readable(self, sigma, t: int, x: str, v: int) -> bool:
        """Can thread t read v from x after some flushes?"""
        return bool(self.image(sigma, t, Rd(x, "_", v)))

    # -- presentation ------------------------------------------------------

    def describe(self, sigma) -> str:
        mem = ", ".join(f"{x}={v}" for x, v in zip(self.globals, sigma.s))
        bufs = []
        for t in self.threads:
            for xi, x in enumerate(self.globals):
                b = sigma.buffer(t, xi)
                if b:
                    bufs.append(f"wb[{t},{x}]=<{', '.join(map(self.format_entry, b))}>")
        return "{" + "; ".join([mem] + bufs) + "}"

    def format_entry(self, e) -> str:
        return str(e)

    def to_json(self, sigma) -> dict:
        wb = {}
        for t in self.threads:
            for xi, x in enumerate(self.globals):
                b = sigma.buffer(t, xi)
                if b:
                    wb[f"{t},{x}"] = [list(e) if isinstance(e, tuple) else e for e in b]
        return {"s": dict(zip(self.globals, sigma.s)), "wb": wb}


class PsoMachine(BufferMachine):
    model = "pso"

    def initial(self) -> PsoState:
        return PsoState(tuple(0 for _ in self.globals), self.empty_buffers())

    def read_value(self, sigma: PsoState, t: int, x: str) -> int:
        xi = self.index(x)
        buf = sigma.buffer(t, xi)
        return buf[-1] if buf else sigma.s[xi]

    def write_step(self, sigma: PsoState, t: int, x: str, v: int) -> frozenset:
        xi = self.index(x)
        return frozenset([sigma.with_buffer(t, xi, sigma.buffer(t, xi) + (v,))])

    def flush(self, sigma: PsoState, t: int, x: str):
        xi = self.index(x)
        buf = sigma.buffer(t, xi)
        if not buf:
            return None
        return sigma.with_buffer(t, xi, buf[1:]).with_memory(xi, buf[0])

    def all_states(self, vals: Sequence[int], cap: int) -> list[PsoState]:
        """Every state with at most `cap` pending entries over `vals`."""
        slots = [(t, xi) for t in self.threads for xi in range(len(self.globals))]
        out = []
        for mem in itertools.product(vals, repeat=len(self.globals)):
            for lengths in _compositions(len(slots), cap):
                pools = [itertools.product(vals, repeat=n) for n in lengths]
                for contents in itertools.product(*pools):
                    wb = [[()] * len(self.globals) for _ in self.threads]
                    for (t, xi), c in zip(slots, contents):
                        wb[t - 1][xi] = c
                    out.append(PsoState(tuple(mem), tuple(tuple(r) for r in wb)))
        return out


def _compositions(n_slots: int, cap: int):
    """Length vectors for `n_slots` buffers with total at most `cap`."""
    def rec(i, left):
        if i == n_slots:
            yield ()
            return
        for k in range(left + 1):
            for rest in rec(i + 1, left - k):
                yield (k,) + rest
    return rec(0, cap)
