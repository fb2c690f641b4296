"""Prophetic PSO: buffers carry timestamps fixed at write time.

Timestamps are stored as canonical ranks ``1..n`` over all ``n`` pending
entries.  Only their relative order matters, so inserting a fresh timestamp
is the same as choosing an insertion point in that order.  Flushes must
take the globally smallest timestamp, which makes the flush order a
prophecy decided when the writes happen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .lang import Fence, Rd, Wr
from .logic import Rel
from .pso import BufferMachine, PsoState

MUTANTS = ("fifo-stamps", "fence-no-wait")


@dataclass(frozen=True, order=True)
class PpsoState:
    """Memory ``s`` and buffers ``wb[t-1][x]`` of ``(value, rank)`` entries."""

    s: tuple[int, ...]
    wb: tuple[tuple[tuple[tuple[int, int], ...], ...], ...]

    buffer = PsoState.buffer
    pending = PsoState.pending

    def with_buffer(self, t, xi, buf):
        row = self.wb[t - 1]
        row = row[:xi] + (buf,) + row[xi + 1:]
        return PpsoState(self.s, self.wb[:t - 1] + (row,) + self.wb[t:])

    def with_memory(self, xi, v):
        return PpsoState(self.s[:xi] + (v,) + self.s[xi + 1:], self.wb)

    def ranks(self) -> list[int]:
        return [q for row in self.wb for b in row for _, q in b]

    def map_ranks(self, f) -> "PpsoState":
        wb = tuple(tuple(tuple((v, f(q)) for v, q in b) for b in row) for row in self.wb)
        return PpsoState(self.s, wb)


def canonicalize(sigma: PpsoState) -> PpsoState:
    """Replace timestamps (any ordered, distinct keys) by ranks 1..n."""
    order = {q: i + 1 for i, q in enumerate(sorted(set(sigma.ranks())))}
    return sigma.map_ranks(order.__getitem__)


def erase(sigma: PpsoState) -> PsoState:
    """Forget timestamps."""
    wb = tuple(tuple(tuple(v for v, _ in b) for b in row) for row in sigma.wb)
    return PsoState(sigma.s, wb)


def freshness_violation(sigma: PpsoState) -> str | None:
    """Check the freshness invariant on one state.

    Every buffer's last timestamp must exceed the earlier ones of that
    buffer and occur in no other buffer.  Returns a description of the
    first violation or None.
    """
    wb = sigma.wb
    for ti, row in enumerate(wb):
        for xi, b in enumerate(row):
            if not b:
                continue
            last = b[-1][1]
            if any(q >= last for _, q in b[:-1]):
                return f"wb[{ti + 1},{xi}]: last timestamp {last} does not exceed earlier entries"
            for tj, row2 in enumerate(wb):
                for xj, b2 in enumerate(row2):
                    if (tj, xj) != (ti, xi) and any(q == last for _, q in b2):
                        return (f"wb[{ti + 1},{xi}]: last timestamp {last} also occurs "
                                f"in wb[{tj + 1},{xj}]")
    return None


class PpsoMachine(BufferMachine):
    """PPSO machine.  `mutant` selects a deliberately broken variant for tests."""

    model = "ppso"

    def __init__(self, globals_: Sequence[str], n_threads: int, mutant: str | None = None):
        super().__init__(globals_, n_threads)
        if mutant is not None and mutant not in MUTANTS:
            raise ValueError(f"unknown mutant {mutant!r}; choose from {MUTANTS}")
        self.mutant = mutant
        self._interf: dict = {}

    def initial(self) -> PpsoState:
        # memory pinned to 0, matching the PSO initial state
        return PpsoState(tuple(0 for _ in self.globals), self.empty_buffers())

    def initial_states(self) -> frozenset:
        return frozenset([self.initial()])

    def read_value(self, sigma: PpsoState, t: int, x: str) -> int:
        xi = self.index(x)
        buf = sigma.buffer(t, xi)
        return buf[-1][0] if buf else sigma.s[xi]

    def insertion_points(self, sigma: PpsoState, t: int, x: str) -> range:
        """Admissible canonical ranks for a fresh timestamp in wb[t, x]."""
        buf = sigma.buffer(t, self.index(x))
        n = sigma.pending()
        low = buf[-1][1] if buf else 0
        if self.mutant == "fifo-stamps":
            return range(n + 1, n + 2)
        return range(low + 1, n + 2)

    def write_step(self, sigma: PpsoState, t: int, x: str, v: int) -> frozenset:
        xi = self.index(x)
        out = set()
        for q in self.insertion_points(sigma, t, x):
            shifted = sigma.map_ranks(lambda r: r + 1 if r >= q else r)
            out.add(shifted.with_buffer(t, xi, shifted.buffer(t, xi) + ((v, q),)))
        return frozenset(out)

    pp_write = write_step

    def flush(self, sigma: PpsoState, t: int, x: str):
        xi = self.index(x)
        buf = sigma.buffer(t, xi)
        if not buf or buf[0][1] != 1:
            return None
        out = sigma.with_buffer(t, xi, buf[1:]).with_memory(xi, buf[0][0])
        return out.map_ranks(lambda r: r - 1)

    pp_flush = flush

    def fence_enabled(self, sigma, t):
        return self.mutant == "fence-no-wait" or self.buffers_empty(sigma, t)

    def next_flush(self, sigma: PpsoState):
        """The unique (t, x) whose head holds rank 1, or None."""
        for t in self.threads:
            for xi, x in enumerate(self.globals):
                b = sigma.buffer(t, xi)
                if b and b[0][1] == 1:
                    return t, x
        return None

    def format_entry(self, e) -> str:
        return f"({e[0]},{e[1]})"

    # -- view sets ---------------------------------------------------------

    def max_view(self, sigma: PpsoState, t: int, x: str) -> bool:
        """Thread t holds the globally newest x-timestamp, or nothing is pending on x."""
        xi = self.index(x)
        top = 0
        for row in sigma.wb:
            if row[xi]:
                top = max(top, row[xi][-1][1])
        if top == 0:
            return True
        own = sigma.buffer(t, xi)
        return bool(own) and own[-1][1] == top

    def in_vmax(self, sigma: PpsoState, t: int, a) -> bool:
        if isinstance(a, Fence):
            return True
        return self.max_view(sigma, t, a.var)

    def vmax(self, t: int, a, universe: Iterable) -> frozenset:
        return frozenset(s for s in universe if self.in_vmax(s, t, a))

    def interf_image(self, sigma: PpsoState, t: int, a) -> frozenset:
        if not isinstance(a, Wr):
            return frozenset([sigma])
        key = (sigma, t, a)
        hit = self._interf.get(key)
        if hit is None:
            hit = self._interf[key] = self.close(self.image(sigma, t, a))
        return hit

    def interf(self, t: int, a, universe: Iterable) -> Rel:
        universe = frozenset(universe)
        if not self.is_flush_closed(universe):
            raise ValueError("universe is not closed under flushes")
        return Rel.from_image(universe, lambda s: self.interf_image(s, t, a))

    # -- finite universes --------------------------------------------------

    def all_states(self, vals: Sequence[int], cap: int) -> list[PpsoState]:
        """Every canonical state with at most `cap` pending entries.

        A canonical state is determined by its memory and by the sequence,
        in timestamp order, of (buffer, value) choices of its entries.
        """
        slots = [(t, xi) for t in self.threads for xi in range(len(self.globals))]
        choices = [(slot, v) for slot in slots for v in vals]
        out = []
        for mem in itertools.product(vals, repeat=len(self.globals)):
            for n in range(cap + 1):
                for seq in itertools.product(choices, repeat=n):
                    wb = [[()] * len(self.globals) for _ in self.threads]
                    for rank, ((t, xi), v) in enumerate(seq, start=1):
                        wb[t - 1][xi] = wb[t - 1][xi] + ((v, rank),)
                    out.append(PpsoState(tuple(mem), tuple(tuple(r) for r in wb)))
        return out

    def lifts(self, sigma: PsoState) -> list[PpsoState]:
        """All canonical PPSO states that erase to `sigma`.

        These are the interleavings of the buffers' entry sequences into
        one timestamp order.
        """
        slots = [(t, xi) for t in self.threads for xi in range(len(self.globals))
                 if sigma.buffer(t, xi)]
        lengths = [len(sigma.buffer(t, xi)) for t, xi in slots]
        out = []
        for order in _interleavings(lengths):
            wb = [[()] * len(self.globals) for _ in self.threads]
            taken = [0] * len(slots)
            for rank, k in enumerate(order, start=1):
                t, xi = slots[k]
                v = sigma.buffer(t, xi)[taken[k]]
                taken[k] += 1
                wb[t - 1][xi] = wb[t - 1][xi] + ((v, rank),)
            out.append(PpsoState(sigma.s, tuple(tuple(r) for r in wb)))
        return out


def _interleavings(lengths: list[int]):
    """Sequences of slot indices using slot k exactly lengths[k] times."""
    total = sum(lengths)
    if total == 0:
        yield ()
        return
    for k, n in enumerate(lengths):
        if n:
            lengths[k] -= 1
            for rest in _interleavings(lengths):
                yield (k,) + rest
            lengths[k] += 1
