import pytest

from pso_litmus.lang import FENCE, Rd, Wr
from pso_litmus.pso import PsoMachine, PsoState

X, Y = 0, 1


@pytest.fixture
def m():
    return PsoMachine(("x", "y"), 2)


def st(m, mem=(0, 0), **bufs):
    """bufs like t1x=(1,) for thread 1's x buffer."""
    s = PsoState(tuple(mem), m.empty_buffers())
    for key, b in bufs.items():
        s = s.with_buffer(int(key[1]), m.index(key[2]), tuple(b))
    return s


def test_initial_state(m):
    s = m.initial()
    assert s.s == (0, 0) and s.pending() == 0


def test_write_appends_to_own_buffer(m):
    (s,) = m.write_step(m.initial(), 1, "x", 1)
    assert s == st(m, t1x=(1,))


def test_read_own_newest_then_memory(m):
    s = st(m, mem=(0, 0), t1x=(1, 0))
    assert m.read_value(s, 1, "x") == 0
    assert m.read_value(s, 2, "x") == 0
    s = st(m, t1x=(0, 1))
    assert m.read_value(s, 1, "x") == 1 and m.read_value(s, 2, "x") == 0


def test_flush_is_fifo_per_buffer(m):
    s = st(m, t1x=(1, 0), t1y=(1,))
    assert m.flush(s, 1, "x") == st(m, mem=(1, 0), t1x=(0,), t1y=(1,))
    assert m.flush(s, 1, "y") == st(m, mem=(0, 1), t1x=(1, 0))
    assert m.flush(s, 2, "x") is None


def test_fence_needs_own_buffers_empty(m):
    s = st(m, t2x=(1,))
    assert m.action_step(s, 1, FENCE) == {s}
    assert m.action_step(s, 2, FENCE) == frozenset()
    # T(2, fence) flushes first
    assert m.image(s, 2, FENCE) == {st(m, mem=(1, 0))}


def test_image_is_flushes_then_step(m):
    s = st(m, t2x=(1,))
    # thread 1 reads 0 before the flush or 1 after it
    assert m.image(s, 1, Rd("x", "r", 0)) == {s}
    assert m.image(s, 1, Rd("x", "r", 1)) == {st(m, mem=(1, 0))}
    assert m.readable(s, 1, "x", 1) and m.readable(s, 1, "x", 0)
    assert m.readable(s, 2, "x", 1) and not m.readable(s, 2, "x", 0)


def test_flush_closure_counts(m):
    # independent buffers of lengths 2 and 1 give 3 * 2 flush prefixes
    s = st(m, t1x=(1, 0), t2y=(1,))
    assert len(m.flush_closure(s)) == 6


def test_transition_requires_flush_closed_universe(m):
    s = st(m, t1x=(1,))
    with pytest.raises(ValueError):
        m.transition({s}, 1, Wr("x", 0))
    rel = m.transition(m.flush_closure(s), 1, Wr("x", 0))
    assert st(m, t1x=(1, 0)) in rel.image(s)


def test_unknown_global(m):
    with pytest.raises(KeyError):
        m.index("z")


def _brute_force_states(m, vals, cap):
    # grow buffers by writes from every memory valuation
    frontier = {PsoState((a, b), m.empty_buffers()) for a in vals for b in vals}
    seen = set(frontier)
    for _ in range(cap):
        frontier = {n for s in frontier for t in m.threads for x in m.globals for v in vals
                    for n in m.write_step(s, t, x, v)} - seen
        seen |= frontier
    return seen


@pytest.mark.parametrize("cap", [0, 1, 2, 3])
def test_all_states_matches_brute_force(m, cap):
    states = m.all_states((0, 1), cap)
    assert len(states) == len(set(states))
    assert set(states) == _brute_force_states(m, (0, 1), cap)


def test_describe_and_json(m):
    s = st(m, t1x=(1,))
    assert m.describe(s) == "{x=0, y=0; wb[1,x]=<1>}"
    assert m.to_json(s) == {"s": {"x": 0, "y": 0}, "wb": {"1,x": [1]}}
