import math

import pytest

from pso_litmus.axioms import universe_size
from pso_litmus.explore import reach
from pso_litmus.lang import FENCE, Rd, Wr, builtin
from pso_litmus.ppso import MUTANTS, PpsoMachine, PpsoState, canonicalize, erase, freshness_violation
from pso_litmus.pso import PsoMachine, PsoState


@pytest.fixture
def m():
    return PpsoMachine(("x", "y"), 2)


def st(m, mem=(0, 0), **bufs):
    s = PpsoState(tuple(mem), m.empty_buffers())
    for key, b in bufs.items():
        s = s.with_buffer(int(key[1]), m.index(key[2]), tuple(b))
    return s


def test_initial_memory_is_zero(m):
    assert m.initial_states() == {st(m)}


def test_fresh_stamp_above_own_last_entries(m):
    s = st(m, t1x=((1, 1),), t2y=((1, 2),))
    assert list(m.insertion_points(s, 1, "x")) == [2, 3]
    assert list(m.insertion_points(s, 2, "y")) == [3]
    assert list(m.insertion_points(s, 1, "y")) == [1, 2, 3]
    out = m.write_step(s, 1, "y", 0)
    assert st(m, t1x=((1, 2),), t2y=((1, 3),), t1y=((0, 1),)) in out
    assert len(out) == 3
    assert all(sorted(n.ranks()) == [1, 2, 3] for n in out)


def test_only_rank_one_flushes(m):
    s = st(m, t1x=((1, 2),), t1y=((1, 1),))
    assert m.flush(s, 1, "x") is None
    assert m.flush(s, 1, "y") == st(m, mem=(0, 1), t1x=((1, 1),))
    assert m.next_flush(s) == (1, "y")
    assert m.flush_successors(s) == {st(m, mem=(0, 1), t1x=((1, 1),))}


def test_flush_order_is_fixed(m):
    # the closure is a chain: one path through the timestamps
    s = st(m, t1x=((1, 1), (0, 3)), t2x=((1, 2),))
    assert len(m.flush_closure(s)) == 4


def test_erase_commutes_with_writes(m):
    pso = PsoMachine(("x", "y"), 2)
    s = st(m, t1x=((1, 1),), t2y=((1, 2),))
    assert {erase(n) for n in m.write_step(s, 2, "x", 1)} == pso.write_step(erase(s), 2, "x", 1)


def test_canonicalize():
    s = PpsoState((0, 0), ((((1, 10),), ()), ((), ((0, 4),))))
    assert canonicalize(s).ranks() == [2, 1]


def test_max_view(m):
    s = st(m, t1x=((1, 1),), t2x=((0, 2),))
    assert m.max_view(s, 2, "x") and not m.max_view(s, 1, "x")
    assert m.max_view(s, 1, "y") and m.max_view(s, 2, "y")
    assert m.in_vmax(s, 1, FENCE)


def test_freshness_violation_detects_bad_states():
    good = PpsoState((0,), ((((1, 1), (0, 3)),), (((1, 2),),)))
    bad_order = PpsoState((0,), ((((1, 2), (0, 1)),), ((),)))
    assert freshness_violation(good) is None
    assert "does not exceed" in freshness_violation(bad_order)


def test_reachable_states_are_fresh():
    for name in ("mp", "mp-fence", "sb"):
        exp = reach(builtin(name), "ppso")
        assert all(freshness_violation(c.sigma) is None for c in exp.configs)


def test_lifts_are_all_interleavings(m):
    pso = PsoState((0, 0), (((1, 0), (1,)), ((), (0,))))
    lifts = m.lifts(pso)
    assert len(lifts) == len(set(lifts)) == math.factorial(4) // math.factorial(2)
    assert all(erase(u) == pso for u in lifts)


@pytest.mark.parametrize("cap", [0, 1, 2])
def test_all_states_count_matches_closed_form_and_brute_force(m, cap):
    states = set(m.all_states((0, 1), cap))
    assert len(states) == universe_size(2, 2, 2, cap)
    frontier = {st(m, mem=(a, b)) for a in (0, 1) for b in (0, 1)}
    seen = set(frontier)
    for _ in range(cap):
        frontier = {n for s in frontier for t in m.threads for x in m.globals for v in (0, 1)
                    for n in m.write_step(s, t, x, v)} - seen
        seen |= frontier
    assert states == seen


def test_universe_size_default():
    # 4 memories * (1 + 8 + 64) entry sequences
    assert universe_size(2, 2, 2, 2) == 292


def test_mutants(m):
    assert set(MUTANTS) == {"fifo-stamps", "fence-no-wait"}
    fifo = PpsoMachine(("x", "y"), 2, mutant="fifo-stamps")
    s = st(m, t1x=((1, 1),))
    assert list(fifo.insertion_points(s, 2, "y")) == [2]
    lax = PpsoMachine(("x", "y"), 2, mutant="fence-no-wait")
    assert lax.action_step(s, 1, FENCE) == {s}
    with pytest.raises(ValueError):
        PpsoMachine(("x",), 1, mutant="nope")


def test_interf_requires_flush_closed(m):
    s = st(m, t1x=((1, 1),))
    with pytest.raises(ValueError):
        m.interf(1, Wr("y", 1), {s})
    rel = m.interf(1, Rd("x", "r", 1), m.flush_closure(s))
    assert rel.image(s) == {s}
