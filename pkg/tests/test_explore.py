import pytest

from pso_litmus.explore import (check_postcondition, final_outcomes,
                                make_machine, reach, replays_to, step_bound, traces)
from pso_litmus.lang import FENCE, Rd, Wr, builtin, parse_litmus
from pso_litmus.randprog import random_programs

from oracle import pso_outcomes

ALL4 = {(0, 0), (0, 1), (1, 0), (1, 1)}


def outcome_set(p, model):
    return {o.values(("r1", "r2")) for o in final_outcomes(reach(p, model))}


@pytest.mark.parametrize("model", ["pso", "ppso"])
def test_mp_allows_every_outcome(model):
    # frozen from the independent interpreter in oracle.py
    assert outcome_set(builtin("mp"), model) == ALL4


@pytest.mark.parametrize("model", ["pso", "ppso"])
def test_mp_fence_forbids_stale_read(model):
    p = builtin("mp-fence")
    exp = reach(p, model)
    assert outcome_set(p, model) == ALL4 - {(1, 0)}
    assert check_postcondition(exp).holds


def test_sb_post_fails_with_both_zero():
    exp = reach(builtin("sb"), "pso")
    v = check_postcondition(exp)
    assert v.status == "fails"
    assert v.counterexample.values(("r1", "r2")) == (0, 0)


def test_empty_program():
    exp = reach(builtin("empty"), "pso")
    assert len(final_outcomes(exp)) == 1
    assert len(exp.configs) == 1


def test_config_counts():
    assert len(reach(builtin("mp"), "pso").configs) == 35


@pytest.mark.parametrize("name", ["mp", "mp-fence", "sb"])
def test_outcomes_match_oracle(name):
    p = builtin(name)
    expected = {tuple(v for _, v in f) for f in pso_outcomes(p)}
    assert {o.values(p.all_registers()) for o in final_outcomes(reach(p, "pso"))} == expected


def test_random_straight_line_programs_match_oracle():
    checked = 0
    for p in random_programs(40, seed=7):
        try:
            expected = pso_outcomes(p)
        except ValueError:
            continue  # has an if
        checked += 1
        got = {o.registers for o in final_outcomes(reach(p, "pso"))}
        assert got == expected
    assert checked >= 25


@pytest.mark.parametrize("model", ["pso", "ppso"])
def test_witnesses_replay(model):
    p = builtin("mp")
    m = make_machine(p, model)
    for o in final_outcomes(reach(p, model, machine=m)):
        assert replays_to(p, m, o)


def test_seed_does_not_change_results():
    p = builtin("mp-fence")
    base = reach(p, "pso")
    for seed in (1, 2):
        other = reach(p, "pso", seed=seed)
        assert other.configs == base.configs
        assert final_outcomes(other) == final_outcomes(base)
        assert traces(p, "ppso", seed=seed).traces == traces(p, "ppso").traces


def test_depth_bound_reports_incomplete():
    exp = reach(builtin("mp"), "pso", depth=2)
    assert not exp.complete
    assert check_postcondition(exp).status == "unknown"
    assert not traces(builtin("mp"), "pso", depth=3).complete


def test_negative_depth():
    with pytest.raises(ValueError):
        reach(builtin("mp"), depth=-1)


def test_spin_loop_terminates_exploration():
    p = parse_litmus("""
globals: x
thread 1:
  x := 1;
thread 2:
  r := x;
  while r = 0 do { r := x; }
post: r = 1
""")
    exp = reach(p, "pso")
    assert exp.complete
    assert check_postcondition(exp).holds
    assert step_bound(p.threads[1]) == float("inf")


def test_traces_mp():
    ts = traces(builtin("mp"), "pso")
    assert ts.complete and len(ts.traces) == 13
    stale = ((1, Wr("x", 1)), (1, Wr("y", 1)), (2, Rd("y", "r1", 1)), (2, Rd("x", "r2", 0)))
    assert stale in ts.traces


def test_fence_appears_in_traces():
    ts = traces(builtin("mp-fence"), "pso")
    assert all((1, FENCE) in t for t in ts.traces)


def test_unknown_model():
    with pytest.raises(ValueError):
        make_machine(builtin("mp"), "tso")
    with pytest.raises(ValueError):
        make_machine(builtin("mp"), "pso", mutant="fifo-stamps")


def test_outcome_values():
    (o,) = [o for o in final_outcomes(reach(builtin("mp"), "pso")) if o.values(("r1", "r2")) == (1, 0)]
    assert o.value("r1") == 1 and str(o) == "r1=1 r2=0"
    assert o.witness
