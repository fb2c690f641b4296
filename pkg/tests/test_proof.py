import pytest

from pso_litmus.explore import check_postcondition, final_outcomes, reach
from pso_litmus.lang import Assign, Fnc, Lit, ParseError, Read, Skip, Write, builtin, builtin_path
from pso_litmus.logic import TRUE, FALSE, LState, parse_assertion
from pso_litmus.proof import (build_proof_universe, cap_universe, check_global_correctness,
                              check_hoare_triple, check_local_correctness, check_outline,
                              check_view_stability, parse_outline, reachable_universe)


def outline(name):
    return parse_outline(builtin_path(name + ".outline").read_text())


@pytest.fixture(scope="module")
def mpf():
    return outline("mp-fence")


@pytest.fixture(scope="module")
def mpf_u(mpf):
    return reachable_universe(mpf.program)


def test_outline_structure(mpf):
    assert [len(t.assertions) for t in mpf.threads] == [4, 3]
    assert [len(t.commands) for t in mpf.threads] == [3, 2]
    assert sum(len(t.assertions) for t in mpf.threads) == 7
    assert mpf.threads[0].commands[1] == Fnc()
    assert mpf.threads[1].assertions[0] == parse_assertion("<y = 1>[x = 1]@2")
    assert mpf.final == parse_assertion("r1 != 1 | r2 = 1")


def test_outline_program_matches_litmus(mpf):
    assert mpf.program.threads == builtin("mp-fence").threads


def test_worked_triple(mpf_u):
    pre = parse_assertion("<y = 1>[x = 1]@2 & [x = 1]@1 & [x = 1]@2 & [y != 1]@2")
    post = parse_assertion("<y = 1>[x = 1]@2")
    assert check_hoare_triple(pre, 1, Write("y", Lit(1)), post, mpf_u).holds


def test_worked_triple_needs_fence_context(mpf_u):
    pre = parse_assertion("<y = 1>[x = 1]@2 & [x = 1]@1 & [y != 1]@2")
    post = parse_assertion("<y = 1>[x = 1]@2")
    u = cap_universe(mpf_u.program, 2)
    r = check_hoare_triple(pre, 1, Write("y", Lit(1)), post, u)
    assert not r.holds and r.witness


def test_skip_triple(mpf_u):
    assert check_hoare_triple(TRUE, 1, Skip(), TRUE, mpf_u).holds


def test_overwrite_breaks_synced_value(mpf_u):
    r = check_hoare_triple(parse_assertion("[x = 1]@2"), 1, Write("x", Lit(0)),
                           parse_assertion("[x = 1]@2"), mpf_u)
    assert not r.holds
    assert "wb[1,x]" in r.witness["successor"]


def test_false_post_is_unprovable(mpf_u):
    r = check_hoare_triple(TRUE, 2, Read("r1", "y"), FALSE, mpf_u)
    assert not r.holds


def test_register_assignment_triple(mpf_u):
    # Assign r1 := 1 establishes r1 = 1: substitution gives true
    assert check_hoare_triple(TRUE, 2, Assign("r1", Lit(1)), parse_assertion("r1 = 1"), mpf_u).holds


def test_triple_rejects_unknown_identifiers(mpf_u):
    with pytest.raises(ParseError):
        check_hoare_triple(parse_assertion("[z = 1]@1"), 1, Skip(), TRUE, mpf_u)


@pytest.mark.parametrize("universe", ["reachable", "cap:2"])
def test_mp_fence_outline_is_valid(mpf, universe):
    rep = check_outline(mpf, universe)
    assert rep.valid, rep.first_failure()
    # 5 local triples, and 4*2 + 3*3 interference triples
    assert len(rep.triples) == 5 + 17


def test_local_and_global_separately(mpf, mpf_u):
    assert all(r.holds for r in check_local_correctness(mpf, mpf_u))
    glob = check_global_correctness(mpf, mpf_u)
    assert all(r.holds for r in glob) and {r.kind for r in glob} == {"interference"}


def test_trivial_outline_is_valid():
    rep = check_outline(outline("trivial"))
    assert rep.valid


def test_broken_outline_reports_location():
    rep = check_outline(outline("mp-fence-broken"))
    assert not rep.valid
    f = rep.first_failure()
    assert (f.kind, f.thread, f.command, f.line) == ("local", 1, "x := 1", 8)


def test_mp_without_fence_fails_interference():
    rep = check_outline(outline("mp"))
    assert not rep.valid
    f = rep.first_failure()
    assert f.kind == "interference" and f.command == "y := 1"
    assert f.post == "<y = 1>[x = 1]@2"
    # the failing state holds x := 1 unflushed in thread 1's buffer
    assert "wb[1,x]" in f.witness["state"]


def test_strengthened_false_post_fails():
    text = builtin_path("trivial.outline").read_text().replace(
        "{true} r2 := x; {true}", "{true} r2 := x; {false}")
    rep = check_outline(parse_outline(text))
    assert not rep.valid and rep.first_failure().command == "r2 := x"


def test_single_thread_outline_is_vacuously_interference_free():
    o = parse_outline("globals: x\nthread 1:\n  {true} x := 1; {[x = 1]@1}\n")
    assert check_global_correctness(o, reachable_universe(o.program)) == []
    assert check_outline(o).valid


def test_init_and_final_checks():
    bad_init = builtin_path("trivial.outline").read_text() + "init: [x = 1]@1\n"
    rep = check_outline(parse_outline(bad_init))
    assert [p["kind"] for p in rep.problems] == ["init"]
    bad_final = builtin_path("trivial.outline").read_text() + "final: r1 = 1\n"
    rep = check_outline(parse_outline(bad_final))
    assert [p["kind"] for p in rep.problems] == ["final"]


def test_valid_outline_final_agrees_with_explorer(mpf):
    # cross-check with exhaustive exploration
    assert check_outline(mpf).valid
    exp = reach(mpf.program, "pso")
    regs = [dict(o.registers) for o in final_outcomes(exp)]
    assert all(r["r1"] != 1 or r["r2"] == 1 for r in regs)


@pytest.mark.parametrize("text, fragment", [
    ("globals: x\nthread 1:\n  x := 1; {true}", "without a pre-assertion"),
    ("globals: x\nthread 1:\n  {true} x := 1;", "must end with an assertion"),
    ("globals: x\nthread 1:\n  {true} {true} x := 1; {true}", "two assertions"),
    ("globals: x\nthread 1:\n  {true} if 1 = 1 then { skip } {true}", "atomic"),
    ("globals: x\nthread 1:\n  {[z = 1]@1} x := 1; {true}", "unknown global"),
    ("globals: x\nthread 1:\n  {true} x := 1; {true}\ninit: r5 = 0", "unknown register"),
])
def test_outline_parse_errors(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse_outline(text)
    assert fragment in str(exc.value)


def test_universe_specs(mpf):
    assert build_proof_universe(mpf.program, "cap:1").kind == "cap:1"
    with pytest.raises(ValueError):
        build_proof_universe(mpf.program, "cap:x")
    with pytest.raises(ValueError):
        build_proof_universe(mpf.program, "everything")


def test_reachable_universe_contains_initial_and_is_flush_closed(mpf_u):
    m = mpf_u.machine
    sigmas = frozenset(s.sigma for s in mpf_u.states)
    assert m.initial() in sigmas
    assert m.is_flush_closed(sigmas)


def test_view_assertions_beta_stable_on_mp_fence(mpf_u):
    res = check_view_stability(mpf_u.program, mpf_u)
    assert len(res) == 60
    assert all(r.holds for r in res)
