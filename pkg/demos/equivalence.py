"""PSO and prophetic PSO have the same traces; broken variants do not.

Run with: python3 demos/equivalence.py
"""

from pso_litmus.equiv import check_sim, trace_equiv
from pso_litmus.explore import format_trace, make_machine
from pso_litmus.lang import builtin_path, parse_litmus
from pso_litmus.ppso import MUTANTS

for name in ("mp.litmus", "mp-fence.litmus", "sb.litmus"):
    p = parse_litmus(builtin_path(name).read_text())
    rep = trace_equiv(p)
    print(f"{p.name}: {rep.status} ({rep.counts['pso']} traces each)")

    for r in check_sim(p):
        print(f"  {r.check:<10} {'holds' if r.holds else 'FAILS'} over {r.checked} checks")

# Each mutant breaks one PPSO rule. A FIFO-only stamping loses the
# reordered MP run; a fence that does not wait gains one.
for m, name in zip(MUTANTS, ("mp.litmus", "mp-fence.litmus")):
    p = parse_litmus(builtin_path(name).read_text())
    rep = trace_equiv(p, ppso_machine=make_machine(p, "ppso", mutant=m))
    print(f"\nmutant {m} on {p.name}: {rep.status}")
    if rep.distinguishing is not None:
        print(f"  only in {rep.only_in.upper()}: {format_trace(rep.distinguishing)}")
