"""Checking Owicki-Gries proof outlines for message passing.

Run with: python3 demos/proof_outline.py
"""

from pso_litmus.lang import builtin_path
from pso_litmus.proof import check_outline, check_view_stability, load_outline

for name in ("mp-fence", "trivial", "mp-fence-broken", "mp"):
    o = load_outline(builtin_path(name + ".outline"))
    rep = check_outline(o)
    print(f"{o.program.name}: {'valid' if rep.valid else 'INVALID'} "
          f"({len(rep.triples)} triples, {rep.states} states)")
    f = rep.first_failure()
    if f is not None:
        print(f"  line {f.line}: {f.kind} {{{f.pre}}} {f.command} {{{f.post}}}")
        if f.context:
            print(f"  {f.context}")
        print(f"  state     {f.witness['state']}")
        print(f"  successor {f.witness['successor']}")

# Every assertion instance over the MP-fence universe is closed under flushes.
p = load_outline(builtin_path("mp-fence.outline")).program
res = check_view_stability(p)
print(f"\nflush-stable assertions: {sum(r.holds for r in res)} of {len(res)}")
