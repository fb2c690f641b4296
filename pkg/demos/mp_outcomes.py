"""Message passing under PSO, with and without a fence.

Run with: python3 demos/mp_outcomes.py
"""

from pso_litmus.explore import check_postcondition, final_outcomes, format_trace, reach
from pso_litmus.lang import builtin_path, parse_litmus


def load(name):
    return parse_litmus(builtin_path(name).read_text())


# Thread 1 writes x then y; thread 2 reads y then x. PSO buffers each
# variable separately, so y can reach memory before x.
mp = load("mp.litmus")
for model in ("pso", "ppso"):
    exp = reach(mp, model)
    outs = sorted(final_outcomes(exp), key=lambda o: o.registers)
    print(f"MP under {model.upper()}: {len(exp.configs)} configurations")
    for o in outs:
        print(f"  {o}")

# The surprising outcome r1 = 1, r2 = 0, and one run that produces it.
weird = [o for o in final_outcomes(reach(mp, "pso"))
         if dict(o.registers) == {"r1": 1, "r2": 0}]
print("r1=1, r2=0 via", format_trace(weird[0].witness))

# A fence between the writes drains thread 1's buffers first.
fenced = load("mp-fence.litmus")
exp = reach(fenced, "pso")
print(f"\nMP-fence: {len(exp.configs)} configurations")
for o in sorted(final_outcomes(exp), key=lambda o: o.registers):
    print(f"  {o}")
print("postcondition:", check_postcondition(exp).status)
