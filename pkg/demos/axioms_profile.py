"""The axiom hierarchy checked by brute force over a small PPSO universe.

Every axiom holds except MP, which needs a fence under PSO. The script
prints the MP counterexample: a y write stamped above a pending x write.

Run with: python3 demos/axioms_profile.py
"""

import time

from pso_litmus import axioms as ax

u = ax.build_universe(threads=2, globals_=("x", "y"), vals=(0, 1), pending_cap=2)
print(f"{len(u.states)} states, {len(u.actions)} actions")

start = time.perf_counter()
reports = ax.check_all(u)
print(f"checked in {time.perf_counter() - start:.1f}s\n")

for r in reports:
    print(f"{r.axiom:<4} {r.level:<11} {r.verdict}")

mp = next(r for r in reports if r.axiom == "MP")
cx = mp.counterexample
print("\nMP counterexample")
print("  params", cx["params"])
print("  state ", cx["state"])
for w in cx["witness"]:
    print("  via   ", w)
print("replays:", ax.replay(mp, u))
print("expected profile:", ax.expected_profile(u, reports))

# With one pending write allowed, MP cannot be falsified: every axiom passes.
small = ax.build_universe(pending_cap=1)
print("\ncap 1:", {r.axiom: r.verdict for r in ax.check_all(small, ["MP"])})
