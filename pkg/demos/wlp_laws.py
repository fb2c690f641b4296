"""Sampling the algebraic laws of the finite weakest-liberal-precondition.

Run with: python3 demos/wlp_laws.py
"""

from pso_litmus.logic import check_wlp_laws, disjunctivity_reverse_witness

for r in check_wlp_laws(samples=500, n_states=5, seed=3):
    print(f"{r.law:<22} {'holds' if r.holds else 'FAILS'} ({r.samples} samples)")

# wlp distributes over union of relations only one way round.
wit = disjunctivity_reverse_witness()
print("\nreverse disjunctivity counterexample:")
for k, v in wit.items():
    print(f"  {k}: {v}")
