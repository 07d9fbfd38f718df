"""Variational ground state of a J1-J2 chain with both ansatze.

Runs a small sweep of the two- and three-qubit vertex ansatze on n = 8 at
matched parameter counts and prints the best normalised energy of each.
Pass an output directory to keep the JSON records and summary CSV. With
this few seeds and steps the ranking can go either way; the n = 12 sweep in
tests/test_acceptance.py is the real comparison.
"""
import sys

from spinnet.vqe import OptimizerConfig, Problem, best_etilde, experiment_sweep

out = sys.argv[1] if len(sys.argv) > 1 else None
problem = Problem("triangular", 8, 1.0, 0.44)
res = experiment_sweep(problem, ["two-vertex-triangular", "three-vertex-triangular"], None, seeds=3,
                       config=OptimizerConfig(max_iters=500), out_dir=out,
                       p_for_kind={"two-vertex-triangular": [2], "three-vertex-triangular": [1]})
print(f"E_GS = {res.records[0].e_gs:.6f}")
for kind in ("two-vertex-triangular", "three-vertex-triangular"):
    print(f"{kind:26s} 32 params: best E~ = {best_etilde(res.records, kind, 32):.3e}")
worst = max(r.max_total_spin for r in res.records)
print(f"largest <J^2> seen during optimisation: {worst:.1e}")
