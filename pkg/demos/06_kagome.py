"""The 18-site Kagome cluster.

Loads the bundled lattice, runs the validator, and optimises one p = 1
block of the Kagome vertex ansatz for a few hundred Adam steps.
"""
from spinnet.hamiltonian import kagome_18, validate_lattice
from spinnet.vqe import AnsatzSpec, OptimizerConfig, adam_minimize, build_ansatz

h, spec = kagome_18()
for check in validate_lattice(spec):
    print(("PASS " if check.ok else "FAIL ") + check.name)
print(f"reference ground energy {spec.reference_energy:.6f} ({spec.reference_energy / 4 / spec.n:.4f} J per site)")

ansatz = AnsatzSpec("three-vertex-kagome", spec.n, 1, spec)
rec = adam_minimize(build_ansatz(ansatz), h, OptimizerConfig(max_iters=200), seed=0,
                    state0=ansatz.initial_state(), e_gs=spec.reference_energy)
print(f"p=1, {rec.param_count} params, {rec.iterations} steps: E = {rec.final_energy:.5f}, E~ = {rec.final_etilde:.3e}")
