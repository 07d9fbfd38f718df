"""Vertex gates: the most general SU(2)-equivariant k-qubit unitaries.

A two-qubit vertex gate only rephases the singlet. A three-qubit gate acts
as an arbitrary U(2) on the two spin-1/2 copies. The same three-qubit gate
can be written as an exponential of Heisenberg couplings plus a chiral term.
"""
import numpy as np

from spinnet.su2 import catalan, haar_unitaries, tensor_power
from spinnet.vertex import phase_fidelity, scalar_gate, scalar_to_vertex_params, vertex, vertex2_matrix

singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
v2 = vertex2_matrix(0.8)
print("V2(0.8) singlet -> phase", np.round(np.vdot(singlet, v2 @ singlet), 6), "=", np.round(np.exp(0.8j), 6))

for k in range(1, 5):
    print(f"{k}-qubit vertex gate: {catalan(k)} real parameters")

rng = np.random.default_rng(0)
v4 = vertex(4, rng.normal(size=14)).matrix
u = haar_unitaries(1, 1)[0]
print("[V4, U^(x)4] =", np.abs(v4 @ tensor_power(u, 4) - tensor_power(u, 4) @ v4).max())

theta = rng.uniform(-1, 1, 4)
w = scalar_gate(*theta)
v = vertex(3, scalar_to_vertex_params(*theta)).matrix
print(f"Heisenberg-plus-chiral gate vs vertex(3): 1 - fidelity = {abs(1 - phase_fidelity(w, v)):.1e}")
