"""Permutation-algebra view of the three-qubit generators.

The generators G_I, G_X, G_Y, G_Z are formal sums of permutations. On the
Schur basis they vanish on spin 3/2 and act as Pauli matrices on the two
spin-1/2 copies. Relabelling points embeds them into a larger register.
"""
import numpy as np

from spinnet.perm import cycle, embed_generator, perm_rep_in_multiplicity_basis, spin_projector, three_qubit_generators
from spinnet.schur import build_schur

np.set_printoptions(precision=3, suppress=True)
names = "IXYZ"
s3 = build_schur(3).matrix
for name, g in zip(names, three_qubit_generators()):
    print(f"G_{name} = {g}")
    print((s3 @ g.matrix() @ s3.T)[4:, 4:])

print("\nG_X relabelled onto qubits (3, 4, 7) of 8:")
print(embed_generator(three_qubit_generators()[1], (3, 4, 7), 8))

for perm in (cycle(1, 2, n=3), cycle(2, 3), cycle(1, 2, 3)):
    print(f"{perm} on the spin-1/2 copies:\n{perm_rep_in_multiplicity_basis(perm)}")

print("\nrank of the spin projectors on 4 qubits:", {str(s): spin_projector(4, s).rank for s in (0, 1, 2)})
