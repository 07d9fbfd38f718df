"""Schur transform on a few qubits.

Builds the change of basis from the computational basis to coupled total-spin
states, prints the row labels, and shows that a collective rotation U^{(x)n}
turns into a block-diagonal matrix of spin representations.
"""
import numpy as np

from spinnet.schur import block_diagonalize, build_schur, off_block_residual
from spinnet.su2 import decompose_qubits, haar_sample, tensor_power

np.set_printoptions(precision=3, suppress=True, linewidth=120)

s3 = build_schur(3)
print("Three-qubit Schur transform, rows in coupled order:")
for label, row in zip(s3.row_index, s3.matrix):
    print(f"  {str(label):22s} {row}")

for n in range(2, 7):
    dec = decompose_qubits(n)
    blocks = ", ".join(f"spin {s} x{m}" for s, m in dec.blocks)
    print(f"n={n}: {blocks}  (sum m^2 = {dec.param_count})")

g = haar_sample(11)
s4 = build_schur(4)
conj = s4.matrix @ tensor_power(g.matrix(), 4) @ s4.matrix.T
print("\nOff-block weight of S U^(x)4 S^T:", off_block_residual(s4, conj))
spin1 = [b for b, lay in zip(block_diagonalize(s4, g), s4.layout) if lay.spin.twice_j == 2]
print("The three spin-1 copies carry the same 3x3 block:",
      all(np.allclose(b, spin1[0]) for b in spin1))
