"""Twirling an operator over collective SU(2) rotations.

The exact projection onto the commutant, a Gauss-Legendre Euler-angle rule
and Monte Carlo sampling give the same answer; the Monte Carlo error falls
like 1/sqrt(samples).
"""
import numpy as np

from spinnet.twirl import is_equivariant, twirl
from spinnet.verify import random_hermitian

rng = np.random.default_rng(3)
h = random_hermitian(4, rng)
exact = twirl(h, 2).output
print("exact twirl of a random 2-qubit Hermitian:\n", np.round(exact, 4))
print("quadrature vs exact:", np.abs(twirl(h, 2, method="quadrature").output - exact).max())
for samples in (10**3, 10**4, 10**5, 10**6):
    mc = twirl(h, 2, method="monte-carlo", samples=samples, seed=1).output
    print(f"  {samples:>8} samples: max error {np.abs(mc - exact).max():.2e}")
print("input equivariant?", is_equivariant(h, 2, seed=0).ok, "output equivariant?", is_equivariant(exact, 2, seed=0).ok)
