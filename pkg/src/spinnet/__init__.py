"""SU(2)-equivariant quantum circuits built from spin-network vertex gates.

Submodules:
    su2          spins, Clebsch-Gordan coefficients, irrep decompositions, Haar sampling
    schur        dense Schur transform and block diagonalisation
    vertex       parameterised vertex gates
    perm         qubit permutations, generators and spin projectors
    twirl        Haar twirling and commutant projection
    simulator    statevector simulation with adjoint gradients
    hamiltonian  Heisenberg models, lattices and ground energies
    vqe          ansatze, Adam and experiment sweeps
"""
from .su2 import Spin, Su2Element, cg_coefficient, decompose_qubits, haar_sample
from .schur import build_schur
from .vertex import p2, p3, vertex, scalar_gate
from .perm import Permutation, PermAlgebraElement, permutation_operator, spin_projector, three_qubit_generators
from .twirl import twirl, is_equivariant, project_to_commutant
from .simulator import Circuit, apply_gate, singlet_state, expectation
from .hamiltonian import PauliHamiltonian, triangular_1d, kagome_18, ground_energy, normalized_energy
from .vqe import AnsatzSpec, OptimizerConfig, build_ansatz, init_params, adam_minimize, experiment_sweep

__version__ = "0.1.0"

__all__ = [
    "Spin", "Su2Element", "cg_coefficient", "decompose_qubits", "haar_sample",
    "build_schur",
    "p2", "p3", "vertex", "scalar_gate",
    "Permutation", "PermAlgebraElement", "permutation_operator", "spin_projector", "three_qubit_generators",
    "twirl", "is_equivariant", "project_to_commutant",
    "Circuit", "apply_gate", "singlet_state", "expectation",
    "PauliHamiltonian", "triangular_1d", "kagome_18", "ground_energy", "normalized_energy",
    "AnsatzSpec", "OptimizerConfig", "build_ansatz", "init_params", "adam_minimize", "experiment_sweep",
]
