"""Dense statevector simulation with adjoint-mode gradients.

Qubits are 0-indexed here, qubit 0 being the most significant bit (the first
kron factor). States are flat complex vectors of length 2**n; internally they
are viewed as rank-n tensors of shape (2,)*n so a k-qubit gate is a
tensordot over k axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .su2 import catalan
from .vertex import (
    vertex,
    vertex2_derivative,
    vertex2_matrix,
    vertex3_derivatives,
    vertex3_matrix,
    vertex_derivatives,
)

MAX_GATE_ARITY = 4
GATE_KINDS = ("vertex2", "vertex3", "vertexK", "fixed")


def _check_targets(targets, n: int) -> tuple:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"overlapping targets {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    return targets


def apply_gate(state: np.ndarray, gate: np.ndarray, targets, n: int | None = None) -> np.ndarray:
    """Return G applied to ``targets`` (ordered; targets[0] is the gate's leading qubit)."""
    state = np.asarray(state)
    n = n or int(np.log2(state.size))
    targets = _check_targets(targets, n)
    k = len(targets)
    if k > MAX_GATE_ARITY:
        raise ValueError(f"gate arity {k} exceeds {MAX_GATE_ARITY}")
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate shape {gate.shape} does not match {k} targets")
    return _apply_tensor(state.reshape((2,) * n), gate, targets).reshape(-1)


def _apply_tensor(psi: np.ndarray, gate: np.ndarray, targets: tuple) -> np.ndarray:
    k = len(targets)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate's output axes first
    return np.moveaxis(out, list(range(k)), list(targets))


def _singlet_part(psi: np.ndarray, a: int, b: int) -> np.ndarray:
    """(1 - SWAP_ab)/2 applied to a state tensor: the singlet projector on (a, b)."""
    return 0.5 * (psi - np.swapaxes(psi, a, b))


def embed_operator(gate: np.ndarray, targets, n: int) -> np.ndarray:
    """Dense 2^n x 2^n embedding of a gate, built column by column (test oracle)."""
    dim = 2**n
    cols = [apply_gate(col, gate, targets, n) for col in np.eye(dim, dtype=complex)]
    return np.array(cols).T


def singlet_state(pairs, n: int) -> np.ndarray:
    """Product of (|01> - |10>)/sqrt2 on each pair of a perfect matching."""
    pairs = [tuple(int(q) for q in p) for p in pairs]
    flat = [q for p in pairs for q in p]
    if any(len(p) != 2 for p in pairs):
        raise ValueError("each singlet needs exactly two qubits")
    if sorted(flat) != list(range(n)):
        raise ValueError(f"pairs {pairs} are not a perfect matching of {n} qubits")
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    psi = np.ones(1, dtype=complex)
    order = []
    for a, b in pairs:
        psi = np.kron(psi, singlet)
        order += [a, b]
    # axis i of the product holds qubit order[i]
    tensor = psi.reshape((2,) * n)
    inv = np.argsort(order)
    return np.transpose(tensor, inv).reshape(-1)


def total_spin_expectation(state: np.ndarray, n: int | None = None) -> float:
    """<J^2> via J^2 = (4n - n^2)/4 + sum_{i<j} SWAP_ij."""
    state = np.asarray(state)
    n = n or int(np.log2(state.size))
    psi = state.reshape((2,) * n)
    total = (4 * n - n * n) / 4 * np.vdot(psi, psi).real
    for i in range(n):
        for j in range(i + 1, n):
            total += np.vdot(psi, np.swapaxes(psi, i, j)).real
    return float(total)


def expectation(state: np.ndarray, h) -> float:
    """Real part of <psi|H|psi>; ``h`` is a dense/sparse matrix or has ``.apply``."""
    hpsi = h.apply(state) if hasattr(h, "apply") else h @ state
    val = np.vdot(state, hpsi)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}; H not Hermitian?")
    return float(val.real)


def reduced_overlap(bra: np.ndarray, ket: np.ndarray, targets, n: int) -> np.ndarray:
    """M[i, j] = sum over other qubits of conj(bra[i, rest]) ket[j, rest].

    Then <bra| G_targets |ket> = sum(G * M) for any gate G on ``targets``.
    """
    k = len(targets)
    b = np.moveaxis(bra.reshape((2,) * n), list(targets), list(range(k))).reshape(2**k, -1)
    c = np.moveaxis(ket.reshape((2,) * n), list(targets), list(range(k))).reshape(2**k, -1)
    return b.conj() @ c.T


@dataclass(frozen=True)
class GateOp:
    """One circuit element: kind, 0-based targets, and indices into the parameter vector."""

    kind: str
    targets: tuple
    param_index: tuple = ()
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "param_index", tuple(int(i) for i in self.param_index))
        expected = {
            "vertex2": 1 if len(self.targets) == 2 else None,
            "vertex3": 4 if len(self.targets) == 3 else None,
            "vertexK": catalan(len(self.targets)),
            "fixed": 0,
        }[self.kind]
        if expected is None:
            raise ValueError(f"{self.kind} does not act on {len(self.targets)} qubits")
        if len(self.param_index) != expected:
            raise ValueError(f"{self.kind} on {len(self.targets)} qubits takes {expected} params")
        if self.kind == "fixed" and self.matrix is None:
            raise ValueError("fixed gates need a matrix")

    def unitary(self, params: np.ndarray) -> np.ndarray:
        theta = params[list(self.param_index)]
        if self.kind == "vertex2":
            return vertex2_matrix(theta[0])
        if self.kind == "vertex3":
            return vertex3_matrix(theta)
        if self.kind == "vertexK":
            return vertex(len(self.targets), theta).matrix
        return self.matrix

    def act(self, psi: np.ndarray, params: np.ndarray, adjoint: bool = False, u=None) -> np.ndarray:
        """Apply the gate (or its inverse) to a state tensor; ``u`` reuses a precomputed matrix."""
        if self.kind == "vertex2":
            # V = 1 + (e^{i t} - 1) P_singlet
            theta = params[self.param_index[0]]
            phase = np.exp(-1j * theta if adjoint else 1j * theta) - 1.0
            return psi + phase * _singlet_part(psi, *self.targets)
        u = self.unitary(params) if u is None else u
        return _apply_tensor(psi, u.conj().T if adjoint else u, self.targets)

    def grad_terms(self, lam: np.ndarray, phi: np.ndarray, params: np.ndarray) -> list[float]:
        """2 Re <lam| dG/dtheta_a |phi> for each of the gate's parameters."""
        if self.kind == "vertex2":
            theta = params[self.param_index[0]]
            val = np.vdot(lam, _singlet_part(phi, *self.targets)) * 1j * np.exp(1j * theta)
            return [2.0 * val.real]
        n = phi.ndim
        m = reduced_overlap(lam, phi, self.targets, n)
        return [2.0 * np.sum(du * m).real for du in self.derivatives(params)]

    def derivatives(self, params: np.ndarray) -> list[np.ndarray]:
        theta = params[list(self.param_index)]
        if self.kind == "vertex2":
            return [vertex2_derivative(theta[0])]
        if self.kind == "vertex3":
            return vertex3_derivatives(theta)
        if self.kind == "vertexK":
            return vertex_derivatives(len(self.targets), theta)
        return []


@dataclass
class Circuit:
    n: int
    ops: list = field(default_factory=list)
    param_count: int = 0

    def add(self, kind: str, targets, param_index=(), matrix=None) -> "Circuit":
        op = GateOp(kind, _check_targets(targets, self.n), tuple(param_index), matrix)
        self.ops.append(op)
        if op.param_index:
            self.param_count = max(self.param_count, max(op.param_index) + 1)
        return self

    def _params(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise ValueError(f"circuit takes {self.param_count} params, got shape {params.shape}")
        return params

    def run(self, params, state: np.ndarray) -> np.ndarray:
        params = self._params(params)
        psi = np.asarray(state, dtype=complex).reshape((2,) * self.n)
        for op in self.ops:
            psi = op.act(psi, params)
        return psi.reshape(-1)

    def energy(self, params, state: np.ndarray, h) -> float:
        return expectation(self.run(params, state), h)

    def energy_and_gradient(self, params, state: np.ndarray, h) -> tuple[float, np.ndarray]:
        """<H> and its exact gradient by one forward and one backward sweep."""
        params = self._params(params)
        shape = (2,) * self.n
        psi = self.run(params, state)
        lam = (h.apply(psi) if hasattr(h, "apply") else h @ psi).reshape(shape)
        energy = float(np.vdot(psi, lam.reshape(-1)).real)
        grad = np.zeros(self.param_count)
        phi = psi.reshape(shape)
        for op in reversed(self.ops):
            u = None if op.kind == "vertex2" else op.unitary(params)
            # phi is the state right after op; undo op to get the state before it
            phi = op.act(phi, params, adjoint=True, u=u)
            if op.param_index:
                for idx, g in zip(op.param_index, op.grad_terms(lam, phi, params)):
                    grad[idx] += g
            lam = op.act(lam, params, adjoint=True, u=u)
        return energy, grad

    def gradient(self, params, state: np.ndarray, h) -> np.ndarray:
        return self.energy_and_gradient(params, state, h)[1]


def finite_difference_gradient(circuit: Circuit, params, state, h, step: float = 1e-5) -> np.ndarray:
    """Central differences, the oracle for the adjoint gradient."""
    params = np.asarray(params, dtype=float)
    grad = np.zeros_like(params)
    for i in range(params.size):
        shift = np.zeros_like(params)
        shift[i] = step
        grad[i] = (circuit.energy(params + shift, state, h) - circuit.energy(params - shift, state, h)) / (2 * step)
    return grad
