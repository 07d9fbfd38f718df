"""Parameterised SU(2)-equivariant vertex gates.

A k-qubit vertex gate is ``S_k^T (blockdiag_i exp(i H_i) kron 1_{d_i}) S_k``
where ``H_i`` is an m_i x m_i Hermitian matrix expanded over a fixed basis
(identity, then generalised Gell-Mann: symmetric, antisymmetric, diagonal).
For m = 2 that basis is exactly (I, X, Y, Z). Parameters are laid out block
by block in decreasing spin, so a k-qubit gate has Catalan(k) parameters; the
global-phase redundancy is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag

from .schur import build_schur
from .su2 import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, IrrepDecomposition, decompose_qubits

MAX_ARITY = 6


@lru_cache(maxsize=None)
def hermitian_basis(m: int) -> tuple:
    """Basis of m x m Hermitian matrices: identity, symmetric, antisymmetric, diagonal."""
    basis = [np.eye(m, dtype=complex)]
    sym, anti = [], []
    for j in range(m):
        for k in range(j + 1, m):
            s = np.zeros((m, m), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((m, m), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            sym.append(s)
            anti.append(a)
    basis += sym + anti
    for l in range(1, m):
        d = np.zeros((m, m), dtype=complex)
        d[np.arange(l), np.arange(l)] = 1
        d[l, l] = -l
        basis.append(math.sqrt(2 / (l * (l + 1))) * d)
    for b in basis:
        b.setflags(write=False)
    return tuple(basis)


def expi_with_derivatives(h: np.ndarray, directions) -> tuple[np.ndarray, list[np.ndarray]]:
    """exp(iH) and its exact directional derivatives along each Hermitian direction.

    Uses the eigenbasis of H: d exp(iH)[B] = V (L o V^dag (iB) V) V^dag with the
    divided differences L_ab = (e^{i l_a} - e^{i l_b}) / (i l_a - i l_b).
    """
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(1j * evals)
    unitary = (vecs * phases) @ vecs.conj().T
    # (e^{ia} - e^{ib}) / (i(a - b)) = e^{i(a+b)/2} sinc((a - b)/2), stable as a -> b
    half_sum = (evals[:, None] + evals[None, :]) / 2
    half_diff = (evals[:, None] - evals[None, :]) / 2
    divided = np.exp(1j * half_sum) * np.sinc(half_diff / np.pi)
    derivs = []
    for b in directions:
        rotated = vecs.conj().T @ (1j * b) @ vecs
        derivs.append(vecs @ (divided * rotated) @ vecs.conj().T)
    return unitary, derivs


def p2(theta: float) -> np.ndarray:
    """diag(1, 1, 1, e^{i theta}) in the two-qubit Schur basis (phase on the singlet)."""
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def u2(theta) -> np.ndarray:
    """exp(i(t0 I + t1 X + t2 Y + t3 Z)) in closed form."""
    t0, t1, t2, t3 = (float(t) for t in theta)
    r = math.sqrt(t1 * t1 + t2 * t2 + t3 * t3)
    sinc = math.sin(r) / r if r > 1e-15 else 1.0
    rot = math.cos(r) * PAULI_I + 1j * sinc * (t1 * PAULI_X + t2 * PAULI_Y + t3 * PAULI_Z)
    return np.exp(1j * t0) * rot


def p3(theta) -> np.ndarray:
    """1_4 (+) (U_2(theta) kron 1_2) in the three-qubit Schur basis."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (4,):
        raise ValueError("p3 takes four parameters")
    return block_diag(np.eye(4), np.kron(u2(theta), np.eye(2)))


@dataclass(frozen=True)
class VertexGate:
    k: int
    params: np.ndarray
    matrix: np.ndarray
    decomposition: IrrepDecomposition

    @property
    def param_count(self) -> int:
        return self.decomposition.param_count


def split_params(k: int, params) -> list[np.ndarray]:
    """Split a flat parameter vector into per-spin-block coefficient vectors."""
    dec = decompose_qubits(k)
    params = np.asarray(params, dtype=float).ravel()
    if params.size != dec.param_count:
        raise ValueError(f"a {k}-qubit vertex gate takes {dec.param_count} parameters, got {params.size}")
    out, start = [], 0
    for m in dec.multiplicities:
        out.append(params[start:start + m * m])
        start += m * m
    return out


def _check_arity(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_ARITY:
        raise ValueError(f"vertex arity must be in [1, {MAX_ARITY}], got {k!r}")


def _block_terms(k: int, params):
    """Per-block (unitary, [derivatives]) in the Schur basis."""
    dec = decompose_qubits(k)
    terms = []
    for (spin, m), coeffs in zip(dec.blocks, split_params(k, params)):
        basis = hermitian_basis(m)
        h = sum(c * b for c, b in zip(coeffs, basis))
        u, du = expi_with_derivatives(h, basis)
        eye = np.eye(spin.dimension())
        terms.append((np.kron(u, eye), [np.kron(d, eye) for d in du]))
    return terms


def vertex_schur_block(k: int, params) -> np.ndarray:
    """The block-diagonal middle factor (+)_i exp(i H_i) kron 1_{d_i}."""
    _check_arity(k)
    return block_diag(*[u for u, _ in _block_terms(k, params)])


def vertex(k: int, params) -> VertexGate:
    """General k-qubit vertex gate; ``params`` has Catalan(k) entries."""
    _check_arity(k)
    s = build_schur(k).matrix
    params = np.array(params, dtype=float).ravel()
    mat = s.T @ vertex_schur_block(k, params) @ s
    params.setflags(write=False)
    return VertexGate(k, params, mat, decompose_qubits(k))


def vertex_derivatives(k: int, params) -> list[np.ndarray]:
    """dV/dparam_a for every parameter, in computational basis."""
    _check_arity(k)
    s = build_schur(k).matrix
    terms = _block_terms(k, params)
    sizes = [u.shape[0] for u, _ in terms]
    derivs = []
    offset = 0
    for (u, dus), size in zip(terms, sizes):
        for du in dus:
            mid = np.zeros((2**k, 2**k), dtype=complex)
            mid[offset:offset + size, offset:offset + size] = du
            derivs.append(s.T @ mid @ s)
        offset += size
    return derivs


def vertex2_matrix(theta: float) -> np.ndarray:
    s = build_schur(2).matrix
    return s.T @ p2(theta) @ s


def vertex2_derivative(theta: float) -> np.ndarray:
    s = build_schur(2).matrix
    return np.exp(1j * theta) * 1j * np.outer(s[3], s[3])


@lru_cache(maxsize=None)
def _p3_basis() -> tuple:
    """(Q, B_0..B_3): projector onto spin 3/2 and S_b^T (sigma_a kron 1_2) S_b."""
    s = build_schur(3).matrix
    sb = s[4:]
    q = s[:4].T @ s[:4]
    mats = [q.astype(complex)] + [sb.T @ np.kron(p, np.eye(2)) @ sb for p in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)]
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def vertex3_matrix(theta) -> np.ndarray:
    """S_3^T P_3(theta) S_3 in closed form."""
    q, b0, bx, by, bz = _p3_basis()
    t0, t1, t2, t3 = (float(t) for t in theta)
    r = math.sqrt(t1 * t1 + t2 * t2 + t3 * t3)
    sinc = math.sin(r) / r if r > 1e-15 else 1.0
    rot = math.cos(r) * b0 + 1j * sinc * (t1 * bx + t2 * by + t3 * bz)
    return q + np.exp(1j * t0) * rot


def vertex3_derivatives(theta) -> list[np.ndarray]:
    """d/dtheta_a of :func:`vertex3_matrix`, differentiating the closed form of U_2."""
    q, b0, bx, by, bz = _p3_basis()
    t = np.array([float(x) for x in theta])
    r = float(np.linalg.norm(t[1:]))
    phase = np.exp(1j * t[0])
    if r > 1e-4:
        sinc = math.sin(r) / r
        g = (math.cos(r) - sinc) / (r * r)  # (d sinc / dr) / r
    else:
        sinc, g = 1.0 - r * r / 6, -1.0 / 3 + r * r / 30
    paulis = (bx, by, bz)
    ndotb = t[1] * bx + t[2] * by + t[3] * bz
    rot = math.cos(r) * b0 + 1j * sinc * ndotb
    out = [1j * phase * rot]
    for k in range(3):
        tk = t[k + 1]
        d = -sinc * tk * b0 + 1j * (g * tk * ndotb + sinc * paulis[k])
        out.append(phase * d)
    return out


def _pauli_on(k: int, n: int, pauli: np.ndarray) -> np.ndarray:
    ops = [PAULI_I] * n
    ops[k] = pauli
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


@lru_cache(maxsize=None)
def scalar_generators() -> tuple:
    """(s1.s2, s2.s3, s1.s3, s1.(s2 x s3)) on three qubits."""
    sig = [[_pauli_on(q, 3, p) for p in (PAULI_X, PAULI_Y, PAULI_Z)] for q in range(3)]

    def dot(a, b):
        return sum(sig[a][c] @ sig[b][c] for c in range(3))

    triple = np.zeros((8, 8), dtype=complex)
    for a, b, c, sign in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1)):
        triple += sign * sig[0][a] @ sig[1][b] @ sig[2][c]
    gens = (dot(0, 1), dot(1, 2), dot(0, 2), triple)
    for g in gens:
        g.setflags(write=False)
    return gens


def scalar_gate(theta12: float, theta23: float, theta13: float, phi: float) -> np.ndarray:
    """exp(i(t12 s1.s2 + t23 s2.s3 + t13 s1.s3 + phi s1.(s2 x s3)))."""
    from scipy.linalg import expm

    g12, g23, g13, trip = scalar_generators()
    return expm(1j * (theta12 * g12 + theta23 * g23 + theta13 * g13 + phi * trip))


def scalar_to_vertex_params(theta12: float, theta23: float, theta13: float, phi: float) -> np.ndarray:
    """Five vertex(3, .) parameters reproducing :func:`scalar_gate` exactly.

    Follows from s1.s2 = 1 - 2G_I + 2G_Z, s2.s3 = 1 - 2G_I - sqrt3 G_X - G_Z,
    s1.s3 = 1 - 2G_I + sqrt3 G_X - G_Z and s1.(s2 x s3) = +2 sqrt3 G_Y, with the
    identity part becoming a phase on both spin sectors. The last sign follows
    from sigma^a sigma^c = delta_ac + i eps_acb sigma^b, so that
    [s1.s2, s2.s3] = -2i s1.(s2 x s3) = 4(1,2,3) - 4(1,3,2).
    """
    r3 = math.sqrt(3.0)
    phase = theta12 + theta23 + theta13
    c_i = -2.0 * phase
    c_x = r3 * (theta13 - theta23)
    c_y = 2.0 * r3 * phi
    c_z = 2.0 * theta12 - theta23 - theta13
    return np.array([phase, phase + c_i, c_x, c_y, c_z])


def phase_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|tr(A^dag B)| / dim; equals 1 iff A and B agree up to a global phase (for unitaries)."""
    return float(abs(np.trace(a.conj().T @ b)) / a.shape[0])
