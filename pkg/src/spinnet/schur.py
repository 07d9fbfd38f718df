"""Dense n-qubit Schur transform from sequential (left-to-right) spin coupling.

Rows are labelled by coupling paths: the running total spin after adding
qubits 1..k, followed by the final J_z. Row order is highest final spin first,
then descending path (lexicographic), then J_z descending. All rows belonging
to one irrep copy are contiguous, so an equivariant operator takes the form
``blockdiag(U_i kron 1_{d_i})`` in this basis.

Two sign conventions are available:

``"tableau-parity"`` (default)
    Plain Clebsch-Gordan products multiplied by ``(-1)**l`` where ``l`` counts
    pairs of steps (i < j) with step i lowering the spin and step j raising
    it. Every adjacent transposition then has non-positive off-diagonal
    entries in the multiplicity basis. For two and three qubits this is the
    widely printed form of S_2 and S_3, e.g. ``(2,3) = -Z/2 - sqrt(3) X/2`` on
    the pair of spin-1/2 copies.
``"cg-product"``
    Plain Condon-Shortley products (Young's orthogonal form, positive
    off-diagonals).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .su2 import IrrepDecomposition, Spin, Su2Element, _cg_twice, decompose_qubits, spin_rep_matrix, tensor_power

CONVENTIONS = ("tableau-parity", "cg-product")
MAX_QUBITS = 12


@dataclass(frozen=True)
class CouplingPath:
    """Running spins (as 2j) after each qubit; ``twice_final_m`` is None for a bare prefix."""

    twice_spins: tuple
    twice_final_m: int | None = None

    def __post_init__(self):
        ts = self.twice_spins
        if not ts or ts[0] != 1:
            raise ValueError("a coupling path starts at spin 1/2")
        for a, b in zip(ts, ts[1:]):
            if abs(a - b) != 1 or b < 0:
                raise ValueError(f"invalid coupling step {a}/2 -> {b}/2")
        if self.twice_final_m is not None:
            if abs(self.twice_final_m) > ts[-1] or (ts[-1] - self.twice_final_m) % 2:
                raise ValueError("final J_z out of range")

    @property
    def spins(self) -> list[Spin]:
        return [Spin(t) for t in self.twice_spins]

    @property
    def final_spin(self) -> Spin:
        return Spin(self.twice_spins[-1])

    def lowering_raising_pairs(self) -> int:
        """Number of step pairs (i < j) with step i lowering and step j raising the spin."""
        steps = [1] + [b - a for a, b in zip(self.twice_spins, self.twice_spins[1:])]
        count = lowered = 0
        for s in steps:
            if s < 0:
                lowered += 1
            else:
                count += lowered
        return count

    def __str__(self):
        arrow = "->".join(str(s) for s in self.spins)
        if self.twice_final_m is None:
            return arrow
        tm = self.twice_final_m
        return f"{arrow}; Jz={tm // 2 if tm % 2 == 0 else f'{tm}/2'}"


def coupling_paths(n: int) -> list[CouplingPath]:
    """All sequential coupling paths of n qubits, in Schur row order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    paths = [(1,)]
    for _ in range(n - 1):
        paths = [p + (p[-1] + d,) for p in paths for d in (1, -1) if p[-1] + d >= 0]
    paths.sort(key=lambda p: (-p[-1], tuple(-x for x in p)))
    return [CouplingPath(p) for p in paths]


@dataclass(frozen=True)
class BlockLayout:
    """Position of one irrep copy inside the Schur basis."""

    spin: Spin
    copy: int
    start: int

    @property
    def stop(self) -> int:
        return self.start + self.spin.dimension()


@dataclass(frozen=True)
class SchurTransform:
    n: int
    matrix: np.ndarray
    row_index: tuple
    decomposition: IrrepDecomposition
    layout: tuple
    convention: str

    def copies(self, spin) -> list[BlockLayout]:
        spin = Spin.of(spin)
        return [b for b in self.layout if b.spin == spin]

    def sector_rows(self, spin) -> np.ndarray:
        """Row indices of every copy of ``spin``, copy-major then J_z."""
        return np.concatenate([np.arange(b.start, b.stop) for b in self.copies(spin)])


def _path_vectors(twice_spins: tuple) -> dict:
    """Map 2M -> coupled state vector on len(path) qubits (plain CG products)."""
    vecs = {1: np.array([1.0, 0.0]), -1: np.array([0.0, 1.0])}
    prev = 1
    for tj in twice_spins[1:]:
        new = {}
        for tM in range(tj, -tj - 1, -2):
            v = None
            for tm, qubit in ((1, np.array([1.0, 0.0])), (-1, np.array([0.0, 1.0]))):
                prev_m = tM - tm
                if prev_m not in vecs:
                    continue
                c = _cg_twice(prev, prev_m, 1, tm, tj, tM)
                if c == 0.0:
                    continue
                term = c * np.kron(vecs[prev_m], qubit)
                v = term if v is None else v + term
            new[tM] = v
        vecs, prev = new, tj
    return vecs


@lru_cache(maxsize=None)
def build_schur(n: int, convention: str = "tableau-parity") -> SchurTransform:
    """Schur transform on n qubits (1 <= n <= 12); cached per (n, convention)."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")
    dim = 2**n
    matrix = np.zeros((dim, dim))
    rows, layout = [], []
    copy_counter: dict = {}
    for path in coupling_paths(n):
        vecs = _path_vectors(path.twice_spins)
        sign = 1.0
        if convention == "tableau-parity" and path.lowering_raising_pairs() % 2:
            sign = -1.0
        spin = path.final_spin
        layout.append(BlockLayout(spin, copy_counter.get(spin, 0), len(rows)))
        copy_counter[spin] = copy_counter.get(spin, 0) + 1
        for tM in range(spin.twice_j, -spin.twice_j - 1, -2):
            matrix[len(rows)] = sign * vecs[tM] + 0.0  # no signed zeros
            rows.append(CouplingPath(path.twice_spins, tM))
    matrix.setflags(write=False)
    return SchurTransform(n, matrix, tuple(rows), decompose_qubits(n), tuple(layout), convention)


def off_block_residual(s: SchurTransform, op_schur_basis: np.ndarray) -> float:
    """Frobenius norm of everything outside the per-copy diagonal blocks."""
    mask = np.ones(op_schur_basis.shape, dtype=bool)
    for b in s.layout:
        mask[b.start:b.stop, b.start:b.stop] = False
    return float(np.linalg.norm(op_schur_basis[mask]))


def block_diagonalize(s: SchurTransform, g: Su2Element | np.ndarray) -> list[np.ndarray]:
    """Diagonal blocks of S U(g)^{(x)n} S^dagger, one per irrep copy in row order.

    ``g`` may be an :class:`Su2Element` or a 2x2 unitary.
    """
    u = g.matrix() if isinstance(g, Su2Element) else np.asarray(g)
    conj = s.matrix @ tensor_power(u, s.n) @ s.matrix.T
    return [conj[b.start:b.stop, b.start:b.stop] for b in s.layout]


def expected_blocks(s: SchurTransform, g: Su2Element) -> list[np.ndarray]:
    """Spin representation matrices predicted for each block of :func:`block_diagonalize`."""
    return [spin_rep_matrix(b.spin, g) for b in s.layout]


def export_schur_csv(s: SchurTransform, path) -> None:
    """Write the matrix as CSV, one row per Schur basis state, with a label header."""
    labels = "; ".join(str(r) for r in s.row_index)
    header = f"Schur transform n={s.n} convention={s.convention}\nrows: {labels}"
    np.savetxt(path, s.matrix, delimiter=",", fmt="%.17g", header=header)


def load_schur_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
