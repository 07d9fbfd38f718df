"""SU(2) representation theory on qubit registers.

Spins are stored as ``twice_j`` integers so half-integers stay exact.
Clebsch-Gordan coefficients use the Racah closed form evaluated with
rational arithmetic (Condon-Shortley phases); only the final square root
is taken in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

import numpy as np

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _twice(value) -> int:
    """Return 2*value as an int, rejecting anything that is not a half-integer."""
    if isinstance(value, Spin):
        return value.twice_j
    doubled = 2 * value
    rounded = round(doubled)
    if abs(doubled - rounded) > 1e-9:
        raise ValueError(f"{value!r} is not a half-integer")
    return int(rounded)


@total_ordering
@dataclass(frozen=True)
class Spin:
    """Angular-momentum label J, stored as 2J."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, (int, np.integer)) or self.twice_j < 0:
            raise ValueError(f"twice_j must be a non-negative integer, got {self.twice_j!r}")

    @classmethod
    def of(cls, j) -> "Spin":
        """Build from a half-integer value such as ``0.5`` or ``Fraction(3, 2)``."""
        if isinstance(j, Spin):
            return j
        return cls(_twice(j))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    def dimension(self) -> int:
        return self.twice_j + 1

    def casimir(self) -> float:
        """Eigenvalue j(j+1) of the total-spin operator."""
        return self.j * (self.j + 1)

    def __lt__(self, other):
        if not isinstance(other, Spin):
            return NotImplemented
        return self.twice_j < other.twice_j

    def __str__(self):
        return str(self.twice_j // 2) if self.twice_j % 2 == 0 else f"{self.twice_j}/2"


@dataclass(frozen=True)
class SpinState:
    """Basis label |j, m> with m stored as 2m."""

    j: Spin
    twice_m: int

    def __post_init__(self):
        tj = self.j.twice_j
        if abs(self.twice_m) > tj or (tj - self.twice_m) % 2:
            raise ValueError(f"m={self.twice_m}/2 is not a valid projection for j={self.j}")

    @property
    def m(self) -> float:
        return self.twice_m / 2


@dataclass(frozen=True)
class Su2Element:
    """Rotation g = exp(-i angle sigma.axis / 2)."""

    axis: tuple
    angle: float

    def __post_init__(self):
        axis = tuple(float(a) for a in self.axis)
        if len(axis) != 3:
            raise ValueError("axis must be a 3-vector")
        if abs(math.sqrt(sum(a * a for a in axis)) - 1.0) > 1e-12:
            raise ValueError(f"axis must have unit norm, got {axis}")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", float(self.angle))

    @classmethod
    def identity(cls) -> "Su2Element":
        return cls((0.0, 0.0, 1.0), 0.0)

    @classmethod
    def from_quaternion(cls, q) -> "Su2Element":
        """Inverse of :meth:`quaternion`; ``q = (cos(a/2), sin(a/2) * axis)``."""
        q = np.asarray(q, dtype=float)
        q = q / np.linalg.norm(q)
        vec_norm = np.linalg.norm(q[1:])
        if vec_norm < 1e-15:
            return cls((0.0, 0.0, 1.0), 0.0 if q[0] > 0 else 2 * math.pi)
        angle = 2.0 * math.atan2(vec_norm, q[0])
        return cls(tuple(q[1:] / vec_norm), angle)

    def quaternion(self) -> np.ndarray:
        half = self.angle / 2
        return np.array([math.cos(half), *(math.sin(half) * np.array(self.axis))])

    def matrix(self) -> np.ndarray:
        """The defining 2x2 representation."""
        return spin_rep_matrix(Spin(1), self)


@lru_cache(maxsize=None)
def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if not (abs(tj1 - tj2) <= tJ <= tj1 + tj2) or (tj1 + tj2 + tJ) % 2:
        return 0.0
    f = math.factorial
    # every argument below is an integer once the parity checks above pass
    a = (tJ + tj1 - tj2) // 2
    b = (tJ - tj1 + tj2) // 2
    c = (tj1 + tj2 - tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1
    prefactor = Fraction((tJ + 1) * f(a) * f(b) * f(c), f(d))
    prefactor *= (
        f((tJ + tM) // 2) * f((tJ - tM) // 2)
        * f((tj1 - tm1) // 2) * f((tj1 + tm1) // 2)
        * f((tj2 - tm2) // 2) * f((tj2 + tm2) // 2)
    )
    total = Fraction(0)
    for k in range(0, c + 1):
        terms = (
            c - k,
            (tj1 - tm1) // 2 - k,
            (tj2 + tm2) // 2 - k,
            (tJ - tj2 + tm1) // 2 + k,
            (tJ - tj1 - tm2) // 2 + k,
        )
        if min(terms) < 0:
            continue
        denom = f(k)
        for t in terms:
            denom *= f(t)
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    squared = prefactor * total * total
    return math.copysign(math.sqrt(squared.numerator) / math.sqrt(squared.denominator), total)


def cg_coefficient(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley).

    Spins may be :class:`Spin` instances or half-integer numbers. Returns 0 when
    ``M != m1 + m2`` or the triangle rule fails. Raises ``ValueError`` when a
    projection lies outside its spin range.
    """
    tj1, tj2, tJ = _twice(j1), _twice(j2), _twice(J)
    tm1, tm2, tM = _twice(m1), _twice(m2), _twice(M)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tJ, tM)):
        if tj < 0:
            raise ValueError("spin must be non-negative")
        SpinState(Spin(tj), tm)
    return _cg_twice(tj1, tm1, tj2, tm2, tJ, tM)


@lru_cache(maxsize=None)
def _spin_matrices_cached(twice_j: int):
    j = twice_j / 2
    ms = j - np.arange(twice_j + 1)  # m = +j ... -j
    jz = np.diag(ms).astype(complex)
    jplus = np.zeros((twice_j + 1, twice_j + 1), dtype=complex)
    for col in range(1, twice_j + 1):
        m = ms[col]
        jplus[col - 1, col] = math.sqrt(j * (j + 1) - m * (m + 1))
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    for mat in (jx, jy, jz):
        mat.setflags(write=False)
    return jx, jy, jz


def spin_matrices(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular-momentum matrices (Jx, Jy, Jz) in the basis m = +j, ..., -j."""
    return _spin_matrices_cached(Spin.of(j).twice_j)


def spin_rep_matrix(j, g: Su2Element) -> np.ndarray:
    """Spin-j representation exp(-i angle J.axis) of ``g``."""
    spin = Spin.of(j)
    n = np.asarray(g.axis)
    if spin.twice_j == 1:
        half = g.angle / 2
        nsig = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
        return math.cos(half) * PAULI_I - 1j * math.sin(half) * nsig
    jx, jy, jz = spin_matrices(spin)
    generator = n[0] * jx + n[1] * jy + n[2] * jz
    evals, evecs = np.linalg.eigh(generator)
    return (evecs * np.exp(-1j * g.angle * evals)) @ evecs.conj().T


@dataclass(frozen=True)
class IrrepDecomposition:
    """Irrep content of n qubits: blocks of (spin, multiplicity), highest spin first."""

    n: int
    blocks: tuple

    @property
    def spins(self) -> list[Spin]:
        return [s for s, _ in self.blocks]

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.blocks]

    @property
    def dims(self) -> list[int]:
        return [s.dimension() for s, _ in self.blocks]

    @property
    def dimension(self) -> int:
        return sum(m * s.dimension() for s, m in self.blocks)

    @property
    def param_count(self) -> int:
        """Real dimension of the equivariant unitary group, sum of m_i^2."""
        return sum(m * m for _, m in self.blocks)

    def multiplicity(self, spin) -> int:
        spin = Spin.of(spin)
        for s, m in self.blocks:
            if s == spin:
                return m
        return 0


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def decompose_qubits(n: int) -> IrrepDecomposition:
    """Schur-Weyl decomposition of (C^2)^{(x)n}.

    Spin n/2 - i appears with multiplicity C(n, i) - C(n, i-1), the dimension of
    the two-row S_n irrep with i boxes in the second row.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > 30:
        raise ValueError("n > 30 is outside the supported range")
    blocks = []
    for i in range(n // 2 + 1):
        mult = 1 if i == 0 else math.comb(n, i) - math.comb(n, i - 1)
        blocks.append((Spin(n - 2 * i), mult))
    return IrrepDecomposition(n, tuple(blocks))


def _as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def haar_quaternions(count: int, rng_seed=None) -> np.ndarray:
    """Uniform unit quaternions, shape (count, 4)."""
    rng = _as_generator(rng_seed)
    q = rng.standard_normal((count, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def quaternions_to_unitaries(q: np.ndarray) -> np.ndarray:
    """Map unit quaternions (a, b) to a - i b.sigma, shape (count, 2, 2)."""
    a, bx, by, bz = q.T
    u = np.empty((q.shape[0], 2, 2), dtype=complex)
    u[:, 0, 0] = a - 1j * bz
    u[:, 0, 1] = -1j * bx - by
    u[:, 1, 0] = -1j * bx + by
    u[:, 1, 1] = a + 1j * bz
    return u


def haar_unitaries(count: int, rng_seed=None) -> np.ndarray:
    """``count`` Haar-random SU(2) matrices, shape (count, 2, 2)."""
    return quaternions_to_unitaries(haar_quaternions(count, rng_seed))


def haar_sample(rng_seed=None) -> Su2Element:
    """One Haar-random SU(2) element. Accepts a seed or a numpy Generator."""
    return Su2Element.from_quaternion(haar_quaternions(1, rng_seed)[0])


def tensor_power(u: np.ndarray, n: int) -> np.ndarray:
    """u^{(x)n} as a dense matrix."""
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, u)
    return out
