"""Qubit permutations, the permutation algebra, and total-spin projectors.

Points are labelled 1..n in cycle notation. A permutation acts on product
states by ``alpha |v_1 ... v_n> = |v_{alpha^-1(1)} ... v_{alpha^-1(n)}>`` so
the qubit at position i moves to position alpha(i). Products compose right to
left: ``(a * b)`` applies b first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .schur import build_schur
from .su2 import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, Spin, decompose_qubits


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..n}; ``image[i-1]`` is the image of point i."""

    image: tuple

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a bijection on 1..{len(image)}: {image}")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, cycles, n: int) -> "Permutation":
        """Build from 1-based cycles, e.g. ``[(1, 2, 3)]`` maps 1->2->3->1."""
        image = list(range(1, n + 1))
        seen = set()
        for cyc in cycles:
            cyc = tuple(int(c) for c in cyc)
            if any(c < 1 or c > n for c in cyc):
                raise ValueError(f"cycle {cyc} has points outside 1..{n}")
            if seen & set(cyc) or len(set(cyc)) != len(cyc):
                raise ValueError("cycles must be disjoint and repeat-free")
            seen |= set(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                image[a - 1] = b
        return cls(tuple(image))

    def __call__(self, point: int) -> int:
        return self.image[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise ValueError("permutations act on different point sets")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.image, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def extend(self, n: int) -> "Permutation":
        if n < self.n:
            raise ValueError("cannot shrink a permutation")
        return Permutation(self.image + tuple(range(self.n + 1, n + 1)))

    def cycles(self) -> list[tuple]:
        """Non-trivial cycles, each starting at its smallest point."""
        out, seen = [], set()
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc, p = [start], self(start)
            seen.add(start)
            while p != start:
                cyc.append(p)
                seen.add(p)
                p = self(p)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def transpositions(self) -> list[tuple]:
        """Transpositions whose product (rightmost first) equals this permutation."""
        out = []
        for cyc in self.cycles():
            # (a1 a2 ... ak) = (a1 a2)(a2 a3)...(a_{k-1} a_k)
            out.extend((a, b) for a, b in zip(cyc, cyc[1:]))
        return out

    def __str__(self):
        cycles = self.cycles()
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cycles) or "1"


def cycle(*points, n: int | None = None) -> Permutation:
    """Shorthand: ``cycle(1, 2, 3)`` is (1,2,3) on max(points) or n points."""
    n = n or max(points)
    return Permutation.from_cycles([points], n)


def apply_permutation(alpha: Permutation, psi: np.ndarray) -> np.ndarray:
    """Apply the qubit permutation to a state vector of length 2**alpha.n."""
    n = alpha.n
    tensor = np.asarray(psi).reshape((2,) * n)
    # output axis i carries input axis alpha^-1(i)
    axes = [alpha.inverse()(i + 1) - 1 for i in range(n)]
    return np.transpose(tensor, axes).reshape(-1)


def permutation_operator(alpha: Permutation, n: int | None = None) -> np.ndarray:
    """Dense 2^n x 2^n permutation unitary (real)."""
    n = n or alpha.n
    if alpha.n > n:
        raise ValueError(f"permutation on {alpha.n} points does not fit on {n} qubits")
    alpha = alpha.extend(n)
    dim = 2**n
    cols = apply_permutation(alpha, np.arange(dim)).astype(int)
    # entry [cols[j]... ] : the basis state at flat index k of the output came from input index cols[k]
    mat = np.zeros((dim, dim))
    mat[np.arange(dim), cols] = 1.0
    return mat


def pauli_dot(a: int, b: int, n: int) -> np.ndarray:
    """sigma_a . sigma_b on n qubits, 1-based qubit labels."""
    total = np.zeros((2**n, 2**n), dtype=complex)
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        ops = [PAULI_I] * n
        ops[a - 1] = p
        ops[b - 1] = p
        term = ops[0]
        for o in ops[1:]:
            term = np.kron(term, o)
        total += term
    return total


class PermAlgebraElement:
    """Finite formal sum of permutations with complex coefficients."""

    def __init__(self, terms, n: int):
        self.n = n
        merged: dict = {}
        for perm, coeff in (terms.items() if isinstance(terms, dict) else terms):
            perm = perm.extend(n) if perm.n < n else perm
            if perm.n != n:
                raise ValueError("term acts on more points than the register")
            merged[perm] = merged.get(perm, 0) + coeff
        self.terms = {p: c for p, c in merged.items() if c != 0}

    @classmethod
    def scalar(cls, c, n: int) -> "PermAlgebraElement":
        return cls({Permutation.identity(n): c}, n)

    @classmethod
    def of(cls, alpha: Permutation, coeff=1, n: int | None = None) -> "PermAlgebraElement":
        return cls({alpha: coeff}, n or alpha.n)

    def _coerce(self, other):
        if isinstance(other, PermAlgebraElement):
            if other.n != self.n:
                raise ValueError("elements live on different registers")
            return other
        if isinstance(other, Permutation):
            return PermAlgebraElement.of(other, 1, self.n)
        return PermAlgebraElement.scalar(other, self.n)

    def __add__(self, other):
        other = self._coerce(other)
        return PermAlgebraElement(list(self.terms.items()) + list(other.terms.items()), self.n)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (PermAlgebraElement, Permutation)):
            other = self._coerce(other)
            terms = [(a * b, ca * cb) for a, ca in self.terms.items() for b, cb in other.terms.items()]
            return PermAlgebraElement(terms, self.n)
        return PermAlgebraElement({p: c * other for p, c in self.terms.items()}, self.n)

    def __rmul__(self, other):
        if isinstance(other, Permutation):
            return self._coerce(other) * self
        return self * other

    def __eq__(self, other):
        if not isinstance(other, PermAlgebraElement) or other.n != self.n:
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(abs(complex(self.terms.get(k, 0)) - complex(other.terms.get(k, 0))) < 1e-14 for k in keys)

    __hash__ = None

    def matrix(self) -> np.ndarray:
        """Operator realisation on (C^2)^{(x)n}."""
        out = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for perm, coeff in self.terms.items():
            out += complex(coeff) * permutation_operator(perm, self.n)
        return out

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free action on a state vector."""
        out = np.zeros(2**self.n, dtype=complex)
        for perm, coeff in self.terms.items():
            out += complex(coeff) * apply_permutation(perm, psi)
        return out

    def relabel(self, mapping: dict, n: int) -> "PermAlgebraElement":
        """Relabel every point p as mapping[p] on an n-point register."""
        terms = []
        for perm, coeff in self.terms.items():
            cycles = [tuple(mapping[p] for p in c) for c in perm.cycles()]
            terms.append((Permutation.from_cycles(cycles, n), coeff))
        return PermAlgebraElement(terms, n)

    def __repr__(self):
        parts = []
        ordered = sorted(self.terms.items(), key=lambda t: (len(t[0].transpositions()), t[0].cycles()))
        for perm, coeff in ordered:
            parts.append(f"({_fmt_coeff(coeff)})*{perm}")
        return " + ".join(parts) if parts else "0"


def _fmt_coeff(c) -> str:
    c = complex(c)
    if abs(c.imag) < 1e-15:
        return f"{c.real:.6g}"
    if abs(c.real) < 1e-15:
        return f"{c.imag:.6g}i"
    return f"{c.real:.6g}{c.imag:+.6g}i"


def total_spin_squared(n: int) -> np.ndarray:
    """J^2 = (4n - n^2)/4 + sum_{i<j} (i,j), dense."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = (4 * n - n * n) / 4 * np.eye(2**n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out = out + permutation_operator(cycle(i, j, n=n))
    return out


def total_spin_squared_pauli(n: int) -> np.ndarray:
    """(1/4)(sum_k sigma_k)^2 built from Pauli matrices, an independent oracle."""
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        s = np.zeros((dim, dim), dtype=complex)
        for k in range(n):
            ops = [PAULI_I] * n
            ops[k] = p
            term = ops[0]
            for o in ops[1:]:
                term = np.kron(term, o)
            s += term
        out += s @ s
    return out / 4


@dataclass(frozen=True)
class SpinProjector:
    n: int
    spin: Spin
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ psi


def spin_projector(n: int, s) -> SpinProjector:
    """Lagrange-interpolation projector onto total spin s."""
    spin = Spin.of(s)
    dec = decompose_qubits(n)
    if spin not in dec.spins:
        raise ValueError(f"spin {spin} does not occur on {n} qubits")
    j2 = total_spin_squared(n)
    eye = np.eye(2**n)
    proj = eye.copy()
    for other in dec.spins:
        if other == spin:
            continue
        proj = proj @ (j2 - other.casimir() * eye) / (spin.casimir() - other.casimir())
    proj.setflags(write=False)
    return SpinProjector(n, spin, proj)


@lru_cache(maxsize=None)
def _three_qubit_generators():
    e = PermAlgebraElement.scalar(1, 3)
    t12, t23, t13 = (PermAlgebraElement.of(cycle(a, b, n=3)) for a, b in ((1, 2), (2, 3), (1, 3)))
    c123 = PermAlgebraElement.of(cycle(1, 2, 3))
    c132 = PermAlgebraElement.of(cycle(1, 3, 2))
    r3 = math.sqrt(3)
    g_i = e - (t12 + t23 + t13) * Fraction(1, 3)
    g_x = (e * -0.5 + t23 + t12 * 0.5 - c123 * 0.5 - c132 * 0.5) * (-2 / r3)
    g_y = (e + c123 * 2 - t12 - t23 - t13) * (1j / r3)
    g_z = t12 - (e + c132 + c123) * Fraction(1, 3)
    return g_i, g_x, g_y, g_z


def three_qubit_generators() -> tuple:
    """(G_I, G_X, G_Y, G_Z) as formal permutation sums.

    On the Schur basis they vanish on spin 3/2 and act as (I, X, Y, Z) kron 1_2
    on the two spin-1/2 copies.
    """
    return _three_qubit_generators()


def generalized_perm_exp(element: PermAlgebraElement) -> np.ndarray:
    """exp of the operator realisation (scipy Pade scaling-and-squaring)."""
    return expm(element.matrix())


def generator_exponent(theta) -> PermAlgebraElement:
    """i * sum_k theta_k G_k for theta = (t_I, t_X, t_Y, t_Z)."""
    gens = three_qubit_generators()
    total = PermAlgebraElement({}, 3)
    for t, g in zip(theta, gens):
        total = total + g * (1j * float(t))
    return total


def embed_generator(gen: PermAlgebraElement, targets, n: int) -> PermAlgebraElement:
    """Relabel a generator on points 1..k onto 1-based qubits ``targets`` of n."""
    targets = tuple(int(t) for t in targets)
    if len(targets) != gen.n:
        raise ValueError(f"need {gen.n} targets, got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets collide: {targets}")
    if any(t < 1 or t > n for t in targets):
        raise ValueError(f"targets must lie in 1..{n}")
    return gen.relabel({i + 1: t for i, t in enumerate(targets)}, n)


def perm_rep_in_multiplicity_basis(alpha: Permutation, n: int = 3) -> np.ndarray:
    """2x2 action of alpha on the two spin-1/2 copies of three qubits.

    Entry (a, b) is read off the J_z = +1/2 rows of copies a and b.
    """
    if n != 3:
        raise ValueError("only the three-qubit case is implemented")
    s = build_schur(3)
    conj = s.matrix @ permutation_operator(alpha, 3) @ s.matrix.T
    rows = [b.start for b in s.copies(0.5)]
    return conj[np.ix_(rows, rows)]
