"""Haar twirling over SU(2) and projection onto the commutant of U^{(x)n}.

Three estimators of T[H] = E_U[U^{(x)n} H U^{(x)n dag}]:

* ``"exact"``: conjugate into the Schur basis and keep only the
  blockdiag(M_i kron 1_{d_i}) part (Schur's lemma).
* ``"quadrature"``: Euler-angle product rule, exact for the trigonometric
  polynomials that appear (uniform grids in alpha and gamma, Gauss-Legendre in
  cos(beta)).
* ``"monte-carlo"``: Haar samples. For 4^n <= 4096 the averaged superoperator
  E[V kron conj(V)] is accumulated with one matrix product per chunk so it can
  be reused across many inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .schur import build_schur
from .su2 import _as_generator, haar_unitaries, quaternions_to_unitaries, tensor_power

METHODS = ("exact", "quadrature", "monte-carlo")
MAX_DENSE_QUBITS = 8
_SUPEROP_LIMIT = 4096
_CHUNK = 20000


@dataclass(frozen=True)
class TwirlResult:
    input: np.ndarray
    output: np.ndarray
    method: str
    samples: int | None = None
    order: int | None = None
    error_estimate: float = 0.0


class EquivarianceCheck(NamedTuple):
    ok: bool
    max_norm: float


def _check_hermitian(h: np.ndarray, n: int) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (2**n, 2**n):
        raise ValueError(f"expected a {2**n}x{2**n} matrix, got {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-10:
        raise ValueError("input is not Hermitian")
    return h


def _infer_n(h: np.ndarray) -> int:
    n = int(round(math.log2(h.shape[0])))
    if 2**n != h.shape[0]:
        raise ValueError("matrix dimension is not a power of two")
    return n


def tensor_powers(us: np.ndarray, n: int) -> np.ndarray:
    """Batched u^{(x)n} for u of shape (count, 2, 2)."""
    out = us
    for _ in range(n - 1):
        c, a, _ = out.shape
        out = np.einsum("sij,skl->sikjl", out, us).reshape(c, 2 * a, 2 * a)
    return out


def project_to_commutant(h: np.ndarray, n: int | None = None) -> np.ndarray:
    """Exact twirl: average over J_z within each irrep copy in the Schur basis."""
    h = np.asarray(h)
    n = n or _infer_n(h)
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"n <= {MAX_DENSE_QUBITS} required")
    s = build_schur(n)
    hs = s.matrix @ h @ s.matrix.T
    out = np.zeros_like(hs, dtype=complex)
    for spin, m in s.decomposition.blocks:
        d = spin.dimension()
        rows = s.sector_rows(spin)
        block = hs[np.ix_(rows, rows)].reshape(m, d, m, d)
        reduced = np.einsum("aubu->ab", block) / d
        out[np.ix_(rows, rows)] = np.kron(reduced, np.eye(d))
    return s.matrix.T @ out @ s.matrix


def euler_quadrature(n: int, order: int | None = None):
    """(unitaries, weights) of a product rule exact for degree-n polynomials in U, conj(U)."""
    order = order or n + 1
    k_beta = (order + 1) // 2 + 1
    x, w_beta = np.polynomial.legendre.leggauss(k_beta)
    betas = np.arccos(x)
    angles = 2 * np.pi * np.arange(order) / order
    a, b, g = np.meshgrid(angles, betas, angles, indexing="ij")
    wb = np.broadcast_to(w_beta[None, :, None], a.shape) / 2
    weights = (wb / order**2).ravel()
    a, b, g = a.ravel(), b.ravel(), g.ravel()
    # Rz(a) Ry(b) Rz(g) as a unit quaternion
    q = np.stack([
        np.cos(b / 2) * np.cos((a + g) / 2),
        -np.sin(b / 2) * np.sin((a - g) / 2),
        np.sin(b / 2) * np.cos((a - g) / 2),
        np.cos(b / 2) * np.sin((a + g) / 2),
    ], axis=1)
    return quaternions_to_unitaries(q), weights


def _weighted_twirl(h: np.ndarray, us: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(h, dtype=complex)
    for start in range(0, len(us), 2048):
        v = tensor_powers(us[start:start + 2048], n)
        w = weights[start:start + 2048]
        out += np.einsum("s,sij,jk,slk->il", w, v, h, v.conj(), optimize=True)
    return out


def monte_carlo_superoperator(n: int, samples: int, seed=None) -> np.ndarray:
    """E[V kron conj(V)] over Haar samples, indexed [(a,c),(b,d)] -> E[V_ac conj(V_bd)].

    Applied as T[H]_{ab} = sum_{cd} M[(a,c),(b,d)] H_cd.
    """
    dim = 2**n
    if dim * dim > _SUPEROP_LIMIT:
        raise ValueError("superoperator too large; use monte_carlo_twirl directly")
    rng = _as_generator(seed)
    acc = np.zeros((dim * dim, dim * dim), dtype=complex)
    done = 0
    while done < samples:
        count = min(_CHUNK, samples - done)
        v = tensor_powers(haar_unitaries(count, rng), n).reshape(count, dim * dim)
        acc += v.T @ v.conj()
        done += count
    return acc / samples


def apply_superoperator(m: np.ndarray, h: np.ndarray) -> np.ndarray:
    dim = h.shape[0]
    t = m.reshape(dim, dim, dim, dim)  # a c b d
    return np.einsum("acbd,cd->ab", t, h)


def monte_carlo_twirl(h: np.ndarray, n: int, samples: int, seed=None) -> np.ndarray:
    dim = 2**n
    if dim * dim <= _SUPEROP_LIMIT:
        return apply_superoperator(monte_carlo_superoperator(n, samples, seed), h)
    rng = _as_generator(seed)
    out = np.zeros_like(h, dtype=complex)
    done = 0
    while done < samples:
        count = min(256, samples - done)
        v = tensor_powers(haar_unitaries(count, rng), n)
        out += np.einsum("sij,jk,slk->il", v, h, v.conj(), optimize=True)
        done += count
    return out / samples


def twirl(h: np.ndarray, n: int | None = None, method: str = "exact", samples: int = 100_000,
          order: int | None = None, seed=None) -> TwirlResult:
    """Haar twirl of a Hermitian matrix by the chosen estimator."""
    h_in = np.asarray(h)
    n = n or _infer_n(h_in)
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"n <= {MAX_DENSE_QUBITS} required")
    h_in = _check_hermitian(h_in, n)
    if method == "exact":
        return TwirlResult(h_in, project_to_commutant(h_in, n), method)
    if method == "quadrature":
        us, w = euler_quadrature(n, order)
        out = _weighted_twirl(h_in, us, w, n)
        return TwirlResult(h_in, out, method, samples=len(w), order=order or n + 1)
    if method == "monte-carlo":
        out = monte_carlo_twirl(h_in, n, samples, seed)
        err = float(np.linalg.norm(h_in, 2)) / math.sqrt(samples)
        return TwirlResult(h_in, out, method, samples=samples, error_estimate=err)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def is_equivariant(a: np.ndarray, n: int | None = None, trials: int = 20, tol: float = 1e-9,
                   seed=None) -> EquivarianceCheck:
    """Max over Haar-random U of ||A U^{(x)n} - U^{(x)n} A||_F, compared with tol."""
    a = np.asarray(a)
    n = n or _infer_n(a)
    if a.shape != (2**n, 2**n):
        raise ValueError(f"expected a {2**n}x{2**n} matrix")
    worst = 0.0
    for u in haar_unitaries(trials, seed):
        big = tensor_power(u, n)
        worst = max(worst, float(np.linalg.norm(a @ big - big @ a)))
    return EquivarianceCheck(worst < tol, worst)
