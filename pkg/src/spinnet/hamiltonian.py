"""Heisenberg Hamiltonians on chains and the 18-site Kagome cluster.

Hamiltonians are lists of weighted Pauli strings. Application is matrix free:
a bond carrying XX + YY + ZZ with a common weight w acts as w (2 SWAP - 1),
which is a single axis swap on the state tensor; any other string is applied
factor by factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import yaml
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

PAULI_LETTERS = "IXYZ"
_SINGLE = {
    "I": sp.identity(2, format="csr", dtype=complex),
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best_energy: float, best_residual: float):
        super().__init__(message)
        self.best_energy = best_energy
        self.best_residual = best_residual


def pauli_string(n: int, ops: dict) -> str:
    """``pauli_string(4, {0: 'X', 2: 'X'}) == 'XIXI'``."""
    chars = ["I"] * n
    for q, p in ops.items():
        chars[q] = p
    return "".join(chars)


@dataclass
class PauliHamiltonian:
    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for w, s in self.terms:
            if len(s) != self.n or set(s) - set(PAULI_LETTERS):
                raise ValueError(f"bad Pauli string {s!r} for {self.n} qubits")
            clean.append((float(w), s))
        self.terms = clean
        self._plan()

    def _plan(self):
        # split into Heisenberg bonds (fast path) and everything else
        by_pair: dict = {}
        for w, s in self.terms:
            support = [i for i, c in enumerate(s) if c != "I"]
            if len(support) == 2 and s[support[0]] == s[support[1]]:
                by_pair.setdefault(tuple(support), []).append((w, s[support[0]]))
            else:
                by_pair.setdefault(("other", len(by_pair)), []).append((w, s))
        self._bonds, self._generic = [], []
        for key, items in by_pair.items():
            if key[0] != "other":
                flavours = {}
                for w, c in items:
                    flavours[c] = flavours.get(c, 0.0) + w
                ws = [flavours.get(c, 0.0) for c in "XYZ"]
                if ws[0] == ws[1] == ws[2]:
                    self._bonds.append((key, ws[0]))
                    continue
                for w, c in items:
                    self._generic.append((w, pauli_string(self.n, {key[0]: c, key[1]: c})))
            else:
                self._generic.extend(items)

    @property
    def is_real(self) -> bool:
        """True when every term has an even number of Y factors (real matrix)."""
        return all(s.count("Y") % 2 == 0 for _, s in self.terms)

    def norm_bound(self) -> float:
        return float(sum(abs(w) for w, _ in self.terms))

    def _apply_string(self, psi: np.ndarray, s: str) -> np.ndarray:
        out = psi
        for q, c in enumerate(s):
            if c == "I":
                continue
            sign_shape = [1] * self.n
            sign_shape[q] = 2
            if c == "X":
                out = np.flip(out, axis=q)
            elif c == "Z":
                out = out * np.array([1, -1]).reshape(sign_shape)
            else:
                out = np.flip(out, axis=q) * np.array([-1j, 1j]).reshape(sign_shape)
        return out

    def apply(self, state: np.ndarray) -> np.ndarray:
        psi = np.asarray(state).reshape((2,) * self.n)
        out = np.zeros_like(psi, dtype=np.result_type(psi.dtype, np.float64))
        diag = 0.0
        for (i, j), w in self._bonds:
            out += (2.0 * w) * np.swapaxes(psi, i, j)
            diag += w
        if diag:
            out -= diag * psi
        if self._generic:
            if not np.iscomplexobj(out):
                out = out.astype(complex)
            for w, s in self._generic:
                out += w * self._apply_string(psi, s)
        return out.reshape(-1)

    __matmul__ = apply

    def to_sparse(self) -> sp.csr_matrix:
        dim = 2**self.n
        total = sp.csr_matrix((dim, dim), dtype=complex)
        for w, s in self.terms:
            m = _SINGLE[s[0]]
            for c in s[1:]:
                m = sp.kron(m, _SINGLE[c], format="csr")
            total = total + w * m
        return total

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def heisenberg(n: int, bonds) -> PauliHamiltonian:
    """sum over (i, j, J) of J (X_i X_j + Y_i Y_j + Z_i Z_j); zero couplings dropped."""
    terms = []
    for i, j, coupling in bonds:
        if i == j:
            raise ValueError(f"self-loop on site {i}")
        if coupling == 0:
            continue
        for c in "XYZ":
            terms.append((coupling, pauli_string(n, {i: c, j: c})))
    return PauliHamiltonian(n, terms)


def triangular_1d(n: int, j1: float = 1.0, j2: float = 0.0) -> PauliHamiltonian:
    """J1-J2 chain (a triangular strip) with periodic boundaries, 0-based sites."""
    if n < 4 or n % 2:
        raise ValueError("n must be even and at least 4")
    bonds = [(i, (i + 1) % n, j1) for i in range(n)]
    bonds += [(i, (i + 2) % n, j2) for i in range(n)]
    return heisenberg(n, bonds)


def ground_energy(h: PauliHamiltonian, tol: float = 1e-10, max_krylov: int = 300) -> tuple[float, float]:
    """Lowest eigenvalue by implicitly restarted Lanczos (ARPACK) on the matrix-free H.

    Returns (energy, residual) where residual = ||Hv - Ev|| for the returned
    Ritz vector. Raises :class:`ConvergenceError` if the residual exceeds
    ``tol * ||H||_bound``.
    """
    dim = 2**h.n
    scale = max(h.norm_bound(), 1.0)
    if dim <= 16:
        evals = np.linalg.eigvalsh(h.to_dense())
        return float(evals[0]), 0.0
    dtype = np.float64 if h.is_real else np.complex128
    op = LinearOperator((dim, dim), matvec=lambda v: h.apply(v.astype(dtype, copy=False)).astype(dtype, copy=False),
                        dtype=dtype)
    v0 = np.random.default_rng(12345).standard_normal(dim).astype(dtype)
    try:
        evals, evecs = eigsh(op, k=1, which="SA", tol=tol * 1e-2, ncv=min(dim - 1, 40),
                             maxiter=max_krylov * 10, v0=v0)
    except ArpackNoConvergence as exc:
        if len(exc.eigenvalues):
            v = exc.eigenvectors[:, 0]
            e = float(exc.eigenvalues[0])
            res = float(np.linalg.norm(h.apply(v) - e * v))
        else:
            e, res = float("nan"), float("inf")
        raise ConvergenceError("ground-state search did not converge", e, res) from exc
    e, v = float(evals[0]), evecs[:, 0]
    v = v / np.linalg.norm(v)
    residual = float(np.linalg.norm(h.apply(v) - e * v))
    if residual > tol * scale:
        raise ConvergenceError(f"residual {residual:.3g} above tolerance", e, residual)
    return e, residual


def normalized_energy(e: float, e_gs: float) -> float:
    """(E - E_GS) / |E_GS|."""
    if e_gs == 0:
        raise ValueError("ground energy is zero; normalised energy undefined")
    return (e - e_gs) / abs(e_gs)


# --- lattices -----------------------------------------------------------------

@dataclass
class LatticeSpec:
    n: int
    edges: list
    triangles: dict = field(default_factory=dict)
    singlet_matching: list = field(default_factory=list)
    name: str = ""
    reference_energy: float | None = None

    def hamiltonian(self) -> PauliHamiltonian:
        return heisenberg(self.n, self.edges)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


class LatticeValidationError(ValueError):
    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(f"{c.name}: {c.detail}" for c in self.failures))


def _pair(a, b):
    return (min(a, b), max(a, b))


def validate_lattice(spec: LatticeSpec, kagome: bool = True) -> list[Check]:
    """Every structural check, passing or failing, in a fixed order."""
    checks = []
    n = spec.n
    bad = [e for e in spec.edges if not (0 <= e[0] < n and 0 <= e[1] < n)]
    checks.append(Check("edges reference valid sites", not bad, f"dangling edges {bad}" if bad else ""))
    loops = [e for e in spec.edges if e[0] == e[1]]
    checks.append(Check("no self-loops", not loops, f"self-loops {loops}" if loops else ""))
    pairs = [_pair(e[0], e[1]) for e in spec.edges]
    dup = sorted({p for p in pairs if pairs.count(p) > 1})
    checks.append(Check("no duplicate edges", not dup, f"duplicates {dup}" if dup else ""))
    edge_set = set(pairs)
    if kagome:
        degree = np.zeros(n, dtype=int)
        for a, b in edge_set:
            if 0 <= a < n and 0 <= b < n:
                degree[a] += 1
                degree[b] += 1
        wrong = [int(i) for i in np.flatnonzero(degree != 4)]
        checks.append(Check("every site has degree 4", not wrong, f"sites with degree != 4: {wrong}" if wrong else ""))
        ok = len(spec.edges) == 3 * len(spec.triangles)
        checks.append(Check("edge count = 3 x triangle count", ok,
                            f"{len(spec.edges)} edges, {len(spec.triangles)} triangles"))
        membership = np.zeros(n, dtype=int)
        tri_edges_ok = []
        for label, tri in spec.triangles.items():
            for s in tri:
                if 0 <= s < n:
                    membership[s] += 1
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])):
                if _pair(a, b) not in edge_set:
                    tri_edges_ok.append((label, a, b))
        wrong = [int(i) for i in np.flatnonzero(membership != 2)]
        checks.append(Check("each site in exactly 2 triangles", not wrong,
                            f"sites {wrong}" if wrong else ""))
        checks.append(Check("triangle sides are lattice edges", not tri_edges_ok,
                            f"missing sides {tri_edges_ok}" if tri_edges_ok else ""))
    covered = [q for p in spec.singlet_matching for q in p]
    perfect = sorted(covered) == list(range(n))
    checks.append(Check("singlet matching is perfect", perfect,
                        "" if perfect else f"covered {sorted(covered)}"))
    off = [tuple(p) for p in spec.singlet_matching if _pair(*p) not in edge_set]
    checks.append(Check("singlet pairs are lattice edges", not off, f"off-lattice pairs {off}" if off else ""))
    return checks


def load_lattice(path) -> LatticeSpec:
    """Read a YAML lattice spec; raises ValueError naming the problem on parse failure."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ValueError(f"{path}: cannot parse: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    missing = [k for k in ("n", "edges") if k not in data]
    if missing:
        raise ValueError(f"{path}: missing keys {missing}")
    try:
        edges = [(int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in data["edges"]]
        triangles = {str(k): tuple(int(s) for s in v) for k, v in (data.get("triangles") or {}).items()}
        matching = [tuple(int(s) for s in p) for p in data.get("singlet_matching") or []]
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed entry: {exc}") from exc
    ref = data.get("reference_energy")
    return LatticeSpec(int(data["n"]), edges, triangles, matching, str(data.get("name", path.stem)),
                       None if ref is None else float(ref))


def dump_lattice(spec: LatticeSpec, path) -> None:
    data = {
        "name": spec.name,
        "n": spec.n,
        "edges": [[a, b, j] for a, b, j in spec.edges],
        "triangles": {k: list(v) for k, v in spec.triangles.items()},
        "singlet_matching": [list(p) for p in spec.singlet_matching],
    }
    if spec.reference_energy is not None:
        data["reference_energy"] = spec.reference_energy
    Path(path).write_text(yaml.safe_dump(data, sort_keys=False, default_flow_style=None))


def kagome_geometry(lx: int = 3, ly: int = 2):
    """Sites, bonds and labelled triangles of a periodic lx x ly Kagome cluster.

    Site (x, y, s) has index 3 (y lx + x) + s. Up triangles sit inside a cell;
    the down triangle of cell (x, y) joins 0@(x+1, y), 1@(x, y), 2@(x+1, y-1).
    """
    def idx(x, y, s):
        return 3 * ((y % ly) * lx + (x % lx)) + s

    ups, downs = [], []
    for y in range(ly):
        for x in range(lx):
            ups.append((idx(x, y, 0), idx(x, y, 1), idx(x, y, 2)))
            downs.append((idx(x + 1, y, 0), idx(x, y, 1), idx(x + 1, y - 1, 2)))
    edges = []
    for tri in ups + downs:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])):
            edges.append((a, b, 1.0))
    n = 3 * lx * ly
    up_labels = "abcdefghijklmnopqrstuvwxyz"[: len(ups)]
    triangles = {lab: t for lab, t in zip(up_labels, ups)}
    triangles.update({lab.upper(): t for lab, t in zip(up_labels, downs)})
    return n, edges, triangles


def find_perfect_matching(n: int, edges) -> list[tuple]:
    """A perfect matching on lattice edges by backtracking (smallest free site first)."""
    adj = {i: sorted({b for a, b, *_ in edges if a == i} | {a for a, b, *_ in edges if b == i}) for i in range(n)}
    used = [False] * n
    out: list = []

    def solve():
        try:
            i = used.index(False)
        except ValueError:
            return True
        used[i] = True
        for j in adj[i]:
            if not used[j]:
                used[j] = True
                out.append((i, j))
                if solve():
                    return True
                out.pop()
                used[j] = False
        used[i] = False
        return False

    if not solve():
        raise ValueError("lattice has no perfect matching")
    return out


def default_kagome_path():
    return resources.files("spinnet") / "data" / "kagome18.yaml"


def kagome_18(spec_file=None) -> tuple[PauliHamiltonian, LatticeSpec]:
    """Heisenberg model on the shipped (or a user-supplied) 18-site Kagome spec."""
    if spec_file is None:
        with resources.as_file(default_kagome_path()) as p:
            spec = load_lattice(p)
    else:
        spec = load_lattice(spec_file)
    failures = [c for c in validate_lattice(spec) if not c.ok]
    if failures:
        raise LatticeValidationError(failures)
    return spec.hamiltonian(), spec


def build_default_kagome(compute_energy: bool = True) -> LatticeSpec:
    """Regenerate the shipped Kagome spec (used once to write the data file)."""
    n, edges, triangles = kagome_geometry()
    matching = find_perfect_matching(n, edges)
    spec = LatticeSpec(n, edges, triangles, matching, name="kagome-18")
    if compute_energy:
        spec.reference_energy = ground_energy(spec.hamiltonian())[0]
    return spec


def estimate_dense_memory(n: int) -> int:
    """Bytes for one complex statevector."""
    return 16 * 2**n

