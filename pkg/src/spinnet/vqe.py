"""Ansatz builders, Adam optimisation and multi-seed experiment sweeps.

Ansatz products are read right to left, so block 1 acts first and, inside a
block, the rightmost gate acts first. Parameters are laid out block-major,
then gate-major, with each gate's parameters contiguous.
"""
from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .hamiltonian import LatticeSpec, PauliHamiltonian, ground_energy, kagome_18, normalized_energy, triangular_1d
from .simulator import Circuit, apply_gate, singlet_state, total_spin_expectation
from .su2 import haar_unitaries

ANSATZ_KINDS = ("two-vertex-triangular", "three-vertex-triangular", "three-vertex-kagome")
KAGOME_ORDER = tuple("abcdef") + tuple("ABCDEF")


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str
    n: int
    p: int
    lattice: LatticeSpec | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}; choose from {ANSATZ_KINDS}")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.kind.endswith("triangular") and (self.n < 4 or self.n % 2):
            raise ValueError("triangular ansatze need an even n >= 4")
        if self.kind == "three-vertex-kagome":
            if self.lattice is None:
                raise ValueError("the Kagome ansatz needs a lattice spec")
            missing = [t for t in KAGOME_ORDER if t not in self.lattice.triangles]
            if missing or self.lattice.n != self.n:
                raise ValueError(f"lattice lacks triangles {missing} or has n != {self.n}")

    @property
    def param_count(self) -> int:
        if self.kind == "two-vertex-triangular":
            return 2 * self.n * self.p
        if self.kind == "three-vertex-triangular":
            return 4 * self.n * self.p
        return 48 * self.p

    def initial_pairs(self) -> list[tuple]:
        if self.kind == "three-vertex-kagome":
            return [tuple(pr) for pr in self.lattice.singlet_matching]
        return [(2 * j, 2 * j + 1) for j in range(self.n // 2)]

    def initial_state(self) -> np.ndarray:
        return singlet_state(self.initial_pairs(), self.n)


def build_ansatz(spec: AnsatzSpec) -> Circuit:
    """Circuit for the ansatz, gates in application order."""
    n, c = spec.n, Circuit(spec.n)
    if spec.kind == "two-vertex-triangular":
        for i in range(spec.p):
            base = 2 * n * i
            # labels j are 1-based; qubit k in the formulas is index k-1 here
            for j in range(n // 2, 0, -1):
                c.add("vertex2", (2 * j - 2, 2 * j - 1), [base + j - 1])
            for j in range(n // 2, 0, -1):
                c.add("vertex2", (2 * j - 1, (2 * j) % n), [base + n // 2 + j - 1])
            for j in range(n, 0, -1):
                c.add("vertex2", (j - 1, (j + 1) % n), [base + n + j - 1])
    elif spec.kind == "three-vertex-triangular":
        for i in range(spec.p):
            base = 4 * n * i
            for j in range(n, 0, -1):
                start = base + 4 * (j - 1)
                c.add("vertex3", (j - 1, j % n, (j + 1) % n), range(start, start + 4))
    else:
        tri = spec.lattice.triangles
        for i in range(spec.p):
            base = 48 * i
            for pos in list(range(5, -1, -1)) + list(range(11, 5, -1)):
                start = base + 4 * pos
                c.add("vertex3", tri[KAGOME_ORDER[pos]], range(start, start + 4))
    c.param_count = spec.param_count
    return c


def init_params(count: int, alpha: float = 1.0, seed=None) -> np.ndarray:
    """i.i.d. U[0, alpha] / count."""
    if count < 1 or alpha <= 0:
        raise ValueError("count must be >= 1 and alpha > 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.uniform(0.0, alpha, count) / count


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_iters: int = 2000
    stall_window: int = 200
    stall_tol: float = 1e-9
    init_alpha: float = 1.0
    symmetry_check_every: int = 100

    def __post_init__(self):
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.learning_rate <= 0 or self.max_iters < 1 or self.init_alpha <= 0:
            raise ValueError("learning_rate, max_iters and init_alpha must be positive")


@dataclass
class AdamResult:
    x: np.ndarray
    best_x: np.ndarray
    best_value: float
    trace: list
    iterations: int
    status: str


def adam(fun_and_grad, x0, config: OptimizerConfig = OptimizerConfig(), callback=None) -> AdamResult:
    """Adam with bias correction on a generic objective.

    Stops after ``max_iters`` or when the value changed by less than
    ``stall_tol`` over the last ``stall_window`` iterations. The reported
    optimum is the lowest value seen.
    """
    x = np.array(x0, dtype=float)
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    trace: list = []
    best_x, best = x.copy(), np.inf
    status = "max_iters"
    for t in range(1, config.max_iters + 1):
        value, grad = fun_and_grad(x)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            status = "non-finite"
            break
        trace.append(float(value))
        if value < best:
            best, best_x = float(value), x.copy()
        if callback is not None:
            callback(t, x, value)
        w = config.stall_window
        if len(trace) > w and abs(trace[-1] - trace[-1 - w]) < config.stall_tol:
            status = "stalled"
            break
        m = config.beta1 * m + (1 - config.beta1) * grad
        v = config.beta2 * v + (1 - config.beta2) * grad * grad
        m_hat = m / (1 - config.beta1**t)
        v_hat = v / (1 - config.beta2**t)
        x = x - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return AdamResult(x, best_x, best, trace, len(trace), status)


@dataclass
class RunRecord:
    ansatz: str
    n: int
    problem: str
    p: int
    param_count: int
    seed: int
    config: dict
    e_gs: float
    trace: list
    final_params: list
    final_energy: float
    final_etilde: float
    iterations: int
    status: str
    seconds: float
    max_total_spin: float
    max_invariance_residual: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def invariance_residual(state: np.ndarray, n: int, trials: int = 2, seed=0) -> float:
    """max ||U^{(x)n} psi - psi|| over random SU(2) U (zero for spin-0 states)."""
    worst = 0.0
    for u in haar_unitaries(trials, seed):
        phi = state
        for q in range(n):
            phi = apply_gate(phi, u, (q,), n)
        worst = max(worst, float(np.linalg.norm(phi - state)))
    return worst


def adam_minimize(circuit: Circuit, h: PauliHamiltonian, config: OptimizerConfig = OptimizerConfig(),
                  seed: int = 0, state0: np.ndarray | None = None, e_gs: float | None = None,
                  label: dict | None = None) -> RunRecord:
    """Optimise <H> over the circuit parameters from U[0, alpha]/count initial values."""
    if state0 is None:
        raise ValueError("an initial state is required")
    start = time.perf_counter()
    x0 = init_params(circuit.param_count, config.init_alpha, seed)
    sym = {"j2": 0.0, "inv": 0.0}

    def check(x):
        psi = circuit.run(x, state0)
        sym["j2"] = max(sym["j2"], abs(total_spin_expectation(psi, circuit.n)))
        sym["inv"] = max(sym["inv"], invariance_residual(psi, circuit.n, seed=seed))

    def callback(t, x, value):
        if t == 1 or t % config.symmetry_check_every == 0:
            check(x)

    res = adam(lambda x: circuit.energy_and_gradient(x, state0, h), x0, config, callback)
    check(res.best_x)
    if e_gs is None:
        e_gs = ground_energy(h)[0]
    label = label or {}
    return RunRecord(
        ansatz=label.get("ansatz", "custom"),
        n=circuit.n,
        problem=label.get("problem", ""),
        p=int(label.get("p", 0)),
        param_count=circuit.param_count,
        seed=int(seed),
        config=asdict(config),
        e_gs=float(e_gs),
        trace=res.trace,
        final_params=res.best_x.tolist(),
        final_energy=res.best_value,
        final_etilde=normalized_energy(res.best_value, e_gs),
        iterations=res.iterations,
        status=res.status,
        seconds=time.perf_counter() - start,
        max_total_spin=sym["j2"],
        max_invariance_residual=sym["inv"],
    )


# --- sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class Problem:
    """Either a triangular chain (n, j2) or the Kagome cluster."""

    kind: str
    n: int = 0
    j1: float = 1.0
    j2: float = 0.0
    lattice_file: str | None = None

    def build(self) -> tuple[PauliHamiltonian, LatticeSpec | None]:
        if self.kind == "triangular":
            return triangular_1d(self.n, self.j1, self.j2), None
        if self.kind == "kagome":
            return kagome_18(self.lattice_file)
        raise ValueError(f"unknown problem kind {self.kind!r}")

    @property
    def label(self) -> str:
        return f"j2={self.j2:g}" if self.kind == "triangular" else "kagome"


def derive_seed(master: int, *key: int) -> int:
    """Reproducible per-cell seed from a master seed and an integer key."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


SUMMARY_COLUMNS = ("ansatz", "n", "j2/lattice", "p", "param_count", "seed", "final_E", "final_Etilde",
                   "iters", "seconds")


@dataclass
class SweepResult:
    records: list
    truncated: bool
    skipped: int


def _cell_name(kind: str, problem: Problem, p: int, seed_index: int) -> str:
    return f"{kind}_{problem.label}_n{problem.n}_p{p}_s{seed_index}.json".replace("=", "")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _run_cell(args):
    kind, problem, p, seed, config, e_gs = args
    h, lattice = problem.build()
    n = lattice.n if lattice is not None else problem.n
    spec = AnsatzSpec(kind, n, p, lattice)
    label = {"ansatz": kind, "problem": problem.label, "p": p}
    return adam_minimize(build_ansatz(spec), h, config, seed, spec.initial_state(), e_gs, label)


def experiment_sweep(problem: Problem, kinds, p_values, seeds: int, config: OptimizerConfig = OptimizerConfig(),
                     out_dir=None, master_seed: int = 0, max_seconds: float | None = None,
                     jobs: int = 1, p_for_kind: dict | None = None) -> SweepResult:
    """Run every (kind, p, seed) cell, persisting one JSON record per cell.

    Existing records in ``out_dir`` are reused, so an interrupted sweep resumes.
    When ``max_seconds`` elapses no further cells are started and the result
    is marked truncated. ``p_for_kind`` overrides ``p_values`` per ansatz kind.
    """
    h, lattice = problem.build()
    e_gs = lattice.reference_energy if lattice is not None and lattice.reference_energy is not None else None
    if e_gs is None:
        e_gs = ground_energy(h)[0]
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    cells = []
    for k_idx, kind in enumerate(kinds):
        for p in (p_for_kind or {}).get(kind, p_values):
            for s in range(seeds):
                cells.append((kind, p, s, derive_seed(master_seed, k_idx, p, s)))
    records, pending, skipped = [], [], 0
    for kind, p, s, seed in cells:
        path = out / _cell_name(kind, problem, p, s) if out is not None else None
        if path is not None and path.exists():
            records.append(RunRecord.from_json(path.read_text()))
            skipped += 1
        else:
            pending.append((kind, p, s, seed, path))
    start = time.perf_counter()
    truncated = False

    def keep(rec, path):
        records.append(rec)
        if path is not None:
            _atomic_write(path, rec.to_json())

    if jobs > 1 and pending:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {}
            for kind, p, s, seed, path in pending:
                futures[pool.submit(_run_cell, (kind, problem, p, seed, config, e_gs))] = path
            for fut, path in futures.items():
                if max_seconds is not None and time.perf_counter() - start > max_seconds:
                    truncated = True
                    fut.cancel()
                    continue
                keep(fut.result(), path)
    else:
        for kind, p, s, seed, path in pending:
            if max_seconds is not None and time.perf_counter() - start > max_seconds:
                truncated = True
                break
            keep(_run_cell((kind, problem, p, seed, config, e_gs)), path)
    if out is not None:
        write_summary(records, out / "summary.csv", truncated)
    return SweepResult(records, truncated, skipped)


def write_summary(records, path, truncated: bool = False) -> None:
    path = Path(path)
    rows = sorted(records, key=lambda r: (r.ansatz, r.p, r.seed))
    tmp = path.with_suffix(".tmp")
    with tmp.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([r.ansatz, r.n, r.problem, r.p, r.param_count, r.seed, repr(r.final_energy),
                        repr(r.final_etilde), r.iterations, f"{r.seconds:.3f}"])
        if truncated:
            w.writerow(["# truncated: budget exhausted before all cells ran"])
    os.replace(tmp, path)


def best_etilde(records, kind: str, param_count: int) -> float:
    vals = [r.final_etilde for r in records if r.ansatz == kind and r.param_count == param_count]
    if not vals:
        raise ValueError(f"no records for {kind} at {param_count} params")
    return min(vals)
