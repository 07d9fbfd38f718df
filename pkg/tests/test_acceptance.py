"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines
inline; they are also printed (uncaptured) under plain ``pytest -v``.
Criterion 10 is the multi-hour full-scale run and only executes when
ARTIFACT_STRETCH=1.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from spinnet.hamiltonian import ground_energy, triangular_1d
from spinnet.perm import (
    generalized_perm_exp,
    generator_exponent,
    three_qubit_generators,
    total_spin_squared,
)
from spinnet.schur import block_diagonalize, build_schur, off_block_residual
from spinnet.su2 import catalan, decompose_qubits, haar_unitaries, tensor_power
from spinnet.twirl import apply_superoperator, is_equivariant, monte_carlo_superoperator, project_to_commutant
from spinnet.verify import REFERENCE_S2, REFERENCE_S3, gradient_trial, random_hermitian
from spinnet.vertex import p3, phase_fidelity, scalar_gate, scalar_to_vertex_params, vertex
from spinnet.vqe import OptimizerConfig, Problem, best_etilde, experiment_sweep

STRETCH = os.environ.get("ARTIFACT_STRETCH") == "1"
KAGOME_TARGET = 5.7e-4


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def ci_sweep(tmp_path_factory):
    """n = 12 chain at J2 = 0.44, both ansatze at matched parameter counts, 8 seeds."""
    start = time.perf_counter()
    res = experiment_sweep(
        Problem("triangular", 12, 1.0, 0.44),
        ["two-vertex-triangular", "three-vertex-triangular"],
        None,
        8,
        OptimizerConfig(),
        tmp_path_factory.mktemp("ci-sweep"),
        master_seed=12,
        p_for_kind={"two-vertex-triangular": [2, 4], "three-vertex-triangular": [1, 2]},
    )
    return res, time.perf_counter() - start


def test_criterion_01_golden_schur(report):
    t = time.perf_counter()
    s2 = build_schur(2).matrix
    s3 = build_schur(3).matrix
    dt = time.perf_counter() - t
    e2 = np.abs(s2 - REFERENCE_S2).max()
    diff3 = np.abs(s3 - REFERENCE_S3)
    e3 = diff3.max()
    where = np.unravel_index(diff3.argmax(), diff3.shape)
    ok = e2 < 1e-12 and e3 < 1e-12 and dt < 1.0
    report(1, "golden S2/S3", ok,
           f"S2 max dev {e2:.1e}, S3 max dev {e3:.3g} at entry {tuple(int(i) for i in where)}, {dt:.2f}s")


def test_criterion_02_block_diagonalisation(report):
    t = time.perf_counter()
    worst_off = worst_copy = 0.0
    for n in range(2, 7):
        s = build_schur(n)
        for u in haar_unitaries(20, 200 + n):
            conj = s.matrix @ tensor_power(u, n) @ s.matrix.T
            worst_off = max(worst_off, off_block_residual(s, conj))
            blocks = block_diagonalize(s, u)
            for spin in s.decomposition.spins:
                copies = [b for b, lay in zip(blocks, s.layout) if lay.spin == spin]
                worst_copy = max(worst_copy, max(np.abs(c - copies[0]).max() for c in copies))
    dt = time.perf_counter() - t
    ok = worst_off < 1e-10 and worst_copy < 1e-10 and dt < 30
    report(2, "block diagonalisation", ok,
           f"off-block {worst_off:.1e}, copy mismatch {worst_copy:.1e}, {dt:.1f}s")


def test_criterion_03_schur_weyl_counts(report):
    t = time.perf_counter()
    bad = []
    for n in range(1, 13):
        dec = decompose_qubits(n)
        total = sum(m * d for m, d in zip(dec.multiplicities, dec.dims))
        squares = sum(m * m for m in dec.multiplicities)
        if total != 2**n or squares != math.comb(2 * n, n) // (n + 1) or squares != catalan(n):
            bad.append(n)
    for n in range(1, 9):
        evals = np.round(4 * np.linalg.eigvalsh(total_spin_squared(n))).astype(int)
        for spin, m in decompose_qubits(n).blocks:
            if np.count_nonzero(evals == round(4 * spin.casimir())) != m * spin.dimension():
                bad.append((n, str(spin)))
    dt = time.perf_counter() - t
    report(3, "Schur-Weyl counts", not bad and dt < 60, f"failures {bad}, {dt:.1f}s")


def test_criterion_04_generator_identities(report):
    t = time.perf_counter()
    s3 = build_schur(3).matrix
    gens = [g.matrix() for g in three_qubit_generators()]
    up = np.zeros(8)
    up[0] = 1
    kill = max(np.abs(g @ up).max() for g in gens)
    # rows of S3 are the Schur basis vectors, so S3^dag|k> is row k
    hop = np.abs(gens[1] @ s3[5] - s3[7]).max()
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(50):
        theta = rng.uniform(-np.pi, np.pi, 4)
        a = generalized_perm_exp(generator_exponent(theta))
        worst = max(worst, 1 - phase_fidelity(a, s3.T @ p3(theta) @ s3))
    dt = time.perf_counter() - t
    ok = kill < 1e-12 and hop < 1e-12 and worst < 1e-9 and dt < 10
    report(4, "generator identities", ok,
           f"|G|000>| {kill:.1e}, G_X hop {hop:.1e}, 1 - fidelity {worst:.1e}, {dt:.2f}s")


def test_criterion_05_scalar_product_gate(report):
    t = time.perf_counter()
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(50):
        theta = rng.uniform(-np.pi, np.pi, 4)
        w = scalar_gate(*theta)
        v = vertex(3, scalar_to_vertex_params(*theta)).matrix
        worst = max(worst, 1 - phase_fidelity(w, v))
    dt = time.perf_counter() - t
    report(5, "scalar-product equivalence", worst < 1e-9 and dt < 10, f"1 - fidelity {worst:.1e}, {dt:.2f}s")


def test_criterion_06_twirl(report):
    t = time.perf_counter()
    rng = np.random.default_rng(606)
    worst_eq = worst_fix = worst_mc = 0.0
    for n in (2, 3):
        sup = monte_carlo_superoperator(n, 10**6, seed=600 + n)
        for _ in range(20):
            h = random_hermitian(2**n, rng)
            out = project_to_commutant(h, n)
            check = is_equivariant(out, n, trials=20, tol=1e-9, seed=rng)
            worst_eq = max(worst_eq, check.max_norm)
            worst_fix = max(worst_fix, np.abs(project_to_commutant(out, n) - out).max())
            worst_mc = max(worst_mc, np.abs(apply_superoperator(sup, h) - out).max())
    dt = time.perf_counter() - t
    ok = worst_eq < 1e-9 and worst_fix < 1e-12 and worst_mc < 5e-3 and dt < 120
    report(6, "twirl equivalence", ok,
           f"equivariance {worst_eq:.1e}, fixed point {worst_fix:.1e}, MC max-entry {worst_mc:.1e}, {dt:.1f}s")


def test_criterion_07_gradients(report):
    t = time.perf_counter()
    rng = np.random.default_rng(707)
    worst = 0.0
    for i in range(100):
        n = (4, 6, 8, 10)[i % 4]
        worst = max(worst, gradient_trial(n, 1 + i % 3, rng))
    dt = time.perf_counter() - t
    report(7, "gradient exactness", worst < 1e-6 and dt < 120,
           f"max relative error {worst:.1e} over 100 circuits, {dt:.1f}s")


def test_criterion_08_symmetry_conservation(report, ci_sweep):
    res, _ = ci_sweep
    records = res.records
    e_gs = ground_energy(triangular_1d(12, 1.0, 0.44))[0]
    j2 = max(r.max_total_spin for r in records)
    inv = max(r.max_invariance_residual for r in records)
    below = min(r.final_energy - e_gs for r in records)
    ok = j2 < 1e-8 and inv < 1e-8 and below >= -1e-9 and len(records) == 32
    report(8, "symmetry conservation", ok,
           f"{len(records)} runs, max <J^2> {j2:.1e}, max invariance residual {inv:.1e}, "
           f"min E - E_GS {below:.2e}")


def test_criterion_09_ci_experiment(report, ci_sweep):
    res, seconds = ci_sweep
    rows, ok = [], seconds < 20 * 60
    for count, two_p, three_p in ((48, 2, 1), (96, 4, 2)):
        two = best_etilde(res.records, "two-vertex-triangular", count)
        three = best_etilde(res.records, "three-vertex-triangular", count)
        ok &= three <= two
        rows.append(f"{count} params: three-vertex(p={three_p}) {three:.3e} vs two-vertex(p={two_p}) {two:.3e}")
    report(9, "n=12 triangular experiment", ok, "; ".join(rows) + f"; {seconds / 60:.1f} min")


@pytest.mark.stretch
def test_criterion_10_full_scale(report, capsys, tmp_path):
    if not STRETCH:
        with capsys.disabled():
            print("\nACCEPTANCE 10 SKIP  full-scale experiment: not run (hours of compute); set ARTIFACT_STRETCH=1")
        pytest.skip("full-scale stretch run; set ARTIFACT_STRETCH=1")
    out = os.environ.get("ARTIFACT_STRETCH_DIR", str(tmp_path))
    for j2 in (0.0, 0.44):
        experiment_sweep(Problem("triangular", 20, 1.0, j2),
                         ["two-vertex-triangular", "three-vertex-triangular"], None, 16, OptimizerConfig(),
                         os.path.join(out, f"triangular-n20-j2-{j2:g}"), master_seed=20,
                         p_for_kind={"two-vertex-triangular": [2, 4, 6, 8, 10],
                                     "three-vertex-triangular": [1, 2, 3, 4, 5]})
    ps = [1, 2, 4, 8, 12, 16, 20, 24]
    kag = experiment_sweep(Problem("kagome"), ["three-vertex-kagome"], ps, 18, OptimizerConfig(),
                           os.path.join(out, "kagome18"), master_seed=18)
    best = [best_etilde(kag.records, "three-vertex-kagome", 48 * p) for p in ps]
    monotone = all(b <= a + 1e-12 for a, b in zip(best, best[1:]))
    ok = monotone and min(best) <= 5 * KAGOME_TARGET
    report(10, "full-scale experiment", ok,
           f"Kagome best E~ by p {[f'{b:.2e}' for b in best]}, monotone={monotone}")


def test_criterion_11_verify_all(report):
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "spinnet.cli", "verify", "all"], capture_output=True, text=True)
    dt = time.perf_counter() - t
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(11, "verify all", proc.returncode == 0 and dt < 300, f"exit {proc.returncode}, {summary}, {dt:.1f}s")
