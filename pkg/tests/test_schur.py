import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinnet.schur import (
    CouplingPath,
    block_diagonalize,
    build_schur,
    coupling_paths,
    expected_blocks,
    export_schur_csv,
    load_schur_csv,
    off_block_residual,
)
from spinnet.su2 import Su2Element, haar_sample, haar_unitaries, spin_rep_matrix, tensor_power
from spinnet.verify import REFERENCE_S2, REFERENCE_S3, S3_TABLE_INCONSISTENT_ENTRY


def test_one_qubit_is_identity():
    assert np.array_equal(build_schur(1).matrix, np.eye(2))


def test_two_qubit_table():
    assert np.abs(build_schur(2).matrix - REFERENCE_S2).max() < 1e-15


def test_three_qubit_table_up_to_the_inconsistent_entry():
    got = build_schur(3).matrix
    r, c = S3_TABLE_INCONSISTENT_ENTRY
    diff = np.abs(got - REFERENCE_S3)
    assert diff[r, c] == pytest.approx(math.sqrt(2))
    diff[r, c] = 0
    assert diff.max() < 1e-15
    # the reference as tabulated is not orthogonal; ours is
    assert np.abs(REFERENCE_S3 @ REFERENCE_S3.T - np.eye(8)).max() > 0.4
    assert np.allclose(got @ got.T, np.eye(8), atol=1e-15)


def test_cg_product_convention_differs_only_by_row_signs():
    a = build_schur(4).matrix
    b = build_schur(4, "cg-product").matrix
    signs = np.sign(np.sum(a * b, axis=1))
    assert np.allclose(a, signs[:, None] * b)


def test_paths():
    assert [str(p) for p in coupling_paths(2)] == ["1/2->1", "1/2->0"]
    assert [str(p) for p in coupling_paths(3)] == ["1/2->1->3/2", "1/2->1->1/2", "1/2->0->1/2"]
    finals = [p.final_spin.twice_j for p in coupling_paths(4)]
    assert (finals.count(0), finals.count(2), finals.count(4)) == (2, 3, 1)


def test_path_validation():
    with pytest.raises(ValueError):
        CouplingPath((1, 3))
    with pytest.raises(ValueError):
        CouplingPath((2, 1))
    with pytest.raises(ValueError):
        CouplingPath((1, 2), 1)
    assert CouplingPath((1, 0, 1, 0, 1)).lowering_raising_pairs() == 3


@pytest.mark.parametrize("n", range(1, 9))
def test_orthogonal(n):
    m = build_schur(n).matrix
    assert np.abs(m @ m.T - np.eye(2**n)).max() < 1e-12


def test_identity_gives_identity_blocks():
    s = build_schur(4)
    for b in block_diagonalize(s, Su2Element.identity()):
        assert np.allclose(b, np.eye(len(b)))


def test_two_qubit_blocks():
    g = haar_sample(3)
    b1, b0 = block_diagonalize(build_schur(2), g)
    assert np.allclose(b1, spin_rep_matrix(1, g), atol=1e-12)
    assert np.allclose(b0, [[1]])


@pytest.mark.parametrize("n", range(2, 7))
def test_block_diagonal(n):
    s = build_schur(n)
    for u in haar_unitaries(20, n):
        conj = s.matrix @ tensor_power(u, n) @ s.matrix.T
        assert off_block_residual(s, conj) < 1e-10


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_blocks_are_spin_reps_and_copies_agree(n, seed):
    s = build_schur(n)
    g = haar_sample(seed)
    got = block_diagonalize(s, g)
    for a, b in zip(got, expected_blocks(s, g)):
        assert np.abs(a - b).max() < 1e-10
    for spin, _ in s.decomposition.blocks:
        rows = [got[i] for i, lay in enumerate(s.layout) if lay.spin == spin]
        assert all(np.abs(r - rows[0]).max() < 1e-10 for r in rows)


def test_sector_rows():
    s = build_schur(3)
    assert list(s.sector_rows(1.5)) == [0, 1, 2, 3]
    assert list(s.sector_rows(0.5)) == [4, 5, 6, 7]
    assert [b.start for b in s.copies(0.5)] == [4, 6]


def test_csv_roundtrip(tmp_path):
    s = build_schur(3)
    path = tmp_path / "s3.csv"
    export_schur_csv(s, path)
    assert np.array_equal(load_schur_csv(path), s.matrix)
    assert "1/2->0->1/2; Jz=-1/2" in path.read_text().splitlines()[1]


def test_bad_inputs():
    with pytest.raises(ValueError):
        build_schur(0)
    with pytest.raises(ValueError):
        build_schur(2, "nope")
