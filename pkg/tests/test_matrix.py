"""Dense primitive and sparse interchange tests."""

import numpy as np
import pytest

from tsnmf.errors import ShapeError
from tsnmf.matrix import (
    SparseMatrix,
    frobenius_sq,
    hadamard,
    l2_normalize_rows,
    matmul,
    read_dense_csv,
    read_sparse,
    write_dense_csv,
    write_sparse,
)


class TestHadamard:
    def test_binary_mask_zeroes_entries(self):
        out = hadamard([[1, 2], [3, 4]], [[0, 1], [1, 0]])
        np.testing.assert_array_equal(out, [[0, 2], [3, 0]])

    def test_all_ones_is_identity(self):
        a = np.arange(6, dtype=float).reshape(2, 3)
        np.testing.assert_array_equal(hadamard(a, np.ones((2, 3))), a)

    def test_entrywise_product(self):
        np.testing.assert_array_equal(hadamard([[2, 3]], [[5, 7]]), [[10, 21]])

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 2\).*\(1, 2\)"):
            hadamard(np.ones((2, 2)), np.ones((1, 2)))

    def test_commutative_and_associative(self):
        rng = np.random.default_rng(0)
        a, b, c = rng.random((3, 4, 5))
        np.testing.assert_array_equal(hadamard(a, b), hadamard(b, a))
        np.testing.assert_allclose(
            hadamard(hadamard(a, b), c), hadamard(a, hadamard(b, c)), rtol=1e-15
        )


class TestMatmul:
    def test_identity(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), a), a)

    def test_dot_product(self):
        np.testing.assert_array_equal(matmul([[1, 2]], [[3], [4]]), [[11]])

    def test_zero_annihilates(self):
        b = np.random.default_rng(1).random((3, 4))
        np.testing.assert_array_equal(matmul(np.zeros((2, 3)), b), np.zeros((2, 4)))

    def test_inner_dimension_mismatch(self):
        with pytest.raises(ShapeError, match="inner dimension"):
            matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_against_triple_loop_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.random((10, 10))
        b = rng.random((10, 10))
        expected = np.zeros((10, 10))
        for i in range(10):
            for j in range(10):
                acc = 0.0
                for k in range(10):
                    acc += a[i, k] * b[k, j]
                expected[i, j] = acc
        np.testing.assert_allclose(matmul(a, b), expected, rtol=1e-12)


class TestFrobeniusSq:
    def test_zero_matrix(self):
        assert frobenius_sq(np.zeros((3, 2))) == 0.0

    def test_known_value(self):
        assert frobenius_sq([[1, 2], [3, 4]]) == 30.0

    def test_transpose_symmetry(self):
        a = np.random.default_rng(2).random((4, 6))
        assert frobenius_sq(a) == pytest.approx(frobenius_sq(a.T), rel=1e-15)

    def test_zero_iff_equal(self):
        a = np.random.default_rng(3).random((5, 5))
        assert frobenius_sq(a - a) == 0.0
        b = a.copy()
        b[2, 3] += 1e-9
        assert frobenius_sq(a - b) > 0.0

    def test_equals_trace_of_gram(self):
        a = np.random.default_rng(4).random((4, 5))
        assert frobenius_sq(a) == pytest.approx(np.trace(a.T @ a), rel=1e-13)


class TestL2NormalizeRows:
    def test_three_four_five(self):
        np.testing.assert_allclose(l2_normalize_rows([[3, 4]]), [[0.6, 0.8]], rtol=1e-15)

    def test_zero_row_preserved(self):
        np.testing.assert_array_equal(l2_normalize_rows([[0.0, 0.0]]), [[0.0, 0.0]])

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        a = rng.random((6, 8))
        a[2] = 0.0
        once = l2_normalize_rows(a)
        twice = l2_normalize_rows(once)
        np.testing.assert_allclose(twice, once, atol=1e-12)

    def test_unit_norms(self):
        a = np.random.default_rng(6).random((5, 7)) + 0.1
        norms = np.linalg.norm(l2_normalize_rows(a), axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)


class TestSparseMatrix:
    def test_round_trip_through_dense(self):
        rng = np.random.default_rng(8)
        a = rng.random((4, 6))
        a[a < 0.5] = 0.0
        sp = SparseMatrix.from_dense(a)
        np.testing.assert_array_equal(sp.to_dense(), a)

    def test_rejects_out_of_range(self):
        with pytest.raises(ShapeError):
            SparseMatrix(rows=2, cols=2, entries=((2, 0, 1.0),))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            SparseMatrix(rows=2, cols=2, entries=((0, 0, 1.0), (0, 0, 2.0)))

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError, match="> 0"):
            SparseMatrix(rows=2, cols=2, entries=((0, 0, 0.0),))

    def test_file_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(9)
        a = rng.random((5, 3))
        a[a < 0.4] = 0.0
        path = tmp_path / "m.sparse.txt"
        write_sparse(SparseMatrix.from_dense(a), path)
        back = read_sparse(path).to_dense()
        np.testing.assert_array_equal(back, a)

    def test_header_format(self, tmp_path):
        path = tmp_path / "m.sparse.txt"
        write_sparse(SparseMatrix.from_dense(np.array([[0.0, 1.5], [2.0, 0.0]])), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "2 2 2"
        assert lines[1].split() == ["0", "1", "1.5"]

    def test_read_rejects_bad_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2 3\n0 0 1.0\n")
        with pytest.raises(ValueError, match="expected 3 entries"):
            read_sparse(path)


class TestDenseCsv:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(10)
        a = rng.random((3, 4)) * 1e-3
        path = tmp_path / "m.csv"
        write_dense_csv(a, path)
        np.testing.assert_array_equal(read_dense_csv(path), a)

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ShapeError, match="ragged"):
            read_dense_csv(path)
