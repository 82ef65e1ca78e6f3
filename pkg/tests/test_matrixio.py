"""Distance matrix model, serialization, slicing, and normalization."""

import struct

import numpy as np
import pytest

from smrpipe import (
    DataError,
    DistanceMatrix,
    FormatError,
    GroundTruth,
    IoError,
    QuerySlice,
    RangeError,
    load_ground_truth,
    load_matrix,
    normalize_slice,
    save_ground_truth,
    save_matrix,
    slice_query,
)


class TestDistanceMatrix:
    def test_rejects_nan(self):
        values = np.ones((2, 2))
        values[1, 0] = np.nan
        with pytest.raises(FormatError, match="row 1, col 0"):
            DistanceMatrix(rows=2, cols=2, values=values)

    def test_rejects_inf(self):
        values = np.ones((3, 2))
        values[0, 1] = np.inf
        with pytest.raises(FormatError):
            DistanceMatrix(rows=3, cols=2, values=values)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(FormatError):
            DistanceMatrix(rows=3, cols=2, values=np.ones(5))

    def test_rejects_empty_dims(self):
        with pytest.raises(FormatError):
            DistanceMatrix(rows=0, cols=2, values=np.ones((0, 2)))

    def test_negative_entries_allowed(self):
        m = DistanceMatrix(rows=1, cols=2, values=np.array([[-0.5, 0.5]]))
        assert m.values[0, 0] == -0.5

    def test_immutable_after_construction(self):
        m = DistanceMatrix(rows=2, cols=2, values=np.ones((2, 2)))
        with pytest.raises(ValueError):
            m.values[0, 0] = 5.0


class TestCsvFormat:
    def test_two_by_two_parse(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("0.1,0.2\n0.3,0.4")
        m = load_matrix(p, format="csv")
        assert (m.rows, m.cols) == (2, 2)
        np.testing.assert_array_equal(m.values, [[0.1, 0.2], [0.3, 0.4]])

    def test_round_trip_value_exact(self, tmp_path):
        rng = np.random.default_rng(11)
        m = DistanceMatrix(rows=20, cols=17, values=rng.normal(size=(20, 17)))
        p = tmp_path / "m.csv"
        save_matrix(m, p)
        back = load_matrix(p)
        np.testing.assert_array_equal(back.values, m.values)

    def test_bad_token_reports_location(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("0.1,0.2\n0.3,oops")
        with pytest.raises(FormatError, match="row 1, col 1"):
            load_matrix(p)

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("0.1,0.2\n0.3")
        with pytest.raises(FormatError):
            load_matrix(p)


class TestBinaryFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        values = rng.normal(size=(100, 100)).astype(np.float32).astype(np.float64)
        m = DistanceMatrix(rows=100, cols=100, values=values)
        p = tmp_path / "m.smrm"
        save_matrix(m, p)
        back = load_matrix(p)
        assert back.values.tobytes() == m.values.tobytes()

    def test_payload_length_mismatch(self, tmp_path):
        p = tmp_path / "m.smrm"
        header = struct.pack("<4sHII", b"SMRM", 1, 3, 2)
        p.write_bytes(header + struct.pack("<5f", *range(5)))
        with pytest.raises(FormatError, match="payload"):
            load_matrix(p)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "m.smrm"
        p.write_bytes(b"XXXX" + struct.pack("<HII", 1, 1, 1) + struct.pack("<f", 0.0))
        with pytest.raises(FormatError, match="magic"):
            load_matrix(p)

    def test_bad_version(self, tmp_path):
        p = tmp_path / "m.smrm"
        p.write_bytes(struct.pack("<4sHII", b"SMRM", 9, 1, 1) + struct.pack("<f", 0.0))
        with pytest.raises(FormatError, match="version"):
            load_matrix(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_matrix(tmp_path / "absent.smrm")

    def test_layout_matches_documented_header(self, tmp_path):
        # independently build a file from the documented byte layout
        values = np.array([[1.5, -2.0], [0.25, 4.0], [0.0, 8.0]], dtype=np.float32)
        blob = b"SMRM" + struct.pack("<H", 1) + struct.pack("<II", 3, 2)
        blob += values.tobytes(order="C")
        p = tmp_path / "hand.smrm"
        p.write_bytes(blob)
        m = load_matrix(p)
        np.testing.assert_array_equal(m.values, values.astype(np.float64))

    def test_meta_sidecar_round_trip(self, tmp_path):
        m = DistanceMatrix(
            rows=1, cols=1, values=np.array([[1.0]]), meta={"dataset": "toy", "seq": "L=4"}
        )
        p = tmp_path / "m.smrm"
        save_matrix(m, p)
        assert (tmp_path / "m.smrm.meta.json").exists()
        assert load_matrix(p).meta == {"dataset": "toy", "seq": "L=4"}


class TestGroundTruth:
    def test_round_trip(self, tmp_path):
        gt = GroundTruth(mapping=np.array([3, 1, 2]), tolerance=2)
        p = tmp_path / "gt.csv"
        save_ground_truth(gt, p)
        back = load_ground_truth(p, tolerance=2)
        np.testing.assert_array_equal(back.mapping, gt.mapping)

    def test_header_required(self, tmp_path):
        p = tmp_path / "gt.csv"
        p.write_text("0,1\n1,2\n")
        with pytest.raises(FormatError, match="header"):
            load_ground_truth(p, tolerance=2)

    def test_queries_must_cover_range(self, tmp_path):
        p = tmp_path / "gt.csv"
        p.write_text("query,reference\n0,5\n2,6\n")
        with pytest.raises(FormatError):
            load_ground_truth(p, tolerance=2)

    def test_tolerance_window(self):
        gt = GroundTruth(mapping=np.array([10]), tolerance=2)
        assert gt.is_correct(8, 0) and gt.is_correct(12, 0)
        assert not gt.is_correct(7, 0) and not gt.is_correct(13, 0)


def grid_matrix(n):
    idx = np.arange(n)
    return DistanceMatrix(rows=n, cols=n, values=np.abs(np.subtract.outer(idx, idx)).astype(float))


class TestSliceQuery:
    def test_matches_source_columns(self):
        D = grid_matrix(3)
        s = slice_query(D, j=2, L=2)
        np.testing.assert_array_equal(s.values[:, 0], D.values[:, 1])
        np.testing.assert_array_equal(s.values[:, 1], D.values[:, 2])
        assert s.query_index == 2 and s.seq_len == 2 and not s.normalized

    def test_insufficient_history(self):
        with pytest.raises(RangeError):
            slice_query(grid_matrix(5), j=0, L=4)

    def test_seq_len_exceeds_rows(self):
        with pytest.raises(RangeError):
            slice_query(grid_matrix(3), j=2, L=4)

    def test_matches_naive_copy(self):
        rng = np.random.default_rng(3)
        D = DistanceMatrix(rows=50, cols=50, values=rng.normal(size=(50, 50)))
        s = slice_query(D, j=10, L=4)
        for r in range(50):
            for c in range(4):
                assert s.values[r, c] == D.values[r, 10 - 4 + 1 + c]

    def test_slice_is_a_copy(self):
        D = grid_matrix(4)
        s = slice_query(D, j=3, L=2)
        s.values[0, 0] = 99.0
        assert D.values[0, 2] != 99.0


class TestNormalizeSlice:
    def make(self, values):
        values = np.asarray(values, dtype=float)
        return QuerySlice(query_index=1, seq_len=values.shape[1], values=values)

    def test_scales_by_max_abs(self):
        s = self.make([[2.0, -4.0], [1.0, 0.0]])
        out = normalize_slice(s)
        np.testing.assert_array_equal(out.values, [[0.5, -1.0], [0.25, 0.0]])
        assert out.normalized

    def test_all_zero_slice_unchanged(self):
        s = self.make(np.zeros((3, 2)))
        out = normalize_slice(s)
        assert out.normalized
        np.testing.assert_array_equal(out.values, np.zeros((3, 2)))

    def test_double_normalize_rejected(self):
        out = normalize_slice(self.make([[1.0, 2.0]]))
        with pytest.raises(DataError):
            normalize_slice(out)

    def test_peak_is_one_over_seeded_slices(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            values = rng.normal(size=(rng.integers(2, 12), rng.integers(1, 6)))
            out = normalize_slice(self.make(values))
            peak = np.abs(out.values).max()
            assert abs(peak - 1.0) <= np.finfo(float).eps

    def test_idempotent_in_effect(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=(8, 4))
        once = normalize_slice(self.make(values))
        again = normalize_slice(self.make(once.values.copy()))
        assert np.max(np.abs(again.values - once.values)) <= np.finfo(float).eps
