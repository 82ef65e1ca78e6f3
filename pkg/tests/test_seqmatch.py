"""Sequence matching against a brute-force oracle, plus ranked matches."""

import numpy as np
import pytest

from smrpipe import DistanceMatrix, RangeError, best_matches, sequence_match
from smrpipe.seqmatch import seq_from_matrix


def random_matrix(rng, r, q):
    return DistanceMatrix(rows=r, cols=q, values=rng.normal(size=(r, q)))


def diag_sum_oracle(values, i, j, L):
    """Literal per-cell diagonal sum, full-support cells only."""
    return sum(values[i - x, j - x] for x in range(L))


class TestSequenceMatch:
    def test_length_one_is_identity(self):
        rng = np.random.default_rng(0)
        D = random_matrix(rng, 6, 8)
        out = sequence_match(D, 1)
        np.testing.assert_array_equal(out.values, D.values)
        assert out.seq_len == 1 and out.valid_from == 0

    def test_all_ones_full_support(self):
        D = DistanceMatrix(rows=3, cols=3, values=np.ones((3, 3)))
        out = sequence_match(D, 2)
        np.testing.assert_allclose(out.values[1:, 1:], 2.0)

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(17)
        D = random_matrix(rng, 64, 64)
        out = sequence_match(D, 4)
        for i in range(3, 64):
            for j in range(3, 64):
                expected = diag_sum_oracle(D.values, i, j, 4)
                assert abs(out.values[i, j] - expected) <= 1e-6

    def test_border_cells_rescaled_partial_sums(self):
        rng = np.random.default_rng(2)
        D = random_matrix(rng, 10, 10)
        out = sequence_match(D, 4)
        # cell (1, 5): only 2 terms available, rescaled to L terms
        partial = D.values[1, 5] + D.values[0, 4]
        assert out.values[1, 5] == pytest.approx(partial * 4 / 2)
        assert out.values[0, 0] == pytest.approx(D.values[0, 0] * 4)

    def test_too_long_sequence_rejected(self):
        D = DistanceMatrix(rows=3, cols=5, values=np.ones((3, 5)))
        with pytest.raises(RangeError):
            sequence_match(D, 4)
        with pytest.raises(RangeError):
            sequence_match(D, 0)

    def test_linearity_under_positive_scaling(self):
        rng = np.random.default_rng(9)
        D = random_matrix(rng, 20, 20)
        scaled = DistanceMatrix(rows=20, cols=20, values=2.5 * D.values)
        a = sequence_match(D, 5).values
        b = sequence_match(scaled, 5).values
        np.testing.assert_allclose(b, 2.5 * a, rtol=1e-12)

    def test_constant_shift_adds_l_times_c(self):
        rng = np.random.default_rng(10)
        D = random_matrix(rng, 16, 16)
        shifted = DistanceMatrix(rows=16, cols=16, values=D.values + 3.0)
        a = sequence_match(D, 4).values
        b = sequence_match(shifted, 4).values
        np.testing.assert_allclose(b[3:, 3:], a[3:, 3:] + 4 * 3.0, rtol=0, atol=1e-9)

    def test_constant_matrix_constant_full_support(self):
        D = DistanceMatrix(rows=9, cols=9, values=np.full((9, 9), 0.7))
        out = sequence_match(D, 3).values
        np.testing.assert_allclose(out[2:, 2:], out[2, 2])

    def test_meta_tag_and_reload(self, tmp_path):
        from smrpipe import load_matrix, save_matrix

        D = DistanceMatrix(rows=5, cols=5, values=np.eye(5))
        out = sequence_match(D, 3)
        assert out.meta["seq"] == "L=3"
        p = tmp_path / "seq.smrm"
        save_matrix(out, p)
        back = seq_from_matrix(load_matrix(p))
        assert back.seq_len == 3 and back.valid_from == 2


class TestBestMatches:
    def test_ranks_lowest_scores(self):
        D = DistanceMatrix(rows=3, cols=1, values=np.array([[0.3], [0.1], [0.2]]))
        ms = best_matches(D, 2)
        np.testing.assert_array_equal(ms.ranked_refs[0], [1, 2])
        np.testing.assert_allclose(ms.ranked_scores[0], [0.1, 0.2])

    def test_tie_goes_to_lower_index(self):
        D = DistanceMatrix(rows=3, cols=1, values=np.array([[0.1], [0.1], [0.5]]))
        assert best_matches(D, 1).best_ref(0) == 0

    def test_matches_full_sort_oracle(self):
        rng = np.random.default_rng(23)
        D = random_matrix(rng, 200, 200)
        ms = best_matches(D, 3)
        for j in range(200):
            expected = np.argsort(D.values[:, j], kind="stable")[:3]
            np.testing.assert_array_equal(ms.ranked_refs[j], expected)
            assert np.all(np.diff(ms.ranked_scores[j]) >= 0)

    def test_depth_bounds(self):
        D = DistanceMatrix(rows=3, cols=2, values=np.ones((3, 2)))
        with pytest.raises(RangeError):
            best_matches(D, 4)
        with pytest.raises(RangeError):
            best_matches(D, 0)

    def test_seq_l1_equals_single_frame(self):
        rng = np.random.default_rng(4)
        D = random_matrix(rng, 30, 30)
        a = best_matches(D, 2)
        b = best_matches(sequence_match(D, 1), 2)
        np.testing.assert_array_equal(a.ranked_refs, b.ranked_refs)
