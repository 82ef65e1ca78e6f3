"""Synthetic scenario generator: determinism, class coverage, structure."""

import numpy as np
import pytest

from smrpipe import (
    AliasBand,
    Burst,
    ScenarioSpec,
    SpecError,
    generate,
    label_queries,
    scenario_battery,
    sequence_match,
)


def label_counts(matrix, gt, L=4):
    labels = label_queries(matrix, sequence_match(matrix, L), gt)
    counts = {c: 0 for c in range(4)}
    for lab in labels:
        counts[lab.y] += 1
    return counts, labels


class TestGenerate:
    def test_clean_scenario_is_all_correct(self):
        D, gt = generate(ScenarioSpec(size=80, noise_sigma=0.0, seed=1))
        counts, labels = label_counts(D, gt)
        assert counts == {0: 77, 1: 0, 2: 0, 3: 0}
        assert all(lab.correct_before for lab in labels)

    def test_ground_truth_is_identity(self):
        D, gt = generate(ScenarioSpec(size=30, seed=2))
        np.testing.assert_array_equal(gt.mapping, np.arange(30))
        assert gt.tolerance == 2
        assert (D.rows, D.cols) == (30, 30)

    def test_single_burst_rescued_by_sequences(self):
        spec = ScenarioSpec(
            size=100, noise_sigma=0.0, bursts=(Burst(start=50, length=2, mode="single"),),
            seed=3,
        )
        D, gt = generate(spec)
        _, labels = label_counts(D, gt)
        by_query = {lab.query_index: lab for lab in labels}
        assert by_query[50].y == 2 and by_query[51].y == 2
        assert by_query[49].y == 0 and by_query[55].y == 0

    def test_seq_burst_betrays_some_queries(self):
        spec = ScenarioSpec(
            size=120, noise_sigma=0.0, bursts=(Burst(start=60, length=6, mode="seq", offset=41),),
            seed=4,
        )
        D, gt = generate(spec)
        counts, labels = label_counts(D, gt)
        assert counts[1] >= 1 and counts[3] >= 1
        flagged = [lab.query_index for lab in labels if lab.y in (1, 3)]
        assert all(60 <= j < 66 for j in flagged)

    def test_alias_band_defeats_both(self):
        spec = ScenarioSpec(
            size=150, noise_sigma=0.0,
            alias_bands=(AliasBand(ref_index=20, strength=0.95, width=6, query_start=80, query_end=110),),
            seed=5,
        )
        D, gt = generate(spec)
        counts, labels = label_counts(D, gt)
        assert counts[3] >= 20
        affected = [lab for lab in labels if 80 + 3 <= lab.query_index < 110]
        assert all(lab.y == 3 for lab in affected)

    def test_deterministic_under_seed(self):
        spec = ScenarioSpec(size=60, noise_sigma=0.1, seed=11)
        a, _ = generate(spec)
        b, _ = generate(spec)
        assert a.values.tobytes() == b.values.tobytes()
        c, _ = generate(ScenarioSpec(size=60, noise_sigma=0.1, seed=12))
        assert a.values.tobytes() != c.values.tobytes()

    def test_inconsistent_ranges_rejected(self):
        with pytest.raises(SpecError):
            generate(ScenarioSpec(size=50, bursts=(Burst(start=45, length=10),)))
        with pytest.raises(SpecError):
            generate(ScenarioSpec(size=50, alias_bands=(AliasBand(ref_index=48, strength=0.5, width=6),)))
        with pytest.raises(SpecError):
            generate(ScenarioSpec(size=50, alias_bands=(AliasBand(ref_index=0, strength=-1.0),)))
        with pytest.raises(SpecError):
            generate(ScenarioSpec(size=50, bursts=(Burst(start=0, length=2, mode="nope"),)))
        with pytest.raises(SpecError):
            ScenarioSpec(size=50, noise_sigma=-0.1)


class TestBattery:
    def test_covers_all_classes_with_margin(self):
        total = {c: 0 for c in range(4)}
        for sc in scenario_battery(seed=2024):
            counts, _ = label_counts(sc.matrix, sc.gt)
            for c, n in counts.items():
                total[c] += n
        assert all(total[c] >= 20 for c in range(4)), total

    def test_deterministic(self):
        a = scenario_battery(seed=7, size=120)
        b = scenario_battery(seed=7, size=120)
        assert [s.name for s in a] == [s.name for s in b]
        for sa, sb in zip(a, b):
            assert sa.matrix.values.tobytes() == sb.matrix.values.tobytes()

    def test_doubled_noise_lowers_single_frame_accuracy(self):
        def accuracy(scale):
            hits = total = 0
            for sc in scenario_battery(seed=31, size=200, noise_scale=scale):
                before = np.argmin(sc.matrix.values, axis=0)
                hits += int(np.sum(np.abs(before - sc.gt.mapping) <= sc.gt.tolerance))
                total += sc.matrix.cols
            return hits / total

        assert accuracy(2.0) < accuracy(1.0)
