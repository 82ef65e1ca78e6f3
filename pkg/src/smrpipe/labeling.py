"""Four-class outcome labels: was the best match correct before and after
sequence matching?

Class encoding: 0 = correct before and after, 1 = correct before only,
2 = correct after only, 3 = correct neither. Labels exist only for queries
with full sequence support (j >= L-1); argmin ties break toward the lower
reference index, consistent with best-match extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .matrixio import DistanceMatrix, GroundTruth
from .seqmatch import SeqDistanceMatrix


@dataclass(frozen=True)
class OutcomeLabel:
    query_index: int
    y: int
    correct_before: bool
    correct_after: bool


def label_queries(
    D: DistanceMatrix, Dseq: SeqDistanceMatrix, gt: GroundTruth
) -> list[OutcomeLabel]:
    """Label every query j >= L-1 by comparing argmins against ground truth."""
    if (D.rows, D.cols) != (Dseq.rows, Dseq.cols):
        raise ShapeError(
            f"matrix {D.rows}x{D.cols} vs sequence matrix {Dseq.rows}x{Dseq.cols}"
        )
    if gt.num_queries != D.cols:
        raise ShapeError(
            f"ground truth covers {gt.num_queries} queries, matrix has {D.cols}"
        )
    before_ref = np.argmin(D.values, axis=0)  # first occurrence = lower index
    after_ref = np.argmin(Dseq.values, axis=0)
    t = gt.tolerance
    labels = []
    for j in range(Dseq.valid_from, D.cols):
        cb = abs(int(before_ref[j]) - int(gt.mapping[j])) <= t
        ca = abs(int(after_ref[j]) - int(gt.mapping[j])) <= t
        labels.append(
            OutcomeLabel(
                query_index=j,
                y=2 * (not cb) + (not ca),
                correct_before=cb,
                correct_after=ca,
            )
        )
    return labels
