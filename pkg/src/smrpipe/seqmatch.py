"""Convolution-based sequence matching and best-match extraction.

The sequence score at (i, j) is the sum of L single-frame distances along
the diagonal ending at (i, j), i.e. a correlation of the distance matrix
with an L x L identity kernel, assuming one-to-one temporal alignment.
Implemented as direct shifted accumulation, O(R*Q*L).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, RangeError
from .matrixio import DistanceMatrix

SEQ_META_KEY = "seq"


@dataclass(frozen=True)
class SeqDistanceMatrix:
    """Sequence distance scores, same shape as the source matrix.

    Cells with i, j >= seq_len - 1 carry full L-term sums; border cells
    hold truncated partial sums rescaled by L / (number of summed terms)
    so their magnitude stays comparable. Evaluation should only score
    queries j >= valid_from.
    """

    rows: int
    cols: int
    values: np.ndarray
    seq_len: int
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def valid_from(self) -> int:
        """First query column whose score has full support."""
        return self.seq_len - 1

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


@dataclass(frozen=True)
class MatchSet:
    """Per-query ranked reference candidates, best (lowest score) first."""

    ranked_refs: np.ndarray  # shape (Q, K), int64
    ranked_scores: np.ndarray  # shape (Q, K), float64

    def __post_init__(self):
        for name in ("ranked_refs", "ranked_scores"):
            arr = getattr(self, name)
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_queries(self) -> int:
        return self.ranked_refs.shape[0]

    @property
    def depth(self) -> int:
        return self.ranked_refs.shape[1]

    def best_ref(self, j: int) -> int:
        return int(self.ranked_refs[j, 0])

    def best_score(self, j: int) -> float:
        return float(self.ranked_scores[j, 0])


def sequence_match(D: DistanceMatrix, L: int) -> SeqDistanceMatrix:
    """Aggregate single-frame distances along length-L temporal diagonals.

    L=1 returns a value-identical copy of the input.
    """
    if L < 1:
        raise RangeError(f"sequence length must be >= 1, got {L}")
    if L > min(D.rows, D.cols):
        raise RangeError(
            f"sequence length {L} exceeds min matrix dimension {min(D.rows, D.cols)}"
        )
    r, q = D.rows, D.cols
    acc = np.zeros((r, q))
    for x in range(L):
        acc[x:, x:] += D.values[: r - x, : q - x]
    # terms summed at (i, j) = min(i, j, L-1) + 1; rescale borders to L terms
    counts = np.minimum(np.minimum.outer(np.arange(r), np.arange(q)), L - 1) + 1.0
    values = acc * (L / counts)
    meta = dict(D.meta)
    meta[SEQ_META_KEY] = f"L={L}"
    return SeqDistanceMatrix(rows=r, cols=q, values=values, seq_len=L, meta=meta)


def seq_from_matrix(matrix: DistanceMatrix) -> SeqDistanceMatrix:
    """Rebuild a SeqDistanceMatrix from a loaded matrix via its meta tag."""
    tag = matrix.meta.get(SEQ_META_KEY, "")
    if not tag.startswith("L="):
        raise FormatError("matrix has no 'seq' meta tag; not a sequence matrix")
    try:
        L = int(tag[2:])
    except ValueError as e:
        raise FormatError(f"bad seq meta tag {tag!r}") from e
    return SeqDistanceMatrix(
        rows=matrix.rows, cols=matrix.cols, values=matrix.values, seq_len=L,
        meta=dict(matrix.meta),
    )


def best_matches(M: DistanceMatrix | SeqDistanceMatrix, K: int) -> MatchSet:
    """Rank, per query column, the K lowest-scoring reference indices.

    Ties break toward the lower reference index, so results are
    deterministic and reproducible.
    """
    if K < 1:
        raise RangeError(f"rank depth must be >= 1, got {K}")
    if K > M.rows:
        raise RangeError(f"rank depth {K} exceeds reference count {M.rows}")
    order = np.argsort(M.values, axis=0, kind="stable")[:K, :]  # (K, Q)
    ranked_refs = order.T.astype(np.int64)
    ranked_scores = np.take_along_axis(M.values, order, axis=0).T
    return MatchSet(ranked_refs=ranked_refs, ranked_scores=ranked_scores)
