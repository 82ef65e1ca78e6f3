"""Per-frame receptiveness attributes from a normalized query slice.

Four dimensionless ratios are extracted per candidate rank from the R x L
slice of a query and its L-1 predecessors, all built on the diagonal-entries
matrix (one row per candidate sequential alignment):

a1  minimum sum rate: best-aligned diagonal prefix sum over best horizontal
    prefix sum (sequential consistency vs. a static row).
a2  minimum value rate: r-th lowest current-frame distance over the current
    frame entry of the best diagonal (strongest-match reliability).
a3  global block sum rate: diagonal prefix sum over the L-row block-mean
    smoothed row sum (alignment stability against coarse smoothing).
a4  global group sum rate: diagonal prefix sum over the +/-W row windowed
    mean row sum (alignment stability against local smoothing).

Rank r selections take the r-th lowest row by mean (a1) or by row sum
(a2-a4); ties break toward the lower row index. Only rank 0 feeds the
classifier; higher ranks score restoration candidates.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, IoError, RangeError
from .matrixio import QuerySlice


@dataclass(frozen=True)
class SmoothingParams:
    """Group half-window W and the denominator stabilizer epsilon."""

    w: int = 2
    epsilon: float = 1e-9

    def __post_init__(self):
        if self.w < 0:
            raise RangeError(f"window half-width must be >= 0, got {self.w}")
        if self.epsilon <= 0:
            raise RangeError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class DiagonalMatrix:
    """Length-L diagonals of a query slice, one row per starting reference.

    Row i column l holds slice(i + l, l): the candidate alignment that
    matches reference i to the oldest frame of the window.
    """

    values: np.ndarray  # shape (R - L + 1, L)
    source_query: int

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class AttributeVector:
    """The four attributes for one query at one candidate rank."""

    query_index: int
    rank: int
    a1: float
    a2: float
    a3: float
    a4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3, self.a4])


def _require_normalized(s: QuerySlice) -> None:
    if not s.normalized:
        raise DataError(f"slice for query {s.query_index} must be normalized first")


def _rank_row(keys: np.ndarray, r: int, what: str) -> int:
    """Index of the r-th lowest key; ties go to the lower index."""
    if r < 0 or r >= keys.size:
        raise RangeError(f"rank {r} out of range for {keys.size} {what}")
    return int(np.argsort(keys, kind="stable")[r])


def diagonal_entries(s: QuerySlice) -> DiagonalMatrix:
    """Collect the R-L+1 length-L diagonals of a normalized slice."""
    _require_normalized(s)
    R, L = s.values.shape
    if R < L:
        raise RangeError(f"slice has {R} rows, need at least {L}")
    starts = np.arange(R - L + 1)[:, None] + np.arange(L)[None, :]
    values = s.values[starts, np.arange(L)[None, :]]
    return DiagonalMatrix(values=values, source_query=s.query_index)


def minimum_sum_rate(
    s: QuerySlice, dm: DiagonalMatrix, rank: int, params: SmoothingParams
) -> float:
    """Prefix sum of the rank-th best diagonal over that of the best row."""
    _require_normalized(s)
    L = dm.cols
    mu_diag = dm.values[:, : L - 1].mean(axis=1) if L > 1 else np.zeros(dm.rows)
    mu_hor = (
        s.values[:, : L - 1].mean(axis=1) if L > 1 else np.zeros(s.values.shape[0])
    )
    d_star = _rank_row(mu_diag, rank, "diagonal rows")
    h_star = _rank_row(mu_hor, rank, "slice rows")
    num = dm.values[d_star, : L - 1].sum()
    den = s.values[h_star, : L - 1].sum() + params.epsilon
    return float(num / den)


def minimum_value_rate(
    s: QuerySlice, dm: DiagonalMatrix, rank: int, params: SmoothingParams
) -> float:
    """Rank-th lowest current-frame distance over the best diagonal's."""
    _require_normalized(s)
    L = dm.cols
    current = np.sort(s.values[:, L - 1], kind="stable")
    if rank < 0 or rank >= current.size:
        raise RangeError(f"rank {rank} out of range for {current.size} slice rows")
    i_star = _rank_row(dm.values.sum(axis=1), rank, "diagonal rows")
    return float(current[rank] / (dm.values[i_star, L - 1] + params.epsilon))


def _block_means(dm: DiagonalMatrix) -> np.ndarray:
    """Tile rows into L-row blocks; every entry becomes its block's mean.

    The last block is clipped to the remaining rows so every row belongs to
    exactly one block.
    """
    L = dm.cols
    out = np.empty_like(dm.values)
    for start in range(0, dm.rows, L):
        stop = min(start + L, dm.rows)
        out[start:stop, :] = dm.values[start:stop, :].mean()
    return out


def _group_means(dm: DiagonalMatrix, w: int) -> np.ndarray:
    """Column-wise mean over the +/-w row window around each row.

    Windows clipped at the borders divide by their actual size, so border
    rows are not attenuated.
    """
    if w == 0:
        return dm.values.copy()
    padded = np.cumsum(dm.values, axis=0)
    padded = np.vstack([np.zeros((1, dm.cols)), padded])
    idx = np.arange(dm.rows)
    lo = np.maximum(idx - w, 0)
    hi = np.minimum(idx + w, dm.rows - 1)
    sums = padded[hi + 1, :] - padded[lo, :]
    return sums / (hi - lo + 1)[:, None]


def global_block_sum_rate(dm: DiagonalMatrix, rank: int, L: int) -> float:
    """Diagonal prefix sum over the block-smoothed full-row sum.

    Returns 0 when the smoothed row sums to exactly 0 (degenerate all-zero
    neighborhood); otherwise the plain ratio.
    """
    if dm.rows < L:
        raise RangeError(f"diagonal matrix has {dm.rows} rows, need at least {L}")
    i_star = _rank_row(dm.values.sum(axis=1), rank, "diagonal rows")
    den = _block_means(dm)[i_star, :].sum()
    if den == 0.0:
        return 0.0
    return float(dm.values[i_star, : L - 1].sum() / den)


def global_group_sum_rate(
    dm: DiagonalMatrix, rank: int, params: SmoothingParams
) -> float:
    """Diagonal prefix sum over the window-smoothed full-row sum."""
    L = dm.cols
    i_star = _rank_row(dm.values.sum(axis=1), rank, "diagonal rows")
    den = _group_means(dm, params.w)[i_star, :].sum()
    if den == 0.0:
        return 0.0
    return float(dm.values[i_star, : L - 1].sum() / den)


def extract_attributes(
    s: QuerySlice, K: int, params: SmoothingParams
) -> list[AttributeVector]:
    """All four attributes for candidate ranks 0..K-1 of one query.

    Rank 0 is the classifier input; ranks 1..K-1 score restoration
    candidates. The rank-m vector is identical for every K > m.
    """
    _require_normalized(s)
    if K < 1:
        raise RangeError(f"rank depth must be >= 1, got {K}")
    dm = diagonal_entries(s)
    L = s.seq_len
    out = []
    for r in range(K):
        out.append(
            AttributeVector(
                query_index=s.query_index,
                rank=r,
                a1=minimum_sum_rate(s, dm, r, params),
                a2=minimum_value_rate(s, dm, r, params),
                a3=global_block_sum_rate(dm, r, L),
                a4=global_group_sum_rate(dm, r, params),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Binary record stream, mirroring the matrix format
# ---------------------------------------------------------------------------

RECORD_MAGIC = b"SMRA"
RECORD_VERSION = 1
_RECORD_HEADER = struct.Struct("<4sHI")
_RECORD = struct.Struct("<IHh4f")  # query u32 | rank u16 | label i16 | a1..a4 f32


def save_attribute_records(
    vectors: list[AttributeVector],
    path: str | Path,
    labels: dict[int, int] | None = None,
) -> None:
    """Write attribute vectors as fixed-size little-endian records.

    Label is stored per record (-1 when unknown), so one file can carry a
    full training table.
    """
    labels = labels or {}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = [_RECORD_HEADER.pack(RECORD_MAGIC, RECORD_VERSION, len(vectors))]
    for vec in vectors:
        blob.append(
            _RECORD.pack(
                vec.query_index,
                vec.rank,
                labels.get(vec.query_index, -1),
                vec.a1,
                vec.a2,
                vec.a3,
                vec.a4,
            )
        )
    path.write_bytes(b"".join(blob))


def load_attribute_records(
    path: str | Path,
) -> tuple[list[AttributeVector], dict[int, int]]:
    """Read a record stream back; returns vectors plus known labels."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if len(raw) < _RECORD_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, count = _RECORD_HEADER.unpack_from(raw)
    if magic != RECORD_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != RECORD_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _RECORD_HEADER.size + count * _RECORD.size
    if len(raw) != expected:
        raise FormatError(f"{path}: {len(raw)} bytes, {count} records need {expected}")
    vectors = []
    labels: dict[int, int] = {}
    for i in range(count):
        query, rank, label, a1, a2, a3, a4 = _RECORD.unpack_from(
            raw, _RECORD_HEADER.size + i * _RECORD.size
        )
        vectors.append(AttributeVector(query_index=query, rank=rank, a1=a1, a2=a2, a3=a3, a4=a4))
        if label >= 0:
            labels[query] = label
    return vectors, labels
