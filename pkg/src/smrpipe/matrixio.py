"""Distance matrix data model and serialization.

A distance matrix holds one dissimilarity score per (reference, query) image
pair; lower means more similar. Callers with similarity scores must negate
them before ingestion. Two on-disk formats are supported:

binary
    magic ``SMRM`` (4 bytes) | version u16=1 | R u32 | Q u32 | R*Q float32,
    all little-endian, payload row-major. Free-form meta tags, when present,
    travel in a ``<path>.meta.json`` sidecar (the fixed header has no room
    for them, by design, so any numeric runtime can emit the format).

csv
    R lines of Q comma-separated decimals, no header. Values are written with
    shortest round-trip repr, so a save/load cycle is value-exact.

Ground truth is a CSV with header ``query,reference``; the frame tolerance
is not part of the file and is passed separately.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, IoError, RangeError

MAGIC = b"SMRM"
VERSION = 1
_HEADER = struct.Struct("<4sHII")


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense R x Q matrix of single-frame match distances.

    Immutable after construction (the value buffer is marked read-only), so
    instances are safe to share across threads. Entries must be finite;
    negative values are allowed (cosine-style distances).
    """

    rows: int
    cols: int
    values: np.ndarray  # shape (rows, cols), float64
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise FormatError(f"matrix dims must be >= 1, got {self.rows}x{self.cols}")
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (self.rows, self.cols):
            raise FormatError(
                f"payload shape {values.shape} does not match header {self.rows}x{self.cols}"
            )
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            r, c = bad[0]
            raise FormatError(f"non-finite entry at row {r}, col {c}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


@dataclass(frozen=True)
class GroundTruth:
    """True reference index per query, plus the frame tolerance.

    A proposed reference ``i`` is correct for query ``j`` iff
    ``|i - mapping[j]| <= tolerance``.
    """

    mapping: np.ndarray  # shape (Q,), int64
    tolerance: int

    def __post_init__(self):
        mapping = np.ascontiguousarray(self.mapping, dtype=np.int64)
        mapping.setflags(write=False)
        object.__setattr__(self, "mapping", mapping)
        if self.tolerance < 0:
            raise FormatError("tolerance must be non-negative")
        if mapping.ndim != 1 or mapping.size < 1:
            raise FormatError("ground truth mapping must be a non-empty vector")
        if (mapping < 0).any():
            raise FormatError("ground truth reference indices must be non-negative")

    @property
    def num_queries(self) -> int:
        return int(self.mapping.size)

    def is_correct(self, ref: int, query: int) -> bool:
        return abs(int(ref) - int(self.mapping[query])) <= self.tolerance


@dataclass
class QuerySlice:
    """R x L window of a distance matrix ending at one query column.

    Column L-1 is the current query; columns 0..L-2 are its predecessors,
    oldest first. Exists only for queries with a full history (j >= L-1).
    """

    query_index: int
    seq_len: int
    values: np.ndarray  # shape (R, L), float64
    normalized: bool = False


def _resolve_format(path: Path, format: str | None) -> str:
    if format is not None:
        if format not in ("binary", "csv"):
            raise FormatError(f"unknown matrix format {format!r}")
        return format
    if path.suffix == ".csv":
        return "csv"
    return "binary"


def load_matrix(path: str | Path, format: str | None = None) -> DistanceMatrix:
    """Read a distance matrix from disk.

    ``format`` is ``"binary"`` or ``"csv"``; when omitted it is inferred from
    the suffix (``.csv`` -> csv, anything else -> binary).
    """
    path = Path(path)
    fmt = _resolve_format(path, format)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if fmt == "binary":
        matrix = _parse_binary(raw, path)
    else:
        matrix = _parse_csv(raw, path)
    meta_path = path.with_name(path.name + ".meta.json")
    if meta_path.exists():
        try:
            tags = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise FormatError(f"bad meta sidecar {meta_path}: {e}") from e
        matrix = replace(matrix, meta=dict(tags))
    return matrix


def save_matrix(matrix, path: str | Path, format: str | None = None) -> None:
    """Write a matrix (anything with rows/cols/values/meta) to disk.

    The binary payload is float32; save/load round-trips are bit-exact when
    the values are float32-representable. Meta tags, if any, go to a
    ``.meta.json`` sidecar next to the file.
    """
    path = Path(path)
    fmt = _resolve_format(path, format)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.asarray(matrix.values, dtype=np.float64)
    r, q = values.shape
    if fmt == "binary":
        header = _HEADER.pack(MAGIC, VERSION, r, q)
        payload = values.astype("<f4").tobytes(order="C")
        path.write_bytes(header + payload)
    else:
        lines = [",".join(repr(float(v)) for v in row) for row in values]
        path.write_text("\n".join(lines) + "\n")
    meta = dict(getattr(matrix, "meta", {}) or {})
    meta_path = path.with_name(path.name + ".meta.json")
    if meta:
        meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    elif meta_path.exists():
        meta_path.unlink()


def _parse_binary(raw: bytes, path: Path) -> DistanceMatrix:
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, r, q = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    payload = raw[_HEADER.size :]
    expected = r * q * 4
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, header {r}x{q} needs {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(r, q)
    return DistanceMatrix(rows=r, cols=q, values=values)


def _parse_csv(raw: bytes, path: Path) -> DistanceMatrix:
    text = raw.decode("utf-8")
    rows: list[list[float]] = []
    for r, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        fields = line.split(",")
        row = []
        for c, tok in enumerate(fields):
            try:
                row.append(float(tok))
            except ValueError as e:
                raise FormatError(f"{path}: bad value at row {r}, col {c}: {tok!r}") from e
        rows.append(row)
    if not rows:
        raise FormatError(f"{path}: empty matrix")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: row {r} has {len(row)} fields, expected {width}")
    return DistanceMatrix(rows=len(rows), cols=width, values=np.array(rows))


def load_ground_truth(path: str | Path, tolerance: int) -> GroundTruth:
    """Read a ``query,reference`` CSV into a GroundTruth."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if not lines or [f.strip() for f in lines[0].split(",")] != ["query", "reference"]:
        raise FormatError(f"{path}: expected header 'query,reference'")
    pairs = {}
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            q_str, r_str = line.split(",")
            q, r = int(q_str), int(r_str)
        except ValueError as e:
            raise FormatError(f"{path}: bad row at line {n}: {line!r}") from e
        if q in pairs:
            raise FormatError(f"{path}: duplicate query {q}")
        pairs[q] = r
    if not pairs:
        raise FormatError(f"{path}: no ground truth rows")
    if sorted(pairs) != list(range(len(pairs))):
        raise FormatError(f"{path}: queries must cover 0..{len(pairs) - 1} exactly once")
    mapping = np.array([pairs[j] for j in range(len(pairs))], dtype=np.int64)
    return GroundTruth(mapping=mapping, tolerance=tolerance)


def save_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["query,reference"]
    lines += [f"{j},{int(r)}" for j, r in enumerate(gt.mapping)]
    path.write_text("\n".join(lines) + "\n")


def slice_query(D: DistanceMatrix, j: int, L: int) -> QuerySlice:
    """Extract the R x L window ending at query column ``j``.

    Requires a full history: j >= L-1. The result is a copy; mutating it
    never touches the source matrix.
    """
    if L < 1:
        raise RangeError(f"sequence length must be >= 1, got {L}")
    if L > D.rows:
        raise RangeError(f"sequence length {L} exceeds reference count {D.rows}")
    if j >= D.cols:
        raise RangeError(f"query {j} out of range for {D.cols} queries")
    if j < L - 1:
        raise RangeError(f"query {j} has fewer than {L - 1} predecessors")
    window = D.values[:, j - L + 1 : j + 1].copy()
    return QuerySlice(query_index=j, seq_len=L, values=window, normalized=False)


def normalize_slice(s: QuerySlice) -> QuerySlice:
    """Divide every entry by the max absolute entry of the slice.

    An all-zero slice is returned unchanged (no epsilon is injected into the
    data); it is still flagged normalized.
    """
    if s.normalized:
        raise DataError(f"slice for query {s.query_index} is already normalized")
    peak = np.abs(s.values).max()
    values = s.values.copy() if peak == 0.0 else s.values / peak
    return QuerySlice(
        query_index=s.query_index, seq_len=s.seq_len, values=values, normalized=True
    )
