"""Distance-matrix export: image folders in, SMRM file + ground truth out.

The binary layout is the matching pipeline's documented format: magic
``SMRM`` | version u16=1 | R u32 | Q u32 | R*Q float32 little-endian
row-major, with free-form meta tags in a ``<path>.meta.json`` sidecar.
Frame order is lexicographic filename order within each folder.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .descriptors import CheckpointDescriptor, SadDescriptor

MAGIC = b"SMRM"
VERSION = 1
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".webp", ".ppm", ".pgm"}
METHODS = ("sad-baseline", "pretrained-descriptor-checkpoint")
METRICS = ("sad", "euclidean", "cosine")


class ExportError(Exception):
    pass


class DecodeError(ExportError):
    """One or more images failed to decode; lists every bad file."""

    def __init__(self, failures: list[tuple[Path, str]]):
        self.failures = failures
        lines = "\n".join(f"  {path}: {reason}" for path, reason in failures)
        super().__init__(f"{len(failures)} image(s) failed to decode:\n{lines}")


@dataclass(frozen=True)
class ExportJob:
    reference_dir: Path
    query_dir: Path
    output: Path
    method: str = "sad-baseline"
    metric: str | None = None  # default depends on the method
    sad_resolution: tuple[int, int] = (32, 32)
    checkpoint: Path | None = None
    correspondence: Path | None = None  # query,reference CSV; identity if absent
    gt_output: Path | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ExportError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.metric is not None and self.metric not in METRICS:
            raise ExportError(f"unknown metric {self.metric!r}; expected one of {METRICS}")


def list_images(folder: Path) -> list[Path]:
    folder = Path(folder)
    if not folder.is_dir():
        raise ExportError(f"not a directory: {folder}")
    files = sorted(
        (p for p in folder.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )
    if not files:
        raise ExportError(f"no images in {folder}")
    return files


def _load_descriptors(files: list[Path], extractor) -> np.ndarray:
    rows = []
    failures = []
    for path in files:
        try:
            with Image.open(path) as img:
                rows.append(extractor.extract_one(img))
        except (OSError, UnidentifiedImageError, ValueError) as e:
            failures.append((path, str(e)))
    if failures:
        raise DecodeError(failures)
    return np.vstack(rows)


def _pairwise(refs: np.ndarray, queries: np.ndarray, metric: str) -> np.ndarray:
    if metric == "sad":
        out = np.empty((refs.shape[0], queries.shape[0]))
        for j in range(queries.shape[0]):
            out[:, j] = np.abs(refs - queries[j]).sum(axis=1)
        return out
    if metric == "euclidean":
        sq = (
            (refs**2).sum(axis=1)[:, None]
            + (queries**2).sum(axis=1)[None, :]
            - 2.0 * refs @ queries.T
        )
        return np.sqrt(np.maximum(sq, 0.0))
    if metric == "cosine":
        rn = np.linalg.norm(refs, axis=1)
        qn = np.linalg.norm(queries, axis=1)
        denom = np.maximum(rn[:, None] * qn[None, :], 1e-30)
        return 1.0 - (refs @ queries.T) / denom
    raise ExportError(f"unknown metric {metric!r}")


def write_smrm(values: np.ndarray, path: Path, meta: dict[str, str]) -> None:
    values = np.ascontiguousarray(values, dtype=np.float64)
    if not np.isfinite(values).all():
        raise ExportError("distance matrix contains non-finite entries")
    r, q = values.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = struct.pack("<4sHII", MAGIC, VERSION, r, q)
    path.write_bytes(header + values.astype("<f4").tobytes(order="C"))
    if meta:
        sidecar = path.with_name(path.name + ".meta.json")
        sidecar.write_text(json.dumps(dict(meta), sort_keys=True, indent=2) + "\n")


def _read_correspondence(path: Path, num_queries: int) -> list[int]:
    lines = Path(path).read_text().splitlines()
    if not lines or [f.strip() for f in lines[0].split(",")] != ["query", "reference"]:
        raise ExportError(f"{path}: expected header 'query,reference'")
    mapping = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        q_str, r_str = line.split(",")
        mapping[int(q_str)] = int(r_str)
    missing = [j for j in range(num_queries) if j not in mapping]
    if missing:
        raise ExportError(f"{path}: missing correspondence for queries {missing[:5]}...")
    return [mapping[j] for j in range(num_queries)]


def write_ground_truth(path: Path, references: list[int]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["query,reference"] + [f"{j},{r}" for j, r in enumerate(references)]
    path.write_text("\n".join(lines) + "\n")


def export_distance_matrix(job: ExportJob) -> Path:
    """Run one export job; returns the matrix path it wrote."""
    if job.method == "sad-baseline":
        extractor = SadDescriptor(resolution=job.sad_resolution)
    else:
        if job.checkpoint is None:
            from .descriptors import CheckpointMissingError

            raise CheckpointMissingError("method needs --checkpoint with a descriptor model")
        extractor = CheckpointDescriptor(job.checkpoint)
    metric = job.metric or extractor.default_metric

    ref_files = list_images(job.reference_dir)
    query_files = list_images(job.query_dir)
    refs = _load_descriptors(ref_files, extractor)
    queries = _load_descriptors(query_files, extractor)
    values = _pairwise(refs, queries, metric)

    meta = {
        "method": extractor.name,
        "metric": metric,
        "reference_dir": str(job.reference_dir),
        "query_dir": str(job.query_dir),
    }
    write_smrm(values, job.output, meta)

    if job.gt_output is not None:
        if job.correspondence is not None:
            references = _read_correspondence(job.correspondence, len(query_files))
        else:
            # aligned traverses: query j corresponds to reference j
            if len(query_files) > len(ref_files):
                raise ExportError(
                    "identity correspondence impossible: more queries than references"
                )
            references = list(range(len(query_files)))
        write_ground_truth(job.gt_output, references)
    return Path(job.output)
