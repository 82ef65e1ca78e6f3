"""Command-line front end for the export adapter."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .descriptors import CheckpointMissingError
from .export import ExportError, ExportJob, export_distance_matrix


def parse_resolution(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpr-export",
        description="Compute a distance matrix from two image folders (SMRM output)",
    )
    parser.add_argument("--reference-dir", required=True, type=Path)
    parser.add_argument("--query-dir", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path, help="output .smrm path")
    parser.add_argument(
        "--method",
        choices=("sad-baseline", "pretrained-descriptor-checkpoint"),
        default="sad-baseline",
    )
    parser.add_argument(
        "--distance",
        choices=("sad", "euclidean", "cosine"),
        default=None,
        help="default: sad for the baseline, euclidean for checkpoints",
    )
    parser.add_argument(
        "--resolution",
        type=parse_resolution,
        default=(32, 32),
        help="SAD patch size as WxH (default 32x32)",
    )
    parser.add_argument("--checkpoint", type=Path, help="TorchScript descriptor model")
    parser.add_argument("--gt-out", type=Path, help="also write a ground-truth CSV")
    parser.add_argument(
        "--correspondence",
        type=Path,
        help="query,reference CSV overriding the aligned identity assumption",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = ExportJob(
        reference_dir=args.reference_dir,
        query_dir=args.query_dir,
        output=args.out,
        method=args.method,
        metric=args.distance,
        sad_resolution=args.resolution,
        checkpoint=args.checkpoint,
        correspondence=args.correspondence,
        gt_output=args.gt_out,
    )
    try:
        path = export_distance_matrix(job)
    except (ExportError, CheckpointMissingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    if args.gt_out:
        print(f"wrote {args.gt_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
