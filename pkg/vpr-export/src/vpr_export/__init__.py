"""Adapter that turns image folders into SMRM distance-matrix files.

Descriptors come either from the built-in sum-of-absolute-differences
baseline (no checkpoints needed) or from an opaque pretrained descriptor
checkpoint; outputs are consumed by the matching pipeline purely through
its binary matrix and ground-truth CSV formats.
"""

__version__ = "0.1.0"

from .descriptors import CheckpointDescriptor, CheckpointMissingError, SadDescriptor
from .export import (
    DecodeError,
    ExportError,
    ExportJob,
    export_distance_matrix,
    list_images,
    write_ground_truth,
    write_smrm,
)
