"""Per-image descriptor extractors behind one interface.

The sum-of-absolute-differences baseline needs no learned weights: the
descriptor is the resized grayscale patch itself, and pairing it with the
L1 distance reproduces classic per-pixel difference matching. Pretrained
models are wrapped as opaque TorchScript checkpoints that map an image
batch to global descriptors; nothing about their architecture is assumed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

DEFAULT_SAD_RESOLUTION = (32, 32)  # (width, height) of the grayscale patch


class CheckpointMissingError(Exception):
    """A descriptor checkpoint path does not exist or cannot be loaded."""


class SadDescriptor:
    """Resized grayscale pixels as the descriptor vector."""

    name = "sad-baseline"
    default_metric = "sad"

    def __init__(self, resolution: tuple[int, int] = DEFAULT_SAD_RESOLUTION):
        if resolution[0] < 1 or resolution[1] < 1:
            raise ValueError(f"bad patch resolution {resolution}")
        self.resolution = resolution

    def extract_one(self, image: Image.Image) -> np.ndarray:
        patch = image.convert("L").resize(self.resolution, Image.BILINEAR)
        return np.asarray(patch, dtype=np.float64).reshape(-1)


class CheckpointDescriptor:
    """Opaque pretrained model: TorchScript file mapping NCHW to (N, D)."""

    name = "pretrained-descriptor-checkpoint"
    default_metric = "euclidean"

    def __init__(self, checkpoint: str | Path, input_size: tuple[int, int] = (224, 224)):
        self.checkpoint = Path(checkpoint)
        self.input_size = input_size
        if not self.checkpoint.exists():
            raise CheckpointMissingError(f"descriptor checkpoint not found: {self.checkpoint}")
        try:
            import torch
        except ImportError as e:
            raise CheckpointMissingError(
                "torch is required to load descriptor checkpoints"
            ) from e
        self._torch = torch
        try:
            self._model = torch.jit.load(str(self.checkpoint), map_location="cpu")
        except Exception as e:
            raise CheckpointMissingError(f"cannot load {self.checkpoint}: {e}") from e
        self._model.eval()

    def extract_one(self, image: Image.Image) -> np.ndarray:
        torch = self._torch
        rgb = image.convert("RGB").resize(self.input_size, Image.BILINEAR)
        arr = np.asarray(rgb, dtype=np.float32) / 255.0
        batch = torch.from_numpy(arr).permute(2, 0, 1).unsqueeze(0)
        with torch.no_grad():
            out = self._model(batch)
        return np.asarray(out, dtype=np.float64).reshape(-1)
