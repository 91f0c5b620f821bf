"""Checkpoint artifact format.

A checkpoint is a single torch-serialized dict holding the translator
generator's weights plus enough metadata to rebuild the network:
trainer kind, working resolution, width, and whether the input carries
a mask channel.  Unpaired checkpoints additionally store the reverse
generator under ``generator_ba``.
"""

from __future__ import annotations

from pathlib import Path

import torch

from .errors import CheckpointError
from .models import UNetGenerator

FORMAT = 1
REQUIRED_KEYS = ("format", "trainer", "image_size", "width", "use_mask", "generator")


def save_checkpoint(path: Path, *, trainer: str, mode: str, image_size: int,
                    width: int, use_mask: bool, generator_state: dict,
                    extra: dict | None = None) -> None:
    payload = {
        "format": FORMAT,
        "trainer": trainer,
        "mode": mode,
        "image_size": image_size,
        "width": width,
        "use_mask": use_mask,
        "generator": generator_state,
    }
    if extra:
        payload.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)


def load_checkpoint(path: Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:  # torch.load failures span several exception types
        raise CheckpointError(f"unreadable checkpoint {path}: {e}") from e
    if not isinstance(payload, dict):
        raise CheckpointError(f"checkpoint {path} is not a payload dict")
    missing = [k for k in REQUIRED_KEYS if k not in payload]
    if missing:
        raise CheckpointError(f"checkpoint {path} is missing keys: {', '.join(missing)}")
    return payload


def build_generator(payload: dict) -> UNetGenerator:
    """Rebuild the forward (source to target) generator from a payload."""
    in_channels = 4 if payload["use_mask"] else 3
    gen = UNetGenerator(in_channels, 3, payload["width"])
    try:
        gen.load_state_dict(payload["generator"])
    except RuntimeError as e:
        raise CheckpointError(f"generator weights do not match metadata: {e}") from e
    return gen
