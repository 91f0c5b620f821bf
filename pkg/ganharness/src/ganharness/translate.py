"""Apply a trained generator to new images.

Input is either a manifest (paired or unpaired records) or a directory
of image files.  Outputs keep the input basenames and are written at
the checkpoint's configured square resolution.  When the model was
trained with a mask channel, the mask comes from the manifest record
or, for directory input, from ``mask_dir``; with neither available an
all-valid mask is assumed.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .checkpoint import build_generator, load_checkpoint
from .data import (PAIRED_KEYS, UNPAIRED_KEYS, load_image, load_mask,
                   read_manifest, resolve_path)
from .errors import ConfigError

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _collect_from_manifest(manifest: Path) -> list:
    base = manifest.parent
    items = []
    for i, rec in enumerate(read_manifest(manifest)):
        if all(k in rec for k in PAIRED_KEYS):
            source, mask = rec["source_reprojected_image"], rec["mask_image"]
        elif all(k in rec for k in UNPAIRED_KEYS):
            source, mask = rec["source_image"], rec["mask_image"]
        else:
            raise ConfigError(f"{manifest}: record {i} has no usable source image")
        source = resolve_path(base, source)
        items.append((source.name, source, resolve_path(base, mask)))
    return items


def _collect_from_dir(directory: Path, mask_dir: Path | None) -> list:
    items = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        mask_path = None
        if mask_dir is not None:
            mask_path = mask_dir / path.name
            if not mask_path.is_file():
                raise ConfigError(f"missing mask for {path.name} in {mask_dir}")
        items.append((path.name, path, mask_path))
    return items


def translate(checkpoint: Path, source: Path, out_dir: Path,
              mask_dir: Path | None = None) -> list[Path]:
    """Run the checkpointed generator over every input image.

    Returns the written paths in input order.
    """
    payload = load_checkpoint(Path(checkpoint))
    generator = build_generator(payload)
    generator.eval()
    size = int(payload["image_size"])
    use_mask = bool(payload["use_mask"])

    source = Path(source)
    if source.is_dir():
        items = _collect_from_dir(source, Path(mask_dir) if mask_dir else None)
    elif source.is_file():
        items = _collect_from_manifest(source)
    else:
        raise ConfigError(f"input not found: {source}")
    if not items:
        raise ConfigError(f"no input images under {source}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    with torch.no_grad():
        for name, image_path, mask_path in items:
            arr = load_image(image_path, size)
            if use_mask:
                if mask_path is not None:
                    mask = load_mask(mask_path, size)
                else:
                    mask = np.ones((1, size, size), dtype=np.float32)
                arr = np.concatenate([arr, mask], axis=0)
            batch = torch.from_numpy(arr).unsqueeze(0)
            out = generator(batch)[0].numpy()
            out8 = np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)
            path = out_dir / name
            Image.fromarray(out8.transpose(1, 2, 0)).save(path)
            written.append(path)
    log.info("translated %d images into %s", len(written), out_dir)
    return written
