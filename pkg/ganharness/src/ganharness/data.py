"""Dataset access over the producer's on-disk contract.

The harness reads only documented artifacts: a ``manifest.jsonl`` file
whose lines are JSON records, plus the PNG files those records point
to.  Paired records carry ``pair_id`` with
``source_reprojected_image`` / ``target_real_image`` / ``mask_image``
paths; unpaired records carry ``item_id`` with ``source_image`` /
``target_image`` / ``mask_image``.  Relative paths resolve against the
manifest's directory.  Images load as float32 CHW tensors in [0, 1],
resized to the square working resolution (bilinear for color, nearest
for masks).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

from .errors import ConfigError

PAIRED_KEYS = ("pair_id", "source_reprojected_image", "target_real_image", "mask_image")
UNPAIRED_KEYS = ("item_id", "source_image", "target_image", "mask_image")


@dataclass(frozen=True)
class TranslationRecord:
    """One training item: a source image, its aligned or domain-level
    target, and the source validity mask."""

    name: str
    source: Path
    target: Path
    mask: Path


def read_manifest(path: Path) -> list[dict]:
    """Parse a JSON Lines manifest into raw record dicts."""
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}:{lineno}: invalid JSON record: {e}") from e
            if not isinstance(record, dict):
                raise ConfigError(f"{path}:{lineno}: record is not a JSON object")
            records.append(record)
    return records


def resolve_path(base: Path, value: str) -> Path:
    """Resolve a manifest-recorded path against the manifest directory."""
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_records(manifest: Path, mode: str) -> list[TranslationRecord]:
    """Read a manifest and validate it against the requested mode.

    Raises ConfigError when the manifest is empty or its records do not
    carry the key set the mode requires (for example unpaired mode on a
    paired-only manifest, which lacks a domain-level image listing).
    """
    manifest = Path(manifest)
    raw = read_manifest(manifest)
    if not raw:
        raise ConfigError(f"empty dataset: no records in {manifest}")
    keys = PAIRED_KEYS if mode == "paired" else UNPAIRED_KEYS
    base = manifest.parent
    records = []
    for i, rec in enumerate(raw):
        missing = [k for k in keys if k not in rec]
        if missing:
            raise ConfigError(
                f"{manifest}: record {i} is not a {mode} record "
                f"(missing {', '.join(missing)})")
        name_key, source_key, target_key, mask_key = keys
        records.append(TranslationRecord(
            name=str(rec[name_key]),
            source=resolve_path(base, rec[source_key]),
            target=resolve_path(base, rec[target_key]),
            mask=resolve_path(base, rec[mask_key]),
        ))
    return records


def load_image(path: Path, size: int) -> np.ndarray:
    """Load a color image as float32 (3, size, size) in [0, 1]."""
    with Image.open(path) as img:
        img = img.convert("RGB")
        if img.size != (size, size):
            img = img.resize((size, size), Image.BILINEAR)
        arr = np.asarray(img, dtype=np.float32) / 255.0
    return arr.transpose(2, 0, 1).copy()


def load_mask(path: Path, size: int) -> np.ndarray:
    """Load a validity mask as float32 (1, size, size) with values in {0, 1}."""
    with Image.open(path) as img:
        img = img.convert("L")
        if img.size != (size, size):
            img = img.resize((size, size), Image.NEAREST)
        arr = (np.asarray(img) > 0).astype(np.float32)
    return arr[np.newaxis, :, :]


class PairedDataset(Dataset):
    """Aligned (conditioning, target) tensors for conditional training.

    The conditioning tensor is the source image, optionally with the
    validity mask concatenated as a fourth channel.
    """

    def __init__(self, records: list[TranslationRecord], image_size: int,
                 use_mask: bool = True):
        self.records = list(records)
        self.image_size = image_size
        self.use_mask = use_mask

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index: int):
        rec = self.records[index]
        source = load_image(rec.source, self.image_size)
        target = load_image(rec.target, self.image_size)
        if self.use_mask:
            mask = load_mask(rec.mask, self.image_size)
            cond = np.concatenate([source, mask], axis=0)
        else:
            cond = source
        return torch.from_numpy(cond), torch.from_numpy(target)


class UnpairedDataset(Dataset):
    """Decoupled (domain A, domain B) tensors for cycle training.

    Domain A holds the source images, domain B the target-domain
    images.  Item ``i`` pairs A[i] with B[pairing[i]]; call
    ``reshuffle`` once per epoch to re-draw the pairing so the two
    streams stay unaligned.
    """

    def __init__(self, records: list[TranslationRecord], image_size: int,
                 seed: int = 0):
        self.records = list(records)
        self.image_size = image_size
        self._seed = seed
        self._pairing = list(range(len(self.records)))
        self.reshuffle(0)

    def reshuffle(self, epoch: int) -> None:
        gen = torch.Generator().manual_seed(self._seed * 100003 + epoch)
        self._pairing = torch.randperm(len(self.records), generator=gen).tolist()

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index: int):
        a = load_image(self.records[index].source, self.image_size)
        b = load_image(self.records[self._pairing[index]].target, self.image_size)
        return torch.from_numpy(a), torch.from_numpy(b)
