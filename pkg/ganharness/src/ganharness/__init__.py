"""Image-translation training harness for re-projected RGBD views.

Consumes datasets only through their on-disk contract (a
``manifest.jsonl`` plus the PNG files it lists) and trains desk-scale
translators: a paired conditional GAN, an unpaired cycle-consistent
GAN, and an MSE-only baseline.  Checkpoints, JSON-lines training logs,
and translated PNGs are the emitted artifacts.
"""

from .checkpoint import build_generator, load_checkpoint, save_checkpoint
from .config import MODES, SIZE_MULTIPLE, TrainConfig
from .data import (PAIRED_KEYS, UNPAIRED_KEYS, PairedDataset,
                   TranslationRecord, UnpairedDataset, load_image, load_mask,
                   load_records, read_manifest, resolve_path)
from .errors import CheckpointError, ConfigError, HarnessError
from .models import PatchDiscriminator, UNetGenerator, init_weights
from .train import (CHECKPOINT_NAME, LOG_NAME, TrainResult, train,
                    train_mse_baseline)
from .translate import translate

__version__ = "0.1.0"

__all__ = [
    "CHECKPOINT_NAME",
    "CheckpointError",
    "ConfigError",
    "HarnessError",
    "LOG_NAME",
    "MODES",
    "PAIRED_KEYS",
    "PairedDataset",
    "PatchDiscriminator",
    "SIZE_MULTIPLE",
    "TrainConfig",
    "TrainResult",
    "TranslationRecord",
    "UNPAIRED_KEYS",
    "UNetGenerator",
    "UnpairedDataset",
    "build_generator",
    "init_weights",
    "load_checkpoint",
    "load_image",
    "load_mask",
    "load_records",
    "read_manifest",
    "resolve_path",
    "save_checkpoint",
    "train",
    "train_mse_baseline",
    "translate",
]
