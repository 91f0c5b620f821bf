"""Training configuration.

TrainConfig carries everything a run needs: the manifest to read, how
to interpret it (paired or unpaired records), the square working
resolution, and the optimization settings.  Validation happens at
construction so a bad value never reaches a training loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

MODES = ("paired", "unpaired")

# The generator downsamples six times, so working resolutions must be
# multiples of 2**6.
SIZE_MULTIPLE = 64


@dataclass(frozen=True)
class TrainConfig:
    """Settings for one training run.

    mode selects the record schema and the trainer family: "paired"
    trains a conditional translator on aligned (source, target) images,
    "unpaired" trains cycle-consistent translators between the two
    image domains.  image_size is the square side in pixels after
    resizing; it must be a positive multiple of 64.  use_mask controls
    whether paired training feeds the validity mask as a fourth input
    channel.  init_checkpoint optionally warm-starts the generator from
    an earlier run.
    """

    mode: str
    manifest: Path
    checkpoint_dir: Path
    image_size: int = 64
    epochs: int = 10
    learning_rate: float = 2e-4
    seed: int = 0
    batch_size: int = 8
    width: int = 16
    use_mask: bool = True
    lambda_l1: float = 100.0
    lambda_cycle: float = 10.0
    init_checkpoint: Path | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "manifest", Path(self.manifest))
        object.__setattr__(self, "checkpoint_dir", Path(self.checkpoint_dir))
        if self.init_checkpoint is not None:
            object.__setattr__(self, "init_checkpoint", Path(self.init_checkpoint))
        if self.image_size < SIZE_MULTIPLE or self.image_size % SIZE_MULTIPLE != 0:
            raise ConfigError(
                f"image_size must be a positive multiple of {SIZE_MULTIPLE}, "
                f"got {self.image_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.width < 1:
            raise ConfigError(f"width must be >= 1, got {self.width}")
        for name in ("lambda_l1", "lambda_cycle"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be non-negative, got {value}")
