"""Training loops: paired conditional GAN, unpaired cycle GAN, MSE baseline.

Every run writes two artifacts into ``cfg.checkpoint_dir``:

  checkpoint.pt  generator weights plus rebuild metadata, refreshed
                 after every epoch
  log.jsonl      one JSON line per epoch with the mean batch losses

The per-epoch "loss" field is the mean generator objective, so
progress checks can compare the first and last lines.  Determinism
covers weight initialization and data ordering (both derived from
``cfg.seed``); floating-point reduction order is not pinned.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader

from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig
from .data import PairedDataset, UnpairedDataset, load_records
from .errors import CheckpointError, ConfigError
from .models import PatchDiscriminator, UNetGenerator

log = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.pt"
LOG_NAME = "log.jsonl"
ADAM_BETAS = (0.5, 0.999)


@dataclass(frozen=True)
class TrainResult:
    """Artifacts and loss trace of one training run."""

    checkpoint: Path
    log: Path
    losses: tuple[float, ...]
    first_batch_loss: float


def train(cfg: TrainConfig) -> TrainResult:
    """Train the translator matching cfg.mode and return its artifacts."""
    if cfg.mode == "paired":
        return _run_pix2pix(cfg)
    return _run_cyclegan(cfg)


def train_mse_baseline(cfg: TrainConfig) -> TrainResult:
    """Train a single generator with reconstruction loss only."""
    if cfg.mode != "paired":
        raise ConfigError("the MSE baseline needs aligned pairs; set mode='paired'")
    return _run_mse(cfg)


def _make_loader(dataset, cfg: TrainConfig) -> DataLoader:
    gen = torch.Generator().manual_seed(cfg.seed)
    return DataLoader(dataset, batch_size=cfg.batch_size, shuffle=True,
                      generator=gen)


def _load_pretrained(generator: nn.Module, path: Path) -> None:
    payload = load_checkpoint(path)
    try:
        generator.load_state_dict(payload["generator"])
    except RuntimeError as e:
        raise CheckpointError(f"init checkpoint is incompatible: {e}") from e


def _run_epochs(cfg: TrainConfig, dataset, step, save_state,
                epoch_start=None) -> TrainResult:
    """Shared epoch loop.

    ``step(batch)`` performs one optimization step and returns the batch
    losses as floats under stable keys including "loss";
    ``save_state(path)`` refreshes the checkpoint artifact.
    """
    cfg.checkpoint_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = cfg.checkpoint_dir / CHECKPOINT_NAME
    log_path = cfg.checkpoint_dir / LOG_NAME
    log_path.write_text("", encoding="utf-8")
    loader = _make_loader(dataset, cfg)

    losses = []
    first_batch_loss = None
    for epoch in range(1, cfg.epochs + 1):
        if epoch_start is not None:
            epoch_start(epoch)
        started = time.perf_counter()
        sums: dict = {}
        batches = 0
        for batch in loader:
            values = step(batch)
            if first_batch_loss is None:
                first_batch_loss = values["loss"]
            for key, value in values.items():
                sums[key] = sums.get(key, 0.0) + value
            batches += 1
        means = {key: total / batches for key, total in sums.items()}
        losses.append(means["loss"])
        entry = {"epoch": epoch, **means,
                 "seconds": round(time.perf_counter() - started, 3)}
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry) + "\n")
        save_state(checkpoint_path)
        log.info("epoch %d/%d loss %.4f", epoch, cfg.epochs, means["loss"])
    return TrainResult(checkpoint=checkpoint_path, log=log_path,
                       losses=tuple(losses), first_batch_loss=first_batch_loss)


def _run_pix2pix(cfg: TrainConfig) -> TrainResult:
    records = load_records(cfg.manifest, "paired")
    dataset = PairedDataset(records, cfg.image_size, use_mask=cfg.use_mask)
    torch.manual_seed(cfg.seed)
    cond_channels = 4 if cfg.use_mask else 3
    generator = UNetGenerator(cond_channels, 3, cfg.width)
    discriminator = PatchDiscriminator(cond_channels + 3, cfg.width)
    if cfg.init_checkpoint is not None:
        _load_pretrained(generator, cfg.init_checkpoint)
    opt_g = torch.optim.Adam(generator.parameters(), lr=cfg.learning_rate,
                             betas=ADAM_BETAS)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=cfg.learning_rate,
                             betas=ADAM_BETAS)
    adversarial = nn.MSELoss()  # least-squares GAN objective
    reconstruction = nn.L1Loss()

    def step(batch):
        cond, target = batch
        fake = generator(cond)

        d_real = discriminator(torch.cat([cond, target], dim=1))
        d_fake = discriminator(torch.cat([cond, fake.detach()], dim=1))
        loss_d = 0.5 * (adversarial(d_real, torch.ones_like(d_real))
                        + adversarial(d_fake, torch.zeros_like(d_fake)))
        opt_d.zero_grad()
        loss_d.backward()
        opt_d.step()

        d_out = discriminator(torch.cat([cond, fake], dim=1))
        loss_g = (adversarial(d_out, torch.ones_like(d_out))
                  + cfg.lambda_l1 * reconstruction(fake, target))
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()
        return {"loss": loss_g.item(), "loss_d": loss_d.item()}

    def save_state(path):
        save_checkpoint(path, trainer="pix2pix", mode=cfg.mode,
                        image_size=cfg.image_size, width=cfg.width,
                        use_mask=cfg.use_mask,
                        generator_state=generator.state_dict())

    return _run_epochs(cfg, dataset, step, save_state)


def _run_cyclegan(cfg: TrainConfig) -> TrainResult:
    records = load_records(cfg.manifest, "unpaired")
    dataset = UnpairedDataset(records, cfg.image_size, seed=cfg.seed)
    torch.manual_seed(cfg.seed)
    g_ab = UNetGenerator(3, 3, cfg.width)  # source domain -> real domain
    g_ba = UNetGenerator(3, 3, cfg.width)
    d_a = PatchDiscriminator(3, cfg.width)
    d_b = PatchDiscriminator(3, cfg.width)
    if cfg.init_checkpoint is not None:
        _load_pretrained(g_ab, cfg.init_checkpoint)
    opt_g = torch.optim.Adam(
        itertools.chain(g_ab.parameters(), g_ba.parameters()),
        lr=cfg.learning_rate, betas=ADAM_BETAS)
    opt_d = torch.optim.Adam(
        itertools.chain(d_a.parameters(), d_b.parameters()),
        lr=cfg.learning_rate, betas=ADAM_BETAS)
    adversarial = nn.MSELoss()
    cycle = nn.L1Loss()

    def step(batch):
        real_a, real_b = batch
        fake_b = g_ab(real_a)
        fake_a = g_ba(real_b)

        score_b = d_b(fake_b)
        score_a = d_a(fake_a)
        loss_g = (adversarial(score_b, torch.ones_like(score_b))
                  + adversarial(score_a, torch.ones_like(score_a))
                  + cfg.lambda_cycle * (cycle(g_ba(fake_b), real_a)
                                        + cycle(g_ab(fake_a), real_b)))
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()

        loss_d = torch.zeros(())
        for disc, real, fake in ((d_a, real_a, fake_a), (d_b, real_b, fake_b)):
            s_real = disc(real)
            s_fake = disc(fake.detach())
            loss_d = loss_d + 0.5 * (
                adversarial(s_real, torch.ones_like(s_real))
                + adversarial(s_fake, torch.zeros_like(s_fake)))
        opt_d.zero_grad()
        loss_d.backward()
        opt_d.step()
        return {"loss": loss_g.item(), "loss_d": loss_d.item()}

    def save_state(path):
        save_checkpoint(path, trainer="cyclegan", mode=cfg.mode,
                        image_size=cfg.image_size, width=cfg.width,
                        use_mask=False,
                        generator_state=g_ab.state_dict(),
                        extra={"generator_ba": g_ba.state_dict()})

    return _run_epochs(cfg, dataset, step, save_state,
                       epoch_start=dataset.reshuffle)


def _run_mse(cfg: TrainConfig) -> TrainResult:
    records = load_records(cfg.manifest, "paired")
    dataset = PairedDataset(records, cfg.image_size, use_mask=cfg.use_mask)
    torch.manual_seed(cfg.seed)
    cond_channels = 4 if cfg.use_mask else 3
    generator = UNetGenerator(cond_channels, 3, cfg.width)
    if cfg.init_checkpoint is not None:
        _load_pretrained(generator, cfg.init_checkpoint)
    opt = torch.optim.Adam(generator.parameters(), lr=cfg.learning_rate,
                           betas=ADAM_BETAS)
    criterion = nn.MSELoss()

    def step(batch):
        cond, target = batch
        loss = criterion(generator(cond), target)
        opt.zero_grad()
        loss.backward()
        opt.step()
        return {"loss": loss.item()}

    def save_state(path):
        save_checkpoint(path, trainer="mse", mode=cfg.mode,
                        image_size=cfg.image_size, width=cfg.width,
                        use_mask=cfg.use_mask,
                        generator_state=generator.state_dict())

    return _run_epochs(cfg, dataset, step, save_state)
