"""Command-line interface.

Subcommands
  train        GAN training; paired mode is a conditional translator,
               unpaired mode a cycle-consistent one
  train-mse    paired baseline with reconstruction loss only
  translate    run a trained generator over a manifest or image directory

Exit codes: 0 success, 1 runtime failure, 2 usage error.  Each command
prints a one-line JSON summary to stdout; logging goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import TrainConfig
from .errors import HarnessError
from .train import TrainResult, train, train_mse_baseline
from .translate import translate


def _config_from_args(args, mode: str) -> TrainConfig:
    return TrainConfig(
        mode=mode,
        manifest=Path(args.manifest),
        checkpoint_dir=Path(args.out),
        image_size=args.size,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        batch_size=args.batch_size,
        width=args.width,
        use_mask=not args.no_mask_channel,
        lambda_l1=args.lambda_l1,
        lambda_cycle=args.lambda_cycle,
        init_checkpoint=Path(args.init_checkpoint) if args.init_checkpoint else None,
    )


def _summary(trainer: str, result: TrainResult) -> dict:
    return {
        "trainer": trainer,
        "checkpoint": str(result.checkpoint),
        "log": str(result.log),
        "epochs": len(result.losses),
        "first_epoch_loss": result.losses[0],
        "final_epoch_loss": result.losses[-1],
        "first_batch_loss": result.first_batch_loss,
    }


def _cmd_train(args) -> int:
    cfg = _config_from_args(args, args.mode)
    result = train(cfg)
    trainer = "pix2pix" if cfg.mode == "paired" else "cyclegan"
    print(json.dumps(_summary(trainer, result)))
    return 0


def _cmd_train_mse(args) -> int:
    cfg = _config_from_args(args, "paired")
    result = train_mse_baseline(cfg)
    print(json.dumps(_summary("mse", result)))
    return 0


def _cmd_translate(args) -> int:
    written = translate(
        Path(args.checkpoint), Path(args.input), Path(args.out),
        mask_dir=Path(args.mask_dir) if args.mask_dir else None)
    print(json.dumps({"count": len(written), "out": str(Path(args.out))}))
    return 0


def _add_train_args(p, with_mode: bool) -> None:
    if with_mode:
        p.add_argument("--mode", choices=("paired", "unpaired"), required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--size", type=int, default=64,
                   help="square working resolution, multiple of 64")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=2e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--width", type=int, default=16,
                   help="base channel width of the networks")
    p.add_argument("--no-mask-channel", action="store_true",
                   help="drop the validity-mask input channel")
    p.add_argument("--lambda-l1", type=float, default=100.0)
    p.add_argument("--lambda-cycle", type=float, default=10.0)
    p.add_argument("--init-checkpoint", default=None,
                   help="warm-start generator weights from this checkpoint")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ganharness",
        description="train and run image translators over manifest datasets")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train a paired or unpaired translator")
    _add_train_args(tr, with_mode=True)
    tr.set_defaults(func=_cmd_train)

    ms = sub.add_parser("train-mse", help="train the MSE-only paired baseline")
    _add_train_args(ms, with_mode=False)
    ms.set_defaults(func=_cmd_train_mse)

    tl = sub.add_parser("translate", help="apply a trained generator")
    tl.add_argument("--checkpoint", required=True)
    tl.add_argument("--input", required=True,
                    help="manifest file or image directory")
    tl.add_argument("--out", required=True)
    tl.add_argument("--mask-dir", default=None,
                    help="mask directory for directory input")
    tl.set_defaults(func=_cmd_translate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (HarnessError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
