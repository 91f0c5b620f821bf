"""Desk-scale generator and discriminator networks.

UNetGenerator is a six-level encoder-decoder with skip connections, so
input sizes must be multiples of 64 (the innermost feature map reaches
size/64).  PatchDiscriminator scores overlapping patches rather than
whole images.  Both use the usual GAN weight init: zero-mean normal,
0.02 standard deviation.
"""

from __future__ import annotations

import torch
from torch import nn

DOWN_STEPS = 6


def init_weights(module) -> None:
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.normal_(module.weight, 0.0, 0.02)
        if module.bias is not None:
            nn.init.zeros_(module.bias)


class UNetGenerator(nn.Module):
    """Image-to-image generator with sigmoid output in [0, 1]."""

    def __init__(self, in_channels: int, out_channels: int = 3, width: int = 16):
        super().__init__()
        w = width
        chans = [w, 2 * w, 4 * w, 8 * w, 8 * w, 8 * w]
        downs = []
        cin = in_channels
        for i, cout in enumerate(chans):
            layers: list[nn.Module] = [nn.Conv2d(cin, cout, 4, stride=2, padding=1)]
            # No norm on the outermost level (convention) nor the
            # innermost one (its map can be 1x1, too small to normalize).
            if 0 < i < len(chans) - 1:
                layers.append(nn.InstanceNorm2d(cout))
            layers.append(nn.LeakyReLU(0.2, inplace=True))
            downs.append(nn.Sequential(*layers))
            cin = cout
        self.downs = nn.ModuleList(downs)

        ups = []
        cin = chans[-1]
        for i, cout in enumerate([8 * w, 8 * w, 4 * w, 2 * w, w]):
            ups.append(nn.Sequential(
                nn.ConvTranspose2d(cin, cout, 4, stride=2, padding=1),
                nn.InstanceNorm2d(cout),
                nn.ReLU(inplace=True),
            ))
            # The next stage consumes this output concatenated with the
            # encoder feature at the same scale.
            cin = cout + chans[-(i + 2)]
        self.ups = nn.ModuleList(ups)
        self.head = nn.Sequential(
            nn.ConvTranspose2d(cin, out_channels, 4, stride=2, padding=1),
            nn.Sigmoid(),
        )
        self.apply(init_weights)

    def forward(self, x):
        feats = []
        for down in self.downs:
            x = down(x)
            feats.append(x)
        x = self.ups[0](feats[-1])
        for i, up in enumerate(self.ups[1:], start=2):
            x = up(torch.cat([x, feats[-i]], dim=1))
        return self.head(torch.cat([x, feats[0]], dim=1))


class PatchDiscriminator(nn.Module):
    """Three stride-2 stages then a one-channel patch score map."""

    def __init__(self, in_channels: int, width: int = 16):
        super().__init__()
        w = width
        self.net = nn.Sequential(
            nn.Conv2d(in_channels, w, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(w, 2 * w, 4, stride=2, padding=1),
            nn.InstanceNorm2d(2 * w),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(2 * w, 4 * w, 4, stride=2, padding=1),
            nn.InstanceNorm2d(4 * w),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(4 * w, 1, 4, stride=1, padding=1),
        )
        self.apply(init_weights)

    def forward(self, x):
        return self.net(x)
