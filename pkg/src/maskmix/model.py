"""Small 2D encoder-decoder segmentation network with feature taps.

Standard U-Net layout: `depth` encoder stages of two conv+norm+ELU layers
with 2x average-pool downsampling, a bottleneck block, and a mirrored
decoder with skip connections. Two activations are exposed alongside the
logits: the output of the stage right after the first downsampling
(local edge/geometry content, channels = 2*base) and the bottleneck
output (global semantic content, channels = base * 2^depth).

GroupNorm keeps the forward pass independent of batch composition, which
matters because the averaged teacher and the student see different
batches. ELU and average pooling keep the network smooth, so analytic
gradients can be validated against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from . import container


@dataclass
class FeatureTaps:
    low: torch.Tensor  # (N, base*2, H/2, W/2)
    high: torch.Tensor  # (N, base*2^depth, H/2^depth, W/2^depth)


def _norm(channels: int) -> nn.GroupNorm:
    return nn.GroupNorm(min(8, channels), channels)


def _block(cin: int, cout: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(cin, cout, 3, padding=1),
        _norm(cout),
        nn.ELU(),
        nn.Conv2d(cout, cout, 3, padding=1),
        _norm(cout),
        nn.ELU(),
    )


class SegNet(nn.Module):
    def __init__(
        self,
        in_channels: int = 1,
        num_classes: int = 4,
        depth: int = 4,
        base_channels: int = 16,
    ):
        super().__init__()
        if depth < 2:
            raise ValueError(f"depth must be >= 2, got {depth}")
        self.in_channels = in_channels
        self.num_classes = num_classes
        self.depth = depth
        self.base_channels = base_channels

        chans = [base_channels * 2**i for i in range(depth + 1)]
        self.encoders = nn.ModuleList(
            [_block(in_channels if i == 0 else chans[i - 1], chans[i]) for i in range(depth)]
        )
        self.pool = nn.AvgPool2d(2)
        self.bottleneck = _block(chans[depth - 1], chans[depth])
        self.upsamplers = nn.ModuleList(
            [nn.ConvTranspose2d(chans[i + 1], chans[i], 2, stride=2) for i in reversed(range(depth))]
        )
        self.decoders = nn.ModuleList(
            [_block(2 * chans[i], chans[i]) for i in reversed(range(depth))]
        )
        self.head = nn.Conv2d(base_channels, num_classes, 1)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, FeatureTaps]:
        h, w = x.shape[-2:]
        factor = 2**self.depth
        if h % factor or w % factor:
            raise ValueError(
                f"spatial dims {(h, w)} must be divisible by 2^depth = {factor}"
            )
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = self.pool(x)
        # low tap: the first post-downsampling stage output (2*base channels
        # at half resolution); high tap: the bottleneck output
        low = skips[1]
        x = self.bottleneck(x)
        high = x
        for up, dec, skip in zip(self.upsamplers, self.decoders, reversed(skips)):
            x = up(x)
            x = dec(torch.cat([skip, x], dim=1))
        logits = self.head(x)
        return logits, FeatureTaps(low=low, high=high)

    def init_parameters(self, seed: int) -> None:
        """Deterministic init: weights ~ U(-b, b) with b = 1/sqrt(fan_in)
        (fan_in = numel/shape[0]), biases use their layer's bound, norm
        affine params are 1/0. Draw order is module iteration order."""
        gen = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for module in self.modules():
                if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
                    fan_in = module.weight.numel() // module.weight.shape[0]
                    bound = 1.0 / math.sqrt(fan_in)
                    module.weight.uniform_(-bound, bound, generator=gen)
                    if module.bias is not None:
                        module.bias.uniform_(-bound, bound, generator=gen)
                elif isinstance(module, nn.GroupNorm):
                    module.weight.fill_(1.0)
                    module.bias.fill_(0.0)


def create_network(
    num_classes: int,
    depth: int,
    base_channels: int,
    seed: int,
    in_channels: int = 1,
) -> SegNet:
    net = SegNet(in_channels=in_channels, num_classes=num_classes, depth=depth, base_channels=base_channels)
    net.init_parameters(seed)
    return net


def predict_labels(net: SegNet, x: torch.Tensor) -> torch.Tensor:
    """Per-voxel argmax of the logits; ties go to the lowest class index."""
    with torch.no_grad():
        logits, _ = net(x)
        return torch.argmax(logits, dim=1)


def save_checkpoint(net: SegNet, directory: Path | str) -> None:
    arrays = {name: p.detach().cpu().numpy().astype(np.float32) for name, p in net.state_dict().items()}
    container.save_named_arrays(directory, arrays)
    container.write_kv(
        Path(directory) / "meta.txt",
        {
            "in_channels": str(net.in_channels),
            "num_classes": str(net.num_classes),
            "depth": str(net.depth),
            "base_channels": str(net.base_channels),
        },
    )


def load_checkpoint(directory: Path | str) -> SegNet:
    meta = container.read_kv(Path(directory) / "meta.txt")
    net = SegNet(
        in_channels=int(meta["in_channels"]),
        num_classes=int(meta["num_classes"]),
        depth=int(meta["depth"]),
        base_channels=int(meta["base_channels"]),
    )
    arrays = container.load_named_arrays(directory)
    state = {name: torch.from_numpy(arr) for name, arr in arrays.items()}
    net.load_state_dict(state)
    return net
