"""Random binary patch-grid masks for mask-mix augmentation.

A mask is 1/0 on an axis-aligned grid of patches covering the image.
``ratio`` is the fraction of patches set to ZERO, i.e. the regions where
unlabeled content is removed when the mask multiplies an unlabeled image.
The zero patches are chosen uniformly without replacement, with an exact
count of round(ratio * n_patches), so mask statistics are identical from
run to run apart from patch placement. Works for any dimensionality; the
shipped trainer uses 2D, tests also cover 3D grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64, round_half_up


@dataclass(frozen=True)
class Mask:
    """Binary patch mask plus the parameters that produced it."""

    values: np.ndarray  # uint8, 0/1, constant within each patch cell
    patch_size: tuple[int, ...]
    ratio: float
    seed: int

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(s // p for s, p in zip(self.values.shape, self.patch_size))

    @property
    def n_patches(self) -> int:
        return int(np.prod(self.grid_shape))

    @property
    def n_zero_patches(self) -> int:
        return self.n_patches - int(self.values.sum() // np.prod(self.patch_size))


def generate_mask(
    shape: tuple[int, ...],
    patch_size: tuple[int, ...],
    ratio: float,
    seed: int,
) -> Mask:
    """Draw a random patch-grid mask.

    Exactly round_half_up(ratio * n_patches) patches are zeroed; they are
    the first entries of a Fisher-Yates permutation of the flat (C-order)
    patch indices driven by SplitMix64(seed).
    """
    if len(shape) != len(patch_size):
        raise ValueError(
            f"shape {shape} and patch_size {patch_size} have different ranks"
        )
    if any(s <= 0 for s in shape) or any(p <= 0 for p in patch_size):
        raise ValueError(f"shape {shape} and patch_size {patch_size} must be positive")
    if any(s % p != 0 for s, p in zip(shape, patch_size)):
        raise ValueError(
            f"shape {shape} is not divisible by patch_size {patch_size}"
        )
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must be in [0, 1], got {ratio}")

    grid_shape = tuple(s // p for s, p in zip(shape, patch_size))
    n_patches = int(np.prod(grid_shape))
    n_zero = round_half_up(ratio * n_patches)

    grid = np.ones(n_patches, dtype=np.uint8)
    order = SplitMix64(seed).permutation(n_patches)
    grid[order[:n_zero]] = 0
    grid = grid.reshape(grid_shape)

    values = grid
    for axis, p in enumerate(patch_size):
        values = np.repeat(values, p, axis=axis)

    return Mask(values=values, patch_size=tuple(patch_size), ratio=float(ratio), seed=int(seed))


def invert_mask(mask: Mask) -> Mask:
    """Elementwise complement; zero and one patches trade places."""
    n = mask.n_patches
    inverted_ratio = (n - round_half_up(mask.ratio * n)) / n
    return Mask(
        values=(1 - mask.values).astype(np.uint8),
        patch_size=mask.patch_size,
        ratio=inverted_ratio,
        seed=mask.seed,
    )
