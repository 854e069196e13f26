"""Mask-mix composition of image pairs and of their target maps.

Mixing is a pure elementwise blend: the output takes the first source
where the mask is 1 and the second source where it is 0. Images and
hard-label maps go through the same composition; intensities are not
re-normalized afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masks import Mask


@dataclass(frozen=True)
class MixedPair:
    image: np.ndarray
    target: np.ndarray
    mask: Mask


def _mask_values(mask: Mask | np.ndarray) -> np.ndarray:
    return mask.values if isinstance(mask, Mask) else np.asarray(mask)


def _check_shapes(a: np.ndarray, b: np.ndarray, m: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"source shapes differ: {a.shape} vs {b.shape}")
    if a.shape[a.ndim - m.ndim :] != m.shape:
        raise ValueError(
            f"mask shape {m.shape} does not match trailing dims of {a.shape}"
        )


def mix_images(x_u: np.ndarray, x_l: np.ndarray, mask: Mask | np.ndarray) -> np.ndarray:
    """out = x_u * mask + x_l * (1 - mask).

    The mask may match the full array shape or just its trailing spatial
    dims (leading batch/channel axes broadcast).
    """
    x_u = np.asarray(x_u)
    x_l = np.asarray(x_l)
    m = _mask_values(mask)
    _check_shapes(x_u, x_l, m)
    m = m.astype(x_u.dtype)
    return x_u * m + x_l * (1 - m)


def mix_targets(
    pseudo_u: np.ndarray,
    y_l: np.ndarray,
    mask: Mask | np.ndarray,
    num_classes: int | None = None,
) -> np.ndarray:
    """Blend hard class maps: pseudo-labels where mask=1, labels where mask=0."""
    pseudo_u = np.asarray(pseudo_u)
    y_l = np.asarray(y_l)
    if not (np.issubdtype(pseudo_u.dtype, np.integer) and np.issubdtype(y_l.dtype, np.integer)):
        raise ValueError("targets must be integer class maps")
    m = _mask_values(mask)
    _check_shapes(pseudo_u, y_l, m)
    if num_classes is not None:
        for name, arr in (("pseudo_u", pseudo_u), ("y_l", y_l)):
            if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
                raise ValueError(f"{name} has class indices outside [0, {num_classes})")
    m = m.astype(pseudo_u.dtype)
    return pseudo_u * m + y_l * (1 - m)


def split_batch(
    images: np.ndarray, labels: np.ndarray | None = None
) -> tuple[tuple[np.ndarray, np.ndarray | None], tuple[np.ndarray, np.ndarray | None]]:
    """Split a stack into deterministic halves: first half -> a, second -> b."""
    images = np.asarray(images)
    n = images.shape[0]
    if n % 2 != 0:
        raise ValueError(f"batch size must be even to split into halves, got {n}")
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape[0] != n:
            raise ValueError(
                f"labels stack size {labels.shape[0]} does not match images {n}"
            )
    h = n // 2
    lab_a = labels[:h] if labels is not None else None
    lab_b = labels[h:] if labels is not None else None
    return (images[:h], lab_a), (images[h:], lab_b)
