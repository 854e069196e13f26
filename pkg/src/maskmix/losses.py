"""Training objectives: masked mix loss, feature-consistency losses, totals.

The mix loss is a spatially weighted cross-entropy + soft Dice on the
mixed predictions, with weight map W = M + alpha * (1 - M): full weight
on regions carrying pseudo-labeled content, alpha on regions carrying
ground-truth content. (An orientation flag swaps the two, since either
reading of the weighting is defensible; the default follows the formula
as written.)

Feature consistency compares student features on mixed inputs against
teacher features on unlabeled inputs across all four (s, t) stream pairs:
mean absolute difference at the low level, per-sample cosine distance of
flattened maps at the high level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from .masks import Mask

DICE_EPS = 1e-5
COSINE_EPS = 1e-8

StreamPair = tuple[torch.Tensor, torch.Tensor]


@dataclass(frozen=True)
class LossWeights:
    lambda_hl: float = 0.5
    alpha: float = 0.5

    def __post_init__(self):
        if self.lambda_hl < 0 or self.alpha < 0:
            raise ValueError(
                f"loss weights must be >= 0, got lambda_hl={self.lambda_hl}, alpha={self.alpha}"
            )


def _as_weight(weight: Mask | np.ndarray | torch.Tensor, like: torch.Tensor) -> torch.Tensor:
    if isinstance(weight, Mask):
        weight = weight.values
    if isinstance(weight, np.ndarray):
        weight = torch.from_numpy(np.ascontiguousarray(weight))
    return weight.to(dtype=like.dtype, device=like.device)


def loss_ce_dice(
    pred_logits: torch.Tensor,
    target: torch.Tensor,
    weight_map: Mask | np.ndarray | torch.Tensor,
) -> torch.Tensor:
    """Weighted cross-entropy plus weighted soft Dice.

    CE is the weighted mean of per-voxel CE. Dice uses the weight inside
    both the overlap and the normalizer:
        1 - mean_c (2 sum(w * p_c * t_c) + eps) / (sum(w * (p_c + t_c)) + eps)
    with p = softmax probabilities and t = one-hot target.
    """
    if pred_logits.shape[0] != target.shape[0] or pred_logits.shape[2:] != target.shape[1:]:
        raise ValueError(
            f"prediction shape {tuple(pred_logits.shape)} inconsistent with target {tuple(target.shape)}"
        )
    w = _as_weight(weight_map, pred_logits)
    if w.dim() > target.dim():
        raise ValueError(f"weight map rank {w.dim()} exceeds target rank {target.dim()}")
    w = w.expand_as(target.to(w.dtype)) if w.shape != target.shape else w
    if torch.any(w < 0):
        raise ValueError("weight map must be non-negative")
    w_sum = w.sum()
    if w_sum <= 0:
        raise ValueError("weight map is all zeros; loss undefined")

    num_classes = pred_logits.shape[1]
    ce_map = F.cross_entropy(pred_logits, target.long(), reduction="none")
    ce = (w * ce_map).sum() / w_sum

    probs = F.softmax(pred_logits, dim=1)
    one_hot = F.one_hot(target.long(), num_classes).movedim(-1, 1).to(probs.dtype)
    wc = w.unsqueeze(1)
    overlap = (wc * probs * one_hot).sum(dim=tuple(range(2, probs.dim()))).sum(0)
    total = (wc * (probs + one_hot)).sum(dim=tuple(range(2, probs.dim()))).sum(0)
    dice_score = (2.0 * overlap + DICE_EPS) / (total + DICE_EPS)
    dice = 1.0 - dice_score.mean()

    return ce + dice


def mix_weight_map(mask: Mask | np.ndarray, alpha: float, invert: bool = False) -> np.ndarray:
    """W = M + alpha * (1 - M); with invert=True, W = alpha * M + (1 - M)."""
    m = mask.values if isinstance(mask, Mask) else np.asarray(mask)
    m = m.astype(np.float64)
    if invert:
        return alpha * m + (1.0 - m)
    return m + alpha * (1.0 - m)


def loss_mix(
    preds: StreamPair,
    targets: StreamPair,
    masks: Mask | np.ndarray | tuple,
    alpha: float,
    invert_weights: bool = False,
) -> torch.Tensor:
    """Sum over the two streams of weighted CE+Dice on mixed targets."""
    if not isinstance(masks, tuple):
        masks = (masks, masks)
    total = None
    for pred, target, mask in zip(preds, targets, masks):
        w = mix_weight_map(mask, alpha, invert=invert_weights)
        term = loss_ce_dice(pred, target, w)
        total = term if total is None else total + term
    return total


def loss_low(f_mix: StreamPair, f_u: StreamPair) -> torch.Tensor:
    """Quadruple mean-absolute-difference across the (s, t) stream pairs."""
    _check_pairs(f_mix, f_u)
    terms = [torch.mean(torch.abs(fm - fu)) for fm in f_mix for fu in f_u]
    return sum(terms) / 4.0


def loss_high(f_mix: StreamPair, f_u: StreamPair) -> torch.Tensor:
    """Quadruple cosine distance of per-sample flattened feature maps."""
    _check_pairs(f_mix, f_u)
    terms = []
    for fm in f_mix:
        for fu in f_u:
            a = fm.flatten(1)
            b = fu.flatten(1)
            cos = F.cosine_similarity(a, b, dim=1, eps=COSINE_EPS)
            terms.append((1.0 - cos).mean())
    return sum(terms) / 4.0


def loss_hl(
    f_mix_lo: StreamPair, f_u_lo: StreamPair, f_mix_hi: StreamPair, f_u_hi: StreamPair
) -> torch.Tensor:
    return loss_low(f_mix_lo, f_u_lo) + loss_high(f_mix_hi, f_u_hi)


def loss_total(mix: torch.Tensor, hl: torch.Tensor, weights: LossWeights) -> torch.Tensor:
    return mix + weights.lambda_hl * hl


def loss_sup(pred_logits: torch.Tensor, y_l: torch.Tensor) -> torch.Tensor:
    """Plain CE+Dice on labeled data (ablation baselines only)."""
    ones = torch.ones_like(y_l, dtype=pred_logits.dtype)
    return loss_ce_dice(pred_logits, y_l, ones)


def _check_pairs(f_mix: StreamPair, f_u: StreamPair) -> None:
    shapes = {tuple(t.shape) for t in (*f_mix, *f_u)}
    if len(shapes) != 1:
        raise ValueError(f"all four feature tensors must share one shape, got {shapes}")
