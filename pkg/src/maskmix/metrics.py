"""Segmentation metrics: Dice, Jaccard, 95% Hausdorff, average surface distance.

Surface distances follow the voxel-boundary convention: a boundary voxel
is a foreground voxel with at least one background face-neighbor (voxels
outside the array count as background). Both directed distance sets are
pooled; hd95 is the 95th percentile of the pool with linear interpolation
between order statistics, asd is the pool mean. Distances are exact:
squared distances are computed in integer arithmetic and square-rooted
once, sums use compensated summation, so results are reproducible to the
bit across implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class EmptyMaskError(ValueError):
    """Surface distances are undefined when either mask has no foreground."""


def dice_jaccard(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    """Overlap ratios; both defined as 1.0 when both masks are empty."""
    pred = np.asarray(pred).astype(bool)
    gt = np.asarray(gt).astype(bool)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    inter = int(np.count_nonzero(pred & gt))
    p = int(np.count_nonzero(pred))
    g = int(np.count_nonzero(gt))
    if p + g == 0:
        return 1.0, 1.0
    dice = 2.0 * inter / float(p + g)
    union = p + g - inter
    jaccard = inter / float(union)
    return dice, jaccard


def boundary_voxels(mask: np.ndarray) -> np.ndarray:
    """Integer coordinates of foreground voxels with a background face-neighbor."""
    mask = np.asarray(mask).astype(bool)
    padded = np.pad(mask, 1, constant_values=False)
    interior = np.ones_like(mask)
    core = tuple(slice(1, -1) for _ in range(mask.ndim))
    for axis in range(mask.ndim):
        for shift in (-1, 1):
            interior &= np.roll(padded, shift, axis=axis)[core]
    return np.argwhere(mask & ~interior).astype(np.int64)


def _directed_sq_mins(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """For each src voxel, the min squared Euclidean distance to dst (int64)."""
    diff = src[:, None, :] - dst[None, :, :]
    sq = (diff * diff).sum(axis=2)
    return sq.min(axis=1)


def percentile_linear(sorted_values: list[float], q: float) -> float:
    """q-th percentile with linear interpolation between order statistics:
    h = q/100 * (n-1); v = s[floor(h)] + (s[floor(h)+1] - s[floor(h)]) * frac."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("empty value pool")
    if n == 1:
        return sorted_values[0]
    h = q / 100.0 * (n - 1)
    lo = int(math.floor(h))
    if lo >= n - 1:
        return sorted_values[n - 1]
    frac = h - lo
    return sorted_values[lo] + (sorted_values[lo + 1] - sorted_values[lo]) * frac


def surface_distances(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    """(hd95, asd) over the symmetric pool of boundary-to-boundary distances."""
    pred = np.asarray(pred).astype(bool)
    gt = np.asarray(gt).astype(bool)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    if not pred.any() or not gt.any():
        raise EmptyMaskError("surface distances undefined for an empty mask")
    pb = boundary_voxels(pred)
    gb = boundary_voxels(gt)
    pool_sq = np.concatenate([_directed_sq_mins(pb, gb), _directed_sq_mins(gb, pb)])
    pool = [math.sqrt(float(v)) for v in pool_sq.tolist()]
    asd = math.fsum(pool) / len(pool)
    hd95 = percentile_linear(sorted(pool), 95.0)
    return hd95, asd


# ---------------------------------------------------------------------------
# Multi-class reports

UNDEFINED = float("nan")

_FIELDS = ("dice", "jaccard", "hd95", "asd")


@dataclass
class MetricsReport:
    """Per-class metrics averaged over cases, plus the foreground mean.

    hd95/asd are NaN sentinels for classes whose surfaces were undefined
    (empty prediction or reference) in every case.
    """

    per_class: list[dict[str, float]] = field(default_factory=list)
    mean: dict[str, float] = field(default_factory=dict)
    n_cases: int = 0

    def to_text(self) -> str:
        lines = [f"n_cases = {self.n_cases}"]
        for c, row in enumerate(self.per_class, start=1):
            for k in _FIELDS:
                lines.append(f"class{c}.{k} = {row[k]!r}")
        for k in _FIELDS:
            lines.append(f"mean.{k} = {self.mean[k]!r}")
        return "\n".join(lines) + "\n"


def evaluate_case(pred: np.ndarray, gt: np.ndarray, num_classes: int) -> list[dict[str, float]]:
    """One-vs-rest metrics for each foreground class of one case."""
    rows = []
    for c in range(1, num_classes):
        p = pred == c
        g = gt == c
        dice, jac = dice_jaccard(p, g)
        try:
            hd95, asd = surface_distances(p, g)
        except EmptyMaskError:
            hd95, asd = UNDEFINED, UNDEFINED
        rows.append({"dice": dice, "jaccard": jac, "hd95": hd95, "asd": asd})
    return rows


def evaluate_cases(
    preds: list[np.ndarray], gts: list[np.ndarray], num_classes: int
) -> MetricsReport:
    """Average per-class metrics over cases; mean over foreground classes.

    Undefined surface distances are skipped in averages (NaN if a class
    never had a defined surface).
    """
    if len(preds) != len(gts):
        raise ValueError("prediction/reference case counts differ")
    if not preds:
        raise ValueError("no cases to evaluate")
    all_rows = [evaluate_case(p, g, num_classes) for p, g in zip(preds, gts)]

    per_class = []
    for c in range(num_classes - 1):
        agg: dict[str, float] = {}
        for k in _FIELDS:
            vals = [rows[c][k] for rows in all_rows if not math.isnan(rows[c][k])]
            agg[k] = math.fsum(vals) / len(vals) if vals else UNDEFINED
        per_class.append(agg)

    mean = {}
    for k in _FIELDS:
        vals = [row[k] for row in per_class if not math.isnan(row[k])]
        mean[k] = math.fsum(vals) / len(vals) if vals else UNDEFINED
    return MetricsReport(per_class=per_class, mean=mean, n_cases=len(preds))
