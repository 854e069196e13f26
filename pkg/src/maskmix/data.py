"""Deterministic synthetic toy-anatomy dataset.

Each sample renders a small multi-class "anatomy" into a grayscale image:
a ring structure with a nested core (classes 1 and 2) plus adjacent
blob structures (classes 3+), all with randomized centers, radii,
orientations and per-class base intensities, then additive Gaussian
noise. Everything is a pure function of the integer sample seed, so any
split is reproducible bit-for-bit from its seed range.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import container


@dataclass
class Sample:
    image: np.ndarray  # float32, (1, H, W), values in [0, 1]
    label: np.ndarray | None  # uint8, (H, W); None for unlabeled samples
    seed: int


@dataclass
class DatasetSplit:
    labeled: list[Sample]
    unlabeled: list[Sample]
    val: list[Sample]
    base_seed: int
    size: int
    num_classes: int
    noise_sigma: float


def _ellipse_mask(size: int, cy: float, cx: float, ry: float, rx: float, angle: float) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    y = yy - cy
    x = xx - cx
    c, s = np.cos(angle), np.sin(angle)
    yr = c * y - s * x
    xr = s * y + c * x
    return (yr / ry) ** 2 + (xr / rx) ** 2 <= 1.0


def generate_sample(
    seed: int,
    size: int = 64,
    num_classes: int = 4,
    noise_sigma: float = 0.05,
) -> Sample:
    """Render one image/label pair from its seed alone."""
    if size < 16:
        raise ValueError(f"size must be at least 16, got {size}")
    if num_classes < 2:
        raise ValueError(f"need at least 2 classes (background + 1), got {num_classes}")

    rng = np.random.default_rng(seed)
    label = np.zeros((size, size), dtype=np.uint8)

    # Main structure: an ellipse; with >= 2 foreground classes it splits
    # into an outer ring (class 1) and a nested core (class 2).
    cy = size * (0.5 + rng.uniform(-0.08, 0.08))
    cx = size * (0.5 + rng.uniform(-0.08, 0.08))
    ry = size * rng.uniform(0.20, 0.30)
    rx = size * rng.uniform(0.16, 0.26)
    angle = rng.uniform(0.0, np.pi)
    outer = _ellipse_mask(size, cy, cx, ry, rx, angle)
    if num_classes >= 3:
        core_scale = rng.uniform(0.45, 0.62)
        core = _ellipse_mask(size, cy, cx, ry * core_scale, rx * core_scale, angle)
        label[outer & ~core] = 1
        label[core] = 2
    else:
        label[outer] = 1

    # Remaining classes: adjacent blobs placed around the main structure,
    # painted only onto background so regions stay disjoint.
    for k in range(3, num_classes):
        direction = rng.uniform(0.0, 2.0 * np.pi)
        dist = max(ry, rx) * rng.uniform(1.15, 1.45)
        bcy = np.clip(cy + dist * np.sin(direction), 0.15 * size, 0.85 * size)
        bcx = np.clip(cx + dist * np.cos(direction), 0.15 * size, 0.85 * size)
        bry = size * rng.uniform(0.08, 0.14)
        brx = size * rng.uniform(0.08, 0.14)
        bangle = rng.uniform(0.0, np.pi)
        blob = _ellipse_mask(size, bcy, bcx, bry, brx, bangle)
        label[blob & (label == 0)] = k

    # Per-class base intensities: ordered bands with per-sample jitter so
    # intensity alone is an imperfect cue.
    background = rng.uniform(0.08, 0.18)
    image = np.full((size, size), background, dtype=np.float64)
    n_fg = num_classes - 1
    bands = np.linspace(0.35, 0.80, n_fg) if n_fg > 1 else np.array([0.6])
    for k in range(1, num_classes):
        base = bands[k - 1] + rng.uniform(-0.09, 0.09)
        image[label == k] = base

    if noise_sigma > 0:
        image = image + rng.normal(0.0, noise_sigma, (size, size))
    image = np.clip(image, 0.0, 1.0).astype(np.float32)[None]

    return Sample(image=image, label=label, seed=int(seed))


def make_split(
    n_labeled: int,
    n_unlabeled: int,
    n_val: int,
    base_seed: int,
    size: int = 64,
    num_classes: int = 4,
    noise_sigma: float = 0.05,
) -> DatasetSplit:
    """Build disjoint labeled/unlabeled/val splits from contiguous seed ranges.

    Seeds: labeled get [base, base+n_labeled), unlabeled the next
    n_unlabeled, val the next n_val. Unlabeled samples have their labels
    dropped at construction time.
    """
    if n_labeled < 1:
        raise ValueError("at least one labeled sample is required")
    if n_unlabeled <= n_labeled:
        raise ValueError(
            f"unlabeled pool ({n_unlabeled}) must exceed labeled pool ({n_labeled})"
        )
    if n_val < 1:
        raise ValueError("at least one validation sample is required")

    def gen(seed: int, keep_label: bool) -> Sample:
        s = generate_sample(seed, size=size, num_classes=num_classes, noise_sigma=noise_sigma)
        if not keep_label:
            s.label = None
        return s

    next_seed = base_seed
    labeled = [gen(next_seed + i, True) for i in range(n_labeled)]
    next_seed += n_labeled
    unlabeled = [gen(next_seed + i, False) for i in range(n_unlabeled)]
    next_seed += n_unlabeled
    val = [gen(next_seed + i, True) for i in range(n_val)]

    return DatasetSplit(
        labeled=labeled,
        unlabeled=unlabeled,
        val=val,
        base_seed=int(base_seed),
        size=int(size),
        num_classes=int(num_classes),
        noise_sigma=float(noise_sigma),
    )


# ---------------------------------------------------------------------------
# On-disk container


def write_split(split: DatasetSplit, root: Path | str) -> None:
    root = Path(root)
    manifest: list[str] = []
    for split_name, samples in (("labeled", split.labeled), ("unlabeled", split.unlabeled), ("val", split.val)):
        for i, s in enumerate(samples):
            stem = root / split_name / f"sample_{i:05d}"
            container.write_array(Path(str(stem) + ".img"), s.image, extra={"seed": str(s.seed)})
            if s.label is not None:
                container.write_array(Path(str(stem) + ".lbl"), s.label, extra={"seed": str(s.seed)})
            manifest.append(f"{split_name} {i} {s.seed}")
    header = {
        "base_seed": str(split.base_seed),
        "size": str(split.size),
        "num_classes": str(split.num_classes),
        "noise_sigma": repr(split.noise_sigma),
        "n_labeled": str(len(split.labeled)),
        "n_unlabeled": str(len(split.unlabeled)),
        "n_val": str(len(split.val)),
    }
    lines = [f"{k} = {v}" for k, v in header.items()]
    lines.append("# split index seed")
    lines.extend(manifest)
    (root / "manifest.txt").write_text("\n".join(lines) + "\n")


def read_split(root: Path | str) -> DatasetSplit:
    root = Path(root)
    header = container.read_kv(root / "manifest.txt")

    def load(split_name: str, count: int, labeled: bool) -> list[Sample]:
        out = []
        for i in range(count):
            stem = root / split_name / f"sample_{i:05d}"
            image, hdr = container.read_array(Path(str(stem) + ".img"))
            label = None
            if labeled:
                label, _ = container.read_array(Path(str(stem) + ".lbl"))
            out.append(Sample(image=image, label=label, seed=int(hdr["seed"])))
        return out

    return DatasetSplit(
        labeled=load("labeled", int(header["n_labeled"]), True),
        unlabeled=load("unlabeled", int(header["n_unlabeled"]), False),
        val=load("val", int(header["n_val"]), True),
        base_seed=int(header["base_seed"]),
        size=int(header["size"]),
        num_classes=int(header["num_classes"]),
        noise_sigma=float(header["noise_sigma"]),
    )
