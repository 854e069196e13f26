"""Teacher-student parameter coupling via exponential moving average."""

from __future__ import annotations

import copy
from dataclasses import dataclass

import torch

from .model import SegNet


@dataclass
class TeacherStudent:
    student: SegNet
    teacher: SegNet
    decay: float

    def __post_init__(self):
        if not 0.0 <= self.decay <= 1.0:
            raise ValueError(f"decay must be in [0, 1], got {self.decay}")


def make_teacher(student: SegNet) -> SegNet:
    """Exact copy of the student, detached from gradient updates."""
    teacher = copy.deepcopy(student)
    for p in teacher.parameters():
        p.requires_grad_(False)
    return teacher


@torch.no_grad()
def ema_update(ts: TeacherStudent, decay: float | None = None) -> TeacherStudent:
    """teacher <- decay * teacher + (1 - decay) * student, per parameter.

    Mutates the teacher in place; the student is never touched. An explicit
    decay overrides ts.decay (used for warm-up schedules).
    """
    d = ts.decay if decay is None else decay
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"decay must be in [0, 1], got {d}")
    s_params = dict(ts.student.named_parameters())
    t_params = dict(ts.teacher.named_parameters())
    if s_params.keys() != t_params.keys():
        raise ValueError("teacher and student parameter names differ")
    for name, tp in t_params.items():
        sp = s_params[name]
        if tp.shape != sp.shape:
            raise ValueError(f"parameter {name} shape mismatch: {tp.shape} vs {sp.shape}")
        tp.mul_(d).add_(sp.detach(), alpha=1.0 - d)
    return ts


def warmup_decay(base_decay: float, iteration: int) -> float:
    """min(base, 1 - 1/(it+1)): the teacher tracks the student closely at
    the start, then settles to the configured decay."""
    return min(base_decay, 1.0 - 1.0 / (iteration + 1))
