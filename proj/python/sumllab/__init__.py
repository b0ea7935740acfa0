"""Desk-scale laboratory for training multiple-choice classifiers that are
robust to superficial cues: a planted-cue benchmark generator, cue statistics,
contextless probes, and standard / adversarial / meta-learned trainers."""

from sumllab._core import (
    cue_report,
    evaluate,
    generate,
    gradcheck,
    split_easy_hard,
    tokenize,
    train,
)

__all__ = [
    "cue_report",
    "evaluate",
    "generate",
    "gradcheck",
    "split_easy_hard",
    "tokenize",
    "train",
]
