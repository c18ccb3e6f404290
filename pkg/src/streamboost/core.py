"""Shared domain types and the exponential loss the boosters minimize.

Labels are plain ints in {-1, +1}; the data module guarantees no other
encoding enters the library.  Stage scores live in [-1, 1] (enforced by
`clamp_score`), so stage margins are bounded the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E_MINUS_ONE = math.e - 1.0


class ConfigError(ValueError):
    """A model or run configuration violates its constraints."""


class DataError(ValueError):
    """Ingested data violates the stream contract."""


@dataclass(frozen=True, slots=True)
class Instance:
    """One feature vector in arrival order.

    `features` is a 1-D float64 array; ingestion guarantees every value is
    finite and the length is constant within one stream.
    """

    seq: int
    features: np.ndarray


def make_instance(seq: int, features) -> Instance:
    """Validating constructor, used at every ingestion boundary."""
    if seq < 0:
        raise DataError(f"instance seq must be >= 0, got {seq}")
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"features must be a flat vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"non-finite feature value in instance {seq}")
    arr.setflags(write=False)
    return Instance(seq=seq, features=arr)


@dataclass(frozen=True, slots=True)
class StepSizeParam:
    """Line-search step hyperparameter, valid on the open interval (0, e-1)."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < E_MINUS_ONE):
            raise ConfigError(
                f"alpha must lie in (0, {E_MINUS_ONE:.5f}), got {self.alpha!r}"
            )


def clamp_score(score: float) -> float:
    """Clamp a stage score to [-1, 1] so stage margins stay bounded."""
    if score > 1.0:
        return 1.0
    if score < -1.0:
        return -1.0
    return score


def sign_of(score: float) -> int:
    """Predicted label for a real-valued score; the 0 tie resolves to +1."""
    if not math.isfinite(score):
        raise ValueError(f"cannot take the sign of a non-finite score: {score}")
    return -1 if score < 0.0 else 1


def exponential_loss(margins) -> float:
    """Mean of exp(-margin) over a non-empty margin sequence."""
    arr = np.asarray(margins, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("exponential_loss needs at least one margin")
    if not np.all(np.isfinite(arr)):
        raise DataError("non-finite margin passed to exponential_loss")
    return float(np.mean(np.exp(-arr)))
