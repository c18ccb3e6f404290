"""Prequential (test-then-train) evaluation and stream metrics.

Every instance is scored before the model may learn from it; accuracy and
ROC-AUC aggregate over the whole stream with no warm-up window.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import sign_of


class MetricUndefinedError(ValueError):
    """Raised when a metric has no value for the given inputs."""


@dataclass(frozen=True)
class RunRecord:
    """One (dataset, model, seed) evaluation result."""

    dataset: str
    model: str
    stages: int | None
    alpha: float | None
    weight_rule: str | None
    base: str | None
    seed: int | None
    n_instances: int
    accuracy: float
    roc_auc: float | None
    wall_time_s: float


def roc_auc(scored) -> float:
    """P(score+ > score-) + 0.5 * P(tie) over all positive/negative pairs.

    `scored` is an iterable of (score, label) with labels in {-1, +1}.
    Computed via the rank-sum identity in O(n log n); ties get averaged
    ranks, which matches the pairwise definition exactly.
    """
    pairs = list(scored)
    scores = np.array([s for s, _ in pairs], dtype=np.float64)
    labels = np.array([y for _, y in pairs])
    n_pos = int(np.sum(labels > 0))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricUndefinedError("ROC-AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(labels.size, dtype=np.float64)
    i = 0
    while i < sorted_scores.size:
        j = i
        while j + 1 < sorted_scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[labels > 0]))
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def prequential_run(
    stream,
    model,
    dataset_id: str = "",
    model_id: str = "",
    stages: int | None = None,
    alpha: float | None = None,
    weight_rule: str | None = None,
    base: str | None = None,
    seed: int | None = None,
) -> RunRecord:
    """Test-then-train over `stream`; returns the aggregate record.

    `stream` yields (Instance, label) in arrival order; `model` offers
    `score(x)` and `learn_one(x, y)` and must be pristine.
    """
    started = time.perf_counter()
    n = 0
    correct = 0
    scored: list[tuple[float, int]] = []
    for x, y in stream:
        s = model.score(x)
        if not math.isfinite(s):
            raise ValueError(f"model produced a non-finite score at seq {x.seq}")
        if sign_of(s) == y:
            correct += 1
        scored.append((s, y))
        model.learn_one(x, y)
        n += 1
    if n == 0:
        raise ValueError("cannot evaluate an empty stream")
    try:
        auc = roc_auc(scored)
    except MetricUndefinedError:
        auc = None  # single-class stream: accuracy still well-defined
    return RunRecord(
        dataset=dataset_id,
        model=model_id,
        stages=stages,
        alpha=alpha,
        weight_rule=weight_rule,
        base=base,
        seed=seed,
        n_instances=n,
        accuracy=correct / n,
        roc_auc=auc,
        wall_time_s=time.perf_counter() - started,
    )
