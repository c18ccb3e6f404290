"""Boosted ensembles over weak learners.

`OnlineGentleBoost` is the streaming booster: each incoming instance starts
with weight 1 and walks the stage list in order; after a stage is fit on the
instance it is re-scored, and the weight is multiplied by a two-valued
line-search step chosen from the stage margin.  The multiplicative step
replaces batch renormalization, so the weight never needs a population to
normalize against (a wide safety clamp guards pathological configurations).

Two weight rules are provided because the two readings of the step-size
cases disagree:

* ``as_printed``    - a positive `-y*f(x)` (a stage mistake) multiplies the
  weight by 1/(1+alpha), anything else by (1+alpha).
* ``exp_consistent`` - branches swapped, so the multiplier exceeds 1 exactly
  when exp(-y*f(x)) does, i.e. mistakes gain weight as in classic boosting.

`BatchGentleBoost` is the reference batch procedure (weights 1/N, stage fit
by weighted least squares, exponential reweighting, renormalize each round).
`OzaBag`/`OzaBoost` are the Oza-Russell online ensembles driven by Poisson
resampling from the seeded named generator in `rng`.
"""

from __future__ import annotations

import numpy as np

from .core import ConfigError, Instance, StepSizeParam, clamp_score, sign_of
from .rng import SplitMix64
from .weak import ExactStump

WEIGHT_RULES = ("as_printed", "exp_consistent")

# Safety clamp for the single live online weight; only pathological
# stage-count/alpha combinations ever reach it.
_W_MIN, _W_MAX = 1e-9, 1e9

_EPS_CLAMP = 1e-10  # OzaBoost stage-error clamp


def step_size(alpha: StepSizeParam, neg_margin: float) -> float:
    """Two-valued line-search step from the stage margin.

    `neg_margin` is -y*f(x) clamped to [-1, 1].  Strictly positive picks
    1/(1+alpha); zero and negative fall to the (1+alpha) branch.
    """
    if neg_margin > 0.0:
        return 1.0 / (1.0 + alpha.alpha)
    return 1.0 + alpha.alpha


def weight_multiplier(alpha: StepSizeParam, neg_margin: float, rule: str) -> float:
    if rule == "as_printed":
        return step_size(alpha, neg_margin)
    if rule == "exp_consistent":
        if neg_margin > 0.0:
            return 1.0 + alpha.alpha
        return 1.0 / (1.0 + alpha.alpha)
    raise ConfigError(f"unknown weight rule {rule!r}; expected one of {WEIGHT_RULES}")


def pointwise_newton_step(sum_wy: float, sum_w: float) -> float:
    """Region value realizing the Newton step: the clamped weighted label mean."""
    if sum_w <= 0.0:
        raise ValueError(f"region weight must be positive, got {sum_w}")
    return clamp_score(sum_wy / sum_w)


class OnlineGentleBoost:
    """Streaming booster with the two-valued line-search weight update."""

    def __init__(
        self,
        base_factory,
        n_stages: int = 10,
        alpha: float = 0.5,
        weight_rule: str = "as_printed",
    ):
        if n_stages < 1:
            raise ConfigError(f"need at least one stage, got {n_stages}")
        if weight_rule not in WEIGHT_RULES:
            raise ConfigError(
                f"unknown weight rule {weight_rule!r}; expected one of {WEIGHT_RULES}"
            )
        self.alpha = StepSizeParam(alpha)
        self.weight_rule = weight_rule
        self.stages = [base_factory() for _ in range(n_stages)]

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    def learn_one(self, x: Instance, y: int) -> list[float]:
        """Run the stage loop on one instance; returns the weight trace
        [w_0=1, w_1, ..., w_M] (one entry per stage boundary)."""
        w = 1.0
        trace = [w]
        for stage in self.stages:
            stage.learn(x, y, w)
            s = clamp_score(stage.score(x))
            w *= weight_multiplier(self.alpha, -y * s, self.weight_rule)
            if w < _W_MIN:
                w = _W_MIN
            elif w > _W_MAX:
                w = _W_MAX
            trace.append(w)
        return trace

    def score(self, x: Instance) -> float:
        return sum(clamp_score(stage.score(x)) for stage in self.stages)

    def predict(self, x: Instance) -> int:
        return sign_of(self.score(x))

    def get_state(self) -> dict:
        return {"stages": [stage.get_state() for stage in self.stages]}

    def set_state(self, state: dict) -> None:
        for stage, stage_state in zip(self.stages, state["stages"], strict=True):
            stage.set_state(stage_state)


class BatchGentleBoost:
    """Batch booster: per round, one weighted least-squares stage fit,
    exponential reweighting, renormalization to unit weight sum."""

    def __init__(self, n_stages: int = 10, base_factory=ExactStump):
        if n_stages < 1:
            raise ConfigError(f"need at least one stage, got {n_stages}")
        self.n_stages = n_stages
        self.base_factory = base_factory
        self.stages: list = []
        self.weight_history_: list[np.ndarray] = []
        self.train_losses_: list[float] = []
        self.train_errors_: list[float] = []

    def fit(self, instances: list[Instance], labels: list[int]) -> "BatchGentleBoost":
        n = len(instances)
        if n < 2:
            raise ConfigError("need at least two training samples")
        y = np.asarray(labels, dtype=np.float64)
        if not (np.any(y > 0) and np.any(y < 0)):
            raise ConfigError("training data must contain both classes")
        w = np.full(n, 1.0 / n)
        self.stages = []
        self.weight_history_ = [w.copy()]
        self.train_losses_ = []
        self.train_errors_ = []
        margin_sum = np.zeros(n)  # y_i * F(x_i), updated per round
        for _ in range(self.n_stages):
            stage = self.base_factory()
            for i in range(n):
                stage.learn(instances[i], int(labels[i]), float(w[i]))
            s = np.array([clamp_score(stage.score(xi)) for xi in instances])
            self.stages.append(stage)
            margin_sum += y * s
            w = w * np.exp(-y * s)
            w = w / w.sum()
            self.weight_history_.append(w.copy())
            self.train_losses_.append(float(np.mean(np.exp(-margin_sum))))
            # sign(F)=+1 at F==0, so a zero margin is correct only for y=+1
            correct = (margin_sum > 0) | ((margin_sum == 0) & (y > 0))
            self.train_errors_.append(float(1.0 - np.mean(correct)))
        return self

    def score(self, x: Instance) -> float:
        return sum(clamp_score(stage.score(x)) for stage in self.stages)

    def predict(self, x: Instance) -> int:
        return sign_of(self.score(x))


def batch_fit(
    instances: list[Instance],
    labels: list[int],
    n_stages: int,
    base_factory=ExactStump,
) -> BatchGentleBoost:
    """Convenience wrapper: fit and return a `BatchGentleBoost`."""
    return BatchGentleBoost(n_stages=n_stages, base_factory=base_factory).fit(
        instances, labels
    )


class OzaBag:
    """Online bagging: every stage sees each instance Poisson(1) times."""

    def __init__(self, base_factory, n_stages: int = 10, seed: int = 0):
        if n_stages < 1:
            raise ConfigError(f"need at least one stage, got {n_stages}")
        self.stages = [base_factory() for _ in range(n_stages)]
        self.seed = seed
        self.rng = SplitMix64(seed)

    def learn_one(self, x: Instance, y: int) -> None:
        for stage in self.stages:
            k = self.rng.poisson(1.0)
            for _ in range(k):
                stage.learn(x, y, 1.0)

    def score(self, x: Instance) -> float:
        """Vote margin: sum of stage predicted labels (ties break to +1)."""
        return float(sum(sign_of(clamp_score(st.score(x))) for st in self.stages))

    def predict(self, x: Instance) -> int:
        return sign_of(self.score(x))

    def get_state(self) -> dict:
        return {
            "stages": [stage.get_state() for stage in self.stages],
            "rng": self.rng.state_bytes,
        }

    def set_state(self, state: dict) -> None:
        for stage, stage_state in zip(self.stages, state["stages"], strict=True):
            stage.set_state(stage_state)
        self.rng.state_bytes = state["rng"]


class OzaBoost:
    """Online boosting with Poisson(lambda) resampling and per-stage
    correct/wrong weight tallies driving both lambda and the vote weights."""

    def __init__(self, base_factory, n_stages: int = 10, seed: int = 0):
        if n_stages < 1:
            raise ConfigError(f"need at least one stage, got {n_stages}")
        self.stages = [base_factory() for _ in range(n_stages)]
        self.seed = seed
        self.rng = SplitMix64(seed)
        self.lam_correct = np.zeros(n_stages)
        self.lam_wrong = np.zeros(n_stages)

    def learn_one(self, x: Instance, y: int) -> None:
        lam = 1.0
        for m, stage in enumerate(self.stages):
            k = self.rng.poisson(lam)
            for _ in range(k):
                stage.learn(x, y, 1.0)
            predicted = sign_of(clamp_score(stage.score(x)))
            if predicted == y:
                self.lam_correct[m] += lam
                lam *= (self.lam_correct[m] + self.lam_wrong[m]) / (
                    2.0 * self.lam_correct[m]
                )
            else:
                self.lam_wrong[m] += lam
                lam *= (self.lam_correct[m] + self.lam_wrong[m]) / (
                    2.0 * self.lam_wrong[m]
                )

    def stage_error(self, m: int) -> float:
        """epsilon_m clamped away from {0, 1} so vote weights stay finite."""
        total = self.lam_correct[m] + self.lam_wrong[m]
        eps = 0.5 if total <= 0.0 else self.lam_wrong[m] / total
        return min(max(eps, _EPS_CLAMP), 1.0 - _EPS_CLAMP)

    def score(self, x: Instance) -> float:
        total = 0.0
        for m, stage in enumerate(self.stages):
            eps = self.stage_error(m)
            vote = np.log((1.0 - eps) / eps)
            total += vote * sign_of(clamp_score(stage.score(x)))
        return float(total)

    def predict(self, x: Instance) -> int:
        return sign_of(self.score(x))

    def get_state(self) -> dict:
        return {
            "stages": [stage.get_state() for stage in self.stages],
            "rng": self.rng.state_bytes,
            "lam_correct": self.lam_correct,
            "lam_wrong": self.lam_wrong,
        }

    def set_state(self, state: dict) -> None:
        for stage, stage_state in zip(self.stages, state["stages"], strict=True):
            stage.set_state(stage_state)
        self.rng.state_bytes = state["rng"]
        self.lam_correct = np.asarray(state["lam_correct"], dtype=np.float64)
        self.lam_wrong = np.asarray(state["lam_wrong"], dtype=np.float64)
