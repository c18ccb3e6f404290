"""Model configuration: spec strings, factories, and snapshot rebuild.

A model spec string is `algorithm[:key=value,...]`, e.g.::

    gentleboost:stages=10,alpha=0.5,rule=exp-consistent,base=stump
    ozabag:stages=10,base=htree,seed=3
    htree
    stump

Algorithms: gentleboost, ozabag, ozaboost, and the standalone baselines
htree / stump / exact-stump (single weak learner trained with weight 1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .boosting import WEIGHT_RULES, OnlineGentleBoost, OzaBag, OzaBoost
from .core import ConfigError, Instance, StepSizeParam, clamp_score, sign_of
from .weak import ExactStump, HoeffdingTree, RegressionStump

ALGORITHMS = ("gentleboost", "ozabag", "ozaboost", "htree", "stump", "exact-stump")

BASE_LEARNERS = ("stump", "htree", "exact-stump")

_STANDALONE = ("htree", "stump", "exact-stump")


def base_factory(name: str):
    if name == "stump":
        return RegressionStump
    if name == "htree":
        return HoeffdingTree
    if name == "exact-stump":
        return ExactStump
    raise ConfigError(f"unknown base learner {name!r}; expected one of {BASE_LEARNERS}")


@dataclass(frozen=True)
class ModelSpec:
    """Validated description of one benchmark model."""

    algorithm: str
    stages: int = 10
    alpha: float = 0.5
    weight_rule: str = "as_printed"
    base: str = "htree"
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        if self.algorithm in _STANDALONE:
            return  # stages/alpha/rule/base are irrelevant for baselines
        if self.stages < 1:
            raise ConfigError(f"stages must be >= 1, got {self.stages}")
        if self.base not in BASE_LEARNERS:
            raise ConfigError(
                f"unknown base learner {self.base!r}; expected one of {BASE_LEARNERS}"
            )
        if self.algorithm == "gentleboost":
            StepSizeParam(self.alpha)  # validates the range
            if self.weight_rule not in WEIGHT_RULES:
                raise ConfigError(
                    f"unknown weight rule {self.weight_rule!r}; "
                    f"expected one of {WEIGHT_RULES}"
                )

    def label(self) -> str:
        """Canonical model id used in results files and report rows."""
        if self.algorithm in _STANDALONE:
            return self.algorithm
        parts = [f"base={self.base}", f"M={self.stages}"]
        if self.algorithm == "gentleboost":
            parts.append(f"alpha={self.alpha:g}")
            parts.append(f"rule={_dash(self.weight_rule)}")
        return f"{self.algorithm}[{','.join(parts)}]"


def _dash(rule: str) -> str:
    return rule.replace("_", "-")


def _undash(rule: str) -> str:
    return rule.replace("-", "_")


def parse_model_spec(text: str, defaults: ModelSpec | None = None) -> ModelSpec:
    """Parse `algorithm[:key=value,...]`; unset keys come from `defaults`."""
    head, _, tail = text.strip().partition(":")
    algorithm = head.strip()
    kwargs = {}
    if tail:
        for item in tail.split(","):
            if not item.strip():
                continue
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"bad model option {item!r} in {text!r}")
            key = key.strip()
            value = value.strip()
            if key in ("stages", "m"):
                kwargs["stages"] = int(value)
            elif key == "alpha":
                kwargs["alpha"] = float(value)
            elif key == "rule":
                kwargs["weight_rule"] = _undash(value)
            elif key == "base":
                kwargs["base"] = value
            elif key == "seed":
                kwargs["seed"] = int(value)
            else:
                raise ConfigError(f"unknown model option {key!r} in {text!r}")
    if defaults is None:
        defaults = ModelSpec(algorithm="gentleboost")
    return replace(defaults, algorithm=algorithm, **kwargs)


class StandaloneModel:
    """A single weak learner run as its own model (unit sample weight)."""

    def __init__(self, learner):
        self.learner = learner

    def learn_one(self, x: Instance, y: int) -> None:
        self.learner.learn(x, y, 1.0)

    def score(self, x: Instance) -> float:
        return clamp_score(self.learner.score(x))

    def predict(self, x: Instance) -> int:
        return sign_of(self.score(x))

    def get_state(self) -> dict:
        return {"learner": self.learner.get_state()}

    def set_state(self, state: dict) -> None:
        self.learner.set_state(state["learner"])


def build_model(spec: ModelSpec):
    """Construct a pristine model from its spec."""
    if spec.algorithm in _STANDALONE:
        return StandaloneModel(base_factory(spec.algorithm)())
    factory = base_factory(spec.base)
    if spec.algorithm == "gentleboost":
        return OnlineGentleBoost(
            factory,
            n_stages=spec.stages,
            alpha=spec.alpha,
            weight_rule=spec.weight_rule,
        )
    if spec.algorithm == "ozabag":
        return OzaBag(factory, n_stages=spec.stages, seed=spec.seed)
    if spec.algorithm == "ozaboost":
        return OzaBoost(factory, n_stages=spec.stages, seed=spec.seed)
    raise ConfigError(f"unknown algorithm {spec.algorithm!r}")


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "algorithm": spec.algorithm,
        "stages": spec.stages,
        "alpha": spec.alpha,
        "weight_rule": spec.weight_rule,
        "base": spec.base,
        "seed": spec.seed,
    }


def spec_from_dict(payload: dict) -> ModelSpec:
    return ModelSpec(
        algorithm=payload["algorithm"],
        stages=int(payload["stages"]),
        alpha=float(payload["alpha"]),
        weight_rule=payload["weight_rule"],
        base=payload["base"],
        seed=int(payload["seed"]),
    )
