"""Dataset ingestion and synthetic stream generation.

CSV ingestion is schema-driven: a flat key-value schema file names the label
column, the token that maps to +1 (every other observed token maps to -1),
the ordered feature columns, and optional per-column kinds.  Ordinal
categorical columns are encoded by first appearance.  Schema file format::

    # comment lines and blanks are ignored
    label = class
    positive = UP
    features = date, day, period, nswprice
    kind.day = ordinal          # default kind is numeric

Synthetic generators are pure functions of their spec (replay-identical),
driven by the named splitmix64 generator.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .core import DataError, Instance, make_instance
from .rng import SplitMix64

logger = logging.getLogger(__name__)

GENERATOR_IDS = ("gaussian-pair", "xor-quadrant", "margin-noise")

COLUMN_KINDS = ("numeric", "ordinal")


@dataclass(frozen=True)
class StreamSchema:
    """Column layout of one CSV stream."""

    feature_columns: tuple[str, ...]
    label_column: str
    positive_token: str
    kinds: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.positive_token:
            raise DataError("positive label token must be non-empty")
        if self.label_column in self.feature_columns:
            raise DataError(
                f"label column {self.label_column!r} also listed as a feature"
            )
        if not self.feature_columns:
            raise DataError("schema needs at least one feature column")
        for col, kind in self.kinds.items():
            if kind not in COLUMN_KINDS:
                raise DataError(f"unknown column kind {kind!r} for {col!r}")
            if col not in self.feature_columns:
                raise DataError(f"kind given for unknown column {col!r}")

    def kind_of(self, column: str) -> str:
        return self.kinds.get(column, "numeric")


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse the flat `key = value` format shared by schema and config files."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise DataError(f"line {lineno}: empty key")
        if key in out:
            raise DataError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def parse_schema(text: str) -> StreamSchema:
    kv = parse_kv_text(text)
    try:
        label = kv.pop("label")
        positive = kv.pop("positive")
        features = kv.pop("features")
    except KeyError as missing:
        raise DataError(f"schema is missing required key {missing}") from None
    columns = tuple(c.strip() for c in features.split(",") if c.strip())
    kinds: dict[str, str] = {}
    for key, value in kv.items():
        if not key.startswith("kind."):
            raise DataError(f"unknown schema key {key!r}")
        kinds[key[len("kind.") :]] = value
    return StreamSchema(
        feature_columns=columns,
        label_column=label,
        positive_token=positive,
        kinds=kinds,
    )


def load_schema(path) -> StreamSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


class CsvStream:
    """Iterable (Instance, label) stream over a schema-described CSV file.

    Ordinal columns are encoded by first-appearance index.  Numeric parse
    failures raise `DataError` naming the row and column, unless
    `impute_missing` is set, in which case the value becomes 0.0 and the
    occurrence is counted in `imputed_count`.  After full iteration,
    `observed_label_tokens` holds every distinct label token seen.
    """

    def __init__(self, path, schema: StreamSchema, impute_missing: bool = False):
        self.path = Path(path)
        self.schema = schema
        self.impute_missing = impute_missing
        self.imputed_count = 0
        self.observed_label_tokens: set[str] = set()

    def __iter__(self):
        self.imputed_count = 0
        self.observed_label_tokens = set()
        codes: dict[str, dict[str, int]] = {
            c: {} for c in self.schema.feature_columns if self.schema.kind_of(c) == "ordinal"
        }
        with self.path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{self.path}: empty file") from None
            positions = {name: i for i, name in enumerate(header)}
            missing = [
                c
                for c in (*self.schema.feature_columns, self.schema.label_column)
                if c not in positions
            ]
            if missing:
                raise DataError(f"{self.path}: missing columns {missing}")
            label_pos = positions[self.schema.label_column]
            feat_pos = [positions[c] for c in self.schema.feature_columns]
            seq = 0
            for rownum, row in enumerate(reader, start=2):
                if len(row) <= max(label_pos, *feat_pos):
                    raise DataError(f"{self.path}: row {rownum} is too short")
                token = row[label_pos]
                self.observed_label_tokens.add(token)
                label = 1 if token == self.schema.positive_token else -1
                values = []
                for col, pos in zip(self.schema.feature_columns, feat_pos):
                    cell = row[pos]
                    if self.schema.kind_of(col) == "ordinal":
                        table = codes[col]
                        values.append(float(table.setdefault(cell, len(table))))
                        continue
                    try:
                        v = float(cell)
                        if not math.isfinite(v):
                            raise ValueError
                    except ValueError:
                        if not self.impute_missing:
                            raise DataError(
                                f"{self.path}: row {rownum}, column {col!r}: "
                                f"cannot parse {cell!r} as a number"
                            ) from None
                        self.imputed_count += 1
                        v = 0.0
                    values.append(v)
                yield make_instance(seq, values), label
                seq += 1
        logger.info(
            "%s: %d rows, label tokens %s, %d imputed cells",
            self.path,
            seq,
            sorted(self.observed_label_tokens),
            self.imputed_count,
        )


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic synthetic stream description."""

    generator: str
    n: int
    balance: float = 0.5
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.generator not in GENERATOR_IDS:
            raise DataError(
                f"unknown generator {self.generator!r}; expected one of {GENERATOR_IDS}"
            )
        if self.n < 1:
            raise DataError(f"n must be >= 1, got {self.n}")
        if not (0.0 <= self.noise <= 0.5):
            raise DataError(f"noise must be in [0, 0.5], got {self.noise}")
        if not (0.0 < self.balance < 1.0):
            raise DataError(f"class balance must be in (0, 1), got {self.balance}")

    def dataset_id(self) -> str:
        return (
            f"{self.generator}:n={self.n},balance={self.balance:g},"
            f"noise={self.noise:g},seed={self.seed}"
        )


def generate(spec: SyntheticSpec):
    """Yield (Instance, label) for the spec; identical on every call."""
    makers = {
        "gaussian-pair": _gen_gaussian_pair,
        "xor-quadrant": _gen_xor_quadrant,
        "margin-noise": _gen_margin_noise,
    }
    return makers[spec.generator](spec)


def _maybe_flip(rng: SplitMix64, label: int, noise: float) -> int:
    if noise > 0.0 and rng.next_float() < noise:
        return -label
    return label


def _gen_gaussian_pair(spec: SyntheticSpec):
    """Two diagonal Gaussian blobs at +/-2.5 with offsets clipped to [-2, 2],
    so the classes keep a unit gap per axis and noise 0 stays linearly
    separable."""
    rng = SplitMix64(spec.seed)
    for seq in range(spec.n):
        label = 1 if rng.next_float() < spec.balance else -1
        center = 2.5 * label
        x1 = center + min(max(rng.gauss(), -2.0), 2.0)
        x2 = center + min(max(rng.gauss(), -2.0), 2.0)
        yield make_instance(seq, (x1, x2)), _maybe_flip(rng, label, spec.noise)


def _gen_xor_quadrant(spec: SyntheticSpec):
    """Alternating concentric square shells: points whose max coordinate
    magnitude falls in the inner or outer shell are +1, the middle shell
    is -1.  No single axis split helps (the same shells appear in every
    quadrant), but a handful of paired thresholds separates the classes,
    which makes this the canonical booster-uplift stream."""
    rng = SplitMix64(spec.seed)
    p = spec.balance
    r1 = math.sqrt(p / 2.0)  # inner shell mass p/2
    r2 = math.sqrt(1.0 - p / 2.0)  # middle shell mass 1-p, outer p/2
    shells = ((0.0, r1, 1), (r1, r2, -1), (r2, 1.0, 1))
    for seq in range(spec.n):
        u = rng.next_float()
        if u < p / 2.0:
            a, b, label = shells[0]
        elif u < p / 2.0 + (1.0 - p):
            a, b, label = shells[1]
        else:
            a, b, label = shells[2]
        # radius of the square ring: area density grows linearly in m
        m = math.sqrt(a * a + rng.next_float() * (b * b - a * a))
        # uniform position on the square ring of half-width m
        side = rng.next_u64() & 3
        offset = (2.0 * rng.next_float() - 1.0) * m
        if side == 0:
            x1, x2 = m, offset
        elif side == 1:
            x1, x2 = -m, offset
        elif side == 2:
            x1, x2 = offset, m
        else:
            x1, x2 = offset, -m
        yield make_instance(seq, (x1, x2)), _maybe_flip(rng, label, spec.noise)


def _gen_margin_noise(spec: SyntheticSpec):
    """Uniform square with a random linear concept; labels flip with the
    given noise probability.  Structurally balanced, so the balance field
    must stay at 0.5."""
    if spec.balance != 0.5:
        raise DataError("margin-noise is symmetric; balance must be 0.5")
    rng = SplitMix64(spec.seed)
    theta = rng.next_float() * 2.0 * math.pi
    w1, w2 = math.cos(theta), math.sin(theta)
    for seq in range(spec.n):
        x1 = 2.0 * rng.next_float() - 1.0
        x2 = 2.0 * rng.next_float() - 1.0
        label = 1 if w1 * x1 + w2 * x2 >= 0.0 else -1
        yield make_instance(seq, (x1, x2)), _maybe_flip(rng, label, spec.noise)
