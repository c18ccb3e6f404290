"""Benchmark command line: bench, report, snapshot, restore.

Results files are flat tab-separated text with a commented header carrying
the tool version, generator name, and the effective configuration, so a
file stays interpretable without the tool.  Apart from the trailing
wall-time column, bench output is a pure function of config + data.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .core import ConfigError, DataError
from .data import (
    GENERATOR_IDS,
    CsvStream,
    SyntheticSpec,
    generate,
    load_schema,
    parse_kv_text,
)
from .evaluation import RunRecord, prequential_run
from .models import (
    ModelSpec,
    build_model,
    parse_model_spec,
    spec_from_dict,
    spec_to_dict,
)
from .rng import RNG_NAME
from .snapshot import SnapshotError, load_snapshot, save_snapshot

RESULT_COLUMNS = (
    "dataset",
    "model",
    "stages",
    "alpha",
    "weight_rule",
    "base",
    "seed",
    "n",
    "accuracy",
    "roc_auc",
    "wall_time_s",  # keep last: the one column allowed to differ between runs
)

_MISSING_CELL = "—"  # em dash for absent report cells


# ---------------------------------------------------------------------------
# dataset specs


def parse_dataset_spec(text: str):
    """Return (dataset_id, stream_factory) for a dataset argument.

    Synthetic streams are `generator:key=value,...`; anything else is a CSV
    path whose schema sits next to it as `<stem>.schema` (or is given
    explicitly as `csv_path::schema_path`).
    """
    head = text.split(":", 1)[0]
    if head in GENERATOR_IDS:
        spec = _parse_synthetic(text)
        return spec.dataset_id(), lambda impute: generate(spec)
    if "::" in text:
        csv_part, schema_part = text.split("::", 1)
        csv_path, schema_path = Path(csv_part), Path(schema_part)
    else:
        csv_path = Path(text)
        schema_path = csv_path.with_suffix(".schema")
    if not csv_path.exists():
        raise DataError(f"dataset file not found: {csv_path}")
    if not schema_path.exists():
        raise DataError(f"schema file not found: {schema_path}")
    schema = load_schema(schema_path)
    return csv_path.stem, lambda impute: iter(
        CsvStream(csv_path, schema, impute_missing=impute)
    )


def _parse_synthetic(text: str) -> SyntheticSpec:
    generator, _, tail = text.partition(":")
    kwargs = {}
    if tail:
        for item in tail.split(","):
            if not item.strip():
                continue
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"bad dataset option {item!r} in {text!r}")
            key = key.strip()
            value = value.strip()
            if key == "n":
                kwargs["n"] = int(value)
            elif key == "balance":
                kwargs["balance"] = float(value)
            elif key == "noise":
                kwargs["noise"] = float(value)
            elif key == "seed":
                kwargs["seed"] = int(value)
            else:
                raise ConfigError(f"unknown dataset option {key!r} in {text!r}")
    kwargs.setdefault("n", 1000)
    return SyntheticSpec(generator=generator, **kwargs)


# ---------------------------------------------------------------------------
# bench


@dataclass(frozen=True)
class BenchConfig:
    datasets: tuple[str, ...]
    models: tuple[str, ...]
    seeds: tuple[int, ...] = (0,)
    stages: int = 10
    alpha: float = 0.5
    weight_rule: str = "as_printed"
    base: str = "htree"
    metric: str = "both"
    workers: int = 1
    impute_missing: bool = False
    out: str = "results.tsv"

    def echo_lines(self) -> list[str]:
        pairs = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = "; ".join(str(v) for v in value)
            pairs.append(f"{f.name} = {value}")
        return pairs


def _merge_bench_config(args) -> BenchConfig:
    """Apply precedence flags > config file > defaults."""
    values: dict = {}
    if args.config:
        kv = parse_kv_text(Path(args.config).read_text(encoding="utf-8"))
        lists = {"dataset": "datasets", "model": "models", "seed": "seeds"}
        for key, value in kv.items():
            if key in lists:
                items = [v.strip() for v in value.split(";") if v.strip()]
                values[lists[key]] = tuple(items)
            elif key in ("stages", "workers"):
                values[key] = int(value)
            elif key == "alpha":
                values[key] = float(value)
            elif key == "weight-rule":
                values["weight_rule"] = value.replace("-", "_")
            elif key in ("base", "metric", "out"):
                values[key] = value
            elif key == "impute-missing":
                values["impute_missing"] = value.lower() in ("1", "true", "yes")
            else:
                raise ConfigError(f"unknown config key {key!r}")
    if args.dataset:
        values["datasets"] = tuple(args.dataset)
    if args.model:
        values["models"] = tuple(args.model)
    if args.seed:
        values["seeds"] = tuple(args.seed)
    for name, attr in (
        ("stages", "stages"),
        ("alpha", "alpha"),
        ("base", "base"),
        ("metric", "metric"),
        ("workers", "workers"),
        ("out", "out"),
    ):
        if getattr(args, attr) is not None:
            values[name] = getattr(args, attr)
    if args.weight_rule is not None:
        values["weight_rule"] = args.weight_rule.replace("-", "_")
    if args.impute_missing:
        values["impute_missing"] = True
    if "seeds" in values:
        values["seeds"] = tuple(int(s) for s in values["seeds"])
    if not values.get("datasets"):
        raise ConfigError("no datasets given (flag --dataset or config key 'dataset')")
    if not values.get("models"):
        raise ConfigError("no models given (flag --model or config key 'model')")
    return BenchConfig(**values)


def _model_defaults(config: BenchConfig, seed: int) -> ModelSpec:
    return ModelSpec(
        algorithm="gentleboost",
        stages=config.stages,
        alpha=config.alpha,
        weight_rule=config.weight_rule,
        base=config.base,
        seed=seed,
    )


def _format_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_to_row(record: RunRecord) -> list[str]:
    return [
        record.dataset,
        record.model,
        "-" if record.stages is None else str(record.stages),
        "-" if record.alpha is None else _format_cell(record.alpha),
        "-" if record.weight_rule is None else record.weight_rule.replace("_", "-"),
        "-" if record.base is None else record.base,
        "-" if record.seed is None else str(record.seed),
        str(record.n_instances),
        _format_cell(record.accuracy),
        _format_cell(record.roc_auc),
        f"{record.wall_time_s:.6f}",
    ]


def run_single(dataset_text: str, model_text: str, seed: int, config: BenchConfig):
    dataset_id, stream_factory = parse_dataset_spec(dataset_text)
    spec = parse_model_spec(model_text, _model_defaults(config, seed))
    model = build_model(spec)
    standalone = spec.algorithm in ("htree", "stump", "exact-stump")
    return prequential_run(
        stream_factory(config.impute_missing),
        model,
        dataset_id=dataset_id,
        model_id=spec.label(),
        stages=None if standalone else spec.stages,
        alpha=spec.alpha if spec.algorithm == "gentleboost" else None,
        weight_rule=spec.weight_rule if spec.algorithm == "gentleboost" else None,
        base=None if standalone else spec.base,
        seed=spec.seed,
    )


def _bench_task(payload):
    dataset_text, model_text, seed, config = payload
    record = run_single(dataset_text, model_text, seed, config)
    return record_to_row(record)


def cmd_bench(args) -> int:
    config = _merge_bench_config(args)
    # Validate the whole grid before any run starts.
    for model_text in config.models:
        parse_model_spec(model_text, _model_defaults(config, 0))
    for dataset_text in config.datasets:
        parse_dataset_spec(dataset_text)
    tasks = [
        (d, m, s, config)
        for d in config.datasets
        for m in config.models
        for s in config.seeds
    ]
    rows: list[list[str]] = []
    failures: list[str] = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_bench_task, t) for t in tasks]
            for task, future in zip(tasks, futures):
                try:
                    rows.append(future.result())
                except Exception as exc:  # per-run isolation
                    failures.append(f"{task[0]} x {task[1]} x seed={task[2]}: {exc}")
    else:
        for task in tasks:
            try:
                rows.append(_bench_task(task))
            except Exception as exc:
                failures.append(f"{task[0]} x {task[1]} x seed={task[2]}: {exc}")
    rows.sort(key=lambda r: (r[0], r[1], int(r[6])))
    out_path = Path(config.out)
    with out_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# streamboost results v1 (tool {__version__}, rng {RNG_NAME})\n")
        for line in config.echo_lines():
            fh.write(f"# {line}\n")
        fh.write("\t".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
    print(f"wrote {len(rows)} run(s) to {out_path}")
    if failures:
        print(f"{len(failures)} run(s) failed:", file=sys.stderr)
        for failure in failures:
            print(f"  {failure}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# report


def _read_results(path: Path) -> list[dict]:
    rows = []
    header: list[str] | None = None
    for raw in path.read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if header is None:
            header = parts
            missing = [c for c in RESULT_COLUMNS if c not in header]
            if missing:
                raise DataError(f"{path}: results file missing columns {missing}")
            continue
        rows.append(dict(zip(header, parts)))
    if header is None:
        raise DataError(f"{path}: no header row found")
    return rows


def cmd_report(args) -> int:
    merged: dict[tuple, dict] = {}
    for path_text in args.results:
        for row in _read_results(Path(path_text)):
            key = (row["dataset"], row["model"], row["seed"])
            if key in merged:
                old = merged[key]
                same = all(
                    old[c] == row[c] for c in ("n", "accuracy", "roc_auc")
                )
                if not same:
                    raise DataError(
                        f"conflicting duplicate rows for dataset={key[0]!r} "
                        f"model={key[1]!r} seed={key[2]}"
                    )
                continue
            merged[key] = row
    metrics = ("accuracy", "roc_auc") if args.metric == "both" else (args.metric,)
    datasets = sorted({k[0] for k in merged})
    model_ids = sorted({k[1] for k in merged})
    out_lines = ["metric\tmodel\tdataset\tvalue"]
    for metric in metrics:
        cells: dict[tuple[str, str], str] = {}
        for (dataset, model, _seed), row in merged.items():
            values = cells.setdefault((model, dataset), [])
            values.append(row[metric])
        table = {}
        for (model, dataset), raw_values in cells.items():
            numeric = [float(v) for v in raw_values]
            mean = sum(numeric) / len(numeric)
            table[(model, dataset)] = mean
            out_lines.append(f"{metric}\t{model}\t{dataset}\t{mean!r}")
        _print_matrix(metric, model_ids, datasets, table)
    if args.out:
        Path(args.out).write_text("\n".join(out_lines) + "\n", encoding="utf-8")
    return 0


def _print_matrix(metric, model_ids, datasets, table) -> None:
    def fmt(value) -> str:
        return _MISSING_CELL if value is None else f"{value:.6f}"

    name_width = max([len(m) for m in model_ids] + [len(metric)])
    col_widths = [max(len(d), 10) for d in datasets]
    print(metric.ljust(name_width) + "  " + "  ".join(
        d.rjust(w) for d, w in zip(datasets, col_widths)
    ))
    for model in model_ids:
        cells = [
            fmt(table.get((model, dataset))).rjust(w)
            for dataset, w in zip(datasets, col_widths)
        ]
        print(model.ljust(name_width) + "  " + "  ".join(cells))
    print()


# ---------------------------------------------------------------------------
# snapshot / restore


def cmd_snapshot(args) -> int:
    dataset_id, stream_factory = parse_dataset_spec(args.dataset)
    spec = parse_model_spec(args.model, ModelSpec(algorithm="gentleboost", seed=args.seed))
    model = build_model(spec)
    consumed = 0
    for x, y in stream_factory(args.impute_missing):
        if consumed >= args.upto:
            break
        model.learn_one(x, y)
        consumed += 1
    payload = {
        "kind": "streamboost-model",
        "tool_version": __version__,
        "dataset": dataset_id,
        "consumed": consumed,
        "spec": spec_to_dict(spec),
        "state": model.get_state(),
    }
    save_snapshot(args.out, payload)
    print(f"snapshot of {spec.label()} after {consumed} instance(s) -> {args.out}")
    return 0


def cmd_restore(args) -> int:
    payload = load_snapshot(args.snapshot)
    if payload.get("kind") != "streamboost-model":
        raise SnapshotError("snapshot does not contain a model")
    spec = spec_from_dict(payload["spec"])
    model = build_model(spec)
    model.set_state(payload["state"])
    skip = int(payload["consumed"])
    _, stream_factory = parse_dataset_spec(args.dataset)
    lines = []
    for x, y in stream_factory(args.impute_missing):
        if x.seq < skip:
            continue
        if args.upto is not None and x.seq >= args.upto:
            break
        s = model.score(x)
        pred = 1 if s >= 0 else -1
        lines.append(f"{x.seq}\t{pred}\t{s!r}")
        model.learn_one(x, y)
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamboost",
        description="Streaming boosting benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a (datasets x models x seeds) grid")
    bench.add_argument("--dataset", action="append", default=None,
                       help="CSV path or generator spec; repeatable")
    bench.add_argument("--model", action="append", default=None,
                       help="model spec string; repeatable")
    bench.add_argument("--seed", action="append", type=int, default=None,
                       help="model seed; repeatable")
    bench.add_argument("--stages", type=int, default=None)
    bench.add_argument("--alpha", type=float, default=None)
    bench.add_argument("--weight-rule", dest="weight_rule", default=None,
                       choices=("as-printed", "exp-consistent"))
    bench.add_argument("--base", default=None, choices=("stump", "htree", "exact-stump"))
    bench.add_argument("--metric", default=None, choices=("accuracy", "roc_auc", "both"))
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--impute-missing", action="store_true")
    bench.add_argument("--config", default=None, help="flat key=value config file")
    bench.add_argument("--out", default=None, help="results file path")
    bench.set_defaults(func=cmd_bench)

    report = sub.add_parser("report", help="render a models x datasets table")
    report.add_argument("results", nargs="+", help="one or more results files")
    report.add_argument("--metric", default="both",
                        choices=("accuracy", "roc_auc", "both"))
    report.add_argument("--out", default=None, help="machine-readable TSV output")
    report.set_defaults(func=cmd_report)

    snapshot = sub.add_parser("snapshot", help="train on a stream prefix and save state")
    snapshot.add_argument("--model", required=True)
    snapshot.add_argument("--dataset", required=True)
    snapshot.add_argument("--upto", type=int, required=True,
                          help="number of leading instances to learn")
    snapshot.add_argument("--seed", type=int, default=0)
    snapshot.add_argument("--impute-missing", action="store_true")
    snapshot.add_argument("--out", required=True)
    snapshot.set_defaults(func=cmd_snapshot)

    restore = sub.add_parser("restore", help="resume from a snapshot and emit predictions")
    restore.add_argument("--snapshot", required=True)
    restore.add_argument("--dataset", required=True)
    restore.add_argument("--upto", type=int, default=None,
                         help="stop before this sequence number")
    restore.add_argument("--impute-missing", action="store_true")
    restore.add_argument("--out", default=None)
    restore.set_defaults(func=cmd_restore)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
