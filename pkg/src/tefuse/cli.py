"""Command line front end for the fusion pipeline.

Commands:
    symbolize     fit partitions on the training prefix, dump symbol streams
    cluster       run the fusion hierarchy end to end
    evaluate      per-level prediction quality for a stored tree
    inject-noise  append seeded standard-normal channels, then cluster
    export-tree   re-render a stored tree as JSON or DOT

Every command writes a manifest capturing the semantic configuration, an
input content digest, and library versions, so a run can be replayed and a
stored tree refuses to evaluate against tampered data. Outputs are
byte-identical across reruns and across --threads settings.

Exit codes: 0 ok, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import cluster, export_tree, leaf_sequences, tree_from_json
from .errors import (
    DegenerateInput,
    EmptyAfterFiltering,
    EmptySequence,
    LengthMismatch,
    MissingColumn,
    SequenceTooShort,
    TreeDatasetMismatch,
    UnparseableHeader,
)
from .estimate import (
    evaluate_levels,
    predictions_csv,
    report_csv,
    report_json,
    target_symbols,
)
from .ingest import (
    RunConfig,
    append_noise_channels,
    load_csv,
    read_config_file,
    split_index,
)
from .sdf import fit_mep_partition, fit_uniform_partition, symbolize

logger = logging.getLogger(__name__)

CONFIG_ERRORS = (ValueError, MissingColumn)
DATA_ERRORS = (
    UnparseableHeader,
    EmptyAfterFiltering,
    DegenerateInput,
    EmptySequence,
    LengthMismatch,
    SequenceTooShort,
    TreeDatasetMismatch,
)

# RunConfig fields settable through flags or a key=value config file.
_CONFIG_FLAGS = {
    "target": ("target_column", str),
    "sources": ("source_columns", lambda s: tuple(p.strip() for p in s.split(","))),
    "alphabet": ("alphabet", int),
    "target_alphabet": ("target_alphabet", int),
    "depth": ("depth", int),
    "fused_alphabet": ("fused_alphabet", int),
    "stop_at": ("stop_at", int),
    "train_fraction": ("train_fraction", float),
    "seed": ("seed", int),
    "partitioner": ("partitioner", str),
    "target_kind": ("target_kind", str),
}


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write(path: Path, data) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    logger.info("wrote %s (%d bytes)", path, len(data))


def _build_config(args) -> RunConfig:
    """Merge the key=value config file (if any) with CLI flags; flags win."""
    values: dict = {}
    if getattr(args, "config", None):
        for key, raw in read_config_file(args.config).items():
            if key not in _CONFIG_FLAGS:
                raise ValueError(f"unknown configuration key {key!r} in {args.config}")
            field, convert = _CONFIG_FLAGS[key]
            values[field] = convert(raw)
    for key, (field, convert) in _CONFIG_FLAGS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[field] = convert(flag) if isinstance(flag, str) else flag
    if "target_column" not in values:
        raise ValueError("--target is required (flag or config file)")
    if "source_columns" not in values:
        raise ValueError("--sources is required (flag or config file)")
    return RunConfig(**values)


def _versions() -> dict:
    return {
        "tefuse": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def _manifest(command: str, args, config: RunConfig, dataset, extra: dict) -> dict:
    doc = {
        "command": command,
        "input": {
            "path": str(args.input),
            "sha256": _sha256(args.input),
            "rows": dataset.n,
            "rows_dropped": dataset.dropped_rows,
        },
        "config": dataclasses.asdict(config),
    }
    doc["config"]["source_columns"] = list(config.source_columns)
    doc.update(extra)
    doc["versions"] = _versions()
    return doc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_cluster(args, noise_count: int = 0) -> int:
    config = _build_config(args)
    dataset = load_csv(args.input, config)
    extra: dict = {"noise": None}
    if noise_count:
        dataset = append_noise_channels(dataset, noise_count, config.seed)
        config = dataclasses.replace(
            config,
            source_columns=config.source_columns
            + tuple(f"noise_{i + 1}" for i in range(noise_count)),
        )
        extra["noise"] = {"count": noise_count, "seed": config.seed}

    leaves = leaf_sequences(dataset, config)
    target_seq, kind, _, _ = target_symbols(dataset, config)
    tree = cluster(leaves, target_seq, config, threads=args.threads)

    extra["target_kind_resolved"] = kind
    extra["candidate_evaluations"] = [
        len(m.all_candidate_scores) for m in tree.merges
    ]
    out = _out_dir(args)
    _write(out / "tree.json", export_tree(tree, "json"))
    _write(out / "tree.dot", export_tree(tree, "dot"))
    _write(out / "manifest.json",
           json.dumps(_manifest("cluster", args, config, dataset, extra),
                      indent=2) + "\n")
    return 0


def cmd_cluster(args) -> int:
    return _run_cluster(args)


def cmd_inject_noise(args) -> int:
    if args.noise_count < 1:
        raise ValueError("--noise-count must be >= 1")
    return _run_cluster(args, noise_count=args.noise_count)


def cmd_evaluate(args) -> int:
    tree_dir = Path(args.tree)
    manifest = json.loads((tree_dir / "manifest.json").read_text("utf-8"))
    digest = _sha256(args.input)
    if digest != manifest["input"]["sha256"]:
        raise TreeDatasetMismatch(
            f"{args.input} has digest {digest[:12]}..., tree was built from "
            f"{manifest['input']['sha256'][:12]}..."
        )
    config = RunConfig.from_dict(manifest["config"])
    if args.target_kind is not None:
        config = dataclasses.replace(config, target_kind=args.target_kind)
    dataset = load_csv(args.input, config_without_noise(config, manifest))
    if manifest.get("noise"):
        dataset = append_noise_channels(
            dataset, manifest["noise"]["count"], manifest["noise"]["seed"]
        )
    tree = tree_from_json((tree_dir / "tree.json").read_bytes())
    report = evaluate_levels(tree, dataset, config)

    out = _out_dir(args)
    _write(out / "report.csv", report_csv(report))
    _write(out / "report.json", report_json(report))
    _write(out / "predictions.csv", predictions_csv(report))
    _write(out / "evaluate_manifest.json",
           json.dumps(_manifest("evaluate", args, config, dataset,
                                {"tree": str(tree_dir)}), indent=2) + "\n")
    return 0


def config_without_noise(config: RunConfig, manifest: dict) -> RunConfig:
    """The loader must see only the CSV's own columns; injected noise
    channels are regenerated and appended afterwards."""
    noise = manifest.get("noise")
    if not noise:
        return config
    kept = tuple(
        name for name in config.source_columns if not _is_noise_name(name, noise)
    )
    return dataclasses.replace(config, source_columns=kept)


def _is_noise_name(name: str, noise: dict) -> bool:
    return name in {f"noise_{i + 1}" for i in range(noise["count"])}


def cmd_symbolize(args) -> int:
    config = _build_config(args)
    dataset = load_csv(args.input, config)
    train_len = split_index(dataset.n, config.train_fraction)
    fit = fit_mep_partition if config.partitioner == "mep" else fit_uniform_partition

    partitions = {}
    sequences = {}
    for name in config.source_columns:
        values = dataset.column(name)
        partition = fit(values[:train_len], config.alphabet)
        partitions[name] = partition.to_dict()
        sequences[name] = symbolize(values, partition, name)
    target_seq, kind, _, _ = target_symbols(dataset, config)
    sequences[config.target_column] = target_seq

    names = list(config.source_columns) + [config.target_column]
    lines = [",".join(names)]
    for i in range(dataset.n):
        lines.append(",".join(str(int(sequences[n].symbols[i])) for n in names))

    out = _out_dir(args)
    _write(out / "symbols.csv", "\n".join(lines) + "\n")
    _write(out / "partitions.json", json.dumps(partitions, indent=2) + "\n")
    _write(out / "manifest.json",
           json.dumps(_manifest("symbolize", args, config, dataset,
                                {"target_kind_resolved": kind}), indent=2) + "\n")
    return 0


def cmd_export_tree(args) -> int:
    tree_path = Path(args.tree)
    tree = tree_from_json(tree_path.read_bytes())
    out = _out_dir(args)
    _write(out / f"tree.{args.format}", export_tree(tree, args.format))
    manifest = {
        "command": "export-tree",
        "input": {"path": str(tree_path), "sha256": _sha256(tree_path)},
        "format": args.format,
        "versions": _versions(),
    }
    _write(out / "export_manifest.json", json.dumps(manifest, indent=2) + "\n")
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="input CSV file")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--target", help="target column name")
    parser.add_argument("--sources", help="comma-separated source column names")
    parser.add_argument("--alphabet", type=int, help="symbols per source (default 5)")
    parser.add_argument("--target-alphabet", dest="target_alphabet", type=int,
                        help="symbols for a continuous target (default 10)")
    parser.add_argument("--depth", type=int, help="embedded history length (default 3)")
    parser.add_argument("--fused-alphabet", dest="fused_alphabet", type=int,
                        help="symbols after repartitioning a fused pair "
                             "(default: same as --alphabet)")
    parser.add_argument("--stop-at", dest="stop_at", type=int,
                        help="stop when this many supernodes remain (default 1)")
    parser.add_argument("--train-fraction", dest="train_fraction", type=float,
                        help="contiguous training prefix fraction (default 0.7)")
    parser.add_argument("--seed", type=int, help="noise-injection seed (default 0)")
    parser.add_argument("--partitioner", choices=("mep", "uniform"),
                        help="source partitioning scheme (default mep)")
    parser.add_argument("--target-kind", dest="target_kind",
                        choices=("auto", "discrete", "continuous"),
                        help="treat the target as class labels or as a "
                             "continuous series (default auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tefuse",
        description="Hierarchical fusion of multivariate time series by "
                    "transfer-entropy similarity.",
    )
    parser.add_argument("--verbose", action="store_true",
                        help="log progress to stderr")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel pair scoring; never changes outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run the fusion hierarchy")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("inject-noise",
                       help="append seeded noise channels, then cluster")
    _add_config_flags(p)
    p.add_argument("--noise-count", dest="noise_count", type=int, required=True,
                   help="number of standard-normal channels to append")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_inject_noise)

    p = sub.add_parser("evaluate", help="score a stored tree level by level")
    p.add_argument("--input", required=True, help="the original CSV file")
    p.add_argument("--tree", required=True,
                   help="directory holding tree.json and manifest.json")
    p.add_argument("--target-kind", dest="target_kind",
                   choices=("auto", "discrete", "continuous"))
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("symbolize", help="dump symbol streams and partitions")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_symbolize)

    p = sub.add_parser("export-tree", help="re-render a stored tree")
    p.add_argument("--tree", required=True, help="path to tree.json")
    p.add_argument("--format", choices=("json", "dot"), default="dot")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_export_tree)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CONFIG_ERRORS as exc:
        print(f"tefuse: configuration error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        print(f"tefuse: data error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"tefuse: data error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
