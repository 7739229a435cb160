"""CSV ingestion, run configuration, and train/test splitting.

The loader keeps exactly the configured columns, in configuration order
(that order feeds pair tie-breaking downstream), drops any row whose
selected cells are missing or non-numeric, and reports how many rows were
lost. Train/test splitting is always a contiguous prefix/suffix cut;
shuffling a time series would leak history across the boundary.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import EmptyAfterFiltering, MissingColumn, UnparseableHeader

logger = logging.getLogger(__name__)

PARTITIONERS = ("mep", "uniform")
TARGET_KINDS = ("auto", "discrete", "continuous")


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one clustering/evaluation run.

    ``alphabet`` is the per-source symbol count, ``depth`` the embedded
    history length, ``fused_alphabet`` the symbol count merged nodes are
    repartitioned to (defaults to ``alphabet``), and ``stop_at`` the number
    of supernodes at which merging stops. ``seed`` only drives synthetic
    noise-channel injection; nothing else in the pipeline is random.
    """

    target_column: str
    source_columns: tuple[str, ...]
    alphabet: int = 5
    target_alphabet: int = 10
    depth: int = 3
    fused_alphabet: int | None = None
    stop_at: int = 1
    train_fraction: float = 0.7
    seed: int = 0
    partitioner: str = "mep"
    target_kind: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "source_columns", tuple(self.source_columns))
        if self.fused_alphabet is None:
            object.__setattr__(self, "fused_alphabet", self.alphabet)
        if not self.source_columns:
            raise ValueError("at least one source column is required")
        if len(set(self.source_columns)) != len(self.source_columns):
            raise ValueError("source columns must be unique")
        if self.target_column in self.source_columns:
            raise ValueError(
                f"target column {self.target_column!r} cannot also be a source"
            )
        if self.alphabet < 2:
            raise ValueError("alphabet must be >= 2")
        if self.target_alphabet < 2:
            raise ValueError("target alphabet must be >= 2")
        if self.fused_alphabet < 2:
            raise ValueError("fused alphabet must be >= 2")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.stop_at < 1:
            raise ValueError("stop-at must be >= 1")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ValueError("train fraction must be in (0, 1]")
        if self.partitioner not in PARTITIONERS:
            raise ValueError(f"partitioner must be one of {PARTITIONERS}")
        if self.target_kind not in TARGET_KINDS:
            raise ValueError(f"target kind must be one of {TARGET_KINDS}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**{**data, "source_columns": tuple(data["source_columns"])})


@dataclass(frozen=True, eq=False)
class Dataset:
    """Aligned numeric columns, immutable once constructed."""

    names: tuple[str, ...]
    columns: tuple[np.ndarray, ...]
    dropped_rows: int = 0
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        cols = tuple(np.asarray(c, dtype=np.float64) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if len(self.names) != len(cols):
            raise ValueError("one name per column required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("column names must be unique")
        if not cols or len(cols[0]) < 1:
            raise ValueError("a dataset needs at least one row")
        if any(len(c) != len(cols[0]) for c in cols):
            raise ValueError("all columns must have identical length")

    @property
    def n(self) -> int:
        return len(self.columns[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.names.index(name)]
        except ValueError:
            raise MissingColumn(name) from None


def load_csv(path, config: RunConfig) -> Dataset:
    """Load the configured columns from an RFC-4180-style CSV with header.

    Rows with a missing or non-numeric cell in any selected column are
    dropped whole, keeping the surviving columns aligned; the drop count is
    logged and recorded on the dataset. Loading is pure: identical file
    bytes produce an identical dataset.
    """
    selected = list(config.source_columns) + [config.target_column]
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise UnparseableHeader(f"{path}: file is empty") from None
        if not header or any(not h for h in header):
            raise UnparseableHeader(f"{path}: header contains empty column names")
        if len(set(header)) != len(header):
            raise UnparseableHeader(f"{path}: header contains duplicate column names")
        for name in selected:
            if name not in header:
                raise MissingColumn(name)
        indices = [header.index(name) for name in selected]
        columns: list[list[float]] = [[] for _ in selected]
        dropped = 0
        for row in reader:
            if not row:
                continue
            try:
                values = [float(row[i]) for i in indices]
            except (ValueError, IndexError):
                dropped += 1
                continue
            if any(math.isnan(v) for v in values):
                dropped += 1
                continue
            for col, v in zip(columns, values):
                col.append(v)
    if not columns[0]:
        raise EmptyAfterFiltering(f"{path}: no usable rows after filtering")
    if dropped:
        logger.info("%s: dropped %d rows with missing or non-numeric cells",
                    path, dropped)
    return Dataset(
        names=tuple(selected),
        columns=tuple(np.asarray(c) for c in columns),
        dropped_rows=dropped,
    )


def split_index(n: int, fraction: float) -> int:
    """Training row count: ceil(fraction * n), guarded against float fuzz."""
    return min(n, max(1, math.ceil(fraction * n - 1e-9)))


def append_noise_channels(dataset: Dataset, count: int, seed: int) -> Dataset:
    """Append ``count`` standard-normal channels named noise_1..noise_count.

    Generation is fully determined by ``seed``; this is the only source of
    randomness anywhere in the pipeline.
    """
    if count < 1:
        raise ValueError("noise channel count must be >= 1")
    names = [f"noise_{i + 1}" for i in range(count)]
    for name in names:
        if name in dataset.names:
            raise ValueError(f"dataset already has a column named {name!r}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((count, dataset.n))
    return Dataset(
        names=dataset.names + tuple(names),
        columns=dataset.columns + tuple(noise),
        dropped_rows=dataset.dropped_rows,
        timestamps=dataset.timestamps,
    )


def read_config_file(path) -> dict[str, str]:
    """Parse a plain-text key=value configuration file.

    Blank lines and '#' comments are ignored; values are returned as strings
    for the CLI layer to coerce. Flags override file entries.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries
