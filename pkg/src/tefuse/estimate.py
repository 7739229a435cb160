"""Target estimation at every level of a fusion hierarchy.

The estimator is a conditional frequency table over joint embedded states:
for each state tuple observed in training it stores the empirical
distribution of the next target symbol, and unseen states fall back to the
global target distribution, so prediction is total. The same lag-1
convention as transfer entropy applies: the target at t+1 is paired with
states through t.

Continuous targets are discretized by maximum entropy partitioning and
predictions are mapped back to values through per-bin training medians.
Discrete targets (class labels) are used as-is.

Per-level evaluation mirrors the fusion pipeline's training discipline:
partitions and frequency tables are fitted on the contiguous training
prefix and scored on the held-out suffix. Level 0 tuples all leaf states
jointly (the unfused baseline); level h uses the partially fused node set.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .clustering import MergeTree, leaf_sequences, replay_merges
from .embedding import StateSequence, embed
from .errors import EmptySequence, LengthMismatch, SequenceTooShort
from .ingest import Dataset, RunConfig, split_index
from .sdf import Partition, SymbolSequence, fit_mep_partition, symbolize

logger = logging.getLogger(__name__)

ACCURACY = "accuracy"
RMSE = "rmse"


@dataclass
class FrequencyEstimator:
    """Empirical distribution of the next target symbol per joint state."""

    table: dict[tuple[int, ...], np.ndarray]
    prior: np.ndarray
    target_alphabet: int
    target_partition: Partition | None = None
    bin_representatives: np.ndarray | None = None


def _state_rows(states) -> np.ndarray:
    if isinstance(states, StateSequence):
        states = states.states
    arr = np.asarray(states, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("states must be a 1-D or 2-D integer array")
    return arr


def discretize_target(values, b: int):
    """Symbolize a continuous target and pick per-bin representative values.

    Returns (symbols, partition, representatives) where representative s is
    the median of the values falling in bin s. A bin left empty by ties
    inherits the nearest populated bin's representative so lookups stay
    total.
    """
    values = np.asarray(values, dtype=np.float64)
    partition = fit_mep_partition(values, b)
    seq = symbolize(values, partition, "target")
    representatives = np.full(b, np.nan)
    for s in range(b):
        members = values[seq.symbols == s]
        if len(members):
            representatives[s] = np.median(members)
    for s in range(b):
        if np.isnan(representatives[s]):
            populated = np.flatnonzero(~np.isnan(representatives))
            nearest = populated[np.argmin(np.abs(populated - s))]
            representatives[s] = representatives[nearest]
    return seq, partition, representatives


def train(states, target_symbols, target_alphabet: int | None = None) -> FrequencyEstimator:
    """Fit the frequency table from aligned (state, next target symbol) pairs."""
    rows = _state_rows(states)
    targets = np.asarray(
        target_symbols.symbols if isinstance(target_symbols, SymbolSequence)
        else target_symbols,
        dtype=np.int64,
    )
    if len(rows) != len(targets):
        raise LengthMismatch(
            f"{len(rows)} states but {len(targets)} target symbols"
        )
    if len(rows) == 0:
        raise EmptySequence("cannot train on zero samples")
    alphabet = int(target_alphabet if target_alphabet is not None
                   else targets.max() + 1)
    counts: dict[tuple[int, ...], np.ndarray] = {}
    for row, label in zip(map(tuple, rows.tolist()), targets.tolist()):
        bucket = counts.get(row)
        if bucket is None:
            bucket = counts[row] = np.zeros(alphabet)
        bucket[label] += 1.0
    table = {state: bucket / bucket.sum() for state, bucket in counts.items()}
    prior = np.bincount(targets, minlength=alphabet) / len(targets)
    return FrequencyEstimator(table=table, prior=prior, target_alphabet=alphabet)


def predict(est: FrequencyEstimator, states):
    """Predict target symbols (and values, when representatives exist).

    Each state looks up its training distribution, falling back to the
    global prior when unseen; the argmax breaks ties toward the lower
    symbol id. Returns (symbols, values) with values None for discrete
    targets.
    """
    rows = _state_rows(states)
    symbols = np.empty(len(rows), dtype=np.int64)
    for pos, row in enumerate(map(tuple, rows.tolist())):
        dist = est.table.get(row)
        if dist is None:
            dist = est.prior
        symbols[pos] = int(np.argmax(dist))
    if est.bin_representatives is None:
        return symbols, None
    return symbols, est.bin_representatives[symbols]


@dataclass(frozen=True)
class LevelScore:
    level: int
    metric: str
    value: float
    n_test: int


@dataclass(frozen=True, eq=False)
class LevelPredictions:
    """Held-out prediction series for one level, in original target units."""

    level: int
    positions: np.ndarray
    truth: np.ndarray
    predicted: np.ndarray


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    rows: tuple[LevelScore, ...]
    config: dict
    predictions: tuple[LevelPredictions, ...]


def resolve_target_kind(values, config: RunConfig) -> str:
    """Dispatch rule: integral values with few distinct levels are class
    labels; everything else is treated as continuous and discretized."""
    if config.target_kind != "auto":
        return config.target_kind
    values = np.asarray(values, dtype=np.float64)
    integral = bool(np.all(np.abs(values - np.round(values)) <= 1e-9))
    if integral and len(np.unique(values)) <= config.target_alphabet:
        return "discrete"
    return "continuous"


def target_symbols(dataset: Dataset, config: RunConfig):
    """Symbolize the target column for transfer entropy and estimation.

    Returns (sequence, kind, labels, representatives): for discrete targets
    the distinct values become class ids and representatives are the labels
    themselves; for continuous targets the sequence is a maximum-entropy
    discretization fitted on the training prefix, with per-bin medians of
    the training rows as representatives.
    """
    values = dataset.column(config.target_column)
    kind = resolve_target_kind(values, config)
    if kind == "discrete":
        labels = np.unique(values)
        symbols = np.searchsorted(labels, values)
        seq = SymbolSequence(symbols, len(labels), config.target_column)
        return seq, kind, labels, labels.astype(np.float64)
    train_len = split_index(dataset.n, config.train_fraction)
    _, partition, representatives = discretize_target(
        values[:train_len], config.target_alphabet
    )
    seq = symbolize(values, partition, config.target_column)
    return seq, kind, None, representatives


def evaluate_levels(tree: MergeTree, dataset: Dataset, config: RunConfig) -> EvaluationReport:
    """Score held-out prediction quality at every level of the tree.

    Discrete targets report accuracy; continuous targets report RMSE between
    bin-representative predictions and the continuous truth. The tree must
    have been produced from this dataset's training split with this
    configuration; leaves and merges are replayed deterministically.
    """
    n = dataset.n
    s = split_index(n, config.train_fraction)
    k = config.depth
    if s < k + 2:
        raise SequenceTooShort(
            f"training prefix of {s} rows cannot support depth k={k}"
        )
    if s >= n:
        raise ValueError("train fraction leaves no held-out rows to evaluate")

    leaves = leaf_sequences(dataset, config)
    nodes = replay_merges(leaves, tree, config)
    target_seq, kind, labels, representatives = target_symbols(dataset, config)
    target_values = dataset.column(config.target_column)
    tsyms = target_seq.symbols
    alphabet = target_seq.alphabet_size

    rows: list[LevelScore] = []
    predictions: list[LevelPredictions] = []
    for level, active in enumerate(tree.levels):
        matrix = np.column_stack([embed(nodes[a], k).states for a in active])
        est = train(matrix[: s - k - 1], tsyms[k + 1: s], target_alphabet=alphabet)
        est.bin_representatives = representatives
        pred_syms, pred_values = predict(est, matrix[s - 1 - k: n - 1 - k])
        truth_syms = tsyms[s:]
        if kind == "discrete":
            value = float(np.mean(pred_syms == truth_syms))
            metric = ACCURACY
            truth_out = target_values[s:]
            predicted_out = labels[pred_syms]
        else:
            truth_out = target_values[s:]
            predicted_out = pred_values
            value = float(np.sqrt(np.mean((predicted_out - truth_out) ** 2)))
            metric = RMSE
        rows.append(LevelScore(level=level, metric=metric, value=value, n_test=n - s))
        predictions.append(LevelPredictions(
            level=level,
            positions=np.arange(s, n),
            truth=truth_out,
            predicted=predicted_out,
        ))
        logger.info("level %d (%d nodes): %s = %.4f on %d held-out rows",
                    level, len(active), metric, value, n - s)
    return EvaluationReport(
        rows=tuple(rows),
        config=config.to_dict(),
        predictions=tuple(predictions),
    )


def report_csv(report: EvaluationReport) -> str:
    lines = ["level,metric,value,n_test"]
    for row in report.rows:
        lines.append(f"{row.level},{row.metric},{row.value!r},{row.n_test}")
    return "\n".join(lines) + "\n"


def report_json(report: EvaluationReport) -> str:
    doc = {
        "config": report.config,
        "levels": [
            {"level": r.level, "metric": r.metric, "value": r.value, "n_test": r.n_test}
            for r in report.rows
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def predictions_csv(report: EvaluationReport) -> str:
    lines = ["level,row,truth,predicted"]
    for block in report.predictions:
        for pos, truth, pred in zip(block.positions, block.truth, block.predicted):
            lines.append(f"{block.level},{pos},{truth!r},{pred!r}")
    return "\n".join(lines) + "\n"
