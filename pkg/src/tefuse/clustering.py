"""Bottom-up hierarchy of fused variables driven by a transfer-entropy score.

At each level every unordered pair of active nodes is scored with

    (T_x->target - T_pair->target) + (T_y->target - T_pair->target)

where T_pair is measured on the raw merged (b_x * b_y)-ary sequence. Scoring
therefore happens before any repartitioning, which makes the score exactly
the negated sum of the pair's causation entropies toward the target and
independent of the fused alphabet. The argmin pair is fused, repartitioned
to the working alphabet, and replaces its parents; ties break toward the
lexicographically smallest (i, j) node-id pair so runs are reproducible.

Scores can be negative or positive and are never clamped. Pair scoring
within a level is data-parallel; the argmin is taken only after all scores
materialize, so the chosen pair never depends on scheduling.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import LengthMismatch, SequenceTooShort
from .fusion import as_symbol_sequence, fuse, merge_pair
from .infotheory import causation_entropy_pair, transfer_entropy
from .ingest import Dataset, RunConfig, split_index
from .sdf import SymbolSequence, fit_mep_partition, fit_uniform_partition, symbolize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MergeRecord:
    """One fusion step: the level it produces, the chosen pair, and the
    full scoring context (every candidate's score, every active node's
    transfer entropy toward the target) at selection time."""

    level: int
    pair: tuple[int, int]
    score: float
    all_candidate_scores: tuple[tuple[tuple[int, int], float], ...]
    te_to_target: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class MergeTree:
    """Full clustering record: leaf names, node names by id (leaves first,
    fused nodes in creation order), merges, and the active node ids at
    every level, level 0 being the unfused leaves."""

    leaves: tuple[str, ...]
    node_names: tuple[str, ...]
    merges: tuple[MergeRecord, ...]
    levels: tuple[tuple[int, ...], ...]


def score_pair(x: SymbolSequence, y: SymbolSequence, z: SymbolSequence, k: int) -> float:
    """Information lost toward z by replacing x and y with their raw merge."""
    te_x = transfer_entropy(x, z, k)
    te_y = transfer_entropy(y, z, k)
    te_xy = transfer_entropy(as_symbol_sequence(merge_pair(x, y)), z, k)
    return (te_x - te_xy) + (te_y - te_xy)


def _train_view(seq: SymbolSequence, length: int) -> SymbolSequence:
    if length >= len(seq):
        return seq
    return SymbolSequence(seq.symbols[:length], seq.alphabet_size, seq.source_name)


def cluster(
    sources: list[SymbolSequence],
    target: SymbolSequence,
    config: RunConfig,
    threads: int = 1,
) -> MergeTree:
    """Run the fusion hierarchy until ``config.stop_at`` supernodes remain.

    All scoring uses only the training prefix (``config.train_fraction`` of
    the common length); fused node sequences are produced full length, with
    their repartition quantiles fitted on the same prefix, so downstream
    evaluation sees no information from held-out rows.
    """
    if len(sources) < 2:
        raise ValueError("clustering needs at least two source sequences")
    n = len(target)
    for seq in sources:
        if len(seq) != n:
            raise LengthMismatch(
                f"source {seq.source_name!r} has length {len(seq)}, target has {n}"
            )
    train_len = split_index(n, config.train_fraction)
    k = config.depth
    if train_len < k + 2:
        raise SequenceTooShort(
            f"training prefix of {train_len} rows cannot support depth k={k}"
        )

    nodes: dict[int, SymbolSequence] = dict(enumerate(sources))
    names = [seq.source_name for seq in sources]
    z_train = _train_view(target, train_len)
    active = list(range(len(sources)))
    levels = [tuple(active)]
    merges: list[MergeRecord] = []
    te_cache: dict[int, float] = {}

    level = 0
    while len(active) > config.stop_at:
        level += 1
        for node_id in active:
            if node_id not in te_cache:
                te_cache[node_id] = transfer_entropy(
                    _train_view(nodes[node_id], train_len), z_train, k
                )
        pairs = [
            (i, j)
            for a, i in enumerate(active)
            for j in active[a + 1:]
        ]

        def joint_te(pair: tuple[int, int]) -> float:
            merged = merge_pair(
                _train_view(nodes[pair[0]], train_len),
                _train_view(nodes[pair[1]], train_len),
            )
            return transfer_entropy(as_symbol_sequence(merged), z_train, k)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                joints = list(pool.map(joint_te, pairs))
        else:
            joints = [joint_te(p) for p in pairs]
        scores = [
            (te_cache[i] - te_xy) + (te_cache[j] - te_xy)
            for (i, j), te_xy in zip(pairs, joints)
        ]

        # Pairs are enumerated in ascending (i, j) order, so the first
        # minimum is the lexicographic tie-break winner.
        best = min(range(len(pairs)), key=lambda idx: scores[idx])
        win_i, win_j = pairs[best]

        if logger.isEnabledFor(logging.DEBUG):
            c_x, c_y = causation_entropy_pair(
                _train_view(nodes[win_i], train_len),
                _train_view(nodes[win_j], train_len),
                z_train, k,
            )
            gap = abs(scores[best] + (c_x + c_y))
            if gap > 1e-10:
                logger.warning(
                    "level %d: score/causation-entropy identity off by %.3e", level, gap
                )
            else:
                logger.debug(
                    "level %d: score %.6f matches -(causation entropies) within %.1e",
                    level, scores[best], gap,
                )

        fused = fuse(nodes[win_i], nodes[win_j], config.fused_alphabet,
                     fit_length=train_len)
        new_id = len(names)
        names.append(fused.source_name)
        nodes[new_id] = fused
        merges.append(MergeRecord(
            level=level,
            pair=(win_i, win_j),
            score=scores[best],
            all_candidate_scores=tuple(
                (pair, score) for pair, score in zip(pairs, scores)
            ),
            te_to_target=tuple((i, te_cache[i]) for i in active),
        ))
        active = [a for a in active if a not in (win_i, win_j)] + [new_id]
        levels.append(tuple(active))
        logger.info(
            "level %d: fused nodes %d+%d -> %d (%s), score %.6f over %d candidates",
            level, win_i, win_j, new_id, fused.source_name, scores[best], len(pairs),
        )

    return MergeTree(
        leaves=tuple(seq.source_name for seq in sources),
        node_names=tuple(names),
        merges=tuple(merges),
        levels=tuple(levels),
    )


def replay_merges(
    leaf_seqs: list[SymbolSequence], tree: MergeTree, config: RunConfig
) -> dict[int, SymbolSequence]:
    """Rebuild every node's full-length sequence from the recorded merges.

    Fusion is deterministic given the pair order and the training prefix, so
    replaying a stored tree against the same symbolized leaves reproduces the
    clustering run's node sequences exactly.
    """
    if len(leaf_seqs) != len(tree.leaves):
        raise LengthMismatch(
            f"tree has {len(tree.leaves)} leaves, got {len(leaf_seqs)} sequences"
        )
    train_len = split_index(len(leaf_seqs[0]), config.train_fraction)
    nodes = dict(enumerate(leaf_seqs))
    for index, record in enumerate(tree.merges):
        i, j = record.pair
        nodes[len(tree.leaves) + index] = fuse(
            nodes[i], nodes[j], config.fused_alphabet, fit_length=train_len
        )
    return nodes


def leaf_sequences(dataset: Dataset, config: RunConfig) -> list[SymbolSequence]:
    """Symbolize every source column, partitions fitted on the training prefix."""
    fit = fit_mep_partition if config.partitioner == "mep" else fit_uniform_partition
    train_len = split_index(dataset.n, config.train_fraction)
    out = []
    for name in config.source_columns:
        values = dataset.column(name)
        partition = fit(values[:train_len], config.alphabet)
        out.append(symbolize(values, partition, name))
    return out


def export_tree(tree: MergeTree, format: str = "json") -> bytes:
    """Serialize a tree to JSON (full record) or Graphviz DOT (dendrogram)."""
    if format == "json":
        return _export_json(tree)
    if format == "dot":
        return _export_dot(tree)
    raise ValueError(f"unknown export format {format!r}")


def _export_json(tree: MergeTree) -> bytes:
    doc = {
        "leaves": list(tree.leaves),
        "node_names": list(tree.node_names),
        "merges": [
            {
                "level": record.level,
                "pair": list(record.pair),
                "score": record.score,
                "candidates": [
                    [list(pair), score]
                    for pair, score in record.all_candidate_scores
                ],
                "te_to_target": [
                    [node_id, value] for node_id, value in record.te_to_target
                ],
            }
            for record in tree.merges
        ],
        "levels": [list(level) for level in tree.levels],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def tree_from_json(data: bytes | str) -> MergeTree:
    """Inverse of the JSON export; parse(export(tree)) == tree."""
    doc = json.loads(data)
    return MergeTree(
        leaves=tuple(doc["leaves"]),
        node_names=tuple(doc["node_names"]),
        merges=tuple(
            MergeRecord(
                level=m["level"],
                pair=tuple(m["pair"]),
                score=m["score"],
                all_candidate_scores=tuple(
                    (tuple(pair), score) for pair, score in m["candidates"]
                ),
                te_to_target=tuple(
                    (node_id, value) for node_id, value in m["te_to_target"]
                ),
            )
            for m in doc["merges"]
        ),
        levels=tuple(tuple(level) for level in doc["levels"]),
    )


def _dot_quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _export_dot(tree: MergeTree) -> bytes:
    lines = ["graph fusion_tree {", "  rankdir=BT;", "  node [shape=box];"]
    for node_id, name in enumerate(tree.node_names):
        lines.append(f"  n{node_id} [label={_dot_quote(name)}];")
    for index, record in enumerate(tree.merges):
        parent = len(tree.leaves) + index
        label = _dot_quote(format(record.score, ".6g"))
        for child in record.pair:
            lines.append(f"  n{parent} -- n{child} [label={label}];")
    leaf_rank = " ".join(f"n{i};" for i in range(len(tree.leaves)))
    lines.append(f"  {{ rank=same; {leaf_rank} }}")
    for index in range(len(tree.merges)):
        lines.append(f"  {{ rank=same; n{len(tree.leaves) + index}; }}")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
