"""Pairwise fusion of symbol sequences: radix merge, then repartition.

Two aligned symbol sequences x (alphabet b_x) and y (alphabet b_y) merge
elementwise into values x_i * b_y + y_i, a number in the (b_x * b_y)-ary
system that decodes uniquely back to the pair. The merged sequence is then
squeezed to a working alphabet by ordinal repartitioning. Which sequence
takes the major digit matters to the repartition bin layout, so callers fix
it (the clustering module puts the lower-numbered node first).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch
from .sdf import SymbolSequence, repartition


@dataclass(frozen=True, eq=False)
class MergedSequence:
    """Elementwise pairing of two symbol sequences, x major, y minor."""

    values: np.ndarray
    b_x: int
    b_y: int
    parents: tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.int64))
        object.__setattr__(self, "parents", tuple(self.parents))

    @property
    def alphabet_size(self) -> int:
        return self.b_x * self.b_y

    def decode(self) -> tuple[np.ndarray, np.ndarray]:
        """Recover the (x, y) component sequences."""
        return self.values // self.b_y, self.values % self.b_y

    def __len__(self) -> int:
        return len(self.values)


def merged_name(x: SymbolSequence, y: SymbolSequence) -> str:
    return f"({x.source_name}+{y.source_name})"


def merge_pair(x: SymbolSequence, y: SymbolSequence) -> MergedSequence:
    """Pair two aligned sequences into one (b_x * b_y)-ary sequence."""
    if len(x) != len(y):
        raise LengthMismatch(f"cannot merge lengths {len(x)} and {len(y)}")
    values = x.symbols * y.alphabet_size + y.symbols
    return MergedSequence(
        values=values,
        b_x=x.alphabet_size,
        b_y=y.alphabet_size,
        parents=(x.source_name, y.source_name),
    )


def as_symbol_sequence(merged: MergedSequence) -> SymbolSequence:
    """View a merged sequence as a plain symbol sequence over its full alphabet."""
    return SymbolSequence(
        merged.values, merged.alphabet_size, f"({merged.parents[0]}+{merged.parents[1]})"
    )


def fuse(
    x: SymbolSequence,
    y: SymbolSequence,
    fused_alphabet: int,
    fit_length: int | None = None,
) -> SymbolSequence:
    """Merge two sequences and repartition down to ``fused_alphabet`` symbols.

    The repartition quantiles are fitted on the first ``fit_length`` merged
    values (all of them by default) and applied to the whole sequence; the
    result carries the synthesized name "(x+y)". The output alphabet never
    exceeds ``fused_alphabet`` but may fall below it on degenerate merges
    (see :func:`tefuse.sdf.repartition`).
    """
    merged = merge_pair(x, y)
    return repartition(as_symbol_sequence(merged), fused_alphabet, fit_length=fit_length)
