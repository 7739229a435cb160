"""Plug-in estimators for Shannon, conditional, transfer, and causation entropy.

Everything is measured in bits (log base 2) from empirical joint
frequencies; outcomes that never occur contribute nothing. No small-sample
bias correction is applied: the clustering metric only ever compares values
computed at identical sample sizes, so the common plug-in bias largely
cancels out of the comparison.

Joint distributions are formed by tupling aligned columns (raw symbols or
embedded windows) and counting distinct rows, never by combining entropies
of the parts. Window columns are an invertible recoding of radix state ids,
so every quantity here is invariant under any bijective relabeling of the
input alphabets.

Lag convention: the target symbol at t+1 is paired with states through t,
giving aligned tuples for t = k .. n-2.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import EmptySequence, LengthMismatch, SequenceTooShort

logger = logging.getLogger(__name__)

CLAMP_EPS = 1e-12


def _column(seq) -> np.ndarray:
    """Accept a SymbolSequence or any 1-D integer array-like."""
    if hasattr(seq, "symbols"):
        seq = seq.symbols
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional symbol sequence")
    return arr


def _rows(parts) -> np.ndarray:
    """Stack 1-D/2-D integer blocks into one (n, m) outcome matrix."""
    blocks = []
    for p in parts:
        arr = np.asarray(p, dtype=np.int64)
        blocks.append(arr[:, None] if arr.ndim == 1 else arr)
    return np.concatenate(blocks, axis=1)


def _entropy_of_rows(rows: np.ndarray) -> float:
    _, counts = np.unique(rows, axis=0, return_counts=True)
    p = counts / rows.shape[0]
    return float(-(p * np.log2(p)).sum())


def _entropy_1d(arr: np.ndarray) -> float:
    _, counts = np.unique(arr, return_counts=True)
    p = counts / len(arr)
    return float(-(p * np.log2(p)).sum())


def _clamped(value: float, what: str) -> float:
    # Plug-in conditional mutual information is nonnegative; only float
    # round-off can push it below zero, and only by ~1e-16.
    if -CLAMP_EPS <= value < 0.0:
        logger.debug("clamping %.3e from %s to zero", value, what)
        return 0.0
    return value


def _windows(arr: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return arr[:, None]
    return np.lib.stride_tricks.sliding_window_view(arr, k + 1)


def shannon_entropy(seq) -> float:
    """Entropy of the empirical symbol distribution, in bits."""
    arr = _column(seq)
    if len(arr) == 0:
        raise EmptySequence("cannot take the entropy of an empty sequence")
    return _entropy_1d(arr)


def conditional_entropy(next_symbols, given) -> float:
    """H(next | given) from aligned empirical counts, via H(joint) - H(given).

    ``given`` may be a single sequence or an (n, m) matrix whose columns are
    tupled into one conditioning variable.
    """
    nxt = _column(next_symbols)
    g = np.asarray(given if not hasattr(given, "symbols") else given.symbols,
                   dtype=np.int64)
    if g.ndim == 1:
        g = g[:, None]
    if len(nxt) != len(g):
        raise LengthMismatch(
            f"next has length {len(nxt)}, conditioning has length {len(g)}"
        )
    if len(nxt) == 0:
        raise EmptySequence("cannot condition on an empty sequence")
    joint = _rows([nxt, g])
    return _entropy_of_rows(joint) - _entropy_of_rows(g)


def _te_blocks(source, target, k: int):
    x = _column(source)
    y = _column(target)
    if len(x) != len(y):
        raise LengthMismatch(f"source length {len(x)} != target length {len(y)}")
    n = len(y)
    if n < k + 2:
        raise SequenceTooShort(f"need at least k+2={k + 2} samples, got {n}")
    nxt = y[k + 1:]
    yw = _windows(y, k)[:-1]
    xw = _windows(x, k)[:-1]
    return nxt, yw, xw


def transfer_entropy(source, target, k: int) -> float:
    """Directed information flow source -> target, in bits.

    The reduction in uncertainty of the target's next symbol from knowing
    the source's depth-k state history in addition to the target's own:
    H(next | own history) - H(next | own and source history).
    """
    nxt, yw, xw = _te_blocks(source, target, k)
    h_own = _entropy_of_rows(_rows([nxt, yw])) - _entropy_of_rows(yw)
    h_both = (_entropy_of_rows(_rows([nxt, yw, xw]))
              - _entropy_of_rows(_rows([yw, xw])))
    return _clamped(h_own - h_both, "transfer entropy")


def _row_counts(rows: np.ndarray) -> np.ndarray:
    _, inverse, counts = np.unique(
        rows, axis=0, return_inverse=True, return_counts=True
    )
    return counts[inverse]


def transfer_entropy_ratio_sum(source, target, k: int) -> float:
    """Transfer entropy as the explicit probability-ratio sum.

    Sums p(next, own, source) * log2[p(next | own, source) / p(next | own)]
    over the observed triples. Algebraically identical to
    :func:`transfer_entropy`; kept as an independent computation route and
    cross-checked in the tests.
    """
    nxt, yw, xw = _te_blocks(source, target, k)
    rows = _rows([nxt, yw, xw])
    kk = yw.shape[1]
    c_full = _row_counts(rows)                 # (next, own, source)
    c_cond = _row_counts(rows[:, 1:])          # (own, source)
    c_next_own = _row_counts(rows[:, :1 + kk])  # (next, own)
    c_own = _row_counts(rows[:, 1:1 + kk])     # (own)
    ratios = (c_full.astype(np.float64) * c_own) / (c_cond * c_next_own.astype(np.float64))
    return _clamped(float(np.mean(np.log2(ratios))), "transfer entropy (ratio form)")


def causation_entropy_pair(x, y, z, k: int) -> tuple[float, float]:
    """Extra information each of x, y carries about z beyond the other.

    Returns (x beyond (z, y), y beyond (z, x)): the first component is
    H(z_next | z,y histories) - H(z_next | z,x,y histories), the second the
    symmetric quantity with x and y swapped.
    """
    xa, za = _column(x), _column(z)
    ya = _column(y)
    if not (len(xa) == len(ya) == len(za)):
        raise LengthMismatch(
            f"lengths differ: x={len(xa)}, y={len(ya)}, z={len(za)}"
        )
    n = len(za)
    if n < k + 2:
        raise SequenceTooShort(f"need at least k+2={k + 2} samples, got {n}")
    nxt = za[k + 1:]
    zw = _windows(za, k)[:-1]
    xw = _windows(xa, k)[:-1]
    yw = _windows(ya, k)[:-1]
    h_zx = _entropy_of_rows(_rows([nxt, zw, xw])) - _entropy_of_rows(_rows([zw, xw]))
    h_zy = _entropy_of_rows(_rows([nxt, zw, yw])) - _entropy_of_rows(_rows([zw, yw]))
    h_zxy = (_entropy_of_rows(_rows([nxt, zw, xw, yw]))
             - _entropy_of_rows(_rows([zw, xw, yw])))
    return (
        _clamped(h_zy - h_zxy, "causation entropy x beyond (z,y)"),
        _clamped(h_zx - h_zxy, "causation entropy y beyond (z,x)"),
    )
