"""Contingency tables, entropies, mutual information, and NMI.

All entropies are natural-log (nats). Sums run over count arrays sorted
ascending, which makes the results exact under cluster relabeling and under
swapping the two clusterings: nmi(u, v) == nmi(v, u) bitwise, relabeling
changes nothing, and identical partitions give exactly 1.0.

Mutual information is computed as H(rows) + H(cols) - H(joint); the per-cell
product formula is algebraically identical and kept as the independent oracle
in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContingencyTable",
    "contingency",
    "entropy",
    "joint_entropy",
    "conditional_entropy",
    "mutual_information",
    "nmi",
]


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts n[i, j] of two labelings of the same points."""

    n: int
    counts: np.ndarray
    row_sums: np.ndarray = None
    col_sums: np.ndarray = None

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise ValueError("counts must be 2-D")
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be nonnegative")
        if counts.sum() != self.n:
            raise ValueError("counts must sum to n")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "row_sums", counts.sum(axis=1))
        object.__setattr__(self, "col_sums", counts.sum(axis=0))


def _labels_of(c) -> np.ndarray:
    labels = getattr(c, "labels", c)
    return np.asarray(labels).reshape(-1)


def contingency(u, v) -> ContingencyTable:
    """Joint count table of two labelings.

    Negative labels mark excluded cells (masks); a position is dropped when
    either labeling excludes it.
    """
    ul = _labels_of(u)
    vl = _labels_of(v)
    if ul.shape != vl.shape:
        raise ValueError(f"label lengths differ: {ul.shape[0]} vs {vl.shape[0]}")
    keep = (ul >= 0) & (vl >= 0)
    ul, vl = ul[keep], vl[keep]
    if ul.size == 0:
        raise ValueError("no jointly labeled points")
    _, ui = np.unique(ul, return_inverse=True)
    vu, vi = np.unique(vl, return_inverse=True)
    l = vu.size
    k = int(ui.max()) + 1
    counts = np.bincount(ui * l + vi, minlength=k * l).reshape(k, l)
    return ContingencyTable(int(ul.size), counts)


def _entropy_from_counts(counts: np.ndarray, n: int) -> float:
    c = np.sort(counts[counts > 0]).astype(np.float64)
    if c.size == 0:
        return 0.0
    p = c / n
    return float(-(p * np.log(p)).sum())


def entropy(ct: ContingencyTable, which: str) -> float:
    """Marginal entropy of the row or column clustering, in nats."""
    if which == "rows":
        return _entropy_from_counts(ct.row_sums, ct.n)
    if which == "cols":
        return _entropy_from_counts(ct.col_sums, ct.n)
    raise ValueError(f"which must be 'rows' or 'cols', got {which!r}")


def joint_entropy(ct: ContingencyTable) -> float:
    return _entropy_from_counts(ct.counts.reshape(-1), ct.n)


def conditional_entropy(ct: ContingencyTable) -> float:
    """H(rows | cols)."""
    return joint_entropy(ct) - entropy(ct, "cols")


def mutual_information(ct: ContingencyTable) -> float:
    """I(rows, cols) in nats; clamped at 0 against rounding."""
    i = entropy(ct, "rows") + entropy(ct, "cols") - joint_entropy(ct)
    return max(i, 0.0)


def nmi(u, v) -> float:
    """Normalized mutual information, 2 I / (H(u) + H(v)), in [0, 1].

    When both clusterings are single-cluster the ratio is 0/0; the partitions
    are then identical, so the value is defined as 1.
    """
    ct = contingency(u, v)
    hu = entropy(ct, "rows")
    hv = entropy(ct, "cols")
    denom = hu + hv
    if denom == 0.0:
        return 1.0
    val = 2.0 * mutual_information(ct) / denom
    return min(max(val, 0.0), 1.0)
