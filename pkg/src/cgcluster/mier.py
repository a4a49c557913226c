"""Ensemble reduction over the mutual-information graph.

The ensemble of clusterings becomes a complete graph weighted by pairwise
NMI. Spectral clustering ratio-cuts the graph into components of
information-theoretically similar clusterings (component count from the
eigen-gap heuristic unless overridden), and each component is represented by
the member with the highest average NMI to the rest of its component.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._seeds import TAG_SPECTRAL, TAG_TIEBREAK, derive_seed
from .cgc import ResolutionPoint
from .cluster import AffinityMatrix, Clustering, eigen_gap_k, graph_laplacian, spectral_cluster
from .infotheory import nmi

__all__ = [
    "NmiGraph",
    "Representative",
    "ReducedEnsemble",
    "build_nmi_graph",
    "cut_graph",
    "component_scores",
    "select_representatives",
    "mier",
    "ratio_cut_value",
    "laplacian_spectrum",
]

EIGEN_GAP_K_CAP = 8


@dataclass(frozen=True)
class NmiGraph:
    """Complete graph over resolution points; weights are pairwise NMI."""

    nodes: tuple[ResolutionPoint, ...]
    weights: AffinityMatrix

    def __post_init__(self):
        if len(self.nodes) != self.weights.n:
            raise ValueError("one node per weight row required")
        if self.weights.w.size and self.weights.w.max() > 1.0:
            raise ValueError("NMI weights must lie in [0, 1]")

    def weight(self, a: ResolutionPoint, b: ResolutionPoint) -> float:
        ia = self.nodes.index(a)
        ib = self.nodes.index(b)
        return float(self.weights.w[ia, ib])


@dataclass(frozen=True)
class Representative:
    component: int
    point: ResolutionPoint
    clustering: Clustering
    score: float


@dataclass(frozen=True)
class ReducedEnsemble:
    """Cut components and one best-average-NMI representative per component."""

    components: tuple[tuple[ResolutionPoint, ...], ...]
    representatives: tuple[Representative, ...]


def build_nmi_graph(
    ensemble: dict[ResolutionPoint, Clustering], threads: int | None = None
) -> NmiGraph:
    """Pairwise NMI over the ensemble, as a complete weighted graph.

    All clusterings must label the same cell set (equal lengths and identical
    masked positions).
    """
    nodes = tuple(sorted(ensemble.keys()))
    if len(nodes) < 2:
        raise ValueError("need at least 2 clusterings")
    first = ensemble[nodes[0]].labels
    masked = first < 0
    for p in nodes[1:]:
        labels = ensemble[p].labels
        if labels.shape != first.shape:
            raise ValueError("clusterings must have equal label lengths")
        if not np.array_equal(labels < 0, masked):
            raise ValueError("clusterings must share the same masked cell set")
    n = len(nodes)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def value(pair):
        i, j = pair
        return nmi(ensemble[nodes[i]], ensemble[nodes[j]])

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(value, pairs))
    else:
        vals = [value(p) for p in pairs]
    w = np.zeros((n, n))
    for (i, j), v in zip(pairs, vals):
        w[i, j] = w[j, i] = v
    return NmiGraph(nodes, AffinityMatrix(n, w))


def cut_graph(
    g: NmiGraph, k_override: int | None = None, seed: int = 0
) -> tuple[tuple[ResolutionPoint, ...], ...]:
    """Partition the graph nodes by spectral clustering of the NMI weights.

    The component count comes from the eigen-gap heuristic over
    [2, min(n - 1, 8)] unless overridden. Two-node graphs skip the heuristic
    (its search range is empty) and split into the only possible 2-partition.
    Components are ordered by their smallest member.
    """
    n = len(g.nodes)
    if n < 2:
        raise ValueError("need at least 2 nodes to cut")
    if k_override is not None:
        if not 1 <= k_override <= n:
            raise ValueError(f"k_override must be in [1, {n}]")
        k = k_override
    elif n == 2:
        k = 2
    else:
        k = eigen_gap_k(graph_laplacian(g.weights), 2, min(n - 1, EIGEN_GAP_K_CAP))
    labels = spectral_cluster(g.weights, k, seed).labels
    groups: dict[int, list[ResolutionPoint]] = {}
    for node, lab in zip(g.nodes, labels):
        groups.setdefault(int(lab), []).append(node)
    return tuple(sorted((tuple(sorted(m)) for m in groups.values()), key=lambda c: c[0]))


def component_scores(g: NmiGraph, partition) -> dict[ResolutionPoint, float]:
    """Mean NMI of each node to the rest of its component; singletons score 1."""
    index = {p: i for i, p in enumerate(g.nodes)}
    _check_partition(g, partition)
    scores: dict[ResolutionPoint, float] = {}
    for comp in partition:
        if len(comp) == 1:
            scores[comp[0]] = 1.0
            continue
        for p in comp:
            others = [index[q] for q in comp if q != p]
            scores[p] = float(np.mean(g.weights.w[index[p], others]))
    return scores


def _check_partition(g: NmiGraph, partition) -> None:
    seen: list[ResolutionPoint] = [p for comp in partition for p in comp]
    if len(seen) != len(set(seen)) or set(seen) != set(g.nodes):
        raise ValueError("partition must cover every node exactly once")
    if any(len(comp) == 0 for comp in partition):
        raise ValueError("components must be nonempty")


def select_representatives(
    g: NmiGraph,
    partition,
    scores: dict[ResolutionPoint, float],
    ensemble: dict[ResolutionPoint, Clustering],
    tie_seed: int = 0,
) -> ReducedEnsemble:
    """Pick the maximal-score member of each component; ties break by seed."""
    if set(scores) != set(g.nodes):
        raise ValueError("scores must cover all nodes")
    rng = np.random.Generator(np.random.PCG64(tie_seed & (2**64 - 1)))
    reps = []
    for ci, comp in enumerate(partition):
        best = max(scores[p] for p in comp)
        argmax = [p for p in comp if scores[p] == best]
        pick = argmax[0] if len(argmax) == 1 else argmax[int(rng.integers(len(argmax)))]
        reps.append(Representative(ci, pick, ensemble[pick], best))
    return ReducedEnsemble(tuple(tuple(c) for c in partition), tuple(reps))


def mier(
    ensemble: dict[ResolutionPoint, Clustering],
    k_override: int | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> ReducedEnsemble:
    """Full reduction: NMI graph, cut, scores, one representative per component."""
    g = build_nmi_graph(ensemble, threads=threads)
    partition = cut_graph(g, k_override, derive_seed(seed, TAG_SPECTRAL))
    scores = component_scores(g, partition)
    return select_representatives(g, partition, scores, ensemble, derive_seed(seed, TAG_TIEBREAK))


def ratio_cut_value(w, groups) -> float:
    """Cut weight over component size, summed and halved.

    groups are index collections into the weight matrix; every index must
    appear exactly once.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    members = [i for grp in groups for i in grp]
    if sorted(members) != list(range(n)):
        raise ValueError("groups must partition the index set")
    total = 0.0
    for grp in groups:
        inside = np.zeros(n, dtype=bool)
        inside[list(grp)] = True
        total += w[np.ix_(inside, ~inside)].sum() / len(grp)
    return 0.5 * total


def laplacian_spectrum(g: NmiGraph) -> np.ndarray:
    """Ascending eigenvalues of the graph's unnormalized Laplacian."""
    return np.linalg.eigvalsh(graph_laplacian(g.weights))
