"""Coarse-grain clustering of one face of a 4-way tensor.

One resolution point means: split the tensor by variable, wavelet-transform
each slice down to the requested spatial/temporal levels, stack the
approximation coefficients along the (lat, lon) face, vectorize, K-means the
rows, and propagate the coarse labels back onto the original grid. Sweeping a
lattice of resolution points yields the clustering ensemble.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._seeds import derive_seed
from .cluster import Clustering, kmeans
from .infotheory import nmi
from .tensor import DenseTensor, slice_axis, stack_and_vectorize
from .wavelet import (
    HAAR,
    WaveletFamily,
    WaveletSpec,
    dwt_separable,
    multilevel_output_len,
    upsample_labels,
)

__all__ = [
    "ResolutionPoint",
    "CgcConfig",
    "SweepResult",
    "lattice_grid",
    "cgc_seed",
    "cgc",
    "cgc_sweep",
    "adjacent_pairs",
    "adjacent_nmi_report",
]


@dataclass(frozen=True, order=True)
class ResolutionPoint:
    """Wavelet levels (l1, l2) on the spatial axes and l3 on the time axis."""

    spatial_levels: tuple[int, int]
    temporal_level: int

    def __post_init__(self):
        l1, l2 = self.spatial_levels
        if l1 < 0 or l2 < 0 or self.temporal_level < 0:
            raise ValueError("wavelet levels must be nonnegative")
        object.__setattr__(self, "spatial_levels", (int(l1), int(l2)))
        object.__setattr__(self, "temporal_level", int(self.temporal_level))

    @classmethod
    def of(cls, spatial: int, temporal: int) -> "ResolutionPoint":
        """Uniform spatial coarse-graining: the same level on both axes."""
        return cls((spatial, spatial), temporal)

    def levels(self) -> tuple[int, int, int]:
        return (*self.spatial_levels, self.temporal_level)


def lattice_grid(spatial_levels, temporal_levels) -> list[ResolutionPoint]:
    """All combinations of uniform spatial levels x temporal levels."""
    return [
        ResolutionPoint.of(i, j)
        for i in spatial_levels
        for j in temporal_levels
    ]


@dataclass(frozen=True)
class CgcConfig:
    """Inputs of a coarse-grain clustering run besides the tensor itself."""

    variable_indices: tuple[int, ...]
    k: int
    seed: int = 0
    max_iter: int = 300
    standardize: bool = True
    spatial_families: tuple[WaveletFamily, WaveletFamily] = (HAAR, HAAR)
    temporal_family: WaveletFamily = HAAR

    def __post_init__(self):
        object.__setattr__(self, "variable_indices", tuple(int(v) for v in self.variable_indices))
        if not self.variable_indices:
            raise ValueError("variable_indices must be nonempty")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def cgc_seed(base_seed: int, res: ResolutionPoint, k: int) -> int:
    """Seed for one (resolution, k) job, independent of execution order."""
    l1, l2 = res.spatial_levels
    return derive_seed(base_seed, l1, l2, res.temporal_level, k)


def _standardize_values(arr: np.ndarray) -> np.ndarray:
    mean = arr.mean()
    std = arr.std()
    out = arr - mean
    if std > 0.0:
        out /= std
    return out


def _coarse_mask(mask: np.ndarray, levels: tuple[int, int]) -> np.ndarray:
    """A coarse cell is valid when any fine cell in its block is valid."""
    n1, n2 = mask.shape
    l1, l2 = levels
    c1 = multilevel_output_len(n1, 2, l1)
    c2 = multilevel_output_len(n2, 2, l2)
    rows = np.minimum(np.arange(n1) >> l1, c1 - 1)
    cols = np.minimum(np.arange(n2) >> l2, c2 - 1)
    flat = np.zeros(c1 * c2, dtype=bool)
    idx = (rows[:, None] * c2 + cols[None, :]).reshape(-1)
    np.logical_or.at(flat, idx, mask.reshape(-1))
    return flat.reshape(c1, c2)


def cgc(t: DenseTensor, res: ResolutionPoint, cfg: CgcConfig, mask=None) -> Clustering:
    """Cluster the (lat, lon) face of a 4-way tensor at one resolution.

    Returns labels of length N1*N2 over the original grid (masked cells get
    -1). Deterministic given (t, res, cfg, mask).
    """
    if t.ndim != 4:
        raise ValueError(f"expected a 4-way tensor, got {t.ndim}-way")
    n1, n2, _, n4 = t.dims
    for v in cfg.variable_indices:
        if not 0 <= v < n4:
            raise ValueError(f"variable index {v} out of range for axis of size {n4}")
    for fam in cfg.spatial_families:
        if fam.name != "haar":
            raise ValueError(
                "label propagation back to the fine grid is defined for haar "
                f"spatial wavelets only, got {fam.name!r}"
            )
    l1, l2 = res.spatial_levels
    l3 = res.temporal_level
    spec = WaveletSpec(
        (
            (cfg.spatial_families[0], l1),
            (cfg.spatial_families[1], l2),
            (cfg.temporal_family, l3),
        )
    )
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (n1, n2):
            raise ValueError(f"mask shape {mask.shape} does not match face {(n1, n2)}")
        if not mask.any():
            raise ValueError("mask excludes every cell")

    parts = []
    for v in cfg.variable_indices:
        sub = slice_axis(t, 3, v)
        values = sub.as_array()
        if cfg.standardize:
            values = _standardize_values(values)
        part = DenseTensor(sub.dims, np.ascontiguousarray(values).reshape(-1), sub.axis_names)
        parts.append(dwt_separable(part, spec))

    face = stack_and_vectorize(parts, (0, 1))
    c1, c2 = face.face_dims
    points = face.as_array()

    if mask is None:
        km = kmeans(points, cfg.k, cgc_seed(cfg.seed, res, cfg.k), cfg.max_iter)
        coarse = km.labels.reshape(c1, c2)
    else:
        valid = _coarse_mask(mask, (l1, l2))
        km = kmeans(points[valid.reshape(-1)], cfg.k, cgc_seed(cfg.seed, res, cfg.k), cfg.max_iter)
        coarse = np.full((c1, c2), -1, dtype=np.int64)
        coarse[valid] = km.labels

    fine = upsample_labels(coarse, (n1, n2), (l1, l2))
    if mask is not None:
        fine = fine.copy()
        fine[~mask] = -1
    return Clustering(fine.reshape(-1), cfg.k, km.inertia)


@dataclass(frozen=True)
class SweepResult:
    """Per-point clusterings plus per-point failures of a lattice sweep."""

    results: dict[ResolutionPoint, Clustering]
    errors: dict[ResolutionPoint, str]


def cgc_sweep(
    t: DenseTensor,
    lattice: list[ResolutionPoint],
    cfg: CgcConfig,
    mask=None,
    threads: int | None = None,
) -> SweepResult:
    """Run cgc at every lattice point; one failure does not abort the rest.

    Results are identical to serial per-point calls (seeds derive from the
    point, not from execution order).
    """
    points = list(lattice)
    if threads is None:
        import os

        threads = min(os.cpu_count() or 1, max(len(points), 1))
    results: dict[ResolutionPoint, Clustering] = {}
    errors: dict[ResolutionPoint, str] = {}

    def run(p: ResolutionPoint):
        return cgc(t, p, cfg, mask)

    if threads <= 1:
        outs = [(p, _call(run, p)) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [(p, pool.submit(run, p)) for p in points]
            outs = [(p, _result(f)) for p, f in futures]
    for p, (ok, payload) in outs:
        if ok:
            results[p] = payload
        else:
            errors[p] = payload
    return SweepResult(dict(sorted(results.items())), dict(sorted(errors.items())))


def _call(fn, p):
    try:
        return True, fn(p)
    except Exception as exc:  # noqa: BLE001 - isolate per-point failures
        return False, f"{type(exc).__name__}: {exc}"


def _result(future):
    try:
        return True, future.result()
    except Exception as exc:  # noqa: BLE001
        return False, f"{type(exc).__name__}: {exc}"


def _grid_axes(points) -> tuple[list[tuple[int, int]], list[int]]:
    s_vals = sorted({p.spatial_levels for p in points})
    t_vals = sorted({p.temporal_level for p in points})
    have = {(p.spatial_levels, p.temporal_level) for p in points}
    want = {(s, tt) for s in s_vals for tt in t_vals}
    if have != want or len(points) != len(have):
        raise ValueError("resolution points do not form a full spatial x temporal grid")
    return s_vals, t_vals


def adjacent_pairs(points) -> list[tuple[ResolutionPoint, ResolutionPoint]]:
    """Pairs one step apart on the sweep grid (same row or same column).

    Adjacency is positional on the sorted unique spatial and temporal values,
    which coincides with level adjacency for contiguous lattices.
    """
    points = list(points)
    s_vals, t_vals = _grid_axes(points)
    by_key = {(p.spatial_levels, p.temporal_level): p for p in points}
    pairs = []
    for si in range(len(s_vals) - 1):
        for tt in t_vals:
            pairs.append((by_key[(s_vals[si], tt)], by_key[(s_vals[si + 1], tt)]))
    for s in s_vals:
        for ti in range(len(t_vals) - 1):
            pairs.append((by_key[(s, t_vals[ti])], by_key[(s, t_vals[ti + 1])]))
    return sorted(pairs)


def adjacent_nmi_report(ensemble: dict[ResolutionPoint, Clustering]):
    """NMI between every adjacent pair of the ensemble grid."""
    pairs = adjacent_pairs(ensemble.keys())
    return [((a, b), nmi(ensemble[a], ensemble[b])) for a, b in pairs]
