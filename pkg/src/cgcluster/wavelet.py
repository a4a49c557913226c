"""Orthonormal wavelet filter banks (Haar, Daubechies-2) and separable DWT.

Only approximation coefficients survive a multilevel decomposition here; the
detail coefficients exist for single-level calls and for the test-only
``wavedec1d``. Coarse-graining a tensor means running the multilevel 1-D pass
along each axis in turn.

Boundary and length convention (used everywhere, including label
propagation): signals are extended half-point symmetrically (the edge sample
repeats: ... x1 x0 | x0 x1 ... xN-1 | xN-1 xN-2 ...), correlated with the
decomposition filters, and downsampled by two keeping the odd phase. One
level maps a length-n axis to (n + taps - 1) // 2 samples, which is
ceil(n / 2) for Haar and ceil((n + taps - 2) / 2) for longer filters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .tensor import DenseTensor

__all__ = [
    "WaveletFamily",
    "WaveletSpec",
    "HAAR",
    "DB2",
    "family_by_name",
    "dwt_output_len",
    "multilevel_output_len",
    "dwt1d",
    "wavedec1d",
    "dwt1d_multilevel",
    "dwt_separable",
    "upsample_labels",
]

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class WaveletFamily:
    """Decomposition filter pair. highpass is the quadrature mirror of lowpass."""

    name: str
    lowpass: tuple[float, ...]
    highpass: tuple[float, ...]

    @property
    def taps(self) -> int:
        return len(self.lowpass)


def _qmf(lowpass: tuple[float, ...]) -> tuple[float, ...]:
    taps = len(lowpass)
    return tuple(((-1.0) ** m) * lowpass[taps - 1 - m] for m in range(taps))


_HAAR_LO = (1.0 / _SQRT2, 1.0 / _SQRT2)
_DB2_LO = (
    (1.0 + _SQRT3) / (4.0 * _SQRT2),
    (3.0 + _SQRT3) / (4.0 * _SQRT2),
    (3.0 - _SQRT3) / (4.0 * _SQRT2),
    (1.0 - _SQRT3) / (4.0 * _SQRT2),
)

HAAR = WaveletFamily("haar", _HAAR_LO, _qmf(_HAAR_LO))
DB2 = WaveletFamily("db2", _DB2_LO, _qmf(_DB2_LO))

_FAMILIES = {"haar": HAAR, "db2": DB2}


def family_by_name(name: str) -> WaveletFamily:
    try:
        return _FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown wavelet family {name!r}; choose from {sorted(_FAMILIES)}")


def dwt_output_len(n: int, taps: int) -> int:
    """Length of one analysis level applied to a length-n signal."""
    return (n + taps - 1) // 2


def multilevel_output_len(n: int, taps: int, levels: int) -> int:
    for _ in range(levels):
        n = dwt_output_len(n, taps)
    return n


@dataclass(frozen=True)
class WaveletSpec:
    """Per-axis (family, levels) plan for a separable decomposition."""

    per_axis: tuple[tuple[WaveletFamily, int], ...]

    def __post_init__(self):
        for fam, lev in self.per_axis:
            if lev < 0:
                raise ValueError("levels must be nonnegative")

    def validate_for_dims(self, dims: tuple[int, ...]) -> None:
        if len(self.per_axis) != len(dims):
            raise ValueError(
                f"spec has {len(self.per_axis)} axis entries for a {len(dims)}-way tensor"
            )
        for ax, ((fam, lev), n) in enumerate(zip(self.per_axis, dims)):
            if lev and (1 << lev) > n:
                raise ValueError(
                    f"axis {ax}: 2^{lev} exceeds axis length {n}"
                )


def dwt1d(signal, family: WaveletFamily):
    """Single-level analysis of a 1-D signal: (approx, detail)."""
    x = np.asarray(signal, dtype=np.float64).reshape(1, -1)
    if x.shape[1] < family.taps:
        raise ValueError(
            f"signal length {x.shape[1]} shorter than filter length {family.taps}"
        )
    a, d = backend.batch_dwt_pass(x, family.lowpass, family.highpass)
    return a[0], d[0]


def wavedec1d(signal, family: WaveletFamily, levels: int):
    """Full decomposition keeping details: (approx, [details coarsest-first]).

    Exists for inspection and tests; the pipeline itself discards details.
    """
    x = np.asarray(signal, dtype=np.float64)
    _check_levels(x.shape[0], levels)
    details = []
    a = x
    for _ in range(levels):
        a, d = dwt1d(a, family)
        details.insert(0, d)
    return a, details


def dwt1d_multilevel(signal, family: WaveletFamily, levels: int) -> np.ndarray:
    """Apply ``levels`` analysis passes, keeping only the approximation."""
    a, _ = wavedec1d(signal, family, levels)
    return a


def _check_levels(n: int, levels: int) -> None:
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    if levels and (1 << levels) > n:
        raise ValueError(f"2^{levels} exceeds signal length {n}")


def _multilevel_along_axis(arr: np.ndarray, axis: int, family: WaveletFamily, levels: int):
    if levels == 0:
        return arr
    moved = np.moveaxis(arr, axis, -1)
    lead = moved.shape[:-1]
    flat = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    for _ in range(levels):
        flat, _ = backend.batch_dwt_pass(flat, family.lowpass, family.highpass)
        flat = np.ascontiguousarray(flat)
    out = flat.reshape(lead + (flat.shape[1],))
    return np.moveaxis(out, -1, axis)


def dwt_separable(t: DenseTensor, spec: WaveletSpec) -> DenseTensor:
    """Coarse-grain a tensor by running the multilevel DWT along every axis."""
    spec.validate_for_dims(t.dims)
    arr = t.as_array()
    for axis, (family, levels) in enumerate(spec.per_axis):
        arr = _multilevel_along_axis(arr, axis, family, levels)
    return DenseTensor(arr.shape, np.ascontiguousarray(arr).reshape(-1), t.axis_names)


def upsample_labels(coarse_labels, fine_dims: tuple[int, int], levels: tuple[int, int]):
    """Propagate coarse face labels back to the fine grid.

    Each fine cell takes the label of the coarse cell whose scaling-filter
    support covers it with maximal weight. The Haar scaling filter weights
    its whole support equally, so this is block replication: fine cell (i, j)
    maps to coarse cell (i >> l1, j >> l2), clipped at the grid edge.
    """
    coarse = np.asarray(coarse_labels)
    if coarse.ndim != 2:
        raise ValueError("coarse_labels must be a 2-D grid")
    n1, n2 = int(fine_dims[0]), int(fine_dims[1])
    l1, l2 = int(levels[0]), int(levels[1])
    want = (multilevel_output_len(n1, 2, l1), multilevel_output_len(n2, 2, l2))
    if coarse.shape != want:
        raise ValueError(
            f"coarse grid {coarse.shape} inconsistent with fine dims {(n1, n2)} "
            f"at levels {(l1, l2)}; expected {want}"
        )
    rows = np.minimum(np.arange(n1) >> l1, coarse.shape[0] - 1)
    cols = np.minimum(np.arange(n2) >> l2, coarse.shape[1] - 1)
    return coarse[np.ix_(rows, cols)]
