"""Synthetic gridded tensors with known ground-truth regions.

Stands in for real gridded climate archives at desk scale: the spatial
domain is split into contiguous seeded-Voronoi regions, each region/variable
pair gets its own mean and seasonal phase, and i.i.d. Gaussian noise is added
on top. Generation is bitwise deterministic per spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import DenseTensor

__all__ = ["SynthSpec", "generate"]

AXIS_NAMES = ("lat", "lon", "time", "variable")
SIGNAL_AMPLITUDE = 1.0


@dataclass(frozen=True)
class SynthSpec:
    dims: tuple[int, int, int, int]
    n_biomes: int
    seed: int = 0
    noise_sigma: float = 0.0
    seasonal_period: int = 12

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) != 4 or any(d < 1 for d in dims):
            raise ValueError("dims must be four positive integers")
        if not 1 <= self.n_biomes <= dims[0] * dims[1]:
            raise ValueError("n_biomes must be in [1, N1*N2]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.seasonal_period < 1:
            raise ValueError("seasonal_period must be positive")


def generate(spec: SynthSpec) -> tuple[DenseTensor, np.ndarray]:
    """Build the tensor and its ground-truth label grid.

    Each cell's time series is its region's sinusoid (distinct mean and phase
    per region/variable, unit amplitude) plus N(0, noise_sigma) noise.
    """
    n1, n2, n3, n4 = spec.dims
    b = spec.n_biomes
    rng = np.random.Generator(np.random.PCG64(spec.seed))

    flat_centers = rng.choice(n1 * n2, size=b, replace=False)
    ci, cj = np.divmod(flat_centers, n2)
    ii, jj = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    d2 = (ii[None] - ci[:, None, None]) ** 2 + (jj[None] - cj[:, None, None]) ** 2
    truth = np.argmin(d2, axis=0).astype(np.int64)

    means = rng.uniform(-2.0, 2.0, size=(b, n4))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(b, n4))
    t = np.arange(n3)
    angle = 2.0 * math.pi * t[None, None, :] / spec.seasonal_period + phases[:, :, None]
    signal = means[:, :, None] + SIGNAL_AMPLITUDE * np.sin(angle)  # (b, n4, n3)

    data = signal[truth]  # (n1, n2, n4, n3)
    data = np.ascontiguousarray(np.moveaxis(data, 2, 3))  # (n1, n2, n3, n4)
    if spec.noise_sigma > 0:
        data = data + spec.noise_sigma * rng.standard_normal(size=spec.dims)
    tensor = DenseTensor(spec.dims, np.ascontiguousarray(data).reshape(-1), AXIS_NAMES)
    return tensor, truth
