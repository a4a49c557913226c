"""Dense d-way tensors with named axes, and face vectorization.

Storage is a flat row-major float64 array plus explicit dims, so tensors are
trivially serializable and cheap to share read-only between sweep workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["DenseTensor", "FaceMatrix", "slice_axis", "stack_and_vectorize"]


@dataclass(frozen=True)
class DenseTensor:
    """Immutable d-way array of float64 values with named axes."""

    dims: tuple[int, ...]
    data: np.ndarray
    axis_names: tuple[str, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1 or any(n < 1 for n in dims):
            raise ValueError(f"dims must be positive, got {dims}")
        data = np.ascontiguousarray(self.data, dtype=np.float64).reshape(-1)
        if data.size != math.prod(dims):
            raise ValueError(
                f"data length {data.size} != product of dims {math.prod(dims)}"
            )
        names = tuple(str(s) for s in self.axis_names)
        if len(names) != len(dims):
            raise ValueError("axis_names must have one entry per axis")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "axis_names", names)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    def as_array(self) -> np.ndarray:
        """Read-only view shaped to dims."""
        return self.data.reshape(self.dims)

    @classmethod
    def from_array(cls, arr, axis_names=None) -> "DenseTensor":
        arr = np.asarray(arr, dtype=np.float64)
        if axis_names is None:
            axis_names = tuple(f"axis{i}" for i in range(arr.ndim))
        return cls(arr.shape, arr.reshape(-1).copy(), tuple(axis_names))


@dataclass(frozen=True)
class FaceMatrix:
    """Tensor entries vectorized along one face: one row per face cell."""

    rows: int
    cols: int
    data: np.ndarray
    face_dims: tuple[int, int]

    def __post_init__(self):
        face_dims = (int(self.face_dims[0]), int(self.face_dims[1]))
        object.__setattr__(self, "face_dims", face_dims)
        if self.rows != face_dims[0] * face_dims[1]:
            raise ValueError("rows must equal product of face_dims")
        data = np.ascontiguousarray(self.data, dtype=np.float64).reshape(-1)
        if data.size != self.rows * self.cols:
            raise ValueError("data length must equal rows*cols")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def as_array(self) -> np.ndarray:
        return self.data.reshape(self.rows, self.cols)


def slice_axis(t: DenseTensor, axis: int, value: int) -> DenseTensor:
    """Fix one index of ``t``, returning the (d-1)-way sub-tensor."""
    if not 0 <= axis < t.ndim:
        raise IndexError(f"axis {axis} out of range for {t.ndim}-way tensor")
    if not 0 <= value < t.dims[axis]:
        raise IndexError(f"index {value} out of range for axis {axis} of size {t.dims[axis]}")
    sub = np.take(t.as_array(), value, axis=axis)
    names = t.axis_names[:axis] + t.axis_names[axis + 1 :]
    return DenseTensor(sub.shape, np.ascontiguousarray(sub).reshape(-1), names)


def stack_and_vectorize(parts: list[DenseTensor], face_axes: tuple[int, int]) -> FaceMatrix:
    """Stack same-shaped tensors and vectorize along a two-axis face.

    Row r corresponds to face cell (i, j) in row-major order over
    (face_axes[0], face_axes[1]); the row is the concatenation, part by part,
    of every remaining coordinate's value at that cell (remaining coordinates
    in row-major order).
    """
    if not parts:
        raise ValueError("need at least one tensor part")
    a0, a1 = face_axes
    d = parts[0].ndim
    if a0 == a1 or not (0 <= a0 < d and 0 <= a1 < d):
        raise IndexError(f"face_axes {face_axes} invalid for {d}-way tensor")
    dims = parts[0].dims
    for p in parts[1:]:
        if p.dims != dims:
            raise ValueError(f"part dims {p.dims} do not match {dims}")
    rows = dims[a0] * dims[a1]
    blocks = []
    for p in parts:
        arr = np.moveaxis(p.as_array(), (a0, a1), (0, 1))
        blocks.append(arr.reshape(rows, -1))
    flat = np.ascontiguousarray(np.hstack(blocks))
    return FaceMatrix(rows, flat.shape[1], flat.reshape(-1), (dims[a0], dims[a1]))
