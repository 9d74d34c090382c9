"""Dense hyperspectral cube container and band-matrix algebra.

A cube holds C spectral bands over a W x H pixel grid.  All numeric work
happens on 64-bit floats; band matrices are plain 2-D numpy arrays with one
row per band and one column per pixel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class HsiCube:
    """Immutable 3-D image tensor, shape (bands, width, height).

    Values are dimensionless reflectances, normally in [0, 1].  The first
    spatial axis corresponds to image rows when reading from / writing to
    image files.  Treat instances as read-only; operations return new cubes.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise DimensionMismatchError(
                f"cube data must be 3-D (bands, width, height), got ndim={arr.ndim}"
            )
        if min(arr.shape) < 1:
            raise DimensionMismatchError(f"cube dims must all be >= 1, got {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def validate(self, check_range: bool = True) -> None:
        """Raise if values are non-finite, or outside [0, 1] when check_range."""
        if not np.all(np.isfinite(self.data)):
            raise ValueError("cube contains non-finite values")
        if check_range and (self.data.min() < 0.0 or self.data.max() > 1.0):
            raise ValueError(
                f"cube values outside [0, 1]: min={self.data.min()}, max={self.data.max()}"
            )


def mode1_unfold(cube: HsiCube) -> np.ndarray:
    """Flatten a cube to a (C, W*H) band matrix.

    Column order is fixed: pixel (w, h) maps to column p = w*H + h, i.e.
    row-major over the spatial grid.  Every spatial operator in the package
    assumes this ordering.
    """
    c, w, h = cube.dims
    return cube.data.reshape(c, w * h)


def mode1_fold(mat: np.ndarray, dims: tuple[int, int, int]) -> HsiCube:
    """Inverse of mode1_unfold under the same pixel ordering."""
    c, w, h = dims
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != c or mat.shape[1] != w * h:
        raise DimensionMismatchError(
            f"expected a {c}x{w * h} matrix for dims {dims}, got shape {mat.shape}"
        )
    return HsiCube(mat.reshape(c, w, h))


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two same-shape matrices (no broadcasting)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"hadamard operands must have identical shapes, got {a.shape} vs {b.shape}"
        )
    return a * b
