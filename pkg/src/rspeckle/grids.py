"""Image and field containers with physical pixel pitch.

All numeric work in the toolkit runs on 64-bit floats (or complex128); frames
imported from integer formats are promoted on read.  Containers are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class ImageGrid:
    """2-D real-valued map (camera frame, PSF, object, or correlation pattern).

    ``data`` is a row-major (height, width) float64 array; ``pitch`` is the
    physical pixel size in meters.
    """

    data: np.ndarray
    pitch: float

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"ImageGrid needs a 2-D array, got shape {arr.shape}")
        if not self.pitch > 0:
            raise DimensionError(f"pitch must be > 0, got {self.pitch}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ImageGrid samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def with_data(self, data: np.ndarray) -> "ImageGrid":
        """New grid with the same pitch and different samples."""
        return ImageGrid(data, self.pitch)


@dataclass(frozen=True)
class ComplexField:
    """2-D complex optical field used during propagation."""

    data: np.ndarray
    pitch: float

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"ComplexField needs a 2-D array, got shape {arr.shape}")
        if not self.pitch > 0:
            raise DimensionError(f"pitch must be > 0, got {self.pitch}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ComplexField samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def energy(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))


def crop_center(img: ImageGrid, size: int) -> ImageGrid:
    """Centered ``size``x``size`` crop.

    For even differences the extra row/column is dropped from the high-index
    side, so cropping twice with the same size is a no-op.
    """
    if size < 1:
        raise DimensionError(f"crop size must be >= 1, got {size}")
    if size > img.height or size > img.width:
        raise DimensionError(
            f"crop size {size} exceeds frame dimensions {img.height}x{img.width}"
        )
    r0 = (img.height - size) // 2
    c0 = (img.width - size) // 2
    return ImageGrid(img.data[r0 : r0 + size, c0 : c0 + size], img.pitch)
