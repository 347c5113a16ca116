"""Figures of merit: speckle contrast, alignment-invariant NCC, profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DimensionError
from .grids import ImageGrid


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    context: dict = field(default_factory=dict)

    def format_line(self) -> str:
        return f"{self.name}={self.value!r}"


def speckle_contrast(img: ImageGrid) -> float:
    """Standard deviation over mean of all pixels."""
    data = img.data
    if data.size < 2:
        raise DegenerateInputError("speckle_contrast needs at least 2 pixels")
    mean = float(data.mean())
    if mean <= 0:
        raise DegenerateInputError(f"speckle_contrast undefined for mean {mean}")
    return float(data.std()) / mean


def aligned_ncc(a: ImageGrid, b: ImageGrid) -> float:
    """Maximum zero-normalized cross-correlation over all circular shifts of
    b and of its 180-degree rotation (the two phase-retrieval ambiguities)."""
    if a.data.shape != b.data.shape:
        raise DimensionError(f"size mismatch {a.data.shape} vs {b.data.shape}")
    a0 = a.data - a.data.mean()
    b0 = b.data - b.data.mean()
    na = float(np.sqrt(np.sum(a0**2)))
    nb = float(np.sqrt(np.sum(b0**2)))
    if na == 0 or nb == 0:
        raise DegenerateInputError("aligned_ncc undefined for zero-variance input")
    fa = np.fft.fft2(a0)
    best = -np.inf
    for candidate in (b0, b0[::-1, ::-1]):
        cc = np.fft.ifft2(fa * np.conj(np.fft.fft2(candidate))).real
        best = max(best, float(cc.max()))
    return float(np.clip(best / (na * nb), -1.0, 1.0))


def line_profile(img: ImageGrid, column: int):
    """One column of samples, for plotting and report export."""
    if not 0 <= column < img.width:
        raise DimensionError(f"column {column} out of range for width {img.width}")
    return [float(v) for v in img.data[:, column]]
