"""Object-structure extraction from speckle frames.

Two extractors:

* true (ensemble) autocorrelation: per-frame mean-removed circular
  autocorrelation via the power spectrum, averaged over frames;
* R-autocorrelation: shift-and-add over randomly drawn sub-windows, each
  recentered once on its brightest pixel, pooled over all frames with equal
  weight.

The window argmax/accumulate inner loops run on the compiled backend when
available (see _backend).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DegenerateInputError, DimensionError, InputError, SelectionError
from .grids import ImageGrid
from .seeds import SeedSpec, rng_for


@dataclass(frozen=True)
class SubRegionSpec:
    """Sub-region drawing plan for one run.

    window_size is adjusted up to the nearest odd value so the center pixel
    is unambiguous (80 becomes 81); max_redraws bounds the per-window
    rejection loop for draws whose recentered window would cross the border.
    """

    window_size: int
    windows_per_frame: int
    seed: int
    max_redraws: int = 100

    def __post_init__(self):
        if self.window_size < 3:
            raise DimensionError(f"window_size must be >= 3, got {self.window_size}")
        if self.windows_per_frame < 1:
            raise DimensionError(
                f"windows_per_frame must be >= 1, got {self.windows_per_frame}"
            )
        if self.max_redraws < 0:
            raise DimensionError(f"max_redraws must be >= 0, got {self.max_redraws}")

    @property
    def window(self) -> int:
        """Effective (odd) window size."""
        return self.window_size if self.window_size % 2 == 1 else self.window_size + 1


@dataclass(frozen=True)
class WindowCenter:
    row: int
    col: int
    frame_index: int


@dataclass(frozen=True)
class RatioResult:
    """Peak-to-background ratio with its degenerate-case flags."""

    value: float
    unbounded: bool = False
    flat: bool = False


def _check_frames(frames):
    if not frames:
        raise InputError("need at least one frame")
    shape = frames[0].data.shape
    for i, frame in enumerate(frames):
        if frame.data.shape != shape:
            raise DimensionError(
                f"frame {i} is {frame.data.shape}, expected {shape} (mixed frame sizes)"
            )
    return shape


def true_autocorrelation(frames, out_size: int) -> ImageGrid:
    """Mean-removed circular autocorrelation averaged over frames.

    Each frame's autocorrelation is normalized by its zero-lag value; the
    result is cropped to out_size x out_size with the zero-lag peak at the
    center pixel (index out_size//2 on each axis).
    """
    height, width = _check_frames(frames)
    if out_size > height or out_size > width:
        raise DimensionError(
            f"out_size {out_size} exceeds frame dimensions {height}x{width}"
        )
    accum = np.zeros((height, width))
    for i, frame in enumerate(frames):
        x = frame.data - frame.data.mean()
        ac = np.fft.ifft2(np.abs(np.fft.fft2(x)) ** 2).real
        zero_lag = ac[0, 0]
        if zero_lag <= 0:
            raise DegenerateInputError(f"frame {i} is constant (zero variance)")
        accum += ac / zero_lag
    accum /= len(frames)
    centered = np.fft.fftshift(accum)
    r0 = height // 2 - out_size // 2
    c0 = width // 2 - out_size // 2
    return ImageGrid(centered[r0 : r0 + out_size, c0 : c0 + out_size], frames[0].pitch)


def _check_window(frame: ImageGrid, spec: SubRegionSpec) -> int:
    window = spec.window
    if window > min(frame.height, frame.width) - 2:
        raise DimensionError(
            f"window {window} too large for {frame.height}x{frame.width} frame "
            "(a recentered window could never fit)"
        )
    return window


def _select_center_arrays(frame: ImageGrid, spec: SubRegionSpec, frame_index: int):
    """Window centers as int64 arrays, in draw order.

    Draws are round-based: every still-pending window redraws once per round,
    so random-stream consumption is independent of the kernel backend and of
    any worker split.
    """
    window = _check_window(frame, spec)
    count = spec.windows_per_frame
    rng = rng_for(SeedSpec(spec.seed), "window", frame_index)
    high = np.array(
        [frame.height - window + 1, frame.width - window + 1], dtype=np.int64
    )
    data = frame.data
    centers_r = np.empty(count, dtype=np.int64)
    centers_c = np.empty(count, dtype=np.int64)
    pending = np.arange(count)
    draws = 0
    for _ in range(spec.max_redraws + 1):
        draws += pending.size
        tops = rng.integers(0, high, size=(pending.size, 2), dtype=np.int64)
        rows, cols, valid = kernels.select_centers(
            data, np.ascontiguousarray(tops[:, 0]), np.ascontiguousarray(tops[:, 1]), window
        )
        ok = valid.astype(bool)
        accepted = pending[ok]
        centers_r[accepted] = rows[ok]
        centers_c[accepted] = cols[ok]
        pending = pending[~ok]
        if pending.size == 0:
            break
    if pending.size:
        raise SelectionError(
            f"placed {count - pending.size} of {count} windows before exhausting "
            f"{spec.max_redraws} redraws",
            placed=count - pending.size,
            requested=count,
        )
    return centers_r, centers_c, window, draws - count


def select_subregions(frame: ImageGrid, spec: SubRegionSpec, frame_index: int = 0):
    """Randomly drawn windows recentered once on their brightest pixel."""
    centers_r, centers_c, _, _ = _select_center_arrays(frame, spec, frame_index)
    return [
        WindowCenter(int(r), int(c), frame_index)
        for r, c in zip(centers_r, centers_c)
    ]


def r_autocorrelation(frames, spec: SubRegionSpec, stats: dict | None = None) -> ImageGrid:
    """Shift-and-add average of recentered windows pooled over all frames.

    When a `stats` dict is passed it receives the total window and redraw
    counts for run manifests.
    """
    _check_frames(frames)
    window = _check_window(frames[0], spec)
    accum = np.zeros((window, window))
    total = 0
    redraws = 0
    for frame_index, frame in enumerate(frames):
        centers_r, centers_c, _, frame_redraws = _select_center_arrays(
            frame, spec, frame_index
        )
        kernels.accumulate_windows(frame.data, centers_r, centers_c, window, accum)
        total += centers_r.size
        redraws += frame_redraws
    if stats is not None:
        stats.update({"windows": total, "redraws": redraws, "window_size": window})
    return ImageGrid(accum / total, frames[0].pitch)


def annulus_mask(height: int, width: int, feature_radius: int) -> np.ndarray:
    """Pixels farther than feature_radius (euclidean) from the center pixel."""
    rows = np.arange(height) - height // 2
    cols = np.arange(width) - width // 2
    r2 = rows[:, None] ** 2 + cols[None, :] ** 2
    return r2 > feature_radius**2


def peak_background_ratio(ac: ImageGrid, feature_radius: int) -> RatioResult:
    """(center - annulus median) / (annulus max - annulus median).

    A constant annulus with an elevated center reports the unbounded flag;
    a fully flat pattern reports 0 with the flat flag.
    """
    if feature_radius < 0 or feature_radius >= min(ac.height, ac.width) / 2:
        raise DimensionError(
            f"feature_radius {feature_radius} must be < half of the pattern size"
        )
    mask = annulus_mask(ac.height, ac.width, feature_radius)
    annulus = ac.data[mask]
    center = float(ac.data[ac.height // 2, ac.width // 2])
    median = float(np.median(annulus))
    denom = float(annulus.max()) - median
    numer = center - median
    if denom <= 0:
        if numer > 0:
            return RatioResult(float("inf"), unbounded=True)
        return RatioResult(0.0, flat=True)
    return RatioResult(numer / denom)
