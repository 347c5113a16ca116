"""Iterative Fourier phase retrieval from autocorrelation-like patterns.

Pipeline: extract a Fourier-magnitude constraint from the (centered)
correlation pattern, then alternate hybrid input-output steps over a
decreasing beta ladder followed by error-reduction steps.  Many restarts
from random initial guesses are run and one result selected, either blindly
(smallest Fourier residual) or against a known ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .correlation import annulus_mask
from .errors import ConfigurationError, DegenerateInputError, NumericalFailureError, RangeError
from .grids import ImageGrid
from .metrics import aligned_ncc
from .seeds import SeedSpec, rng_for

# Reference defaults: 51 beta values x 100 HIO iterations, then 100 ER.
DEFAULT_BETA_START = 2.0
DEFAULT_BETA_END = 0.0
DEFAULT_BETA_STEP = 0.04
DEFAULT_ITERS_PER_BETA = 100
DEFAULT_ER_ITERS = 100


@dataclass(frozen=True)
class HioSchedule:
    beta_start: float = DEFAULT_BETA_START
    beta_end: float = DEFAULT_BETA_END
    beta_step: float = DEFAULT_BETA_STEP
    iters_per_beta: int = DEFAULT_ITERS_PER_BETA
    er_iters: int = DEFAULT_ER_ITERS
    restarts: int = 50
    selector: str = "blind"  # "blind" or "oracle"

    def __post_init__(self):
        if not self.beta_start > self.beta_end >= 0:
            raise RangeError(
                f"need beta_start > beta_end >= 0, got {self.beta_start}, {self.beta_end}"
            )
        if not self.beta_step > 0:
            raise RangeError(f"beta_step must be > 0, got {self.beta_step}")
        span = (self.beta_start - self.beta_end) / self.beta_step
        if abs(span - round(span)) > 1e-9:
            raise RangeError(
                f"beta range {self.beta_start}..{self.beta_end} is not an integer "
                f"number of steps of {self.beta_step}"
            )
        if self.iters_per_beta < 1 or self.er_iters < 0 or self.restarts < 1:
            raise RangeError("iteration and restart counts must be positive")
        if self.selector not in ("blind", "oracle"):
            raise ConfigurationError(f"unknown selector {self.selector!r}")

    def beta_values(self) -> np.ndarray:
        count = int(round((self.beta_start - self.beta_end) / self.beta_step)) + 1
        return self.beta_start - self.beta_step * np.arange(count)

    @property
    def total_hio_iters(self) -> int:
        return len(self.beta_values()) * self.iters_per_beta


@dataclass(frozen=True)
class MagnitudeConstraint:
    """Fourier-magnitude target, DC bin at index (0, 0) (unshifted FFT
    convention); support is an optional image-domain boolean mask."""

    magnitude: ImageGrid
    dc_masked: bool = False
    support: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(self.magnitude.data < 0):
            raise RangeError("Fourier magnitudes must be non-negative")


@dataclass(frozen=True)
class ReconstructionResult:
    image: ImageGrid
    fourier_residual: float
    restart_index: int
    selected: bool = False
    hio_iterations: int = 0
    er_iterations: int = 0
    er_residual_trace: tuple = ()


def fourier_magnitude_from_ac(
    ac: ImageGrid,
    feature_radius: Optional[int] = None,
    taper: bool = True,
    dc_mask: bool = True,
) -> MagnitudeConstraint:
    """Fourier magnitude of the object from its centered autocorrelation.

    Subtracts the annulus-median background, optionally tapers the outer 10%
    of the window with a raised cosine, transforms, clips the negative part
    of the (real) power spectrum and takes the square root.  With dc_mask the
    DC bin is replaced by the mean of its four spectral neighbors.
    """
    size = min(ac.height, ac.width)
    if feature_radius is None:
        feature_radius = size // 4
    background = float(np.median(ac.data[annulus_mask(ac.height, ac.width, feature_radius)]))
    x = ac.data - background
    if x.max() <= 0:
        raise DegenerateInputError("pattern is entirely at or below the background level")
    if taper:
        x = x * np.outer(_edge_taper(ac.height), _edge_taper(ac.width))
    spectrum = np.fft.fft2(np.fft.ifftshift(x)).real
    np.maximum(spectrum, 0.0, out=spectrum)
    if dc_mask:
        spectrum[0, 0] = (
            spectrum[0, 1] + spectrum[1, 0] + spectrum[0, -1] + spectrum[-1, 0]
        ) / 4.0
    return MagnitudeConstraint(ImageGrid(np.sqrt(spectrum), ac.pitch), dc_masked=dc_mask)


def centered_square_support(shape, side: int) -> np.ndarray:
    """Loose square support mask (the autocorrelation bounds the object to
    half the window, so side is typically (window + 1) // 2)."""
    mask = np.zeros(shape, dtype=bool)
    r0 = shape[0] // 2 - side // 2
    c0 = shape[1] // 2 - side // 2
    mask[r0 : r0 + side, c0 : c0 + side] = True
    return mask


def _edge_taper(n: int, fraction: float = 0.1) -> np.ndarray:
    """Raised-cosine ramp over the outer `fraction` of each end."""
    ramp = max(1, int(round(n * fraction)))
    window = np.ones(n)
    t = 0.5 * (1.0 - np.cos(np.pi * (np.arange(ramp) + 0.5) / ramp))
    window[:ramp] = t
    window[n - ramp :] = t[::-1]
    return window


def _project_fourier(estimate: np.ndarray, magnitude: np.ndarray) -> np.ndarray:
    """Replace the Fourier magnitude of `estimate`, keeping its phase."""
    spectrum = np.fft.fft2(estimate)
    modulus = np.abs(spectrum)
    phase = np.where(modulus > 0, spectrum / np.where(modulus > 0, modulus, 1.0), 1.0)
    return np.fft.ifft2(magnitude * phase).real


def _violations(projected: np.ndarray, support: Optional[np.ndarray]) -> np.ndarray:
    bad = projected < 0
    if support is not None:
        bad |= ~support
    return bad


def fourier_residual(image: np.ndarray, c: MagnitudeConstraint) -> float:
    """Relative L2 mismatch between |FFT(image)| and the target magnitude."""
    mag = c.magnitude.data
    diff = np.abs(np.fft.fft2(image)) - mag
    return float(np.linalg.norm(diff) / np.linalg.norm(mag))


def er_step(estimate: ImageGrid, c: MagnitudeConstraint) -> ImageGrid:
    """Error-reduction step: Fourier-magnitude projection, then zero every
    image-domain pixel violating the constraints."""
    projected = _project_fourier(estimate.data, c.magnitude.data)
    out = np.where(_violations(projected, c.support), 0.0, projected)
    return estimate.with_data(out)


def hio_step(
    estimate: ImageGrid, previous: ImageGrid, c: MagnitudeConstraint, beta: float
) -> ImageGrid:
    """Hybrid input-output step: satisfied pixels take the projected value,
    violating pixels take previous - beta * projected."""
    projected = _project_fourier(estimate.data, c.magnitude.data)
    bad = _violations(projected, c.support)
    out = np.where(bad, previous.data - beta * projected, projected)
    return estimate.with_data(out)


def run_schedule(
    c: MagnitudeConstraint, sched: HioSchedule, seed: int, restart_index: int = 0
) -> ReconstructionResult:
    """One full HIO + ER run from a random non-negative initial guess."""
    shape = c.magnitude.data.shape
    rng = np.random.Generator(np.random.PCG64(seed))
    current = ImageGrid(rng.random(shape), c.magnitude.pitch)

    hio_done = 0
    for beta in sched.beta_values():
        for _ in range(sched.iters_per_beta):
            current = hio_step(current, current, c, beta)
            hio_done += 1
            if not np.all(np.isfinite(current.data)):
                raise NumericalFailureError(
                    f"non-finite iterate at HIO iteration {hio_done}", iteration=hio_done
                )

    trace = []
    for i in range(sched.er_iters):
        current = er_step(current, c)
        if not np.all(np.isfinite(current.data)):
            raise NumericalFailureError(
                f"non-finite iterate at ER iteration {i + 1}", iteration=i + 1
            )
        trace.append(fourier_residual(current.data, c))

    final = ImageGrid(np.maximum(current.data, 0.0), c.magnitude.pitch)
    return ReconstructionResult(
        image=final,
        fourier_residual=fourier_residual(final.data, c),
        restart_index=restart_index,
        hio_iterations=hio_done,
        er_iterations=sched.er_iters,
        er_residual_trace=tuple(trace),
    )


def best_of_restarts(
    c: MagnitudeConstraint,
    sched: HioSchedule,
    truth: Optional[ImageGrid] = None,
    seed_spec: Optional[SeedSpec] = None,
    executor=None,
):
    """Run `sched.restarts` schedules with per-restart derived seeds and pick
    one result.  Returns (selected, all_results).

    blind selector: smallest Fourier residual.  oracle selector: largest
    alignment-invariant similarity to `truth` (required).
    """
    if sched.selector == "oracle" and truth is None:
        raise ConfigurationError("oracle selector requires a ground-truth image")
    if seed_spec is None:
        seed_spec = SeedSpec(0)
    from .seeds import derive_seed

    seeds = [derive_seed(seed_spec, "restart", i) for i in range(sched.restarts)]
    if executor is None:
        results = [run_schedule(c, sched, s, i) for i, s in enumerate(seeds)]
    else:
        futures = [
            executor.submit(run_schedule, c, sched, s, i) for i, s in enumerate(seeds)
        ]
        results = [f.result() for f in futures]

    if sched.selector == "oracle":
        scores = [aligned_ncc(truth, r.image) for r in results]
        best = int(np.argmax(scores))
    else:
        best = int(np.argmin([r.fourier_residual for r in results]))

    selected = ReconstructionResult(
        image=results[best].image,
        fourier_residual=results[best].fourier_residual,
        restart_index=best,
        selected=True,
        hio_iterations=results[best].hio_iterations,
        er_iterations=results[best].er_iterations,
        er_residual_trace=results[best].er_residual_trace,
    )
    results[best] = selected
    return selected, results
