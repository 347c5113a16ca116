"""Forward model: diffuser screens, free-space propagation, and speckle frames.

A point source is propagated to a random-height phase screen, masked by a
hard circular iris, and propagated to the camera plane; the intensity there
is the system PSF at one wavelength.  Camera frames are circular convolutions
of the object with the PSF (narrowband) or with a spectrally weighted PSF
mixture (broadband).  Phase delays scale as 1/wavelength, so PSFs at distant
wavelengths decorrelate while nearby ones stay nearly identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RangeError, ResolutionError
from .grids import ComplexField, ImageGrid

WAVELENGTH_MIN = 400e-9
WAVELENGTH_MAX = 1000e-9


@dataclass(frozen=True)
class OpticsConfig:
    object_distance: float  # object -> diffuser (m)
    camera_distance: float  # diffuser -> camera (m)
    iris_diameter: float  # m
    pixel_pitch: float  # m
    grid_size: int  # pixels per side
    refractive_index_minus_one: float

    def __post_init__(self):
        for name in ("object_distance", "camera_distance", "iris_diameter", "pixel_pitch"):
            if not getattr(self, name) > 0:
                raise RangeError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.grid_size < 64 or self.grid_size % 2 != 0:
            raise RangeError(f"grid_size must be even and >= 64, got {self.grid_size}")
        if self.iris_diameter > self.grid_size * self.pixel_pitch:
            raise RangeError(
                f"iris_diameter {self.iris_diameter} exceeds the simulated plane "
                f"({self.grid_size} x {self.pixel_pitch} m)"
            )
        if not self.refractive_index_minus_one > 0:
            raise RangeError(
                f"refractive_index_minus_one must be > 0, got {self.refractive_index_minus_one}"
            )


@dataclass(frozen=True)
class DiffuserScreen:
    """Random surface-height map; phase delay at wavelength L is
    2*pi*(n-1)*h(x,y)/L, evaluated fresh for every wavelength."""

    heights: ImageGrid
    correlation_length: float


@dataclass(frozen=True)
class SpectralWeights:
    wavelengths: np.ndarray  # m, strictly increasing
    weights: np.ndarray  # dimensionless, sums to 1

    def __post_init__(self):
        wl = np.ascontiguousarray(self.wavelengths, dtype=np.float64)
        wt = np.ascontiguousarray(self.weights, dtype=np.float64)
        if wl.ndim != 1 or wl.shape != wt.shape or wl.size == 0:
            raise RangeError("wavelengths and weights must be equal-length 1-D arrays")
        if wl.size > 1 and not np.all(np.diff(wl) > 0):
            raise RangeError("wavelengths must be strictly increasing")
        if np.any(wt < 0):
            raise RangeError("weights must be non-negative")
        if abs(float(wt.sum()) - 1.0) > 1e-12:
            raise RangeError(f"weights must sum to 1, got {wt.sum()!r}")
        wl.flags.writeable = False
        wt.flags.writeable = False
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "weights", wt)

    def __len__(self):
        return self.wavelengths.size


def make_diffuser(
    cfg: OpticsConfig, rms_height: float, correlation_length: float, seed: int
) -> DiffuserScreen:
    """Gaussian random height map with the requested RMS and correlation length.

    White Gaussian noise is low-passed with a Gaussian kernel whose width is
    set so the height autocorrelation falls to 1/e at ``correlation_length``,
    then rescaled to zero mean and the exact sample RMS.  At the sampling
    limit (correlation_length == pitch) no smoothing is applied and heights
    are per-pixel independent.
    """
    if not rms_height > 0:
        raise RangeError(f"rms_height must be > 0, got {rms_height}")
    pitch = cfg.pixel_pitch
    if correlation_length < pitch * (1 - 1e-12):
        raise ResolutionError(
            f"correlation_length {correlation_length} is below the pixel pitch {pitch}"
        )
    n = cfg.grid_size
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.standard_normal((n, n))

    if correlation_length > pitch * (1 + 1e-9):
        # periodic distance grid; kernel exp(-2 r^2 / l^2) gives the 1/e point
        # of the field autocorrelation at r = l
        coords = np.fft.fftfreq(n, d=1.0 / n) * pitch
        r2 = coords[:, None] ** 2 + coords[None, :] ** 2
        kernel = np.exp(-2.0 * r2 / correlation_length**2)
        noise = np.fft.ifft2(np.fft.fft2(noise) * np.fft.fft2(kernel)).real

    noise -= noise.mean()
    std = noise.std()
    if std == 0:
        raise ResolutionError("degenerate height map (zero variance)")
    heights = noise * (rms_height / std)
    return DiffuserScreen(ImageGrid(heights, pitch), correlation_length)


def angular_spectrum_propagate(
    field: ComplexField, distance: float, wavelength: float
) -> ComplexField:
    """Free-space propagation via the band-limited angular-spectrum transfer
    function.  Spatial frequencies beyond 1/wavelength (evanescent) are
    zeroed, so forward-then-back propagation is exactly inverse on the
    propagating band and energy there is conserved."""
    if not wavelength > 0:
        raise RangeError(f"wavelength must be > 0, got {wavelength}")
    if not np.isfinite(distance):
        raise RangeError(f"distance must be finite, got {distance}")
    if distance == 0:
        return field
    fy = np.fft.fftfreq(field.height, d=field.pitch)
    fx = np.fft.fftfreq(field.width, d=field.pitch)
    f2 = fy[:, None] ** 2 + fx[None, :] ** 2
    arg = 1.0 / wavelength**2 - f2
    propagating = arg > 0
    kz = np.sqrt(np.where(propagating, arg, 0.0))
    transfer = np.where(propagating, np.exp(2j * np.pi * distance * kz), 0.0)
    out = np.fft.ifft2(np.fft.fft2(field.data) * transfer)
    return ComplexField(out, field.pitch)


def _iris_mask(cfg: OpticsConfig) -> np.ndarray:
    n = cfg.grid_size
    coords = (np.arange(n) - n // 2) * cfg.pixel_pitch
    r2 = coords[:, None] ** 2 + coords[None, :] ** 2
    return r2 <= (cfg.iris_diameter / 2.0) ** 2


def psf_at_wavelength(
    cfg: OpticsConfig, screen: DiffuserScreen, wavelength: float
) -> ImageGrid:
    """Camera-plane intensity response to an on-axis unit point source,
    normalized to unit sum."""
    if not WAVELENGTH_MIN <= wavelength <= WAVELENGTH_MAX:
        raise RangeError(
            f"wavelength {wavelength} outside the sanity band "
            f"[{WAVELENGTH_MIN}, {WAVELENGTH_MAX}]"
        )
    n = cfg.grid_size
    if screen.heights.height != n or screen.heights.width != n:
        raise DimensionError(
            f"screen is {screen.heights.height}x{screen.heights.width}, "
            f"config expects {n}x{n}"
        )
    # Incident field of the on-axis point source after distance u, evaluated
    # analytically (a numerically propagated delta would wrap around the
    # periodic grid and contaminate the illumination).
    coords = (np.arange(n) - n // 2) * cfg.pixel_pitch
    r2 = coords[:, None] ** 2 + coords[None, :] ** 2
    path = np.sqrt(cfg.object_distance**2 + r2)
    incident = np.exp(2j * np.pi * path / wavelength)

    phase = 2.0 * np.pi * cfg.refractive_index_minus_one * screen.heights.data / wavelength
    at_screen = incident * np.exp(1j * phase) * _iris_mask(cfg)
    field = ComplexField(at_screen, cfg.pixel_pitch)
    field = angular_spectrum_propagate(field, cfg.camera_distance, wavelength)

    intensity = np.abs(field.data) ** 2
    total = intensity.sum()
    if total <= 0:
        raise RangeError("PSF carries no energy (iris or band limit removed everything)")
    return ImageGrid(intensity / total, cfg.pixel_pitch)


def monochromatic_speckle(obj: ImageGrid, psf: ImageGrid) -> ImageGrid:
    """Camera frame as the circular convolution of object and PSF."""
    if obj.data.shape != psf.data.shape:
        raise DimensionError(
            f"object {obj.data.shape} and psf {psf.data.shape} must share a grid"
        )
    out = np.fft.ifft2(np.fft.fft2(obj.data) * np.fft.fft2(psf.data)).real
    return ImageGrid(np.maximum(out, 0.0), obj.pitch)


def gaussian_weights(
    center: float, fwhm: float, lo: float, hi: float, step: float
) -> SpectralWeights:
    """Wavelength grid lo, lo+step, ... <= hi with normalized Gaussian weights."""
    if not fwhm > 0:
        raise RangeError(f"fwhm must be > 0, got {fwhm}")
    if lo == hi:
        return SpectralWeights(np.array([lo]), np.array([1.0]))
    if not lo < hi:
        raise RangeError(f"need lo < hi, got lo={lo}, hi={hi}")
    if not step > 0:
        raise RangeError(f"step must be > 0, got {step}")
    count = int(np.floor((hi - lo) / step * (1 + 1e-12))) + 1
    if count < 1:
        raise RangeError("empty wavelength sample set")
    wavelengths = lo + step * np.arange(count)
    weights = np.exp(-4.0 * np.log(2.0) * (wavelengths - center) ** 2 / fwhm**2)
    total = weights.sum()
    if total <= 0:
        raise RangeError("all spectral weights underflowed to zero")
    return SpectralWeights(wavelengths, weights / total)


def mixed_psf(cfg: OpticsConfig, screen: DiffuserScreen, weights: SpectralWeights) -> ImageGrid:
    """Spectrally weighted PSF mixture (one term per wavelength, shared screen)."""
    accum = np.zeros((cfg.grid_size, cfg.grid_size))
    for wavelength, weight in zip(weights.wavelengths, weights.weights):
        accum += weight * psf_at_wavelength(cfg, screen, wavelength).data
    return ImageGrid(accum, cfg.pixel_pitch)


def broadband_speckle(
    obj: ImageGrid,
    cfg: OpticsConfig,
    screen: DiffuserScreen,
    weights: SpectralWeights,
) -> ImageGrid:
    """Broadband camera frame: the weighted sum over wavelengths of the
    object convolved with that wavelength's PSF.  Convolution is linear, so
    the sum is computed once against the mixed PSF."""
    return monochromatic_speckle(obj, mixed_psf(cfg, screen, weights))
