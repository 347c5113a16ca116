"""Imaging through thin scattering layers: speckle simulation, shift-and-add
R-autocorrelation extraction, and iterative Fourier phase retrieval."""

__version__ = "0.1.0"

from ._backend import BACKEND, available_backends
from .correlation import (
    RatioResult,
    SubRegionSpec,
    WindowCenter,
    peak_background_ratio,
    r_autocorrelation,
    select_subregions,
    true_autocorrelation,
)
from .grids import ComplexField, ImageGrid, crop_center
from .io import read_image, read_pgm, write_image, write_pgm
from .metrics import MetricReport, aligned_ncc, line_profile, speckle_contrast
from .optics import (
    DiffuserScreen,
    OpticsConfig,
    SpectralWeights,
    angular_spectrum_propagate,
    broadband_speckle,
    gaussian_weights,
    make_diffuser,
    mixed_psf,
    monochromatic_speckle,
    psf_at_wavelength,
)
from .retrieval import (
    HioSchedule,
    MagnitudeConstraint,
    ReconstructionResult,
    best_of_restarts,
    er_step,
    fourier_magnitude_from_ac,
    hio_step,
    run_schedule,
)
from .seeds import SeedSpec, derive_seed, rng_for
