"""Shared fixtures: small optical configurations sized for fast tests."""

import numpy as np
import pytest

from rspeckle import OpticsConfig


@pytest.fixture
def small_optics():
    """128-pixel grid, fast enough for per-test diffuser and PSF work."""
    return OpticsConfig(
        object_distance=0.60,
        camera_distance=0.05,
        iris_diameter=0.8e-3,
        pixel_pitch=8.0e-6,
        grid_size=128,
        refractive_index_minus_one=0.52,
    )


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))
