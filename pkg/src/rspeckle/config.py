"""Pipeline configuration: flat "key = value" files with dotted sections.

Example::

    optics.object_distance = 0.60
    spectrum.fwhm = 104e-9
    frames = 10
    object = builtin:letter_T

Unknown keys are rejected so typos fail loudly.  Objects may be builtin
rasters (``builtin:<name>``) or PGM files at camera-pixel scale.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .correlation import SubRegionSpec
from .errors import ConfigurationError
from .grids import ImageGrid
from .io import read_pgm
from .optics import OpticsConfig, SpectralWeights, gaussian_weights
from .retrieval import HioSchedule


@dataclass(frozen=True)
class DiffuserParams:
    rms_height: float
    correlation_length: float


@dataclass(frozen=True)
class SpectrumParams:
    center: float
    fwhm: float
    lo: float
    hi: float
    step: float

    def weights(self) -> SpectralWeights:
        return gaussian_weights(self.center, self.fwhm, self.lo, self.hi, self.step)


@dataclass(frozen=True)
class PipelineConfig:
    optics: OpticsConfig
    diffuser: DiffuserParams
    spectrum: SpectrumParams
    frames: int
    window_size: int
    windows_per_frame: int
    max_redraws: int
    schedule: HioSchedule
    use_support: bool
    seed: int
    crop: int
    object_spec: str
    output_dir: str

    def subregions(self, seed: int | None = None) -> SubRegionSpec:
        return SubRegionSpec(
            window_size=self.window_size,
            windows_per_frame=self.windows_per_frame,
            seed=self.seed if seed is None else seed,
            max_redraws=self.max_redraws,
        )

    def object_image(self) -> ImageGrid:
        return load_object(self.object_spec, self.optics)


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(value)


_SCHEMA = {
    "optics.object_distance": float,
    "optics.camera_distance": float,
    "optics.iris_diameter": float,
    "optics.pixel_pitch": float,
    "optics.grid_size": int,
    "optics.refractive_index_minus_one": float,
    "diffuser.rms_height": float,
    "diffuser.correlation_length": float,
    "spectrum.center": float,
    "spectrum.fwhm": float,
    "spectrum.lo": float,
    "spectrum.hi": float,
    "spectrum.step": float,
    "frames": int,
    "subregions.window_size": int,
    "subregions.windows_per_frame": int,
    "subregions.max_redraws": int,
    "schedule.beta_start": float,
    "schedule.beta_end": float,
    "schedule.beta_step": float,
    "schedule.iters_per_beta": int,
    "schedule.er_iters": int,
    "schedule.restarts": int,
    "schedule.selector": str,
    "schedule.support": _parse_bool,
    "seed": int,
    "crop": int,
    "object": str,
    "output_dir": str,
}

_DEFAULTS = {
    "subregions.max_redraws": 100,
    "schedule.beta_start": 2.0,
    "schedule.beta_end": 0.0,
    "schedule.beta_step": 0.04,
    "schedule.iters_per_beta": 100,
    "schedule.er_iters": 100,
    "schedule.selector": "blind",
    "schedule.support": False,
    "object": "builtin:letter_T",
    "output_dir": "runs",
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = dict(_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        kind = _SCHEMA[key]
        try:
            values[key] = kind(value) if kind is not int else int(str(value), 0)
        except ValueError:
            raise ConfigurationError(
                f"{source}:{lineno}: {key} needs a {kind.__name__}, got {value!r}"
            ) from None
    return values


def build_config(values: dict, overrides: dict | None = None) -> PipelineConfig:
    values = dict(values)
    if overrides:
        values.update(overrides)
    missing = [k for k in _SCHEMA if k not in values]
    if missing:
        raise ConfigurationError(f"missing configuration keys: {', '.join(sorted(missing))}")

    optics = OpticsConfig(
        object_distance=values["optics.object_distance"],
        camera_distance=values["optics.camera_distance"],
        iris_diameter=values["optics.iris_diameter"],
        pixel_pitch=values["optics.pixel_pitch"],
        grid_size=values["optics.grid_size"],
        refractive_index_minus_one=values["optics.refractive_index_minus_one"],
    )
    schedule = HioSchedule(
        beta_start=values["schedule.beta_start"],
        beta_end=values["schedule.beta_end"],
        beta_step=values["schedule.beta_step"],
        iters_per_beta=values["schedule.iters_per_beta"],
        er_iters=values["schedule.er_iters"],
        restarts=values["schedule.restarts"],
        selector=values["schedule.selector"],
    )
    cfg = PipelineConfig(
        optics=optics,
        diffuser=DiffuserParams(
            rms_height=values["diffuser.rms_height"],
            correlation_length=values["diffuser.correlation_length"],
        ),
        spectrum=SpectrumParams(
            center=values["spectrum.center"],
            fwhm=values["spectrum.fwhm"],
            lo=values["spectrum.lo"],
            hi=values["spectrum.hi"],
            step=values["spectrum.step"],
        ),
        frames=values["frames"],
        window_size=values["subregions.window_size"],
        windows_per_frame=values["subregions.windows_per_frame"],
        max_redraws=values["subregions.max_redraws"],
        schedule=schedule,
        use_support=values["schedule.support"],
        seed=values["seed"],
        crop=values["crop"],
        object_spec=values["object"],
        output_dir=values["output_dir"],
    )
    if cfg.frames < 1:
        raise ConfigurationError(f"frames must be >= 1, got {cfg.frames}")
    if cfg.crop < 3 or cfg.crop > optics.grid_size:
        raise ConfigurationError(
            f"crop must be in [3, {optics.grid_size}], got {cfg.crop}"
        )
    if not 0 <= cfg.seed < 2**64:
        raise ConfigurationError(f"seed must fit in 64 bits, got {cfg.seed}")
    return cfg


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    return build_config(parse_config_text(Path(path).read_text(), source=str(path)), overrides)


def config_items(cfg: PipelineConfig):
    """Flat (key, value) pairs echoing the effective configuration."""
    o, d, s, h = cfg.optics, cfg.diffuser, cfg.spectrum, cfg.schedule
    return [
        ("optics.object_distance", o.object_distance),
        ("optics.camera_distance", o.camera_distance),
        ("optics.iris_diameter", o.iris_diameter),
        ("optics.pixel_pitch", o.pixel_pitch),
        ("optics.grid_size", o.grid_size),
        ("optics.refractive_index_minus_one", o.refractive_index_minus_one),
        ("diffuser.rms_height", d.rms_height),
        ("diffuser.correlation_length", d.correlation_length),
        ("spectrum.center", s.center),
        ("spectrum.fwhm", s.fwhm),
        ("spectrum.lo", s.lo),
        ("spectrum.hi", s.hi),
        ("spectrum.step", s.step),
        ("frames", cfg.frames),
        ("subregions.window_size", cfg.window_size),
        ("subregions.windows_per_frame", cfg.windows_per_frame),
        ("subregions.max_redraws", cfg.max_redraws),
        ("schedule.beta_start", h.beta_start),
        ("schedule.beta_end", h.beta_end),
        ("schedule.beta_step", h.beta_step),
        ("schedule.iters_per_beta", h.iters_per_beta),
        ("schedule.er_iters", h.er_iters),
        ("schedule.restarts", h.restarts),
        ("schedule.selector", h.selector),
        ("schedule.support", cfg.use_support),
        ("seed", cfg.seed),
        ("crop", cfg.crop),
        ("object", cfg.object_spec),
        ("output_dir", cfg.output_dir),
    ]


def _raster(grid_size: int) -> np.ndarray:
    return np.zeros((grid_size, grid_size))


def _two_point(grid_size: int, separation: int = 14) -> np.ndarray:
    obj = _raster(grid_size)
    mid = grid_size // 2
    obj[mid, mid - separation // 2] = 1.0
    obj[mid, mid + separation - separation // 2] = 1.0
    return obj


def _letter_t(grid_size: int, height: int = 36) -> np.ndarray:
    obj = _raster(grid_size)
    mid = grid_size // 2
    bar = max(3, height // 5)
    top = mid - height // 2
    obj[top : top + bar, mid - height // 2 : mid + height // 2] = 1.0
    obj[top : top + height, mid - bar // 2 : mid - bar // 2 + bar] = 1.0
    return obj


def _letter_l(grid_size: int, height: int = 36) -> np.ndarray:
    obj = _raster(grid_size)
    mid = grid_size // 2
    bar = max(3, height // 5)
    top = mid - height // 2
    obj[top : top + height, mid - height // 3 : mid - height // 3 + bar] = 1.0
    obj[top + height - bar : top + height, mid - height // 3 : mid + height // 3] = 1.0
    return obj


BUILTIN_OBJECTS = {
    "two_point": _two_point,
    "letter_T": _letter_t,
    "letter_L": _letter_l,
}


def load_object(spec: str, optics: OpticsConfig) -> ImageGrid:
    """Object raster at camera-pixel scale, from a builtin or a PGM file."""
    if spec.startswith("builtin:"):
        name = spec[len("builtin:") :]
        if name not in BUILTIN_OBJECTS:
            raise ConfigurationError(
                f"unknown builtin object {name!r}; have {sorted(BUILTIN_OBJECTS)}"
            )
        return ImageGrid(BUILTIN_OBJECTS[name](optics.grid_size), optics.pixel_pitch)
    img = read_pgm(spec, pitch=optics.pixel_pitch)
    if img.height != optics.grid_size or img.width != optics.grid_size:
        raise ConfigurationError(
            f"object {spec} is {img.height}x{img.width}, "
            f"expected {optics.grid_size}x{optics.grid_size}"
        )
    return img
