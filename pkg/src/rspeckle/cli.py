"""Command-line pipeline: simulate, extract, reconstruct, metrics, pipeline.

Each stage reads and writes files only, so intermediate stages can be
deleted and re-run from saved frames with identical downstream outputs.
Worker parallelism never changes results: every random draw comes from a
seed derived per task, and reductions happen in fixed index order.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .config import config_items, load_config
from .correlation import peak_background_ratio, r_autocorrelation, true_autocorrelation
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DimensionError,
    FormatError,
    InputError,
    NumericalFailureError,
    RangeError,
    SelectionError,
    SpeckleError,
    TruncationError,
)
from .grids import ImageGrid, crop_center
from .io import read_image, read_pgm, write_image, write_pgm
from .manifest import RunManifest
from .metrics import aligned_ncc, speckle_contrast
from .optics import make_diffuser, mixed_psf, monochromatic_speckle
from .retrieval import best_of_restarts, centered_square_support, fourier_magnitude_from_ac
from .seeds import SeedSpec, derive_seed

EXIT_CODES = {
    ConfigurationError: 2,
    FormatError: 3,
    TruncationError: 3,
    DimensionError: 4,
    InputError: 5,
    RangeError: 5,
    SelectionError: 6,
    DegenerateInputError: 7,
    NumericalFailureError: 8,
}


def _read_any(path) -> ImageGrid:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path, pitch=1.0)
    return read_image(path)


def run_simulate(cfg, out_dir, workers: int = 1):
    """Generate cfg.frames uncorrelated frames (fresh diffuser per frame),
    the ground-truth object, and per-frame mixed-PSF diagnostics."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(__version__)
    manifest.add_config(config_items(cfg))
    manifest.add("backend", BACKEND)
    started = time.monotonic()

    obj = cfg.object_image()
    weights = cfg.spectrum.weights()
    spec = SeedSpec(cfg.seed)

    def one_frame(index):
        screen = make_diffuser(
            cfg.optics,
            cfg.diffuser.rms_height,
            cfg.diffuser.correlation_length,
            derive_seed(spec, "diffuser", index),
        )
        psf = mixed_psf(cfg.optics, screen, weights)
        return psf, monochromatic_speckle(obj, psf)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_frame, range(cfg.frames)))
    else:
        results = [one_frame(i) for i in range(cfg.frames)]

    object_path = out_dir / "object.spkimg"
    write_image(object_path, obj)
    manifest.add_output("object", object_path, out_dir)
    frame_paths = []
    for index, (psf, frame) in enumerate(results):
        frame_path = out_dir / f"frame_{index:03d}.spkimg"
        psf_path = out_dir / f"psf_{index:03d}.spkimg"
        write_image(frame_path, frame)
        write_image(psf_path, psf)
        manifest.add_output(f"frame_{index:03d}", frame_path, out_dir)
        manifest.add_output(f"psf_{index:03d}", psf_path, out_dir)
        frame_paths.append(frame_path)
    write_pgm(out_dir / "frame_000.pgm", results[0][1])

    manifest.add("frames.count", cfg.frames)
    manifest.add("time.simulate", f"{time.monotonic() - started:.3f}")
    manifest.write(out_dir / "manifest.txt")
    return frame_paths, object_path


def run_extract(frame_paths, method: str, cfg, out_dir):
    """Crop frames and run the chosen extractor; writes pattern + preview."""
    if not frame_paths:
        raise InputError("no frames to extract from")
    if method not in ("trueac", "raut"):
        raise ConfigurationError(f"unknown extraction method {method!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(__version__)
    manifest.add_config(config_items(cfg))
    manifest.add("backend", BACKEND)
    started = time.monotonic()

    frames = [crop_center(read_image(p), cfg.crop) for p in frame_paths]
    spec = cfg.subregions()
    stats = {}
    if method == "raut":
        pattern = r_autocorrelation(frames, spec, stats=stats)
    else:
        pattern = true_autocorrelation(frames, out_size=spec.window)
        stats = {"windows": 0, "redraws": 0, "window_size": spec.window}

    pattern_path = out_dir / f"{method}.spkimg"
    write_image(pattern_path, pattern)
    write_pgm(out_dir / f"{method}.pgm", pattern)
    manifest.add_output(method, pattern_path, out_dir)
    manifest.add("extract.method", method)
    manifest.add("extract.frames", len(frames))
    manifest.add("extract.windows_per_frame", cfg.windows_per_frame)
    manifest.add("extract.window_size", stats["window_size"])
    manifest.add("extract.windows_total", stats["windows"])
    manifest.add("extract.redraws", stats["redraws"])
    manifest.add("extract.seed", cfg.seed)
    manifest.add("time.extract", f"{time.monotonic() - started:.3f}")
    manifest.write(out_dir / f"{method}_manifest.txt")
    return pattern_path


def run_reconstruct(ac_path, cfg, out_dir, truth_path=None, workers: int = 1):
    """Phase-retrieve from a stored correlation pattern."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(__version__)
    manifest.add_config(config_items(cfg))
    started = time.monotonic()

    ac = read_image(ac_path)
    constraint = fourier_magnitude_from_ac(ac)
    if cfg.use_support:
        side = (cfg.subregions().window + 1) // 2
        constraint = dataclasses.replace(
            constraint, support=centered_square_support(ac.data.shape, side)
        )
    truth = None
    if truth_path is not None:
        truth = _read_any(truth_path)
        if truth.data.shape != ac.data.shape:
            truth = crop_center(truth, min(ac.height, ac.width))

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        selected, results = best_of_restarts(
            constraint,
            cfg.schedule,
            truth=truth,
            seed_spec=SeedSpec(cfg.seed),
            executor=executor,
        )
    finally:
        if executor is not None:
            executor.shutdown()

    stem = Path(ac_path).stem
    recon_path = out_dir / f"recon_{stem}.spkimg"
    write_image(recon_path, selected.image)
    write_pgm(out_dir / f"recon_{stem}.pgm", selected.image)
    manifest.add_output(f"recon_{stem}", recon_path, out_dir)
    for result in results:
        manifest.add(f"restart.{result.restart_index}.residual", repr(result.fourier_residual))
    manifest.add("selected.restart", selected.restart_index)
    manifest.add("selected.residual", repr(selected.fourier_residual))
    if truth is not None:
        manifest.add("selected.aligned_ncc", repr(aligned_ncc(truth, selected.image)))
    manifest.add("time.reconstruct", f"{time.monotonic() - started:.3f}")
    manifest.write(out_dir / f"recon_{stem}_manifest.txt")
    return recon_path


def run_pipeline(cfg, out_dir, workers: int = 1):
    """simulate -> extract (both methods) -> reconstruct (both) -> metrics."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(__version__)
    manifest.add_config(config_items(cfg))
    manifest.add("backend", BACKEND)

    stage = "simulate"
    try:
        frame_paths, object_path = run_simulate(cfg, out_dir / "frames", workers)
        stage = "extract"
        patterns = {
            method: run_extract(frame_paths, method, cfg, out_dir / "extract")
            for method in ("trueac", "raut")
        }
        stage = "reconstruct"
        recons = {
            method: run_reconstruct(
                path, cfg, out_dir / "recon", truth_path=object_path, workers=workers
            )
            for method, path in patterns.items()
        }
        stage = "metrics"
        truth = crop_center(read_image(object_path), cfg.subregions().window)
        lines = []
        for method in ("trueac", "raut"):
            pattern = read_image(patterns[method])
            radius = pattern.height // 4
            ratio = peak_background_ratio(pattern, radius)
            score = aligned_ncc(truth, read_image(recons[method]))
            lines.append(f"{method}.peak_background_ratio = {ratio.value!r}")
            lines.append(f"{method}.aligned_ncc = {score!r}")
            manifest.add(f"metric.{method}.peak_background_ratio", repr(ratio.value))
            manifest.add(f"metric.{method}.aligned_ncc", repr(score))
    except SpeckleError as err:
        raise type(err)(f"stage {stage}: {err}") from err

    table = "\n".join(lines) + "\n"
    (out_dir / "metrics.txt").write_text(table)
    for name in ("trueac", "raut"):
        manifest.add_output(f"pattern_{name}", patterns[name], out_dir)
        manifest.add_output(f"recon_{name}", recons[name], out_dir)
    manifest.add_output("object", object_path, out_dir)
    manifest.write(out_dir / "manifest.txt")
    sys.stdout.write(table)
    return out_dir / "manifest.txt"


def run_metrics(image_path, truth_path=None, feature_radius=None):
    img = _read_any(image_path)
    lines = []
    try:
        lines.append(f"speckle_contrast = {speckle_contrast(img)!r}")
    except DegenerateInputError:
        lines.append("speckle_contrast = nan")
    if feature_radius is not None:
        ratio = peak_background_ratio(img, feature_radius)
        lines.append(f"peak_background_ratio = {ratio.value!r}")
    if truth_path is not None:
        truth = _read_any(truth_path)
        if truth.data.shape != img.data.shape:
            truth = crop_center(truth, min(img.height, img.width))
        lines.append(f"aligned_ncc = {aligned_ncc(truth, img)!r}")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    return report


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rspeckle",
        description="Speckle imaging through thin scattering layers: "
        "simulation, shift-and-add autocorrelation, phase retrieval.",
    )
    parser.add_argument("--version", action="version", version=f"rspeckle {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="pipeline config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("simulate", help="generate speckle frames")
    common(p)

    p = sub.add_parser("extract", help="compute a correlation pattern from frames")
    common(p)
    p.add_argument("--method", choices=("trueac", "raut"), required=True)
    p.add_argument("--frames", nargs="+", required=True, help="frame files or a directory")

    p = sub.add_parser("reconstruct", help="phase-retrieve from a correlation pattern")
    common(p)
    p.add_argument("--ac", required=True, help="correlation pattern file")
    p.add_argument("--truth", default=None, help="ground-truth image for the oracle selector")

    p = sub.add_parser("metrics", help="report figures of merit for an image")
    p.add_argument("--image", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--feature-radius", type=int, default=None)

    p = sub.add_parser("pipeline", help="full simulate/extract/reconstruct run")
    common(p)
    return parser


def _resolve_frames(paths):
    out = []
    for entry in paths:
        path = Path(entry)
        if path.is_dir():
            out.extend(sorted(path.glob("frame_*.spkimg")))
        else:
            out.append(path)
    return out


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "metrics":
            run_metrics(args.image, args.truth, args.feature_radius)
            return 0

        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        cfg = load_config(args.config, overrides)
        out_dir = Path(cfg.output_dir)

        if args.command == "simulate":
            run_simulate(cfg, out_dir, args.workers)
        elif args.command == "extract":
            run_extract(_resolve_frames(args.frames), args.method, cfg, out_dir)
        elif args.command == "reconstruct":
            run_reconstruct(args.ac, cfg, out_dir, args.truth, args.workers)
        elif args.command == "pipeline":
            run_pipeline(cfg, out_dir, args.workers)
        return 0
    except SpeckleError as err:
        print(f"rspeckle {args.command}: {err}", file=sys.stderr)
        for cls, code in EXIT_CODES.items():
            if isinstance(err, cls):
                return code
        return 1
    except OSError as err:
        print(f"rspeckle {args.command}: {err}", file=sys.stderr)
        return 9


if __name__ == "__main__":
    sys.exit(main())
