import numpy as np
import pytest

from rspeckle.cli import main
from rspeckle.io import read_image, write_image
from rspeckle.grids import ImageGrid
from rspeckle.manifest import read_manifest, sha256_file

TINY = """
optics.object_distance = 0.60
optics.camera_distance = 0.05
optics.iris_diameter = 0.8e-3
optics.pixel_pitch = 8.0e-6
optics.grid_size = 128
optics.refractive_index_minus_one = 0.52
diffuser.rms_height = 6.0e-6
diffuser.correlation_length = 64e-6
spectrum.center = 633e-9
spectrum.fwhm = 10e-9
spectrum.lo = 628e-9
spectrum.hi = 638e-9
spectrum.step = 5e-9
frames = 2
crop = 100
subregions.window_size = 20
subregions.windows_per_frame = 100
schedule.beta_step = 0.5
schedule.iters_per_beta = 5
schedule.er_iters = 5
schedule.restarts = 2
schedule.support = true
seed = 7
object = builtin:two_point
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


class TestStages:
    def test_simulate_outputs(self, tiny_config, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(tiny_config), "--out", str(out)]) == 0
        for name in ("object.spkimg", "frame_000.spkimg", "frame_001.spkimg",
                     "psf_000.spkimg", "frame_000.pgm", "manifest.txt"):
            assert (out / name).exists()
        frame = read_image(out / "frame_000.spkimg")
        assert frame.data.shape == (128, 128)
        assert frame.data.min() >= 0.0

    def test_stagewise_matches_recorded_hashes(self, tiny_config, tmp_path):
        sim = tmp_path / "sim"
        main(["simulate", "--config", str(tiny_config), "--out", str(sim)])
        ext = tmp_path / "ext"
        code = main([
            "extract", "--config", str(tiny_config), "--out", str(ext),
            "--method", "raut", "--frames", str(sim),
        ])
        assert code == 0
        manifest = read_manifest(ext / "raut_manifest.txt")
        assert manifest["extract.windows_total"] == "200"
        assert manifest["hash.raut"] == sha256_file(ext / "raut.spkimg")

        rec = tmp_path / "rec"
        code = main([
            "reconstruct", "--config", str(tiny_config), "--out", str(rec),
            "--ac", str(ext / "raut.spkimg"),
        ])
        assert code == 0
        recon = read_image(rec / "recon_raut.spkimg")
        assert recon.data.shape == (21, 21)
        manifest = read_manifest(rec / "recon_raut_manifest.txt")
        assert "restart.0.residual" in manifest
        assert "restart.1.residual" in manifest

    def test_metrics_command(self, tmp_path, capsys):
        path = tmp_path / "img.spkimg"
        write_image(path, ImageGrid(np.random.default_rng(0).exponential(size=(64, 64)), 1.0))
        assert main(["metrics", "--image", str(path), "--feature-radius", "10"]) == 0
        captured = capsys.readouterr().out
        assert "speckle_contrast = " in captured
        assert "peak_background_ratio = " in captured

    def test_metrics_with_truth(self, tmp_path, capsys):
        path = tmp_path / "img.spkimg"
        write_image(path, ImageGrid(np.random.default_rng(0).random((32, 32)), 1.0))
        assert main(["metrics", "--image", str(path), "--truth", str(path)]) == 0
        assert "aligned_ncc = 1.0" in capsys.readouterr().out


class TestPipeline:
    def test_full_run(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["pipeline", "--config", str(tiny_config), "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "raut.aligned_ncc" in stdout
        assert (out / "metrics.txt").exists()
        manifest = read_manifest(out / "manifest.txt")
        for key in ("hash.pattern_raut", "hash.pattern_trueac",
                    "hash.recon_raut", "hash.recon_trueac", "hash.object"):
            assert key in manifest

    def test_worker_count_does_not_change_outputs(self, tiny_config, tmp_path):
        hashes = {}
        for workers in (1, 3):
            out = tmp_path / f"run{workers}"
            code = main([
                "pipeline", "--config", str(tiny_config),
                "--out", str(out), "--workers", str(workers),
            ])
            assert code == 0
            manifest = read_manifest(out / "manifest.txt")
            hashes[workers] = {
                k: v for k, v in manifest.items() if k.startswith("hash.")
            }
        assert hashes[1] == hashes[3]

    def test_seed_override_changes_frames(self, tiny_config, tmp_path):
        outputs = {}
        for seed in (7, 8):
            out = tmp_path / f"s{seed}"
            main(["simulate", "--config", str(tiny_config),
                  "--out", str(out), "--seed", str(seed)])
            outputs[seed] = sha256_file(out / "frame_000.spkimg")
        assert outputs[7] != outputs[8]


class TestExitCodes:
    def test_bad_config_is_2(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("optics.typo = 1\n")
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == 2

    def test_truncated_input_is_3(self, tiny_config, tmp_path):
        path = tmp_path / "broken.spkimg"
        write_image(path, ImageGrid(np.zeros((8, 8)), 1.0))
        path.write_bytes(path.read_bytes()[:-4])
        code = main([
            "reconstruct", "--config", str(tiny_config),
            "--out", str(tmp_path), "--ac", str(path),
        ])
        assert code == 3

    def test_missing_file_is_9(self, tiny_config, tmp_path):
        code = main([
            "reconstruct", "--config", str(tiny_config),
            "--out", str(tmp_path), "--ac", str(tmp_path / "nope.spkimg"),
        ])
        assert code == 9

    def test_degenerate_pattern_is_7(self, tiny_config, tmp_path):
        path = tmp_path / "flat.spkimg"
        write_image(path, ImageGrid(np.ones((21, 21)), 1.0))
        code = main([
            "reconstruct", "--config", str(tiny_config),
            "--out", str(tmp_path), "--ac", str(path),
        ])
        assert code == 7
