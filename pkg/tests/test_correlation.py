import numpy as np
import pytest

from rspeckle import (
    ImageGrid,
    SubRegionSpec,
    peak_background_ratio,
    r_autocorrelation,
    select_subregions,
    true_autocorrelation,
)
from rspeckle._backend import available_backends
from rspeckle.correlation import annulus_mask
from rspeckle.errors import (
    DegenerateInputError,
    DimensionError,
    InputError,
    SelectionError,
)


def _smooth_noise(rng, n):
    """Positive speckle-like frame: low-passed noise squared."""
    noise = rng.standard_normal((n, n))
    kernel = np.exp(-0.5 * (np.fft.fftfreq(n) * n / 3.0) ** 2)
    smooth = np.fft.ifft2(np.fft.fft2(noise) * np.outer(kernel, kernel)).real
    return ImageGrid(smooth**2 + 0.01, 1.0)


class TestTrueAutocorrelation:
    def test_matches_direct_shift_sum(self, rng):
        n = 16
        frame = ImageGrid(rng.random((n, n)), 1.0)
        x = frame.data - frame.data.mean()
        direct = np.zeros((n, n))
        for dr in range(n):
            for dc in range(n):
                direct[dr, dc] = np.sum(x * np.roll(x, (-dr, -dc), axis=(0, 1)))
        expected = np.fft.fftshift(direct / direct[0, 0])
        out = true_autocorrelation([frame], out_size=n)
        np.testing.assert_allclose(out.data, expected, rtol=1e-9, atol=1e-12)

    def test_zero_lag_at_center(self, rng):
        frame = _smooth_noise(rng, 64)
        out = true_autocorrelation([frame], out_size=15)
        assert out.data.argmax() == (15 * 15) // 2
        assert out.data[7, 7] == pytest.approx(1.0)  # zero lag, self-normalized

    def test_point_symmetric(self, rng):
        frame = _smooth_noise(rng, 64)
        out = true_autocorrelation([frame], out_size=15).data
        np.testing.assert_allclose(out, out[::-1, ::-1], atol=1e-12)

    def test_frame_average(self, rng):
        frames = [_smooth_noise(rng, 32) for _ in range(3)]
        singles = [true_autocorrelation([f], out_size=9).data for f in frames]
        combined = true_autocorrelation(frames, out_size=9).data
        np.testing.assert_allclose(combined, np.mean(singles, axis=0), rtol=1e-12)

    def test_constant_frame_rejected(self):
        with pytest.raises(DegenerateInputError, match="frame 0"):
            true_autocorrelation([ImageGrid(np.ones((8, 8)), 1.0)], out_size=5)

    def test_empty_and_mismatched_inputs(self, rng):
        with pytest.raises(InputError):
            true_autocorrelation([], out_size=5)
        frames = [
            ImageGrid(rng.random((8, 8)), 1.0),
            ImageGrid(rng.random((8, 9)), 1.0),
        ]
        with pytest.raises(DimensionError, match="frame 1"):
            true_autocorrelation(frames, out_size=5)

    def test_out_size_limit(self, rng):
        with pytest.raises(DimensionError, match="out_size"):
            true_autocorrelation([ImageGrid(rng.random((8, 8)), 1.0)], out_size=9)


class TestSubRegionSpec:
    def test_even_window_rounds_up_to_odd(self):
        assert SubRegionSpec(80, 10, seed=0).window == 81
        assert SubRegionSpec(81, 10, seed=0).window == 81

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(window_size=2, windows_per_frame=1, seed=0),
            dict(window_size=5, windows_per_frame=0, seed=0),
            dict(window_size=5, windows_per_frame=1, seed=0, max_redraws=-1),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(DimensionError):
            SubRegionSpec(**kwargs)


class TestSelectSubregions:
    def test_dominant_pixel_attracts_all_centers(self, rng):
        data = rng.random((50, 50)) * 0.01
        data[25, 25] = 10.0
        frame = ImageGrid(data, 1.0)
        spec = SubRegionSpec(window_size=31, windows_per_frame=20, seed=0)
        centers = select_subregions(frame, spec)
        assert len(centers) == 20
        assert all((c.row, c.col) == (25, 25) for c in centers)

    def test_deterministic_per_seed_and_frame_index(self, rng):
        frame = _smooth_noise(rng, 60)
        spec = SubRegionSpec(window_size=11, windows_per_frame=30, seed=5)
        a = select_subregions(frame, spec, frame_index=1)
        b = select_subregions(frame, spec, frame_index=1)
        assert a == b
        c = select_subregions(frame, spec, frame_index=2)
        assert a != c

    def test_centers_keep_windows_inside_frame(self, rng):
        frame = _smooth_noise(rng, 60)
        spec = SubRegionSpec(window_size=15, windows_per_frame=200, seed=2)
        half = spec.window // 2
        for c in select_subregions(frame, spec):
            assert half <= c.row < 60 - half
            assert half <= c.col < 60 - half

    def test_exhausted_redraws_raise_selection_error(self):
        # monotone gradient: every window recenters on its far corner, which
        # never leaves room for the recentered window
        data = np.add.outer(np.arange(20.0), np.arange(20.0))
        frame = ImageGrid(data, 1.0)
        spec = SubRegionSpec(window_size=15, windows_per_frame=4, seed=0, max_redraws=3)
        with pytest.raises(SelectionError) as excinfo:
            select_subregions(frame, spec)
        assert excinfo.value.placed == 0
        assert excinfo.value.requested == 4

    def test_window_too_large_for_frame(self, rng):
        frame = ImageGrid(rng.random((20, 20)), 1.0)
        spec = SubRegionSpec(window_size=19, windows_per_frame=1, seed=0)
        with pytest.raises(DimensionError, match="window"):
            select_subregions(frame, spec)


class TestRAutocorrelation:
    def test_equals_naive_shift_and_add(self, rng):
        frames = [_smooth_noise(rng, 100) for _ in range(2)]
        spec = SubRegionSpec(window_size=21, windows_per_frame=50, seed=9)
        out = r_autocorrelation(frames, spec)

        half = spec.window // 2
        total = np.zeros((spec.window, spec.window))
        count = 0
        for index, frame in enumerate(frames):
            for c in select_subregions(frame, spec, frame_index=index):
                total += frame.data[
                    c.row - half : c.row + half + 1, c.col - half : c.col + half + 1
                ]
                count += 1
        np.testing.assert_allclose(out.data, total / count, rtol=1e-12, atol=1e-15)

    def test_stats_dict(self, rng):
        frames = [_smooth_noise(rng, 80) for _ in range(3)]
        spec = SubRegionSpec(window_size=11, windows_per_frame=25, seed=1)
        stats = {}
        r_autocorrelation(frames, spec, stats=stats)
        assert stats["windows"] == 75
        assert stats["window_size"] == 11
        assert stats["redraws"] >= 0

    def test_peak_at_center(self, rng):
        frames = [_smooth_noise(rng, 100)]
        spec = SubRegionSpec(window_size=21, windows_per_frame=300, seed=3)
        out = r_autocorrelation(frames, spec)
        assert out.data.argmax() == (21 * 21) // 2

    def test_backend_parity(self, rng):
        backends = available_backends()
        if len(backends) < 2:
            pytest.skip("compiled backend not built")
        frame = np.ascontiguousarray(_smooth_noise(rng, 80).data)
        tops_r = np.arange(0, 60, 3, dtype=np.int64)
        tops_c = np.arange(59, -1, -3, dtype=np.int64)
        outputs = {}
        for name, kernels in backends.items():
            rows, cols, valid = kernels.select_centers(frame, tops_r, tops_c, 15)
            accum = np.zeros((15, 15))
            ok = valid.astype(bool)
            kernels.accumulate_windows(frame, rows[ok], cols[ok], 15, accum)
            outputs[name] = (rows, cols, valid, accum)
        a, b = outputs["python"], outputs["cython"]
        for got, want in zip(a, b):
            np.testing.assert_array_equal(got, want)

    def test_argmax_tie_break_is_row_major(self):
        backends = available_backends()
        frame = np.zeros((11, 11))
        frame[5, 7] = frame[7, 5] = 1.0  # tie inside the window
        tops = np.array([2], dtype=np.int64)
        for kernels in backends.values():
            rows, cols, valid = kernels.select_centers(frame, tops, tops, 7)
            assert (rows[0], cols[0]) == (5, 7)
            assert valid[0] == 1


class TestPeakBackgroundRatio:
    def test_hand_computed_case(self):
        data = np.zeros((9, 9))
        data[4, 4] = 10.0
        data[0, 0] = 2.0
        out = peak_background_ratio(ImageGrid(data, 1.0), feature_radius=2)
        assert out.value == pytest.approx(5.0)
        assert not out.unbounded and not out.flat

    def test_background_median_is_subtracted(self):
        data = np.full((9, 9), 3.0)
        data[4, 4] = 13.0
        data[0, 0] = 5.0
        out = peak_background_ratio(ImageGrid(data, 1.0), feature_radius=2)
        assert out.value == pytest.approx(5.0)

    def test_unbounded_flag(self):
        data = np.ones((9, 9))
        data[4, 4] = 5.0
        out = peak_background_ratio(ImageGrid(data, 1.0), feature_radius=2)
        assert out.unbounded and np.isinf(out.value)

    def test_flat_flag(self):
        out = peak_background_ratio(ImageGrid(np.zeros((9, 9)), 1.0), feature_radius=2)
        assert out.flat and out.value == 0.0

    @pytest.mark.parametrize("radius", [-1, 5, 10])
    def test_radius_validation(self, radius):
        with pytest.raises(DimensionError):
            peak_background_ratio(ImageGrid(np.zeros((9, 9)), 1.0), radius)

    def test_annulus_mask_geometry(self):
        mask = annulus_mask(9, 9, 2)
        assert not mask[4, 4]
        assert not mask[4, 6] and not mask[2, 4]  # distance exactly 2
        assert mask[4, 7] and mask[1, 4] and mask[0, 0]
