import json

import numpy as np
import pytest

from foley_rms.rms import (
    QuantCurve,
    RmsCurve,
    compute_rms,
    dequantize_rms,
    interp_nearest,
    mu_law_decode,
    mu_law_encode,
    quantize_rms,
)
from foley_rms.signal_io import Waveform


def _tone(duration_s, sample_rate=16000, freq=440.0, amp=0.5):
    t = np.arange(int(duration_s * sample_rate)) / sample_rate
    return Waveform(amp * np.sin(2 * np.pi * freq * t), sample_rate)


class TestFraming:
    def test_10s_16k_512_128_gives_1250_frames(self):
        w = _tone(10.0)
        assert len(compute_rms(w, window=512, hop=128)) == 1250

    def test_10_24s_16k_1024_160_gives_1024_frames(self):
        w = _tone(10.24)
        assert len(compute_rms(w, window=1024, hop=160)) == 1024

    def test_window_equals_hop_needs_no_padding(self):
        w = Waveform(np.ones(1000), 1000)
        curve = compute_rms(w, window=100, hop=100)
        assert len(curve) == 10

    def test_rejects_hop_larger_than_window(self):
        with pytest.raises(ValueError):
            compute_rms(_tone(1.0), window=128, hop=512)

    def test_rejects_odd_window_hop_difference(self):
        # padding is (window - hop) / 2 per side and must be integral
        with pytest.raises(ValueError):
            compute_rms(_tone(1.0), window=512, hop=127)

    def test_constant_signal_rms_equals_magnitude(self):
        w = Waveform(np.full(4000, -0.25), 8000)
        curve = compute_rms(w, window=256, hop=64)
        np.testing.assert_allclose(curve.values, 0.25, atol=1e-12)

    def test_sine_rms_near_amp_over_sqrt2(self):
        w = _tone(2.0, freq=1000.0, amp=0.8)
        curve = compute_rms(w, window=512, hop=128)
        inner = curve.values[10:-10]  # away from reflect-padded edges
        np.testing.assert_allclose(inner, 0.8 / np.sqrt(2), rtol=2e-3)

    def test_frame_rate(self):
        curve = compute_rms(_tone(1.0), window=512, hop=128)
        assert curve.frame_rate == 16000 / 128


class TestMuLaw:
    def test_exact_endpoints(self):
        assert mu_law_encode(0.0, 63) == 0.0
        assert mu_law_encode(1.0, 63) == 1.0

    def test_known_interior_value(self):
        # log(1 + 63/63) / log(64) = log(2) / log(64) = 1/6
        assert abs(mu_law_encode(1.0 / 63.0, 63) - 1.0 / 6.0) < 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        r = rng.uniform(0.0, 1.0, 10_000)
        back = mu_law_decode(mu_law_encode(r, 63), 63)
        assert np.max(np.abs(back - r)) < 1e-12

    def test_monotone(self):
        r = np.linspace(0.0, 1.0, 513)
        v = mu_law_encode(r, 127)
        assert np.all(np.diff(v) > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            mu_law_encode(-0.01, 63)
        with pytest.raises(ValueError):
            mu_law_encode(1.01, 63)
        with pytest.raises(ValueError):
            mu_law_encode(0.5, 0)


class TestQuantize:
    def _curve(self, values):
        return RmsCurve(np.asarray(values, dtype=np.float64), 16000, 512, 128)

    def test_extremes_hit_first_and_last_bin(self):
        q = quantize_rms(self._curve([0.0, 1.0]), 64)
        assert list(q.bins) == [0, 63]

    def test_rounding_direction_around_bin_boundary(self):
        mu = 63
        above = mu_law_decode((10.5 + 1e-6) / mu, mu)
        below = mu_law_decode((10.5 - 1e-6) / mu, mu)
        q = quantize_rms(self._curve([above, below]), 64)
        assert list(q.bins) == [11, 10]

    def test_round_trip_error_bounded_in_mu_domain(self):
        rng = np.random.default_rng(11)
        curve = self._curve(rng.uniform(0, 1, 5000))
        rec = dequantize_rms(quantize_rms(curve, 64))
        err = np.abs(mu_law_encode(rec.values, 63) - mu_law_encode(curve.values, 63))
        assert np.max(err) <= 1.0 / 126.0 + 1e-12

    def test_dequantize_returns_bin_centers(self):
        q = QuantCurve(np.arange(64), 64, 16000, 512, 128)
        rec = dequantize_rms(q)
        np.testing.assert_allclose(
            rec.values, mu_law_decode(np.arange(64) / 63.0, 63), atol=1e-15
        )

    def test_preserves_framing_metadata(self):
        q = quantize_rms(self._curve([0.3, 0.4]), 32)
        assert (q.sample_rate, q.window, q.hop, q.n_bins) == (16000, 512, 128, 32)
        assert q.mu == 31


class TestInterpNearest:
    def test_identity_when_lengths_match(self):
        v = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(interp_nearest(v, 3), v)

    def test_endpoints_map_to_endpoints(self):
        v = np.linspace(0, 1, 1250)
        out = interp_nearest(v, 1024)
        assert out[0] == v[0] and out[-1] == v[-1]

    def test_hand_computed_upsample(self):
        # j * (L-1) / (target-1) for L=2, target=5: 0, .25, .5, .75, 1 -> indices 0,0,1,1,1
        out = interp_nearest(np.array([10.0, 20.0]), 5)
        np.testing.assert_array_equal(out, [10.0, 10.0, 20.0, 20.0, 20.0])

    def test_single_target_frame_takes_first(self):
        out = interp_nearest(np.array([5.0, 6.0, 7.0]), 1)
        np.testing.assert_array_equal(out, [5.0])

    def test_single_source_broadcasts(self):
        out = interp_nearest(np.array([3.0]), 4)
        np.testing.assert_array_equal(out, [3.0, 3.0, 3.0, 3.0])


class TestCurveFiles:
    def test_rms_curve_round_trip(self, tmp_path):
        curve = RmsCurve(np.random.default_rng(0).uniform(0, 1, 100), 16000, 512, 128)
        p = tmp_path / "c.rms"
        curve.save(p)
        back = RmsCurve.load(p)
        np.testing.assert_array_equal(back.values, curve.values)
        assert (back.sample_rate, back.window, back.hop) == (16000, 512, 128)

    def test_quant_curve_round_trip(self, tmp_path):
        q = QuantCurve(np.array([0, 5, 63]), 64, 16000, 512, 128)
        p = tmp_path / "c.qrms"
        q.save(p)
        back = QuantCurve.load(p)
        np.testing.assert_array_equal(back.bins, q.bins)
        assert back.n_bins == 64

    def test_quant_bins_validated(self):
        with pytest.raises(ValueError):
            QuantCurve(np.array([64]), 64, 16000, 512, 128)
        with pytest.raises(ValueError):
            QuantCurve(np.array([-1]), 64, 16000, 512, 128)

    def test_rms_file_is_json(self, tmp_path):
        curve = RmsCurve(np.array([0.5]), 16000, 512, 128)
        p = tmp_path / "c.rms"
        curve.save(p)
        doc = json.loads(p.read_text())
        assert doc["sample_rate"] == 16000
