import numpy as np
import pytest

from foley_rms.envelopes import (
    EnvelopeSpec,
    envelope_from_onsets,
    synth_envelope,
    transfer_envelope,
)
from foley_rms.metrics import e_l1
from foley_rms.rms import RmsCurve, compute_rms
from foley_rms.signal_io import Waveform


class TestSynthEnvelope:
    def test_attack_triangle(self):
        env = synth_envelope(EnvelopeSpec("attack", 101, peak=0.9, floor=0.1))
        assert env[0] == pytest.approx(0.1)
        assert env[50] == pytest.approx(0.9)
        assert env[-1] == pytest.approx(0.1)
        assert np.all(np.diff(env[:51]) > 0) and np.all(np.diff(env[50:]) < 0)

    def test_v_is_mirror_of_attack(self):
        spec = dict(length=64, peak=0.8, floor=0.2)
        attack = synth_envelope(EnvelopeSpec("attack", **spec))
        v = synth_envelope(EnvelopeSpec("v", **spec))
        np.testing.assert_allclose(attack + v, 0.8 + 0.2, atol=1e-12)

    def test_ramps(self):
        up = synth_envelope(EnvelopeSpec("increase", 10))
        down = synth_envelope(EnvelopeSpec("decrease", 10))
        np.testing.assert_allclose(up, np.linspace(0, 1, 10))
        np.testing.assert_allclose(down, up[::-1])

    def test_all_shapes_stay_in_range(self):
        for shape in ("attack", "v", "increase", "decrease"):
            env = synth_envelope(EnvelopeSpec(shape, 33, peak=0.7, floor=0.05))
            assert env.min() >= 0.05 - 1e-12 and env.max() <= 0.7 + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            EnvelopeSpec("sawtooth", 10)
        with pytest.raises(ValueError):
            EnvelopeSpec("attack", 1)
        with pytest.raises(ValueError):
            EnvelopeSpec("attack", 10, peak=0.5, floor=0.6)


class TestOnsetEnvelope:
    def test_single_onset_decay_profile(self):
        env = envelope_from_onsets([0], [1.0], 20, decay_frames=6.0)
        expected = np.exp(-3.0 * np.arange(20) / 6.0)
        np.testing.assert_allclose(env, expected)

    def test_zero_before_onset(self):
        env = envelope_from_onsets([5], [0.8], 10, decay_frames=4.0)
        assert np.all(env[:5] == 0.0)
        assert env[5] == pytest.approx(0.8)

    def test_overlap_takes_pointwise_max(self):
        a = envelope_from_onsets([0], [1.0], 30, decay_frames=10.0)
        b = envelope_from_onsets([3], [0.5], 30, decay_frames=10.0)
        both = envelope_from_onsets([0, 3], [1.0, 0.5], 30, decay_frames=10.0)
        np.testing.assert_allclose(both, np.maximum(a, b))

    def test_errors(self):
        with pytest.raises(ValueError):
            envelope_from_onsets([0, 1], [1.0], 10)
        with pytest.raises(ValueError):
            envelope_from_onsets([10], [1.0], 10)
        with pytest.raises(ValueError):
            envelope_from_onsets([0], [1.0], 10, decay_frames=0.0)


class TestTransfer:
    def _noise(self, seconds=1.0, rate=16000, seed=0):
        rng = np.random.default_rng(seed)
        return Waveform(rng.uniform(-0.5, 0.5, int(seconds * rate)), rate)

    @pytest.mark.parametrize("shape", ["attack", "v", "increase", "decrease"])
    def test_round_trip_follows_target(self, shape):
        w = self._noise()
        n_frames = len(compute_rms(w, 512, 128))
        target = RmsCurve(
            synth_envelope(EnvelopeSpec(shape, n_frames, peak=0.6, floor=0.05)),
            16000,
            512,
            128,
        )
        shaped = transfer_envelope(w, target)
        back = compute_rms(shaped, 512, 128)
        assert e_l1(target, back) < 0.02

    def test_output_clipped(self):
        w = self._noise()
        n_frames = len(compute_rms(w, 512, 128))
        target = RmsCurve(np.ones(n_frames), 16000, 512, 128)
        shaped = transfer_envelope(w, target)
        assert shaped.samples.max() <= 1.0 and shaped.samples.min() >= -1.0

    def test_near_silent_source_caps_gain_with_warning(self):
        w = Waveform(np.full(4000, 1e-12), 16000)
        n_frames = len(compute_rms(w, 512, 128))
        target = RmsCurve(np.full(n_frames, 0.9), 16000, 512, 128)
        with pytest.warns(RuntimeWarning):
            shaped = transfer_envelope(w, target)
        assert np.all(np.isfinite(shaped.samples))

    def test_rate_mismatch_rejected(self):
        w = self._noise(rate=16000)
        target = RmsCurve(np.full(10, 0.5), 8000, 512, 128)
        with pytest.raises(ValueError):
            transfer_envelope(w, target)
