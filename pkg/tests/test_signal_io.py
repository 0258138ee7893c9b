import struct

import numpy as np
import pytest

from foley_rms.signal_io import (
    TruncatedWavFile,
    UnsupportedWavFormat,
    Waveform,
    WavFormatError,
    read_wav,
    resample_linear,
    write_wav,
)


def _wav_bytes(fmt_code, channels, rate, bits, frames, extra_chunks=b""):
    """Assemble a minimal RIFF/WAVE file by hand."""
    block = channels * bits // 8
    fmt = struct.pack(
        "<HHIIHH", fmt_code, channels, rate, rate * block, block, bits
    )
    body = b"WAVE"
    body += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += extra_chunks
    body += b"data" + struct.pack("<I", len(frames)) + frames
    return b"RIFF" + struct.pack("<I", len(body)) + body


class TestReadWrite:
    def test_pcm16_round_trip_within_lsb(self, tmp_path):
        rng = np.random.default_rng(3)
        w = Waveform(rng.uniform(-0.9, 0.9, 2048), 16000)
        p = tmp_path / "a.wav"
        write_wav(w, p)
        back = read_wav(p)
        assert back.sample_rate == 16000
        assert np.max(np.abs(back.samples - w.samples)) <= 1.0 / 32768

    def test_float32_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(4)
        samples = rng.uniform(-1, 1, 999).astype(np.float32).astype(np.float64)
        p = tmp_path / "f.wav"
        write_wav(Waveform(samples, 44100), p, bit_depth="float32")
        back = read_wav(p)
        np.testing.assert_array_equal(back.samples, samples)

    def test_pcm16_full_scale_clamps_to_int_range(self, tmp_path):
        p = tmp_path / "c.wav"
        write_wav(Waveform(np.array([1.0, -1.0]), 8000), p)
        raw = p.read_bytes()
        lo, hi = struct.unpack("<hh", raw[-4:])
        assert (lo, hi) == (32767, -32768)

    def test_rejects_unknown_bit_depth(self, tmp_path):
        with pytest.raises(ValueError):
            write_wav(Waveform(np.zeros(4), 8000), tmp_path / "x.wav", bit_depth="pcm24")

    def test_stereo_mixes_down_to_mean(self, tmp_path):
        left = np.array([16384, 0], dtype="<i2")
        right = np.array([0, -16384], dtype="<i2")
        frames = np.column_stack([left, right]).tobytes()
        p = tmp_path / "st.wav"
        p.write_bytes(_wav_bytes(1, 2, 22050, 16, frames))
        w = read_wav(p)
        np.testing.assert_allclose(w.samples, [0.25, -0.25])

    def test_float_samples_clipped_on_read(self, tmp_path):
        frames = np.array([1.5, -2.0, 0.5], dtype="<f4").tobytes()
        p = tmp_path / "hot.wav"
        p.write_bytes(_wav_bytes(3, 1, 16000, 32, frames))
        w = read_wav(p)
        np.testing.assert_allclose(w.samples, [1.0, -1.0, 0.5])

    def test_skips_unknown_chunks_with_odd_sizes(self, tmp_path):
        # 5-byte LIST payload forces the word-alignment pad byte
        extra = b"LIST" + struct.pack("<I", 5) + b"INFOx" + b"\x00"
        frames = np.array([1000], dtype="<i2").tobytes()
        p = tmp_path / "odd.wav"
        p.write_bytes(_wav_bytes(1, 1, 8000, 16, frames, extra_chunks=extra))
        w = read_wav(p)
        assert len(w) == 1

    def test_rejects_non_riff(self, tmp_path):
        p = tmp_path / "bad.wav"
        p.write_bytes(b"OggS" + bytes(40))
        with pytest.raises(WavFormatError):
            read_wav(p)

    def test_rejects_compressed_format_code(self, tmp_path):
        frames = np.array([0], dtype="<i2").tobytes()
        p = tmp_path / "adpcm.wav"
        p.write_bytes(_wav_bytes(2, 1, 8000, 16, frames))
        with pytest.raises(UnsupportedWavFormat):
            read_wav(p)

    def test_truncated_data_chunk(self, tmp_path):
        good = _wav_bytes(1, 1, 8000, 16, np.zeros(100, dtype="<i2").tobytes())
        p = tmp_path / "trunc.wav"
        p.write_bytes(good[:-50])
        with pytest.raises(TruncatedWavFile):
            read_wav(p)


class TestWaveform:
    def test_duration(self):
        assert Waveform(np.zeros(8000), 16000).duration == 0.5

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            Waveform(np.zeros((2, 100)), 16000)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            Waveform(np.zeros(10), 0)


class TestResample:
    def test_same_rate_returns_copy(self):
        w = Waveform(np.arange(10, dtype=np.float64) / 10, 8000)
        out = resample_linear(w, 8000)
        assert out is not w
        np.testing.assert_array_equal(out.samples, w.samples)
        out.samples[0] = 99.0
        assert w.samples[0] == 0.0

    def test_output_length_rounds(self):
        w = Waveform(np.zeros(16000), 16000)
        assert len(resample_linear(w, 22050)) == 22050
        assert len(resample_linear(w, 8000)) == 8000

    def test_linear_ramp_preserved(self):
        w = Waveform(np.linspace(0, 1, 1000), 10000)
        out = resample_linear(w, 7000)
        np.testing.assert_allclose(out.samples, np.linspace(0, 1, 700), atol=5e-3)

    def test_constant_preserved_exactly(self):
        w = Waveform(np.full(500, 0.7), 5000)
        out = resample_linear(w, 3000)
        np.testing.assert_allclose(out.samples, 0.7, atol=1e-15)
