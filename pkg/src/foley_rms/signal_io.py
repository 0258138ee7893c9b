"""WAV file I/O and resampling for mono float64 waveforms."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

# fmt chunk codec ids we handle
_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3


class WavFormatError(Exception):
    """File is not a well-formed RIFF/WAVE container."""


class UnsupportedWavFormat(WavFormatError):
    """Valid WAV, but a codec/bit depth this reader does not handle."""


class TruncatedWavFile(WavFormatError):
    """Chunk header declares more bytes than the file contains."""


@dataclass
class Waveform:
    """Mono audio: float64 samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _read_exact(f, n, what):
    data = f.read(n)
    if len(data) < n:
        raise TruncatedWavFile(f"unexpected end of file while reading {what}")
    return data


def read_wav(path) -> Waveform:
    """Read a RIFF/WAVE file into a mono Waveform.

    Handles 16-bit PCM and 32-bit IEEE float, any channel count
    (channels are averaged). Samples are clipped to [-1, 1] on load.
    """
    with open(path, "rb") as f:
        header = _read_exact(f, 12, "RIFF header")
        if header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise WavFormatError(f"{path} is not a RIFF/WAVE file")

        fmt = None
        data = None
        while True:
            chunk_header = f.read(8)
            if len(chunk_header) == 0:
                break
            if len(chunk_header) < 8:
                raise TruncatedWavFile("chunk header cut short")
            chunk_id, size = struct.unpack("<4sI", chunk_header)
            if chunk_id == b"fmt ":
                fmt = _read_exact(f, size, "fmt chunk")
            elif chunk_id == b"data":
                data = _read_exact(f, size, "data chunk")
            else:
                _read_exact(f, size, f"{chunk_id!r} chunk")
            if size % 2:  # chunks are word-aligned
                f.read(1)

    if fmt is None or data is None:
        raise WavFormatError("missing fmt or data chunk")
    if len(fmt) < 16:
        raise WavFormatError("fmt chunk too small")
    codec, n_channels, sample_rate, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])

    if codec == _FMT_PCM and bits == 16:
        raw = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif codec == _FMT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedWavFormat(
            f"unsupported codec/bit depth: format {codec}, {bits}-bit"
        )
    if n_channels < 1:
        raise WavFormatError("channel count must be >= 1")

    raw = raw[: (len(raw) // n_channels) * n_channels]
    if n_channels > 1:
        raw = raw.reshape(-1, n_channels).mean(axis=1)
    return Waveform(np.clip(raw, -1.0, 1.0), sample_rate)


def write_wav(w: Waveform, path, bit_depth: str = "pcm16") -> None:
    """Write a mono Waveform as 16-bit PCM or 32-bit float WAV.

    Samples must already be in [-1, 1]; out-of-range input is rejected.
    """
    samples = w.samples
    if samples.size and (samples.min() < -1.0 or samples.max() > 1.0):
        raise ValueError("samples must lie in [-1, 1]")

    if bit_depth == "pcm16":
        codec, bits = _FMT_PCM, 16
        ints = np.clip(np.floor(samples * 32768.0 + 0.5), -32768, 32767)
        payload = ints.astype("<i2").tobytes()
    elif bit_depth == "float32":
        codec, bits = _FMT_IEEE_FLOAT, 32
        payload = samples.astype("<f4").tobytes()
    else:
        raise ValueError(f"bit_depth must be 'pcm16' or 'float32', got {bit_depth!r}")

    block_align = bits // 8
    byte_rate = w.sample_rate * block_align
    fmt = struct.pack("<HHIIHH", codec, 1, w.sample_rate, byte_rate, block_align, bits)
    with open(path, "wb") as f:
        f.write(struct.pack("<4sI4s", b"RIFF", 4 + 8 + len(fmt) + 8 + len(payload), b"WAVE"))
        f.write(struct.pack("<4sI", b"fmt ", len(fmt)))
        f.write(fmt)
        f.write(struct.pack("<4sI", b"data", len(payload)))
        f.write(payload)
        if len(payload) % 2:
            f.write(b"\x00")


def resample_linear(w: Waveform, target_rate: int) -> Waveform:
    """Resample by linear interpolation (edge-hold beyond the last sample).

    Output length is round(len * target_rate / source_rate); output sample j
    is the input linearly interpolated at position j * source_rate / target_rate.
    """
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == w.sample_rate:
        return Waveform(w.samples.copy(), w.sample_rate)

    n_out = int(round(len(w.samples) * target_rate / w.sample_rate))
    positions = np.arange(n_out) * (w.sample_rate / target_rate)
    out = np.interp(positions, np.arange(len(w.samples)), w.samples)
    return Waveform(out, target_rate)
