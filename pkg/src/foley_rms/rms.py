"""RMS envelope extraction, mu-law companding, and frame-grid interpolation.

An RMS curve is a framewise loudness envelope taken over sliding windows of
the waveform. Curves can be quantized to K discrete bins through mu-law
companding (mu = K - 1), which allocates finer resolution to quiet levels,
and decoded back to continuous values at bin centers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .signal_io import Waveform


def _round_half_up(x):
    # np.round ties to even; quantization wants 0.5 -> 1 always
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


@dataclass
class RmsCurve:
    """Framewise RMS values in [0, 1] with the framing that produced them."""

    values: np.ndarray
    sample_rate: int
    window: int
    hop: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.window <= 0 or self.hop <= 0:
            raise ValueError("window and hop must be positive")

    def __len__(self):
        return len(self.values)

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop

    def save(self, path) -> None:
        payload = {
            "sample_rate": self.sample_rate,
            "window": self.window,
            "hop": self.hop,
            "values": [float(v) for v in self.values],
        }
        with open(path, "w") as f:
            json.dump(payload, f)

    @classmethod
    def load(cls, path) -> "RmsCurve":
        with open(path) as f:
            d = json.load(f)
        return cls(
            np.asarray(d["values"], dtype=np.float64),
            int(d["sample_rate"]),
            int(d["window"]),
            int(d["hop"]),
        )


@dataclass
class QuantCurve:
    """Bin indices in [0, n_bins) plus the framing of the parent curve."""

    bins: np.ndarray
    n_bins: int
    sample_rate: int
    window: int
    hop: int

    def __post_init__(self):
        self.bins = np.asarray(self.bins, dtype=np.int64)
        if self.bins.ndim != 1:
            raise ValueError("bins must be one-dimensional")
        if self.n_bins < 2:
            raise ValueError("n_bins must be at least 2")
        if len(self.bins) and (self.bins.min() < 0 or self.bins.max() >= self.n_bins):
            raise ValueError("bin indices must lie in [0, n_bins)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.window <= 0 or self.hop <= 0:
            raise ValueError("window and hop must be positive")

    def __len__(self):
        return len(self.bins)

    @property
    def mu(self) -> int:
        return self.n_bins - 1

    def save(self, path) -> None:
        payload = {
            "sample_rate": self.sample_rate,
            "window": self.window,
            "hop": self.hop,
            "n_bins": self.n_bins,
            "bins": [int(b) for b in self.bins],
        }
        with open(path, "w") as f:
            json.dump(payload, f)

    @classmethod
    def load(cls, path) -> "QuantCurve":
        with open(path) as f:
            d = json.load(f)
        return cls(
            np.asarray(d["bins"], dtype=np.int64),
            int(d["n_bins"]),
            int(d["sample_rate"]),
            int(d["window"]),
            int(d["hop"]),
        )


def compute_rms(w: Waveform, window: int = 512, hop: int = 128) -> RmsCurve:
    """Sliding-window RMS of a waveform, reflect-padded at both ends.

    Frame i covers samples [i*hop, i*hop + window) of the padded signal;
    padding is (window - hop) / 2 per side so frame centers start half a
    hop into the original signal. window - hop must be even.
    """
    if window <= 0 or hop <= 0:
        raise ValueError("window and hop must be positive")
    if window < hop:
        raise ValueError("window must be >= hop")
    if (window - hop) % 2:
        raise ValueError("window - hop must be even for symmetric padding")

    pad = (window - hop) // 2
    x = np.pad(w.samples, pad, mode="reflect") if pad else w.samples
    n_frames = (len(x) - window) // hop + 1
    if n_frames < 1:
        raise ValueError("signal too short for even one frame")

    idx = np.arange(window)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx]
    values = np.sqrt(np.mean(frames * frames, axis=1))
    return RmsCurve(np.clip(values, 0.0, 1.0), w.sample_rate, window, hop)


def mu_law_encode(r, mu: int):
    """Compand levels in [0, 1] to [0, 1]: ln(1 + mu*r) / ln(1 + mu)."""
    if mu < 1:
        raise ValueError("mu must be >= 1")
    r = np.asarray(r, dtype=np.float64)
    if r.size and (r.min() < 0.0 or r.max() > 1.0):
        raise ValueError("values must lie in [0, 1]")
    return np.log1p(mu * r) / np.log1p(mu)


def mu_law_decode(v, mu: int):
    """Inverse companding: ((1 + mu)^v - 1) / mu. Exact at v = 0 and v = 1."""
    if mu < 1:
        raise ValueError("mu must be >= 1")
    v = np.asarray(v, dtype=np.float64)
    return (np.power(1.0 + mu, v) - 1.0) / mu


def quantize_rms(curve: RmsCurve, n_bins: int = 64) -> QuantCurve:
    """Compand then round to n_bins levels (mu = n_bins - 1, ties go up)."""
    mu = n_bins - 1
    companded = mu_law_encode(np.clip(curve.values, 0.0, 1.0), mu)
    bins = _round_half_up(companded * mu).astype(np.int64)
    bins = np.clip(bins, 0, n_bins - 1)
    return QuantCurve(bins, n_bins, curve.sample_rate, curve.window, curve.hop)


def dequantize_rms(q: QuantCurve) -> RmsCurve:
    """Map bin indices back to continuous RMS at the bin-center codebook."""
    values = mu_law_decode(q.bins.astype(np.float64) / q.mu, q.mu)
    return RmsCurve(values, q.sample_rate, q.window, q.hop)


def interp_nearest(values, target_len: int):
    """Nearest-neighbor resample of a frame sequence to target_len frames.

    Endpoints map to endpoints; interior target frame j picks source frame
    round(j * (L-1) / (target_len-1)) with ties rounded up.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) == 0:
        raise ValueError("values must be a non-empty 1-d sequence")
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    if target_len == 1:
        return values[:1].copy()
    if len(values) == 1:
        return np.full(target_len, values[0])

    j = np.arange(target_len, dtype=np.float64)
    src = _round_half_up(j * (len(values) - 1) / (target_len - 1)).astype(np.int64)
    return values[np.clip(src, 0, len(values) - 1)]
