"""Synthetic RMS envelope shapes and envelope transfer between sounds.

Shapes are parametrized on t = j / (L - 1) so endpoints land exactly on
the floor/peak values. transfer_envelope imposes a target RMS contour on
an existing waveform by framewise gain, which is how a predicted loudness
curve gets applied to raw synthesized audio.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .rms import RmsCurve, compute_rms
from .signal_io import Waveform

_SHAPES = ("attack", "v", "increase", "decrease")

# framewise gains above this are almost certainly amplifying silence
_MAX_GAIN = 100.0


@dataclass
class EnvelopeSpec:
    shape: str
    length: int
    peak: float = 1.0
    floor: float = 0.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ValueError(f"shape must be one of {_SHAPES}, got {self.shape!r}")
        if self.length < 2:
            raise ValueError("length must be >= 2")
        if not (0.0 <= self.floor <= self.peak <= 1.0):
            raise ValueError("need 0 <= floor <= peak <= 1")


def synth_envelope(spec: EnvelopeSpec) -> np.ndarray:
    """Render a parametric envelope to a length-L array of levels.

    attack:   triangle rising to peak at the midpoint then back to floor
    v:        mirror of attack (dips from peak to floor and back)
    increase: straight ramp floor -> peak
    decrease: straight ramp peak -> floor
    """
    t = np.arange(spec.length, dtype=np.float64) / (spec.length - 1)
    span = spec.peak - spec.floor
    if spec.shape == "attack":
        return spec.floor + span * (1.0 - np.abs(2.0 * t - 1.0))
    if spec.shape == "v":
        return spec.peak - span * (1.0 - np.abs(2.0 * t - 1.0))
    if spec.shape == "increase":
        return np.linspace(spec.floor, spec.peak, spec.length)
    return np.linspace(spec.peak, spec.floor, spec.length)


def envelope_from_onsets(
    onset_frames,
    peaks,
    length: int,
    decay_frames: float = 10.0,
) -> np.ndarray:
    """Exponentially decaying envelope triggered at each onset frame.

    Each onset contributes peak * exp(-3 dt / decay_frames) for frames
    dt >= 0 after it; overlapping contributions combine by pointwise max.
    """
    onset_frames = np.asarray(onset_frames, dtype=np.int64)
    peaks = np.asarray(peaks, dtype=np.float64)
    if onset_frames.shape != peaks.shape:
        raise ValueError("onset_frames and peaks must have matching lengths")
    if length < 1:
        raise ValueError("length must be >= 1")
    if decay_frames <= 0:
        raise ValueError("decay_frames must be positive")
    if onset_frames.size and (onset_frames.min() < 0 or onset_frames.max() >= length):
        raise ValueError("onset frames must lie in [0, length)")

    env = np.zeros(length, dtype=np.float64)
    frames = np.arange(length, dtype=np.float64)
    for f0, pk in zip(onset_frames, peaks):
        dt = frames - f0
        contrib = np.where(dt >= 0, pk * np.exp(-3.0 * dt / decay_frames), 0.0)
        env = np.maximum(env, contrib)
    return env


def transfer_envelope(w: Waveform, target: RmsCurve, eps: float = 1e-8) -> Waveform:
    """Rescale a waveform so its RMS contour follows the target curve.

    The source RMS is measured with the target's framing, a per-frame gain
    target/source is computed (capped at 100 with a warning when the source
    frame is near-silent), gains are linearly interpolated across samples
    at the frame centers, and the result is clipped to [-1, 1].
    """
    if target.sample_rate != w.sample_rate:
        raise ValueError("waveform and target curve sample rates differ")
    source = compute_rms(w, window=target.window, hop=target.hop)
    n = min(len(source), len(target))
    if n < 1:
        raise ValueError("no frames to transfer")

    raw_gain = target.values[:n] / np.maximum(source.values[:n], eps)
    if (raw_gain > _MAX_GAIN).any():
        warnings.warn(
            f"capping {int((raw_gain > _MAX_GAIN).sum())} frame gain(s) at "
            f"{_MAX_GAIN:g}; source frames are near-silent",
            RuntimeWarning,
            stacklevel=2,
        )
    gain = np.minimum(raw_gain, _MAX_GAIN)

    # frame i of the padded analysis is centered at sample i*hop + hop/2
    centers = np.arange(n) * target.hop + target.hop / 2.0
    sample_gain = np.interp(np.arange(len(w.samples)), centers, gain)
    out = np.clip(w.samples * sample_gain, -1.0, 1.0)
    return Waveform(out, w.sample_rate)
