"""Classification targets for quantized RMS frames, plus training losses.

Targets are per-frame distributions over the K bins. Instead of one-hot
labels, probability mass is spread over neighboring bins with a truncated
Gaussian so that near-miss predictions are penalized less than distant
ones. Bin 0 is the silence code and never shares mass with loud bins: a
zero-level frame stays exactly one-hot at bin 0, and a nonzero-level frame
never leaks mass into bin 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rms import QuantCurve


@dataclass
class LabelMatrix:
    """(T, K) row-stochastic matrix: one target distribution per frame.

    smoothing_window/sigma record how the rows were built; they are
    metadata only and do not survive save/load.
    """

    rows: np.ndarray
    smoothing_window: int | None = None
    sigma: float | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise ValueError("rows must be (frames, bins)")
        if self.rows.size and self.rows.min() < 0.0:
            raise ValueError("probabilities must be non-negative")
        if self.rows.size:
            sums = self.rows.sum(axis=1)
            if not np.allclose(sums, 1.0, atol=1e-9):
                raise ValueError("each row must sum to 1")

    @property
    def n_frames(self) -> int:
        return self.rows.shape[0]

    @property
    def n_bins(self) -> int:
        return self.rows.shape[1]

    def save(self, path) -> None:
        np.savetxt(path, self.rows, delimiter=",", fmt="%.17g")

    @classmethod
    def load(cls, path) -> "LabelMatrix":
        rows = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(rows)


def make_gls_targets(q: QuantCurve, width: int = 2, sigma: float = 1.0) -> LabelMatrix:
    """Gaussian-smoothed targets for a quantized curve.

    For ground-truth bin c > 0, bins k with 0 < k <= K-1 and |k - c| <= width
    get weight exp(-(k - c)^2 / (2 sigma^2)); the row is then normalized to
    sum 1. Bin 0 gets no mass even when c <= width. For c == 0 the row is
    one-hot at bin 0, and width == 0 degenerates to one-hot everywhere.
    """
    if width < 0:
        raise ValueError("width must be >= 0")
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    K = q.n_bins
    T = len(q.bins)
    probs = np.zeros((T, K), dtype=np.float64)
    k = np.arange(K, dtype=np.float64)
    for t in range(T):
        c = int(q.bins[t])
        if c == 0 or width == 0:
            probs[t, c] = 1.0
            continue
        d = k - c
        w = np.exp(-(d * d) / (2.0 * sigma * sigma))
        w[np.abs(d) > width] = 0.0
        w[0] = 0.0  # silence bin never shares mass with a loud target
        probs[t] = w / w.sum()
    return LabelMatrix(probs, smoothing_window=width, sigma=sigma)


def _log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def cross_entropy_loss(logits, targets: LabelMatrix):
    """Frame-averaged cross entropy between logits and target rows.

    Returns (loss, grad) where grad is dloss/dlogits, shape (T, K).
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape != targets.rows.shape:
        raise ValueError("logits and targets must have matching shapes")
    T = logits.shape[0]
    log_p = _log_softmax(logits)
    loss = -(targets.rows * log_p).sum() / T
    grad = (np.exp(log_p) - targets.rows) / T
    return loss, grad


def l2_loss(pred, target):
    """Mean squared error over all elements; returns (loss, grad)."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError("pred and target must have matching shapes")
    diff = pred - target
    loss = np.mean(diff * diff)
    grad = 2.0 * diff / diff.size
    return loss, grad
