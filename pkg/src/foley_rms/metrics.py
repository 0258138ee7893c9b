"""Objective evaluation: curve error, binned accuracy, onsets, set distances.

Covers the full measurement suite for loudness-envelope prediction:
mean absolute error between continuous curves (optionally restricted to
event frames), tolerance-binned classification accuracy with silence
exclusion, onset accuracy/average-precision under a greedy matching
protocol, Frechet distance between embedding sets, and cosine similarity
of embedding pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import jacobi_eigh, sqrtm_psd

_EIG_NEG_TOL = 1e-10


@dataclass
class EmbeddingSet:
    """N x D matrix of embedding vectors with a free-text source tag."""

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-d (N, D) matrix")
        if not np.isfinite(self.vectors).all():
            raise ValueError("embedding vectors must be finite")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(f"dim={self.dim}\n")
            for row in self.vectors:
                f.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def load(cls, path, label: str = "") -> "EmbeddingSet":
        with open(path) as f:
            lines = [ln.strip() for ln in f if ln.strip()]
        dim = None
        if lines and lines[0].startswith("dim="):
            dim = int(lines[0][4:])
            lines = lines[1:]
        rows = [[float(v) for v in ln.split(",")] for ln in lines]
        vectors = np.asarray(rows, dtype=np.float64)
        if vectors.ndim != 2:
            vectors = vectors.reshape(len(rows), -1)
        if dim is not None and vectors.shape[1] != dim:
            raise ValueError(
                f"header says dim={dim} but rows have {vectors.shape[1]} columns"
            )
        return cls(vectors, label)


@dataclass
class OnsetList:
    """Detected or labeled onsets: times in seconds with confidences."""

    times: np.ndarray
    confidences: np.ndarray = field(default=None)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.confidences is None:
            self.confidences = np.ones_like(self.times)
        self.confidences = np.asarray(self.confidences, dtype=np.float64)
        if self.times.shape != self.confidences.shape or self.times.ndim != 1:
            raise ValueError("times and confidences must be matching 1-d arrays")
        if self.times.size and self.times.min() < 0:
            raise ValueError("onset times must be non-negative")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("onsets must be sorted by time")

    def __len__(self):
        return len(self.times)

    def save(self, path) -> None:
        with open(path, "w") as f:
            for t, c in zip(self.times, self.confidences):
                f.write(f"{float(t)!r},{float(c)!r}\n")

    @classmethod
    def load(cls, path) -> "OnsetList":
        times, confs = [], []
        with open(path) as f:
            for ln in f:
                ln = ln.strip()
                if not ln:
                    continue
                t, c = ln.split(",")
                times.append(float(t))
                confs.append(float(c))
        return cls(np.asarray(times), np.asarray(confs))


def _curve_values(c):
    return np.asarray(getattr(c, "values", c), dtype=np.float64)


def e_l1(gt, pred) -> float:
    """Mean absolute difference between two equal-length envelope curves."""
    a = _curve_values(gt)
    b = _curve_values(pred)
    if a.shape != b.shape:
        raise ValueError(f"curve lengths differ: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b)))


def event_frame_e_l1(gt, pred, threshold: float = 0.05):
    """Mean absolute difference restricted to frames where gt > threshold.

    Returns None when no frame exceeds the threshold.
    """
    a = _curve_values(gt)
    b = _curve_values(pred)
    if a.shape != b.shape:
        raise ValueError(f"curve lengths differ: {a.shape} vs {b.shape}")
    mask = a > threshold
    if not mask.any():
        return None
    return float(np.mean(np.abs(a[mask] - b[mask])))


def rms_accuracy(gt, pred, tol_bins: int):
    """Fraction of non-silent frames where |gt - pred| <= tol_bins.

    Frames where both curves sit in the silence bin (bin 0) are excluded.
    Returns None when every frame is excluded.
    """
    if len(gt.bins) != len(pred.bins):
        raise ValueError("curves must have equal length")
    if gt.n_bins != pred.n_bins:
        raise ValueError("curves must share the same bin count")
    if tol_bins < 0:
        raise ValueError("tol_bins must be >= 0")
    include = ~((gt.bins == 0) & (pred.bins == 0))
    if not include.any():
        return None
    hits = np.abs(gt.bins[include] - pred.bins[include]) <= tol_bins
    return float(hits.mean())


def onset_confidence(c) -> np.ndarray:
    """Onset confidence curve: rectified first difference, peak-normalized.

    conf[i] = max(c[i] - c[i-1], 0) / max over i, with conf[0] = 0.
    A curve with no positive rise yields all zeros.
    """
    values = _curve_values(c)
    if len(values) < 2:
        raise ValueError("need at least 2 frames")
    conf = np.zeros(len(values), dtype=np.float64)
    conf[1:] = np.maximum(np.diff(values), 0.0)
    peak = conf.max()
    if peak > 0:
        conf /= peak
    return conf


def nms_peaks(conf, window_ms: float, frame_rate: float, threshold: float) -> OnsetList:
    """Non-maximum suppression of a confidence curve into an onset list.

    A frame survives when its confidence reaches the threshold and no
    frame within the suppression window (window_ms on either side, ties
    won by the earlier frame) is stronger. Surviving frames are therefore
    always more than the window apart. Times are frame / frame_rate.
    """
    conf = np.asarray(conf, dtype=np.float64)
    if window_ms <= 0:
        raise ValueError("window_ms must be positive")
    if frame_rate <= 0:
        raise ValueError("frame_rate must be positive")

    radius = window_ms / 1000.0 * frame_rate
    times, confs = [], []
    for i in np.flatnonzero(conf >= threshold):
        lo = max(0, int(np.ceil(i - radius)))
        hi = min(len(conf) - 1, int(np.floor(i + radius)))
        neighborhood = conf[lo : hi + 1]
        if conf[i] < neighborhood.max():
            continue
        # ties go to the earliest frame in the window
        if lo + int(np.argmax(neighborhood)) != i:
            continue
        times.append(i / frame_rate)
        confs.append(conf[i])
    return OnsetList(np.asarray(times), np.asarray(confs))


def onset_metrics(gt: OnsetList, pred: OnsetList, tol_s: float = 0.1):
    """Accuracy and average precision of predicted onsets against labels.

    Predictions are matched greedily in descending confidence, each to the
    nearest still-unmatched label within +-tol_s. Accuracy counts
    matches / (matches + missed labels + unmatched predictions); true
    negatives never enter. AP integrates the step-interpolated
    precision-recall curve over the confidence ranking.
    """
    if tol_s < 0:
        raise ValueError("tol_s must be >= 0")
    n_gt, n_pred = len(gt), len(pred)
    if n_pred == 0 and n_gt == 0:
        return 1.0, 1.0
    if n_pred == 0 or n_gt == 0:
        return 0.0, 0.0

    order = sorted(range(n_pred), key=lambda i: (-pred.confidences[i], pred.times[i]))
    gt_taken = np.zeros(n_gt, dtype=bool)
    matched = np.zeros(n_pred, dtype=bool)
    for i in order:
        dist = np.abs(gt.times - pred.times[i])
        dist[gt_taken] = np.inf
        j = int(np.argmin(dist))
        # inclusive boundary must survive subtraction rounding (1.1 - 1.0)
        if dist[j] <= tol_s + 1e-12:
            gt_taken[j] = True
            matched[i] = True

    n_match = int(matched.sum())
    accuracy = n_match / (n_match + (n_gt - n_match) + (n_pred - n_match))

    ap = 0.0
    prev_recall = 0.0
    hits = 0
    for rank, i in enumerate(order, start=1):
        if matched[i]:
            hits += 1
        recall = hits / n_gt
        precision = hits / rank
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return float(accuracy), float(ap)


def frechet_distance(r: EmbeddingSet, g: EmbeddingSet) -> float:
    """Frechet distance between two embedding sets.

    ||mu_r - mu_g||^2 + tr(S_r) + tr(S_g) - 2 tr((S_r^1/2 S_g S_r^1/2)^1/2)
    with unbiased covariances. The cross term uses the symmetric PSD
    route, so no non-symmetric matrix roots are ever taken.
    """
    if r.dim != g.dim:
        raise ValueError(f"embedding dims differ: {r.dim} vs {g.dim}")
    if r.n < 2 or g.n < 2:
        raise ValueError("each set needs at least 2 vectors for a covariance")

    mu_r = r.vectors.mean(axis=0)
    mu_g = g.vectors.mean(axis=0)
    cov_r = np.cov(r.vectors, rowvar=False, ddof=1).reshape(r.dim, r.dim)
    cov_g = np.cov(g.vectors, rowvar=False, ddof=1).reshape(g.dim, g.dim)

    sqrt_r = sqrtm_psd(cov_r)
    m = sqrt_r @ cov_g @ sqrt_r
    w, _ = jacobi_eigh((m + m.T) / 2.0)
    scale = max(1.0, float(np.abs(w).max())) if w.size else 1.0
    if w.size and w.min() < -_EIG_NEG_TOL * scale:
        raise ValueError(f"covariance product is indefinite: eigenvalue {w.min():g}")
    tr_sqrt = np.sqrt(np.clip(w, 0.0, None)).sum()

    diff = mu_r - mu_g
    fd = float(diff @ diff + np.trace(cov_r) + np.trace(cov_g) - 2.0 * tr_sqrt)
    if fd < -1e-8:
        raise ValueError(f"distance computed as {fd:g}, below roundoff tolerance")
    return max(fd, 0.0)


def cosine_score(e, e_hat) -> float:
    """Cosine similarity of two embedding vectors, in [-1, 1]."""
    e = np.asarray(e, dtype=np.float64).ravel()
    e_hat = np.asarray(e_hat, dtype=np.float64).ravel()
    if e.shape != e_hat.shape:
        raise ValueError("embedding dimensions differ")
    ne = np.linalg.norm(e)
    nh = np.linalg.norm(e_hat)
    if ne == 0.0 or nh == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vectors")
    return float(np.clip(e @ e_hat / (ne * nh), -1.0, 1.0))
