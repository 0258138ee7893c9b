"""RMS envelope toolkit for Foley-style audio work.

Extraction and mu-law quantization of frame-level RMS envelopes, Gaussian
label smoothing for ordinal-bin classification targets, a small trainable
RMS predictor with interchangeable regression/classification heads,
envelope synthesis/transfer utilities, and objective evaluation metrics
(E-L1, tolerance-binned accuracy, onset Acc/AP, Frechet distance over
embedding sets, cosine similarity).
"""

from foley_rms.signal_io import Waveform, read_wav, write_wav, resample_linear
from foley_rms.rms import (
    RmsCurve,
    QuantCurve,
    compute_rms,
    mu_law_encode,
    mu_law_decode,
    quantize_rms,
    dequantize_rms,
    interp_nearest,
)
from foley_rms.labels import LabelMatrix, make_gls_targets, cross_entropy_loss, l2_loss
from foley_rms.envelopes import (
    EnvelopeSpec,
    synth_envelope,
    envelope_from_onsets,
    transfer_envelope,
)
from foley_rms.predictor import (
    FeatureSequence,
    PredictorParams,
    SynthDatasetSpec,
    synth_dataset,
    forward,
    train,
    grad_check,
    predict_rms,
    cfg_blend,
)
from foley_rms.metrics import (
    EmbeddingSet,
    OnsetList,
    e_l1,
    event_frame_e_l1,
    rms_accuracy,
    onset_confidence,
    nms_peaks,
    onset_metrics,
    frechet_distance,
    cosine_score,
)

__version__ = "0.1.0"

__all__ = [
    "Waveform", "read_wav", "write_wav", "resample_linear",
    "RmsCurve", "QuantCurve", "compute_rms", "mu_law_encode", "mu_law_decode",
    "quantize_rms", "dequantize_rms", "interp_nearest",
    "LabelMatrix", "make_gls_targets", "cross_entropy_loss", "l2_loss",
    "EnvelopeSpec", "synth_envelope", "envelope_from_onsets", "transfer_envelope",
    "FeatureSequence", "PredictorParams", "SynthDatasetSpec", "synth_dataset",
    "forward", "train", "grad_check", "predict_rms", "cfg_blend",
    "EmbeddingSet", "OnsetList", "e_l1", "event_frame_e_l1", "rms_accuracy",
    "onset_confidence", "nms_peaks", "onset_metrics", "frechet_distance",
    "cosine_score",
]
