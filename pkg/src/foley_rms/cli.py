"""Command-line frontend: reproducible envelope/eval pipelines.

Every command resolves its full configuration (flags, defaults, seed),
hashes its inputs, runs, and drops a manifest JSON next to its outputs.
`foley-rms rerun <manifest>` re-executes the stored configuration and
reproduces all numeric artifacts byte-for-byte. Nothing here embeds
timestamps or machine identity.

Exit codes: 0 success, 1 runtime/input failure, 2 usage or bad config.
The env var FOLEY_RMS_SEED overrides any --seed flag.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from .envelopes import EnvelopeSpec, envelope_from_onsets, synth_envelope, transfer_envelope
from .labels import LabelMatrix, make_gls_targets
from .metrics import (
    EmbeddingSet,
    OnsetList,
    cosine_score,
    e_l1,
    event_frame_e_l1,
    frechet_distance,
    nms_peaks,
    onset_confidence,
    onset_metrics,
)
from .predictor import (
    FeatureSequence,
    PredictorParams,
    SynthDatasetSpec,
    predict_rms,
    synth_dataset,
    train,
)
from .rms import QuantCurve, RmsCurve, compute_rms, dequantize_rms, interp_nearest, quantize_rms
from .signal_io import read_wav, write_wav

# video-side framing is the bare default; the generator-side grid is a preset
_PRESETS = {
    "default": {"window": 512, "hop": 128},
    "audioldm": {"window": 1024, "hop": 160},
}


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _resolve_seed(flag_value: int) -> int:
    env = os.environ.get("FOLEY_RMS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FOLEY_RMS_SEED must be an integer, got {env!r}")
    return flag_value


def _json_dump(obj, path):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _write_manifest(manifest_path, command, config, inputs, outputs):
    manifest = {
        "command": command,
        "config": config,
        "inputs": {p: _sha256(p) for p in sorted(set(inputs))},
        "outputs": sorted(set(outputs)),
    }
    _json_dump(manifest, manifest_path)


def _load_curve(path) -> RmsCurve:
    return RmsCurve.load(path)


def _load_quant_or_rms(path, n_bins):
    """Read a quantized curve, quantizing continuous input on the fly."""
    with open(path) as f:
        d = json.load(f)
    if "bins" in d:
        q = QuantCurve.load(path)
        if q.n_bins != n_bins:
            raise UsageError(f"{path} has {q.n_bins} bins, expected {n_bins}")
        return q
    return quantize_rms(RmsCurve.load(path), n_bins)


def _pair_dir_files(gt_dir, pred_dir, suffix):
    names = sorted(n for n in os.listdir(gt_dir) if n.endswith(suffix))
    if not names:
        raise UsageError(f"no *{suffix} files in {gt_dir}")
    pairs = []
    for n in names:
        p = os.path.join(pred_dir, n)
        if not os.path.exists(p):
            raise UsageError(f"prediction missing for {n}")
        pairs.append((os.path.join(gt_dir, n), p))
    return pairs


def _curve_pairs(gt, pred):
    if os.path.isdir(gt) != os.path.isdir(pred):
        raise UsageError("gt and pred must both be files or both directories")
    if os.path.isdir(gt):
        return _pair_dir_files(gt, pred, ".rms")
    return [(gt, pred)]


# ---------------------------------------------------------------------------
# executors: take a resolved config dict, do the work,
# return (input paths, output paths). rerun calls these directly.


def _exec_rms_extract(cfg):
    w = read_wav(cfg["input"])
    curve = compute_rms(w, window=cfg["window"], hop=cfg["hop"])
    curve.save(cfg["out"])
    return [cfg["input"]], [cfg["out"]]


def _exec_rms_quantize(cfg):
    curve = _load_curve(cfg["input"])
    quantize_rms(curve, cfg["bins"]).save(cfg["out"])
    return [cfg["input"]], [cfg["out"]]


def _exec_rms_dequantize(cfg):
    q = QuantCurve.load(cfg["input"])
    dequantize_rms(q).save(cfg["out"])
    return [cfg["input"]], [cfg["out"]]


def _exec_rms_interp(cfg):
    curve = _load_curve(cfg["input"])
    values = interp_nearest(curve.values, cfg["length"])
    out = RmsCurve(
        values,
        cfg["rate"] or curve.sample_rate,
        cfg["window"] or curve.window,
        cfg["hop"] or curve.hop,
    )
    out.save(cfg["out"])
    return [cfg["input"]], [cfg["out"]]


def _exec_labels_smooth(cfg):
    q = _load_quant_or_rms(cfg["input"], cfg["bins"])
    make_gls_targets(q, cfg["width"], cfg["sigma"]).save(cfg["out"])
    return [cfg["input"]], [cfg["out"]]


def _exec_envelope_synth(cfg):
    spec = EnvelopeSpec(cfg["shape"], cfg["length"], cfg["peak"], cfg["floor"])
    values = synth_envelope(spec)
    RmsCurve(values, cfg["rate"], cfg["window"], cfg["hop"]).save(cfg["out"])
    return [], [cfg["out"]]


def _exec_envelope_from_onsets(cfg):
    values = envelope_from_onsets(
        cfg["onsets"], cfg["peaks"], cfg["length"], cfg["decay_frames"])
    RmsCurve(values, cfg["rate"], cfg["window"], cfg["hop"]).save(cfg["out"])
    return [], [cfg["out"]]


def _exec_envelope_transfer(cfg):
    w = read_wav(cfg["input"])
    target = _load_curve(cfg["target"])
    write_wav(transfer_envelope(w, target), cfg["out"], cfg["bit_depth"])
    return [cfg["input"], cfg["target"]], [cfg["out"]]


def _exec_dataset_synth(cfg):
    spec = SynthDatasetSpec(
        n_sequences=cfg["sequences"],
        frames_per_sequence=cfg["frames"],
        feature_dim=cfg["dim"],
        event_rate=cfg["rate"],
        noise_std=cfg["noise"],
        seed=cfg["seed"],
    )
    os.makedirs(cfg["out"], exist_ok=True)
    outputs = []
    for i, (feats, curve) in enumerate(synth_dataset(spec)):
        fpath = os.path.join(cfg["out"], f"seq{i:03d}.features.csv")
        cpath = os.path.join(cfg["out"], f"seq{i:03d}.rms")
        np.savetxt(fpath, feats.frames, delimiter=",", fmt="%.17g")
        curve.save(cpath)
        outputs += [fpath, cpath]
    return [], outputs


def _load_dataset_dir(path):
    names = sorted(n for n in os.listdir(path) if n.endswith(".features.csv"))
    if not names:
        raise UsageError(f"no *.features.csv files in {path}")
    dataset, paths = [], []
    for n in names:
        stem = n[: -len(".features.csv")]
        fpath = os.path.join(path, n)
        cpath = os.path.join(path, stem + ".rms")
        if not os.path.exists(cpath):
            raise UsageError(f"missing RMS curve for {stem}")
        feats = FeatureSequence(np.loadtxt(fpath, delimiter=",", ndmin=2))
        dataset.append((stem, feats, RmsCurve.load(cpath)))
        paths += [fpath, cpath]
    return dataset, paths


def _exec_train(cfg):
    dataset, inputs = _load_dataset_dir(cfg["dataset"])
    head = "classification" if cfg["loss"] == "ce_gls" else "regression"
    params = PredictorParams(
        input_dim=dataset[0][1].dim,
        hidden=cfg["hidden"],
        head=head,
        n_bins=cfg["bins"],
        seed=cfg["seed"],
    )
    trained, trace = train(
        params,
        [(f, c) for _, f, c in dataset],
        cfg["loss"],
        epochs=cfg["epochs"],
        lr=cfg["lr"],
        lr_step=cfg["lr_step"],
        batch=cfg["batch"],
        gls_width=cfg["width"],
        gls_sigma=cfg["sigma"],
    )
    os.makedirs(cfg["out"], exist_ok=True)
    ckpt = os.path.join(cfg["out"], "model.ckpt")
    tracef = os.path.join(cfg["out"], "trace.json")
    trained.save(ckpt, epoch=cfg["epochs"])
    _json_dump({"loss": cfg["loss"], "trace": trace}, tracef)
    return inputs, [ckpt, tracef]


def _exec_predict(cfg):
    params = PredictorParams.load(cfg["checkpoint"])
    dataset, inputs = _load_dataset_dir(cfg["dataset"])
    os.makedirs(cfg["out"], exist_ok=True)
    outputs = []
    for stem, feats, gt in dataset:
        curve = predict_rms(params, feats, gt.sample_rate, gt.window, gt.hop)
        path = os.path.join(cfg["out"], stem + ".rms")
        curve.save(path)
        outputs.append(path)
    return inputs + [cfg["checkpoint"]], outputs


def _metrics_out(cfg, metrics, inputs):
    os.makedirs(cfg["out"], exist_ok=True)
    path = os.path.join(cfg["out"], "metrics.json")
    _json_dump({"metrics": metrics}, path)
    return inputs, [path]


def _exec_eval_el1(cfg):
    pairs = _curve_pairs(cfg["gt"], cfg["pred"])
    gt_all, pred_all = [], []
    for g, p in pairs:
        gc, pc = _load_curve(g), _load_curve(p)
        if len(gc) != len(pc):
            raise UsageError(f"length mismatch between {g} and {p}")
        gt_all.append(gc.values)
        pred_all.append(pc.values)
    gt = np.concatenate(gt_all)
    pred = np.concatenate(pred_all)
    if cfg["event_frames"]:
        value = event_frame_e_l1(gt, pred, cfg["threshold"])
        metrics = {"e_l1_event": value}
    else:
        metrics = {"e_l1": e_l1(gt, pred)}
    inputs = [p for pair in pairs for p in pair]
    return _metrics_out(cfg, metrics, inputs)


def _exec_eval_acc(cfg):
    pairs = _curve_pairs(cfg["gt"], cfg["pred"])
    gt_bins, pred_bins = [], []
    for g, p in pairs:
        gq = _load_quant_or_rms(g, cfg["bins"])
        pq = _load_quant_or_rms(p, cfg["bins"])
        if len(gq) != len(pq):
            raise UsageError(f"length mismatch between {g} and {p}")
        gt_bins.append(gq.bins)
        pred_bins.append(pq.bins)
    framing = (16000, 512, 128)  # pooled bins only; framing is irrelevant here
    gt = QuantCurve(np.concatenate(gt_bins), cfg["bins"], *framing)
    pred = QuantCurve(np.concatenate(pred_bins), cfg["bins"], *framing)
    from .metrics import rms_accuracy

    metrics = {}
    for tol in cfg["tols"]:
        metrics[f"acc_tol{tol}"] = rms_accuracy(gt, pred, tol)
    inputs = [p for pair in pairs for p in pair]
    return _metrics_out(cfg, metrics, inputs)


def _load_onsets(path, window_ms, threshold):
    if path.endswith(".onsets"):
        return OnsetList.load(path)
    curve = _load_curve(path)
    conf = onset_confidence(curve)
    return nms_peaks(conf, window_ms, curve.frame_rate, threshold)


def _exec_eval_onset(cfg):
    gt = _load_onsets(cfg["gt"], cfg["window_ms"], cfg["threshold"])
    pred = _load_onsets(cfg["pred"], cfg["window_ms"], cfg["threshold"])
    acc, ap = onset_metrics(gt, pred, cfg["tol_s"])
    return _metrics_out(
        cfg, {"onset_acc": acc, "onset_ap": ap}, [cfg["gt"], cfg["pred"]])


def _exec_eval_fad(cfg):
    r = EmbeddingSet.load(cfg["reference"], label="reference")
    g = EmbeddingSet.load(cfg["generated"], label="generated")
    fad = frechet_distance(r, g)
    return _metrics_out(cfg, {"fad": fad}, [cfg["reference"], cfg["generated"]])


def _exec_eval_cosine(cfg):
    a = EmbeddingSet.load(cfg["a"])
    b = EmbeddingSet.load(cfg["b"])
    if a.n != b.n:
        raise UsageError("embedding files must have the same number of rows")
    scores = [cosine_score(a.vectors[i], b.vectors[i]) for i in range(a.n)]
    return _metrics_out(cfg, {"cosine": float(np.mean(scores))}, [cfg["a"], cfg["b"]])


def _exec_report(cfg):
    rows = []
    inputs = []
    for run_dir in cfg["runs"]:
        man = os.path.join(run_dir, "manifest.json")
        if not os.path.exists(man):
            raise FileNotFoundError(f"no manifest.json in {run_dir}")
        inputs.append(man)
        metrics = {}
        mpath = os.path.join(run_dir, "metrics.json")
        if os.path.exists(mpath):
            with open(mpath) as f:
                metrics = json.load(f)["metrics"]
            inputs.append(mpath)
        rows.append((os.path.basename(os.path.normpath(run_dir)), metrics))
    rows.sort(key=lambda r: r[0])

    columns = sorted({k for _, m in rows for k in m})
    os.makedirs(cfg["out"], exist_ok=True)
    csv_path = os.path.join(cfg["out"], "report.csv")
    json_path = os.path.join(cfg["out"], "report.json")
    with open(csv_path, "w") as f:
        f.write(",".join(["run"] + columns) + "\n")
        for name, metrics in rows:
            cells = [name]
            for c in columns:
                v = metrics.get(c)
                cells.append("" if v is None else repr(v))
            f.write(",".join(cells) + "\n")
    _json_dump(
        [{"run": name, "metrics": metrics} for name, metrics in rows], json_path)
    return inputs, [csv_path, json_path]


_EXECUTORS = {
    "rms extract": (_exec_rms_extract, "file"),
    "rms quantize": (_exec_rms_quantize, "file"),
    "rms dequantize": (_exec_rms_dequantize, "file"),
    "rms interp": (_exec_rms_interp, "file"),
    "labels smooth": (_exec_labels_smooth, "file"),
    "envelope synth": (_exec_envelope_synth, "file"),
    "envelope from-onsets": (_exec_envelope_from_onsets, "file"),
    "envelope transfer": (_exec_envelope_transfer, "file"),
    "dataset synth": (_exec_dataset_synth, "dir"),
    "train": (_exec_train, "dir"),
    "predict": (_exec_predict, "dir"),
    "eval el1": (_exec_eval_el1, "dir"),
    "eval acc": (_exec_eval_acc, "dir"),
    "eval onset": (_exec_eval_onset, "dir"),
    "eval fad": (_exec_eval_fad, "dir"),
    "eval cosine": (_exec_eval_cosine, "dir"),
    "report": (_exec_report, "dir"),
}


def _run_command(command, cfg):
    executor, out_kind = _EXECUTORS[command]
    inputs, outputs = executor(cfg)
    if out_kind == "dir":
        manifest_path = os.path.join(cfg["out"], "manifest.json")
    else:
        manifest_path = cfg["out"] + ".manifest.json"
    _write_manifest(manifest_path, command, cfg, inputs, outputs)
    return manifest_path


# ---------------------------------------------------------------------------
# argparse wiring


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _add_framing_flags(p, with_preset=False):
    p.add_argument("--window", type=int, default=None, help="analysis window in samples")
    p.add_argument("--hop", type=int, default=None, help="hop in samples")
    if with_preset:
        p.add_argument("--preset", choices=sorted(_PRESETS), default="default",
                       help="named framing preset (flags win over the preset)")


def _framing(args):
    preset = _PRESETS[getattr(args, "preset", "default")]
    window = args.window if args.window is not None else preset["window"]
    hop = args.hop if args.hop is not None else preset["hop"]
    if window <= 0 or hop <= 0:
        raise UsageError("window and hop must be positive")
    return window, hop


def _build_parser():
    p = argparse.ArgumentParser(
        prog="foley-rms",
        description="RMS envelope extraction, quantization, prediction, and evaluation",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    rms = sub.add_parser("rms", help="envelope extraction and companding")
    rms_sub = rms.add_subparsers(dest="sub", required=True)

    q = rms_sub.add_parser("extract", help="WAV -> RMS curve file")
    q.add_argument("input")
    q.add_argument("-o", "--out", required=True)
    _add_framing_flags(q, with_preset=True)

    q = rms_sub.add_parser("quantize", help="RMS curve -> mu-law bin file")
    q.add_argument("input")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--bins", type=int, default=64)

    q = rms_sub.add_parser("dequantize", help="bin file -> RMS curve at bin centers")
    q.add_argument("input")
    q.add_argument("-o", "--out", required=True)

    q = rms_sub.add_parser("interp", help="nearest-neighbor resample to a frame count")
    q.add_argument("input")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--length", type=int, required=True)
    q.add_argument("--rate", type=int, default=None, help="output metadata override")
    q.add_argument("--window", type=int, default=None)
    q.add_argument("--hop", type=int, default=None)

    lab = sub.add_parser("labels", help="classification target construction")
    lab_sub = lab.add_subparsers(dest="sub", required=True)
    q = lab_sub.add_parser("smooth", help="quantized curve -> smoothed target matrix CSV")
    q.add_argument("input", help="quantized or continuous curve file")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--bins", type=int, default=64)
    q.add_argument("--width", type=int, default=2)
    q.add_argument("--sigma", type=float, default=1.0)

    env = sub.add_parser("envelope", help="synthetic envelopes and transfer")
    env_sub = env.add_subparsers(dest="sub", required=True)

    q = env_sub.add_parser("synth", help="parametric shape -> RMS curve file")
    q.add_argument("--shape", choices=("attack", "v", "increase", "decrease"), required=True)
    q.add_argument("--length", type=int, required=True)
    q.add_argument("--peak", type=float, default=1.0)
    q.add_argument("--floor", type=float, default=0.0)
    q.add_argument("--rate", type=int, default=16000)
    q.add_argument("--window", type=int, default=512)
    q.add_argument("--hop", type=int, default=128)
    q.add_argument("-o", "--out", required=True)

    q = env_sub.add_parser("from-onsets", help="decaying envelope from onset frames")
    q.add_argument("--onsets", type=_int_list, required=True)
    q.add_argument("--peaks", type=_float_list, required=True)
    q.add_argument("--length", type=int, required=True)
    q.add_argument("--decay-frames", type=float, default=10.0)
    q.add_argument("--rate", type=int, default=16000)
    q.add_argument("--window", type=int, default=512)
    q.add_argument("--hop", type=int, default=128)
    q.add_argument("-o", "--out", required=True)

    q = env_sub.add_parser("transfer", help="impose a target RMS contour on a WAV")
    q.add_argument("input")
    q.add_argument("target", help="target RMS curve file")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--bit-depth", choices=("pcm16", "float32"), default="pcm16")

    q = sub.add_parser("dataset", help="synthetic event corpus")
    ds_sub = q.add_subparsers(dest="sub", required=True)
    q = ds_sub.add_parser("synth", help="generate feature/RMS sequence pairs")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--sequences", type=int, default=64)
    q.add_argument("--frames", type=int, default=250)
    q.add_argument("--dim", type=int, default=16)
    q.add_argument("--rate", type=float, default=5.0, help="events per sequence")
    q.add_argument("--noise", type=float, default=0.25)
    q.add_argument("--seed", type=int, default=0)

    q = sub.add_parser("train", help="fit the predictor on a dataset directory")
    q.add_argument("dataset")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--loss", choices=("ce_gls", "l2"), required=True)
    q.add_argument("--epochs", type=int, default=1200)
    q.add_argument("--lr", type=float, default=0.05)
    q.add_argument("--lr-step", type=int, default=150)
    q.add_argument("--batch", type=int, default=32)
    q.add_argument("--bins", type=int, default=64)
    q.add_argument("--width", type=int, default=2)
    q.add_argument("--sigma", type=float, default=1.0)
    q.add_argument("--hidden", type=int, default=32)
    q.add_argument("--seed", type=int, default=0)

    q = sub.add_parser("predict", help="run a checkpoint over a dataset directory")
    q.add_argument("checkpoint")
    q.add_argument("dataset")
    q.add_argument("-o", "--out", required=True)

    ev = sub.add_parser("eval", help="objective metrics")
    ev_sub = ev.add_subparsers(dest="sub", required=True)

    q = ev_sub.add_parser("el1", help="mean absolute curve error")
    q.add_argument("gt")
    q.add_argument("pred")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--event-frames", action="store_true",
                   help="restrict to frames with gt above the threshold")
    q.add_argument("--threshold", type=float, default=0.05)

    q = ev_sub.add_parser("acc", help="tolerance-binned accuracy, silence excluded")
    q.add_argument("gt")
    q.add_argument("pred")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--bins", type=int, default=64)
    q.add_argument("--tols", type=_int_list, default=[2, 5, 8])

    q = ev_sub.add_parser("onset", help="onset accuracy and average precision")
    q.add_argument("gt", help="curve file or .onsets list")
    q.add_argument("pred", help="curve file or .onsets list")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--window-ms", type=float, default=50.0)
    q.add_argument("--threshold", type=float, default=0.3)
    q.add_argument("--tol-s", type=float, default=0.1)

    q = ev_sub.add_parser("fad", help="Frechet distance between embedding sets")
    q.add_argument("reference")
    q.add_argument("generated")
    q.add_argument("-o", "--out", required=True)

    q = ev_sub.add_parser("cosine", help="mean cosine similarity of paired rows")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("-o", "--out", required=True)

    q = sub.add_parser("report", help="aggregate run dirs into a metric table")
    q.add_argument("runs", nargs="+")
    q.add_argument("-o", "--out", required=True)

    q = sub.add_parser("rerun", help="re-execute a pipeline from its manifest")
    q.add_argument("manifest")
    return p


def _config_from_args(args):
    """Map parsed flags to (command name, fully resolved config dict)."""
    cmd = args.cmd if args.cmd in ("train", "predict", "report") else f"{args.cmd} {args.sub}"

    if cmd == "rms extract":
        window, hop = _framing(args)
        return cmd, {"input": args.input, "out": args.out, "window": window, "hop": hop}
    if cmd == "rms quantize":
        if args.bins < 2:
            raise UsageError("--bins must be >= 2")
        return cmd, {"input": args.input, "out": args.out, "bins": args.bins}
    if cmd == "rms dequantize":
        return cmd, {"input": args.input, "out": args.out}
    if cmd == "rms interp":
        if args.length < 1:
            raise UsageError("--length must be >= 1")
        return cmd, {
            "input": args.input, "out": args.out, "length": args.length,
            "rate": args.rate, "window": args.window, "hop": args.hop,
        }
    if cmd == "labels smooth":
        if args.bins < 2 or args.width < 0 or args.sigma <= 0:
            raise UsageError("need --bins >= 2, --width >= 0, --sigma > 0")
        return cmd, {
            "input": args.input, "out": args.out,
            "bins": args.bins, "width": args.width, "sigma": args.sigma,
        }
    if cmd == "envelope synth":
        return cmd, {
            "shape": args.shape, "length": args.length,
            "peak": args.peak, "floor": args.floor,
            "rate": args.rate, "window": args.window, "hop": args.hop,
            "out": args.out,
        }
    if cmd == "envelope from-onsets":
        return cmd, {
            "onsets": args.onsets, "peaks": args.peaks, "length": args.length,
            "decay_frames": args.decay_frames,
            "rate": args.rate, "window": args.window, "hop": args.hop,
            "out": args.out,
        }
    if cmd == "envelope transfer":
        return cmd, {
            "input": args.input, "target": args.target,
            "out": args.out, "bit_depth": args.bit_depth,
        }
    if cmd == "dataset synth":
        return cmd, {
            "out": args.out, "sequences": args.sequences, "frames": args.frames,
            "dim": args.dim, "rate": args.rate, "noise": args.noise,
            "seed": _resolve_seed(args.seed),
        }
    if cmd == "train":
        if args.epochs < 0 or args.batch < 1 or args.lr_step < 1:
            raise UsageError("need --epochs >= 0, --batch >= 1, --lr-step >= 1")
        return cmd, {
            "dataset": args.dataset, "out": args.out, "loss": args.loss,
            "epochs": args.epochs, "lr": args.lr, "lr_step": args.lr_step,
            "batch": args.batch, "bins": args.bins, "width": args.width,
            "sigma": args.sigma, "hidden": args.hidden,
            "seed": _resolve_seed(args.seed),
        }
    if cmd == "predict":
        return cmd, {
            "checkpoint": args.checkpoint, "dataset": args.dataset, "out": args.out,
        }
    if cmd == "eval el1":
        return cmd, {
            "gt": args.gt, "pred": args.pred, "out": args.out,
            "event_frames": args.event_frames, "threshold": args.threshold,
        }
    if cmd == "eval acc":
        if args.bins < 2 or not args.tols or min(args.tols) < 0:
            raise UsageError("need --bins >= 2 and non-negative --tols")
        return cmd, {
            "gt": args.gt, "pred": args.pred, "out": args.out,
            "bins": args.bins, "tols": sorted(args.tols),
        }
    if cmd == "eval onset":
        if args.window_ms <= 0 or args.tol_s < 0:
            raise UsageError("need --window-ms > 0 and --tol-s >= 0")
        return cmd, {
            "gt": args.gt, "pred": args.pred, "out": args.out,
            "window_ms": args.window_ms, "threshold": args.threshold,
            "tol_s": args.tol_s,
        }
    if cmd == "eval fad":
        return cmd, {"reference": args.reference, "generated": args.generated,
                     "out": args.out}
    if cmd == "eval cosine":
        return cmd, {"a": args.a, "b": args.b, "out": args.out}
    if cmd == "report":
        return cmd, {"runs": list(args.runs), "out": args.out}
    raise UsageError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.cmd == "rerun":
            with open(args.manifest) as f:
                manifest = json.load(f)
            command = manifest.get("command")
            if command not in _EXECUTORS:
                raise UsageError(f"manifest names unknown command {command!r}")
            _run_command(command, manifest["config"])
        else:
            command, cfg = _config_from_args(args)
            _run_command(command, cfg)
        return 0
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
