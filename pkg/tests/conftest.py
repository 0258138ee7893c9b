"""Shared fixtures.

The classification-vs-regression comparison needs real training runs at
the package defaults, which takes a few minutes. Build that experiment
once per session, through the CLI so the artifact plumbing is exercised
too, and let every test that needs it share the artifacts.

Models train on one synthetic corpus and are scored on a second one
drawn from the same spec with a different seed, so the comparison
measures what the losses learned rather than what the networks memorized.
"""

import json
import os
import time

import pytest

from foley_rms.cli import main


def _metrics(run_dir):
    with open(os.path.join(run_dir, "metrics.json")) as f:
        return json.load(f)["metrics"]


@pytest.fixture(scope="session")
def ab_experiment(tmp_path_factory):
    os.environ.pop("FOLEY_RMS_SEED", None)  # must not leak into the runs
    root = tmp_path_factory.mktemp("ab_experiment")
    train_data = root / "train_data"
    eval_data = root / "eval_data"

    timings = {}
    t0 = time.time()
    assert main(["dataset", "synth", "-o", str(train_data)]) == 0
    assert main(["dataset", "synth", "-o", str(eval_data), "--seed", "1"]) == 0
    timings["dataset"] = time.time() - t0

    runs = {}
    for name, loss, extra in [
        ("ce_gls", "ce_gls", []),
        ("l2", "l2", []),
        ("ce_w0", "ce_gls", ["--width", "0"]),
    ]:
        run = root / name
        pred = root / f"{name}_pred"
        el1 = root / f"{name}_el1"
        acc = root / f"{name}_acc"
        t0 = time.time()
        assert main(["train", str(train_data), "-o", str(run), "--loss", loss]
                    + extra) == 0
        assert main(["predict", str(run / "model.ckpt"), str(eval_data),
                     "-o", str(pred)]) == 0
        assert main(
            ["eval", "el1", str(eval_data), str(pred), "-o", str(el1),
             "--event-frames"]
        ) == 0
        assert main(["eval", "acc", str(eval_data), str(pred), "-o", str(acc)]) == 0
        timings[name] = time.time() - t0
        metrics = {}
        metrics.update(_metrics(el1))
        metrics.update(_metrics(acc))
        with open(run / "trace.json") as f:
            trace = json.load(f)["trace"]
        runs[name] = {
            "dir": run,
            "pred": pred,
            "eval_dirs": [el1, acc],
            "metrics": metrics,
            "trace": trace,
        }

    report = root / "report"
    eval_dirs = [str(d) for n in ("ce_gls", "l2") for d in runs[n]["eval_dirs"]]
    assert main(["report", *eval_dirs, "-o", str(report)]) == 0

    return {
        "root": root,
        "train_data": train_data,
        "eval_data": eval_data,
        "runs": runs,
        "report": report,
        "timings": timings,
    }
