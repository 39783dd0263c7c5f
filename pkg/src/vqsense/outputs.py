"""Trajectory CSVs and summary JSON, written atomically."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

from .agent import StepRecord, wrapped_error
from .fusion import FusionRecord

CSV_SCHEMA = "vqsense-trajectory/1"
FUSED_SCHEMA = "vqsense-fused/1"
SUMMARY_SCHEMA = "vqsense-summary/1"


def fmt(v) -> str:
    return format(float(v), ".17g")


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def trajectory_header(action_dim: int, obs_bits: int) -> list[str]:
    return (["t", "x_true", "x_hat", "wrapped_error", "raw_error", "mi_nats", "loss", "x_std", "flagged"]
            + [f"a_{j}" for j in range(action_dim)] + [f"s_{j}" for j in range(obs_bits)])


def trajectory_csv(records: list[StepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trajectory_header(records[0].action.dim, records[0].observation.size))
    for r in records:
        w.writerow([r.t, fmt(r.x_true), fmt(r.x_hat), fmt(wrapped_error(r.x_true, r.x_hat)),
                    fmt(r.x_true - r.x_hat), fmt(r.mi_value), fmt(r.loss), fmt(r.x_std), int(r.flagged)]
                   + [fmt(a) for a in r.action.vector()] + [int(b) for b in r.observation])
    return buf.getvalue()


def fused_csv(records: list[FusionRecord]) -> str:
    K = len(records[0].estimates)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x_true", "x_hat", "wrapped_error", "raw_error", "gamma"]
               + [c for k in range(K) for c in (f"x_hat_{k}", f"std_{k}", f"included_{k}")])
    for r in records:
        per = [v for e, s, ok in zip(r.estimates, r.stds, r.included) for v in (fmt(e), fmt(s), int(ok))]
        w.writerow([r.t, fmt(r.x_true), fmt(r.fused), fmt(wrapped_error(r.x_true, r.fused)),
                    fmt(r.x_true - r.fused), fmt(r.gamma)] + per)
    return buf.getvalue()


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def ensemble(values) -> dict:
    v = np.asarray([x for x in values if x is not None], dtype=float)
    if not v.size:
        return {"n": 0, "mean": None, "std": None}
    return {"n": int(v.size), "mean": float(v.mean()), "std": float(v.std())}
