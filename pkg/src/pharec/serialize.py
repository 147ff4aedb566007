"""Artifact and trial file formats.

JSON artifacts carry a versioned "schema" field and are written with sorted
keys so identical inputs produce byte-identical files.  Trial CSVs store
full double precision (17 significant digits) so stage re-runs are
bit-stable.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import IoError
from .vf_reconstruction import Trial, TrialSet

__all__ = [
    "write_json",
    "read_json",
    "write_trial_csv",
    "read_trial_csv",
    "write_trial_set",
    "read_trial_set",
    "write_heatmap_csv",
]

SCHEMA_VERSION = 1


def write_json(path: str, payload: dict, schema: str):
    doc = dict(payload)
    doc["schema"] = f"{schema}/v{SCHEMA_VERSION}"
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_json(path: str, schema: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    expected = f"{schema}/v{SCHEMA_VERSION}"
    if doc.get("schema") != expected:
        raise IoError(f"{path}: expected schema {expected}, got {doc.get('schema')}")
    return doc


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trial_csv(path: str, trial: Trial):
    n_osc = trial.n_oscillators
    header = ["t"]
    for i in range(n_osc):
        header += [f"theta_{i + 1}", f"r_{i + 1}"]
    try:
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for k in range(trial.times.shape[0]):
                row = [_fmt(trial.times[k])]
                for i in range(n_osc):
                    row += [_fmt(trial.theta[k, i]), _fmt(trial.r[k, i])]
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_trial_csv(path: str) -> Trial:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if data.ndim != 2 or (data.shape[1] - 1) % 2 != 0:
        raise IoError(f"{path}: malformed trial file")
    n_osc = (data.shape[1] - 1) // 2
    return Trial(times=data[:, 0],
                 theta=data[:, 1:1 + 2 * n_osc:2],
                 r=data[:, 2:2 + 2 * n_osc:2])


def write_trial_set(out_dir: str, trial_set: TrialSet) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for p, trial in enumerate(trial_set.trials):
        path = os.path.join(out_dir, f"trial_{p:04d}.csv")
        write_trial_csv(path, trial)
        paths.append(os.path.basename(path))
    manifest = {"files": paths, "step": trial_set.step,
                "metadata": trial_set.metadata}
    write_json(os.path.join(out_dir, "manifest.json"), manifest, "trials")
    return paths


def read_trial_set(out_dir: str) -> TrialSet:
    manifest = read_json(os.path.join(out_dir, "manifest.json"), "trials")
    trials = [read_trial_csv(os.path.join(out_dir, name))
              for name in manifest["files"]]
    return TrialSet(trials=trials, step=manifest["step"],
                    metadata=manifest["metadata"])


def write_heatmap_csv(path: str, matrix: np.ndarray):
    try:
        with open(path, "w") as fh:
            for row in matrix:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
