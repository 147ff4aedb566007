"""Shared fixtures: one full pipeline run per benchmark model, reused by all
integration and acceptance tests."""

import time
from types import SimpleNamespace

import pytest

from pharec import pipeline

MODEL_KINDS = (
    "radial_isochron_clock",
    "canonical",
    "van_der_pol",
    "wilson_cowan",
)


@pytest.fixture(scope="session")
def pipeline_runs(tmp_path_factory):
    """Run the complete pipeline once for each benchmark model."""
    runs = {}
    total = 0.0
    for kind in MODEL_KINDS:
        out = tmp_path_factory.mktemp(f"pipe_{kind}")
        config = pipeline.default_config(kind, str(out), seed=42)
        t0 = time.time()
        report = pipeline.run_pipeline(config)
        total += time.time() - t0
        runs[kind] = SimpleNamespace(config=config, report=report,
                                     out_dir=str(out))
    runs["total_seconds"] = total
    return runs


def report_row(run, name):
    hits = [r for r in run.report["rows"] if r["name"] == name]
    assert len(hits) == 1, f"expected one report row named {name}"
    return hits[0]
