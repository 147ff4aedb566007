import pytest

from pharec import pipeline
from pharec.errors import InvalidConfig


def test_default_configs_valid():
    for kind in ("radial_isochron_clock", "canonical", "van_der_pol",
                 "wilson_cowan"):
        config = pipeline.default_config(kind, "/tmp/x")
        assert config.model["kind"] == kind
        assert config.single_spec.size > 0
        assert config.transform_spec.size >= config.single_spec.size
        assert config.n_gamma in (8, 32)


def test_config_round_trip():
    config = pipeline.default_config("van_der_pol", "/tmp/x", seed=7)
    again = pipeline.PipelineConfig.from_dict(config.to_dict())
    assert again.to_dict() == config.to_dict()
    assert again.transform_orders == (7, 12)


def test_invalid_values_rejected():
    base = pipeline.default_config("canonical", "/tmp/x").to_dict()
    for key, value in (("n_trials", 0), ("trial_periods", -1.0),
                       ("grid_points", 3), ("radial_span", (1.4, 0.7))):
        bad = dict(base)
        bad[key] = value
        with pytest.raises(InvalidConfig):
            pipeline.PipelineConfig.from_dict(bad)
    bad = dict(base)
    bad["model"] = {"kind": "nope", "params": {"a": [1.0]}, "coupling": [[0.0]]}
    with pytest.raises(InvalidConfig):
        pipeline.PipelineConfig.from_dict(bad)
    with pytest.raises(InvalidConfig):
        pipeline.PipelineConfig.from_dict(dict(base, unknown_key=1))


def test_tolerance_table_present():
    config = pipeline.default_config("canonical", "/tmp/x")
    for key in ("lambda_monodromy_rel", "pde_phi_rel", "composition_abs",
                "directionality_ratio", "reduced_table_rel"):
        assert key in config.tolerances
