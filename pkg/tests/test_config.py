import json

import pytest

from gffv import ConfigurationError
from gffv.config import load_config, parse_set_value, validate_config
from gffv.scenarios import build_scenario, list_scenarios

FULL = {
    "grid": {"bounds": [-2.0, 2.0], "n_cells": 32},
    "model": {"internal": {"variant": "power_law", "nu": 1.0, "m": 2.0},
              "kernel": {"variant": "gaussian", "amplitude": -1.0,
                         "sigma": 1.0}},
    "quadrature": "midpoint",
    "t_end": 1.0,
    "initial": {"type": "gaussian", "center": 0.0, "variance": 1.0,
                "mass": 1.0},
}


def test_full_config_happy_path():
    cfg = validate_config(FULL)
    assert cfg.grid.n == 32
    assert cfg.model.kernel is not None
    assert cfg.integrator == "ssprk3"  # default
    assert cfg.step.cfl_safety == 0.9


def test_scenario_reference_form():
    cfg = load_config({"scenario": "quadlog_1d", "n_cells": 60})
    assert cfg.scenario_name == "quadlog_1d"
    assert cfg.grid.n == 60


def test_scenario_example_override():
    cfg = load_config({"scenario": "aggdiff_gauss_1d", "m": 3, "nu": 1.48,
                       "sigma": 1})
    assert cfg.model.internal.m == 3.0
    assert cfg.model.internal.nu == 1.48


def test_unknown_top_key_names_path():
    bad = dict(FULL, typo_key=1)
    with pytest.raises(ConfigurationError, match="typo_key"):
        validate_config(bad)


def test_unknown_nested_key_names_path():
    bad = json.loads(json.dumps(FULL))
    bad["model"]["kernel"]["sigmah"] = 2
    with pytest.raises(ConfigurationError, match="model.kernel"):
        validate_config(bad)


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"grid": [,}')
    with pytest.raises(ConfigurationError, match="line 1"):
        load_config(str(p))


def test_singular_kernel_rejects_midpoint():
    bad = json.loads(json.dumps(FULL))
    bad["model"]["kernel"] = {"variant": "power_law", "a": 0.0}
    bad["quadrature"] = "midpoint"
    with pytest.raises(ConfigurationError, match="singular"):
        validate_config(bad)


def test_log_confinement_needs_even_cells():
    bad = {
        "grid": {"bounds": [[-1.0, 1.0], [-1.0, 1.0]], "n_cells": [11, 10]},
        "model": {"internal": {"variant": "none", "epsilon": 0.01},
                  "external": {"variant": "log_confinement", "c": 0.1}},
        "t_end": 1.0,
        "initial": {"type": "ring", "radius": 0.3, "width": 0.05,
                    "mass": 1.0},
    }
    with pytest.raises(ConfigurationError, match="even"):
        validate_config(bad)


def test_quadrature_dimension_rules():
    bad = json.loads(json.dumps(FULL))
    bad["quadrature"] = "gauss_tensor4"
    with pytest.raises(ConfigurationError, match="2D"):
        validate_config(bad)


def test_power_law_integrability_enforced():
    bad = json.loads(json.dumps(FULL))
    bad["model"]["kernel"] = {"variant": "power_law", "a": -1.5}
    bad["quadrature"] = "exact_integral"
    with pytest.raises(ConfigurationError):
        validate_config(bad)


def test_model_needs_some_term():
    bad = json.loads(json.dumps(FULL))
    bad["model"] = {"internal": {"variant": "none"}}
    with pytest.raises(ConfigurationError):
        validate_config(bad)


def test_fixed_dt_parsed():
    good = json.loads(json.dumps(FULL))
    good["step"] = {"fixed_dt": 0.001}
    cfg = validate_config(good)
    assert cfg.step.fixed_dt == 0.001


def test_every_scenario_builds():
    for name, _desc in list_scenarios():
        cfg = build_scenario(name, {})
        assert cfg.t_end > 0
        assert cfg.raw["scenario_name"] == name


def test_unknown_scenario_lists_known():
    with pytest.raises(ConfigurationError, match="quadlog_1d"):
        build_scenario("not_a_scenario", {})


def test_unknown_scenario_parameter():
    with pytest.raises(ConfigurationError, match="bogus"):
        build_scenario("doublewell_1d", {"bogus": 2})


def test_quadlog_cells_multiple_of_six():
    with pytest.raises(ConfigurationError, match="multiple of 6"):
        build_scenario("quadlog_1d", {"n_cells": 100})


@pytest.mark.parametrize("text,expect", [("1e-8", 1e-8), ("3", 3),
                                         ("true", True), ("fft", "fft"),
                                         ("[1,2]", [1, 2])])
def test_parse_set_value(text, expect):
    assert parse_set_value(text) == expect


def test_dotted_overrides_full_config():
    cfg = load_config(dict(FULL), {"step.steady_tol": 1e-9, "t_end": 2.0})
    assert cfg.step.steady_tol == 1e-9
    assert cfg.t_end == 2.0
