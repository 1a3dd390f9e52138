import json

import pytest

from cvent.errors import ScenarioError
from cvent.reproduce import builtin_names, load_builtin
from cvent.scenario import load_scenario, parse_scenario


def dimless(v):
    return {"value": v, "unit": "dimensionless"}


def base(**overrides):
    data = {
        "name": "demo",
        "alpha_tilde": dimless(-0.4),
        "noise": {"kappa_tilde": dimless(1.0), "n_th": dimless(0.0)},
        "outputs": ["steady_state"],
    }
    data.update(overrides)
    return data


def test_minimal_scenario():
    s = parse_scenario(base())
    assert s.alpha_tilde.value == -0.4
    assert s.z.value == 1.0
    assert s.times() == []


def test_linspace_time_grid():
    s = parse_scenario(base(time_grid={"start": 0, "stop": 1, "num": 5}, outputs=["trajectory"]))
    assert s.times() == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_log_sweep():
    s = parse_scenario(base(sweep=[{"parameter": "kappa_tilde", "values": {"start": 0.1, "stop": 10, "num": 3, "scale": "log"}}]))
    assert s.sweep[0].expanded() == pytest.approx([0.1, 1.0, 10.0])


@pytest.mark.parametrize(
    "overrides, field",
    [
        (dict(time_grid=[], outputs=["trajectory"]), "<root>"),
        (dict(outputs=["trajectory"]), "<root>"),
        (dict(outputs=[]), "outputs"),
        (dict(outputs=["movie"]), "outputs.0"),
        (dict(alpha_tilde={"value": -0.4, "unit": "kg"}), "<root>"),
        (dict(noise={"kappa_tilde": dimless(-1.0), "n_th": dimless(0.0)}), "noise"),
        (dict(z=dimless(0.0)), "<root>"),
        (dict(name="bad name"), "name"),
        (dict(colour="red"), "colour"),
        (dict(outputs=["precision_map"]), "<root>"),
        (dict(sweep=[{"parameter": "n_th", "values": [-1.0]}]), "<root>"),
        (dict(sweep=[{"parameter": "mass", "values": [1.0]}]), "sweep.0.parameter"),
        (dict(error_budget={"epsilon": dimless(0.01), "per_element": {"55": 0.1}}), "error_budget"),
    ],
)
def test_validation_errors_name_a_field(overrides, field):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(base(**overrides))
    assert info.value.field == field
    assert f"field '{field}'" in str(info.value)
    assert info.value.exit_code == 2


def test_potential_and_alpha_are_exclusive():
    potential = {
        "kind": "newtonian",
        "m": {"value": 1e-13, "unit": "kg"},
        "omega_m": {"value": 10.0, "unit": "rad/s"},
        "r": {"value": 1e-6, "unit": "m"},
    }
    with pytest.raises(ScenarioError, match="exactly one"):
        parse_scenario(base(potential=potential))
    data = base(potential=potential)
    del data["alpha_tilde"]
    assert parse_scenario(data).potential.to_spec().kind == "newtonian"
    data["sweep"] = [{"parameter": "alpha_tilde", "values": [0.1]}]
    with pytest.raises(ScenarioError, match="derived"):
        parse_scenario(data)


def test_coulomb_requires_charges():
    data = base(potential={
        "kind": "coulomb",
        "m": {"value": 1e-16, "unit": "kg"},
        "omega_m": {"value": 100.0, "unit": "rad/s"},
        "r": {"value": 1e-5, "unit": "m"},
    })
    del data["alpha_tilde"]
    with pytest.raises(ScenarioError, match="q1"):
        parse_scenario(data)


def test_json_errors_report_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "name": "x",\n  oops\n}')
    with pytest.raises(ScenarioError, match="line 3"):
        load_scenario(path)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "nope.json")


def test_round_trip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(base()))
    assert load_scenario(path) == parse_scenario(base())


@pytest.mark.parametrize("name", builtin_names())
def test_builtins_validate(name):
    assert load_builtin(name).name == name
