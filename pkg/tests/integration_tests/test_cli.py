import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from observerforms.cli import ScenarioFile, load_scenario, main, run_check, run_split
from observerforms.errors import ScenarioInputError

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"
OBSERVER_SCENARIOS = ["trivial", "boosted", "torqued", "anholonomic"]


def scenario_path(name: str) -> str:
    return str(SCENARIOS / f"{name}.yaml")


def write_scenario(tmp_path: Path, text: str, name: str = "scenario.yaml") -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def invoke(*args: str):
    return CliRunner().invoke(main.cli, list(args))


class TestSplit:
    @pytest.mark.parametrize("name", OBSERVER_SCENARIOS)
    def test_shipped_scenarios_pass(self, name):
        result = invoke("split", scenario_path(name))
        assert result.exit_code == main.EXIT_PASS, result.output
        assert result.output.splitlines()[-1] == "verdict: PASS"

    @pytest.mark.parametrize("name", OBSERVER_SCENARIOS)
    def test_structured_output_is_deterministic(self, name):
        first = invoke("split", scenario_path(name), "--format", "structured")
        second = invoke("split", scenario_path(name), "--format", "structured")
        assert first.output == second.output
        report = json.loads(first.output)
        assert report["command"] == "split"
        assert report["verdict"] == "PASS"
        assert report["source"] == scenario_path(name)

    def test_anholonomic_magnetic_charge(self):
        report = json.loads(invoke("split", scenario_path("anholonomic"), "--format", "structured").output)
        assert report["properties"] == {"holonomic": False, "metric_compatible": False, "torque_free": True}
        assert report["quantities"]["curvature"] == {"dx^dy (x) d/dt": "-1"}
        constitutive = {check["name"]: check for check in report["checks"] if check["name"].startswith("constitutive")}
        assert not constitutive["constitutive_E"]["asserted"]

    def test_torqued_quantities(self):
        report = json.loads(invoke("split", scenario_path("torqued"), "--format", "structured").output)
        assert report["quantities"]["torque"] == {"dx (x) d/dt": "1"}
        assert report["quantities"]["tau"] == {"dt": "1", "dx": "t"}

    def test_boosted_derives_tau(self):
        report = json.loads(invoke("split", scenario_path("boosted"), "--format", "structured").output)
        assert report["quantities"]["tau"] == {"dt": "5/3", "dx": "-4/3"}
        assert report["properties"]["metric_compatible"]

    def test_vacuum_scenario_fails(self, tmp_path):
        path = write_scenario(
            tmp_path,
            "observer:\n  T: [1, 0, 0, 0]\nem:\n  a: '0, 0, x^2, 0'\noptions:\n  compute_j: false\n",
        )
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_FAIL
        assert "[FAIL] ampere" in result.output
        assert result.output.splitlines()[-1] == "verdict: FAIL"

    def test_batch_keeps_order(self):
        names = ["torqued", "trivial", "anholonomic"]
        result = invoke("split", *(scenario_path(name) for name in names), "--jobs", "2", "--format", "structured")
        assert result.exit_code == main.EXIT_PASS, result.output
        reports = json.loads(result.output)
        assert [report["source"] for report in reports] == [scenario_path(name) for name in names]

    def test_output_file(self, tmp_path):
        target = tmp_path / "report.json"
        result = invoke("split", scenario_path("trivial"), "--format", "structured", "-o", str(target))
        assert result.exit_code == main.EXIT_PASS
        assert json.loads(target.read_text(encoding="utf-8"))["verdict"] == "PASS"


class TestCheck:
    @pytest.mark.parametrize("name", ["trivial", "boosted"])
    def test_all_suites_pass(self, name):
        result = invoke("check", scenario_path(name))
        assert result.exit_code == main.EXIT_PASS, result.output

    def test_prop47_passes_for_boosted(self):
        result = invoke("check", scenario_path("boosted"), "--suite", "prop47")
        assert result.exit_code == main.EXIT_PASS, result.output
        assert "[PASS] intertwining[iT hodge]" in result.output
        assert result.output.splitlines()[-1] == "verdict: PASS"

    def test_prop47_fails_for_anholonomic(self):
        result = invoke("check", scenario_path("anholonomic"), "--suite", "prop47")
        assert result.exit_code == main.EXIT_FAIL
        assert "[FAIL] intertwining[iT hodge]" in result.output
        assert result.output.splitlines()[-1] == "verdict: FAIL"

    @pytest.mark.parametrize(("alias", "suite"), [("brackets", "prop21"), ("intertwining", "prop47"), ("split-equation", "lemma42")])
    def test_aliases_run_the_same_suite(self, alias, suite):
        by_alias = run_check(load_scenario(scenario_path("anholonomic")), alias)
        by_name = run_check(load_scenario(scenario_path("anholonomic")), suite)
        assert by_alias.checks == by_name.checks
        assert by_alias.verdict == by_name.verdict

    @pytest.mark.parametrize("suite", ["decomposition", "temperley-lieb", "prop21", "lemma42"])
    @pytest.mark.parametrize("name", OBSERVER_SCENARIOS)
    def test_suites_hold_for_every_observer(self, name, suite):
        result = invoke("check", scenario_path(name), "--suite", suite)
        assert result.exit_code == main.EXIT_PASS, result.output

    def test_split_equation_block(self):
        report = json.loads(invoke("check", scenario_path("anholonomic"), "-s", "lemma42", "--format", "structured").output)
        assert [check["name"] for check in report["checks"]] == ["split-equation.spatial", "split-equation.temporal"]

    def test_split_equation_from_fields(self):
        report = json.loads(invoke("check", scenario_path("trivial"), "-s", "lemma42", "--format", "structured").output)
        assert [check["name"] for check in report["checks"]] == [
            "split-equation[F].spatial",
            "split-equation[F].temporal",
            "split-equation[G].spatial",
            "split-equation[G].temporal",
        ]

    def test_all_skips_split_equation_without_input(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: [1, 0, 0, 0]\n  tau: '1, t, 0, 0'\n")
        report = run_check(load_scenario(path), "all", source=path)
        assert not any(check.name.startswith("split-equation") for check in report.checks)
        with pytest.raises(ScenarioInputError, match="split_equation"):
            run_check(load_scenario(path), "lemma42", source=path)

    def test_unknown_suite(self):
        result = invoke("check", scenario_path("trivial"), "--suite", "jacobi")
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "Unknown suite" in result.output


class TestEhresmann:
    def test_u1_like_demo(self):
        result = invoke("ehresmann", "--demo", "u1-like", "--format", "structured")
        assert result.exit_code == main.EXIT_PASS, result.output
        report = json.loads(result.output)
        assert report["quantities"]["curvature"] == {"dx1^dx2 (x) d/du": "1"}
        assert report["properties"] == {"flat": False, "principal": True}

    def test_non_principal_demo(self):
        report = json.loads(invoke("ehresmann", "--demo", "non-principal", "--format", "structured").output)
        assert report["quantities"]["torque[u]"] == {"dx1 (x) d/du": "-1"}
        assert report["properties"] == {"flat": True, "principal": False}

    def test_spec_file(self):
        result = invoke("ehresmann", "--spec", scenario_path("u1-like"), "--format", "structured")
        assert result.exit_code == main.EXIT_PASS, result.output
        report = json.loads(result.output)
        assert report["quantities"]["covariant_derivative[u]"] == {"dx1": "x2"}
        assert report["quantities"]["horizontal[u]"] == {"dx1": "0", "dx2": "x1"}
        assert "bianchi" in [check["name"] for check in report["checks"]]

    def test_text_report(self):
        result = invoke("ehresmann", "--demo", "product")
        assert result.exit_code == main.EXIT_PASS
        assert "[PASS] axiom[idempotent]" in result.output
        assert "  flat: yes" in result.output

    @pytest.mark.parametrize("args", [[], ["--demo", "product", "--spec", "connection.yaml"]])
    def test_needs_exactly_one_source(self, args):
        result = invoke("ehresmann", *args)
        assert result.exit_code == main.EXIT_INPUT_ERROR

    def test_bad_connection_matrix(self, tmp_path):
        path = write_scenario(tmp_path, "base: [x1, x2]\nfiber: [u]\nhorizontal:\n  - '0'\n")
        result = invoke("ehresmann", "--spec", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "expected 2 entries" in result.output


class TestInputErrors:
    def test_syntax_error_has_position(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: [1, 0, 0, 0]\n  tau: '1, 0, x +, 0'\nem:\n  a: '0, 0, 0, 0'\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "observer.tau[2]" in result.output
        assert "at position 3" in result.output

    def test_unknown_identifier(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: '1, w, 0, 0'\nem:\n  a: '0, 0, 0, 0'\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "observer.T[1]" in result.output

    def test_invalid_yaml(self, tmp_path):
        path = write_scenario(tmp_path, "observer: [unclosed\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "invalid YAML" in result.output

    def test_missing_file(self, tmp_path):
        result = invoke("split", str(tmp_path / "absent.yaml"))
        assert result.exit_code == main.EXIT_INPUT_ERROR

    def test_wrong_component_count(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: '1, 0, 0'\nem:\n  a: '0, 0, 0, 0'\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "expected 4 components" in result.output

    def test_inconsistent_field_strength(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: [1, 0, 0, 0]\nem:\n  a: '0, 0, x^2, 0'\n  F: '1, 0, 0, 0, 0, 0'\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "em:" in result.output

    def test_null_observer(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: '1, 1, 0, 0'\nem:\n  a: '0, 0, 0, 0'\n")
        result = invoke("split", path)
        assert result.exit_code == main.EXIT_INPUT_ERROR
        assert "observer:" in result.output

    def test_split_needs_fields(self, tmp_path):
        path = write_scenario(tmp_path, "observer:\n  T: [1, 0, 0, 0]\n")
        with pytest.raises(ScenarioInputError, match="em"):
            run_split(load_scenario(path), source=path)


class TestScenarioSchema:
    def test_lists_and_strings(self):
        from_string = ScenarioFile.model_validate({"observer": {"T": "1, 0, 0, 0"}})
        from_list = ScenarioFile.model_validate({"observer": {"T": [1, 0, 0, 0]}})
        assert from_string == from_list
        assert from_list.observer.T == ["1", "0", "0", "0"]

    def test_default_signature(self):
        scenario = ScenarioFile.model_validate({"observer": {"T": [1, 0, 0, 0]}})
        assert scenario.metric_signature == (1, -1, -1, -1)
        other = ScenarioFile.model_validate({"chart": ["t", "x"], "observer": {"T": [1, 0], "tau": [1, 0]}})
        assert other.metric_signature is None

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValidationError):
            ScenarioFile.model_validate({"observer": {"T": [1, 0, 0, 0]}, "obsrever": {}})

    def test_split_equation_degrees(self):
        block = {"w": {"degree": 1, "components": [0, 0, 0, 0]}, "sigma": {"degree": 3, "components": [0, 0, 0, 0]}}
        with pytest.raises(ValidationError, match="split_equation.sigma.degree"):
            ScenarioFile.model_validate({"observer": {"T": [1, 0, 0, 0]}, "split_equation": block})

    def test_em_needs_a_field(self):
        with pytest.raises(ValidationError, match="em needs"):
            ScenarioFile.model_validate({"observer": {"T": [1, 0, 0, 0]}, "em": {}})
