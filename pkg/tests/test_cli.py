import json

import pytest
from click.testing import CliRunner

from kmucontact.cli import main, run_verify
from kmucontact.specfile import SpecError, format_spec, load_spec, parse_spec


@pytest.fixture
def runner():
    return CliRunner()


def verify_json(runner, *args):
    result = runner.invoke(main, ["verify", *args, "--format", "json"])
    return result, json.loads(result.output) if result.output.startswith("{") else None


def test_verify_worked_example_json(runner):
    result, doc = verify_json(runner, "paper_example")
    assert result.exit_code == 0
    verdicts = doc["identity_verdicts"]
    assert verdicts["030"]["holds"] is True
    assert verdicts["62"]["status"] == "pass"
    assert verdicts["041"]["status"] == "info"
    assert doc["nullity"]["kappa"] == "1 - z^-8"
    assert doc["nullity"]["generalized"] is True
    assert doc["nullity"]["D(lambda)"] == ["e2"]
    assert len(doc["sample_points"]) == 9
    assert doc["ok"] is True


def test_verdicts_follow_catalog_order(runner):
    from kmucontact.catalog import CATALOG

    _, doc = verify_json(runner, "sol_kmu")
    order = list(CATALOG)
    keys = list(doc["identity_verdicts"])
    assert keys == sorted(keys, key=order.index)


def test_eps_minus_fixture_exits_one(runner):
    result, doc = verify_json(runner, "paper_example_eps_minus")
    assert result.exit_code == 1
    assert doc["identity_verdicts"]["006"]["status"] == "fail"
    assert doc["identity_verdicts"]["006-eps"]["status"] == "pass"


def test_json_is_deterministic(runner):
    a = runner.invoke(main, ["verify", "sol_kmu", "--format", "json", "--seed", "7"])
    b = runner.invoke(main, ["verify", "sol_kmu", "--format", "json", "--seed", "7"])
    assert a.output == b.output
    c = runner.invoke(main, ["verify", "sol_kmu", "--format", "json", "--seed", "8"])
    assert json.loads(a.output)["sample_points"] != json.loads(c.output)["sample_points"]


def test_text_report(runner):
    result = runner.invoke(main, ["verify", "heisenberg_sasakian", "--timing"])
    assert result.exit_code == 0
    assert "ξκ = 0 … PASS (Eq. 070)" in result.output
    assert "elapsed:" in result.output


def test_text_report_without_timing_is_stable(runner):
    result = runner.invoke(main, ["verify", "heisenberg_sasakian"])
    assert "elapsed" not in result.output


def test_empty_file_is_parse_error(runner, tmp_path):
    f = tmp_path / "empty.cpm"
    f.write_text("")
    result = runner.invoke(main, ["verify", str(f)])
    assert result.exit_code == 2
    assert "coords" in result.output


def test_syntax_error_reports_line_and_column(runner, tmp_path):
    text = load_spec("paper_example")
    f = tmp_path / "bad.cpm"
    f.write_text(format_spec(text).replace("frame e2: 0, z^-2, 0", "frame e2: 0, z^-2 +, 0"))
    result = runner.invoke(main, ["verify", str(f)])
    assert result.exit_code == 2
    assert "line 5" in result.output


def test_missing_fixture_is_usage_error(runner):
    assert runner.invoke(main, ["verify", "no_such_fixture"]).exit_code == 2


def test_perturb_gamma_fires(runner):
    result, doc = verify_json(runner, "paper_example", "--perturb-gamma", "1", "2", "3", "z")
    assert result.exit_code == 1
    assert doc["identity_verdicts"]["torsion"]["status"] == "fail"
    assert doc["identity_verdicts"]["torsion"]["witness"]


def test_perturb_gamma_index_checked(runner):
    result = runner.invoke(main, ["verify", "paper_example", "--perturb-gamma", "1", "2", "4", "z"])
    assert result.exit_code == 2


def test_numeric_fallback_flag(runner):
    _, plain = verify_json(runner, "paper_example_rotated")
    _, fallback = verify_json(runner, "paper_example_rotated", "--numeric-fallback")
    assert plain["identity_verdicts"]["037"]["status"] == "skip"
    assert fallback["identity_verdicts"]["037"]["status"] == "pass"


class TestDeform:
    def test_deform_writes_spec(self, runner, tmp_path):
        out = tmp_path / "sol2.cpm"
        result = runner.invoke(main, ["deform", "sol_kmu", "--a", "2", "--out", str(out)])
        assert result.exit_code == 0
        spec = load_spec(str(out))
        assert str(spec.expect_kappa) == "3/4" and str(spec.expect_mu) == "3"
        assert "PASS (Eq. 089)" in result.output

    def test_deform_json(self, runner):
        result = runner.invoke(main, ["deform", "paper_example", "--a", "1/2", "--format", "json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["report"]["identity_verdicts"]["089"]["holds"] is True

    @pytest.mark.parametrize("a", ["0", "-1", "abc"])
    def test_bad_parameter(self, runner, a):
        assert runner.invoke(main, ["deform", "sol_kmu", "--a", a]).exit_code == 2


def test_catalog_and_fixtures(runner):
    cat = runner.invoke(main, ["catalog"])
    assert cat.exit_code == 0 and "Eq. 089" in cat.output
    fx = runner.invoke(main, ["fixtures"])
    assert "paper_example.cpm" in fx.output.split()


class TestSpecFile:
    def test_round_trip(self):
        spec = load_spec("paper_example")
        again = parse_spec(format_spec(spec))
        assert again.frame == spec.frame and again.phi == spec.phi and again.metric == spec.metric

    @pytest.mark.parametrize("text,match", [
        ("coords: x y\n", "odd"),
        ("coords: x y z\nepsilon: 2\n", "epsilon"),
        ("coords: x x z\n", "unique"),
        ("bogus: 1\n", "unknown key"),
        ("coords: x y z\nepsilon: 1\nsignature: 1 1 1\nxi: e4\n", "out of range"),
    ])
    def test_errors(self, text, match):
        with pytest.raises(SpecError, match=match):
            parse_spec(text)

    def test_error_column(self):
        text = format_spec(load_spec("sol_kmu")).replace("phi: 0, 0, -1", "phi: 0, 0, -1 ^")
        with pytest.raises(SpecError) as info:
            parse_spec(text)
        assert info.value.line is not None and info.value.column is not None


def test_run_verify_report_lookup():
    rep = run_verify(load_spec("heisenberg_sasakian"))
    assert rep["sasakicurvature"].holds
    assert rep.nullity["mu_indeterminate"] is True
