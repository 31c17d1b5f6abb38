import json

import pytest

from tricav.cli import main

from test_harness import EFFECTIVE, sweep_text


@pytest.fixture
def config(tmp_path):
    def make(text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)

    return make


def test_point_text(config, capsys):
    assert main(["point", "--config", config(EFFECTIVE)]) == 0
    out = capsys.readouterr().out
    assert "fully_inseparable" in out and "E_ma" in out


def test_point_json(config, capsys):
    assert main(["point", "--config", config(EFFECTIVE), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["report"]["E_ma"] > doc["report"]["E_mf"] > 0


def test_point_unstable_exit_code(config):
    text = EFFECTIVE.replace("effective_detuning_over_omega_m = 1.0", "effective_detuning_over_omega_m = -1.0")
    assert main(["point", "--config", config(text)]) == 2


def test_invalid_config_exit_code(config, capsys):
    assert main(["point", "--config", config("")]) == 3
    assert "missing required keys" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.cfg")]) == 3


def test_validate(config, capsys):
    assert main(["validate", "--config", config(EFFECTIVE)]) == 0
    assert capsys.readouterr().out.startswith("ok")


def test_validate_bosonic_violation(config):
    from tricav.harness import preset_text

    text = preset_text("fig2b") + "single_atom_g_over_2pi_Hz = 1e4\n"
    text = text.replace("working_point = bare_cavity\n", "")
    assert main(["validate", "--config", config(text)]) == 3


def test_sweep_csv(config, tmp_path):
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", config(sweep_text(count=4)), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 5


def test_sweep_requires_axis(config, tmp_path):
    assert main(["sweep", "--config", config(EFFECTIVE), "--out", str(tmp_path / "o.csv")]) == 3


def test_preset_json(tmp_path):
    out = tmp_path / "fig2a.json"
    assert main(["preset", "--name", "fig2a", "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["metadata"]["axis"] == "Delta/omega_m"
    assert len(doc["rows"]) == 181
