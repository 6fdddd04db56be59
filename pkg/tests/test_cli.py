import json
from pathlib import Path

import numpy as np
import pytest

from fairsample.cli import main
from fairsample.fixtures import FIXTURE_NAMES, SOURCES
from fairsample.formats import behavior_to_json, dump_json, model_to_json
from fairsample.lhv import behavior_from_lhv, pr_box
from fairsample.sampling import child_rng, random_lhv_model

GOLDEN = Path(__file__).parent / "golden"


def write_diagram(tmp_path, name):
    path = tmp_path / f"{name}.diagram"
    path.write_text(SOURCES[name])
    return str(path)


@pytest.mark.parametrize(
    "name,expected", [("fig2c", 0), ("fig1b", 2), ("franson", 3)]
)
def test_check_exit_codes(tmp_path, name, expected):
    assert main(["check", write_diagram(tmp_path, name)]) == expected


def test_check_unsafe_text_carries_witness(tmp_path, capsys):
    main(["check", write_diagram(tmp_path, "fig1b")])
    out = capsys.readouterr().out
    assert "X -> A -> K <- B <- Lambda" in out


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_check_json_matches_golden(tmp_path, capsys, monkeypatch, name):
    monkeypatch.delenv("FAIRSAMPLE_SEED", raising=False)
    main(["check", write_diagram(tmp_path, name), "--json"])
    out = capsys.readouterr().out
    assert out == (GOLDEN / f"{name}.check.json").read_text()


def test_check_missing_file_is_an_error(capsys):
    assert main(["check", "/nonexistent.diagram"]) == 1
    assert "error:" in capsys.readouterr().err


def test_check_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.diagram"
    path.write_text("node X widget\n")
    assert main(["check", str(path)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_is_local_exit_codes(tmp_path):
    local_path = tmp_path / "local.behavior.json"
    model = random_lhv_model(child_rng(81, 0))
    dump_json(behavior_to_json(behavior_from_lhv(model)), str(local_path))
    assert main(["is-local", str(local_path)]) == 0

    nonlocal_path = tmp_path / "pr.behavior.json"
    dump_json(behavior_to_json(pr_box()), str(nonlocal_path))
    assert main(["is-local", str(nonlocal_path)]) == 2


def test_bell_command(tmp_path, capsys):
    path = tmp_path / "pr.behavior.json"
    dump_json(behavior_to_json(pr_box()), str(path))
    assert main(["bell", str(path), "--functional", "chsh", "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["value"] == "4"
    assert body["local_bound"] == "2"


def test_simulate_command(tmp_path, capsys):
    model = random_lhv_model(child_rng(81, 1), n_lambda=2)
    path = tmp_path / "m.model.json"
    dump_json(model_to_json(model), str(path))
    assert main(["simulate", str(path)]) == 0
    assert "chsh" in capsys.readouterr().out

    k_table = np.ones((2,) + model.setting_cards + model.outcome_cards)
    path2 = tmp_path / "mk.model.json"
    dump_json(model_to_json(model, k_table=k_table), str(path2))
    assert main(["simulate", str(path2), "--postselect", "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["acceptance"] is not None


def test_demo_pearle_prints_chsh(capsys):
    assert main(["demo", "pearle"]) == 0
    assert "postselected CHSH 4.0" in capsys.readouterr().out


def test_demo_unknown_name_is_usage_error(capsys):
    with pytest.raises(SystemExit):
        main(["demo", "not-a-demo"])


def test_sweep_command(capsys):
    assert main(["sweep", "--variant", "factorized", "--n", "6", "--seed", "2"]) == 0
    assert "all postselected behaviors local: True" in capsys.readouterr().out


def test_seed_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FAIRSAMPLE_SEED", "123")
    main(["check", write_diagram(tmp_path, "fig2c"), "--json", "--seed", "7"])
    body = json.loads(capsys.readouterr().out)
    assert body["seed"] == 123


def test_bad_seed_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FAIRSAMPLE_SEED", "xyz")
    assert main(["check", write_diagram(tmp_path, "fig2c")]) == 1


def test_fixture_command(capsys):
    assert main(["fixture", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "fig2c" in names
    assert main(["fixture", "fig2c"]) == 0
    assert capsys.readouterr().out == SOURCES["fig2c"]
    assert main(["fixture", "bogus"]) == 1
