import csv
import json

import pytest

from parrom.main import main
from parrom.services.psys import ParametricSystem
from parrom.services.repository import ArtifactRepository

SMALL_REDUCE = ["reduce", "--model", "synthetic", "--n", "10", "--r", "2", "--ps", "2", "--rs", "1"]


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_generate_rejects_odd_synthetic_order(tmp_path, capsys):
    code = main(["generate-model", "synthetic", "--n", "7", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_generate_writes_model(tmp_path, capsys):
    code = main(["generate-model", "synthetic", "--n", "10", "--out-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "synthetic.json").exists()
    assert "max α" in capsys.readouterr().out


def test_generate_baur_is_deterministic(tmp_path):
    for name in ("first", "second"):
        args = ["generate-model", "baur", "--n", "10", "--seed", "1", "--out-dir", str(tmp_path), "--name", name]
        assert main(args) == 0
    assert (tmp_path / "first.json").read_text() == (tmp_path / "second.json").read_text()


def test_reduce_skip_optimize(tmp_path, capsys):
    code = main(SMALL_REDUCE + ["--skip-optimize", "--out-dir", str(tmp_path)])
    assert code == 0
    run = read_json(tmp_path / "run.json")
    assert run["status"] == "skipped"
    assert run["eps_opt"] is None
    assert (tmp_path / "rom_init.json").exists()
    assert not (tmp_path / "rom_opt.json").exists()
    assert "ε inicial" in capsys.readouterr().out


def test_reduce_rejects_order_above_sample_space(tmp_path):
    args = ["reduce", "--model", "synthetic", "--n", "20", "--r", "9", "--ps", "2", "--rs", "2"]
    assert main(args + ["--out-dir", str(tmp_path)]) == 2


def test_reduce_requires_a_source(tmp_path):
    assert main(["reduce", "--out-dir", str(tmp_path)]) == 2


def test_reduce_rejects_unknown_family(tmp_path):
    with pytest.raises(SystemExit):
        main(SMALL_REDUCE + ["--freeze", "E,X", "--out-dir", str(tmp_path)])


def test_reduce_writes_convergence_history(tmp_path):
    quad = ["--quad-mode", "tensor", "--quad-nodes", "6", "--maxit", "3"]
    assert main(SMALL_REDUCE + quad + ["--out-dir", str(tmp_path)]) == 0
    with (tmp_path / "convergence.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert 1 <= len(rows) <= 4
    assert all(float(row["max_alpha"]) < 0 for row in rows)
    run = read_json(tmp_path / "run.json")
    assert run["status"] in ("tol_met", "max_iter", "line_search_failed")
    assert run["eps_opt"] <= run["eps_init"]
    assert run["config"]["quad"]["mode"] == "tensor"


def test_reduce_replays_previous_run(tmp_path):
    assert main(SMALL_REDUCE + ["--skip-optimize", "--out-dir", str(tmp_path)]) == 0
    first = read_json(tmp_path / "run.json")
    assert main(["reduce", "--config", str(tmp_path / "run.json")]) == 0
    second = read_json(tmp_path / "run.json")
    assert second["config"] == first["config"]
    assert second["eps_init"] == pytest.approx(first["eps_init"], rel=1e-12)


def test_reduce_with_bad_config_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{no es json", encoding="utf-8")
    assert main(["reduce", "--config", str(path)]) == 2


def test_evaluate_rom_equal_to_fom(tmp_path, capsys):
    system = ParametricSystem.constant([[1.0, 0.0], [0.0, 2.0]], [[-1.0, 0.3], [-0.3, -2.0]], [[1.0], [1.0]], [[1.0, 0.5]])
    fom = ArtifactRepository(tmp_path).save_system("fom", system)
    args = ["evaluate", fom, fom, "--out-dir", str(tmp_path), "--omega-points", "5", "--param-points", "5"]
    assert main(args) == 0
    summary = read_json(tmp_path / "summary.json")
    assert summary["eps"] <= 1e-6
    assert summary["stability"]["max_alpha"] < 0
    with (tmp_path / "eps_omega_p.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["omega", "p", "eps_omega_p"]
    assert len(rows) == 1 + 25
    assert (tmp_path / "eps_p.csv").exists()
    assert "ε =" in capsys.readouterr().out


def test_evaluate_unstable_rom(tmp_path):
    repository = ArtifactRepository(tmp_path)
    fom = repository.save_system("fom", ParametricSystem.constant([[1.0]], [[-1.0]], [[1.0]], [[1.0]]))
    rom = repository.save_system("rom", ParametricSystem.constant([[1.0]], [[0.5]], [[1.0]], [[1.0]]))
    assert main(["evaluate", fom, rom, "--out-dir", str(tmp_path)]) == 3
    assert not (tmp_path / "summary.json").exists()


def test_evaluate_missing_file(tmp_path):
    missing = str(tmp_path / "nada.json")
    assert main(["evaluate", missing, missing, "--out-dir", str(tmp_path)]) == 2
