import json

import pytest

from runwayseq.cli import main
from runwayseq.harness import GenSpec, Instance, dump_instance, gen_instance
from runwayseq.sequence import landing, takeoff


@pytest.fixture
def three_landings(tmp_path):
    path = tmp_path / "three.txt"
    path.write_text(dump_instance(Instance([landing("C", 3), landing("A", 1), landing("B", 2)])))
    return str(path)


def test_solve_single(three_landings, capsys):
    assert main(["solve-single", "--instance", three_landings]) == 0
    out = capsys.readouterr().out
    assert "makespan=150" in out


def test_solve_single_mode_mismatch(three_landings, capsys):
    assert main(["solve-single", "--instance", three_landings, "--mode", "takeoff"]) == 2
    assert "outside mode" in capsys.readouterr().err


def test_solve_dual(tmp_path, capsys):
    path = tmp_path / "dual.txt"
    path.write_text(dump_instance(gen_instance(GenSpec(6, 10, 30, "dual", seed=2))))
    assert main(["solve-dual", "--instance", str(path), "--model", "heathrow-recat-dual"]) == 0
    assert "optimality=" in capsys.readouterr().out


def test_oracle_and_limit(three_landings, tmp_path, capsys):
    assert main(["oracle", "--instance", three_landings]) == 0
    assert "makespan=150" in capsys.readouterr().out
    big = tmp_path / "big.txt"
    big.write_text(dump_instance(gen_instance(GenSpec(12, 10, 30, "landing"))))
    assert main(["oracle", "--instance", str(big)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_gen_writes_file(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["gen", "--count", "5", "--seed", "7", "--out", str(out)]) == 0
    assert out.read_text() == dump_instance(gen_instance(GenSpec(5, 60, 30, "landing", 7)))


def test_export_mip(three_landings, capsys):
    assert main(["export-mip", "--instance", three_landings]) == 0
    out = capsys.readouterr().out
    assert out.startswith("\\") and out.rstrip().endswith("End")


def test_verify_tables(capsys):
    assert main(["verify-tables", "--model", "heathrow-recat-dual"]) == 0
    assert "224/224" in capsys.readouterr().out


def test_blocks(capsys):
    assert main(["blocks"]) == 0
    assert "224/224" in capsys.readouterr().out
    assert main(["blocks", "--dump"]) == 0
    assert capsys.readouterr().out.startswith("# ")


def test_bench(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"instances": [{"count": 5, "t_e": 10, "t_w": 30}]}))
    assert main(["bench", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("id,mode,n,")


def test_missing_file(capsys):
    assert main(["solve-single", "--instance", "/nonexistent/file"]) == 2


def test_unknown_model(three_landings):
    assert main(["solve-single", "--instance", three_landings, "--model", "nowhere"]) == 2
