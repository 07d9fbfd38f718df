import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from spinnet.cli import ConfigError, load_config, main
from spinnet.hamiltonian import default_kagome_path, dump_lattice, load_lattice
from spinnet.schur import build_schur, load_schur_csv


def write_config(path, **overrides):
    cfg = {
        "problem": {"kind": "triangular", "n": 4, "j2": 0.0},
        "ansatz": {"kinds": ["three-vertex-triangular"], "p": [1]},
        "seeds": 1,
        "optimizer": {"max_iters": 20},
        "output_dir": str(path.parent / "out"),
    }
    cfg.update(overrides)
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_verify_schur(capsys):
    assert main(["verify", "schur"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] schur: S2 matches reference table" in out
    assert "checks passed" in out


def test_verify_generators_json(capsys):
    assert main(["verify", "generators", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["suites"] == ["generators"]
    assert "G_X S3^T|5> = S3^T|7>" in [c["name"] for c in report["checks"]]


def test_usage_errors(capsys):
    assert main(["verify", "everything"]) == 2
    assert main([]) == 2
    assert main(["export-schur", "0"]) == 2


def test_help_shows_config_schema(capsys):
    assert main(["run", "--help"]) == 0
    assert "max_memory_mb" in capsys.readouterr().out


def test_run_and_resume(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.cfg")
    assert main(["run", str(cfg)]) == 0
    assert "1 records (0 reused)" in capsys.readouterr().out
    rows = (tmp_path / "out" / "summary.csv").read_text().splitlines()
    assert len(rows) == 2
    assert main(["run", str(cfg)]) == 0
    assert "1 records (1 reused)" in capsys.readouterr().out


def test_run_truncated(tmp_path):
    cfg = write_config(tmp_path / "c.cfg", seeds=3, budget={"max_seconds": 1e-9})
    assert main(["run", str(cfg)]) == 3


def test_invalid_config_lists_every_problem(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.cfg", problem={"kind": "triangular", "n": 5},
                       ansatz={"kinds": ["bogus"], "p": []}, seeds=0, budget={"max_seconds": -1})
    assert main(["run", str(cfg)]) == 1
    err = capsys.readouterr().err
    for key in ("problem.n", "ansatz.kinds", "ansatz.p[bogus]", "seeds", "budget.max_seconds"):
        assert key in err
    with pytest.raises(ConfigError) as exc:
        load_config(cfg)
    assert len(exc.value.problems) == 5


def test_config_memory_budget(tmp_path):
    cfg = write_config(tmp_path / "c.cfg", problem={"kind": "kagome"},
                       ansatz={"kinds": ["three-vertex-kagome"], "p": [1]}, budget={"max_memory_mb": 1})
    with pytest.raises(ConfigError, match="max_memory_mb"):
        load_config(cfg)


def test_output_dir_from_environment(tmp_path, monkeypatch):
    cfg = write_config(tmp_path / "c.cfg")
    raw = yaml.safe_load(cfg.read_text())
    del raw["output_dir"]
    cfg.write_text(yaml.safe_dump(raw))
    monkeypatch.setenv("SPINNET_OUTPUT_DIR", str(tmp_path / "env"))
    assert load_config(cfg)["output_dir"] == str(tmp_path / "env")


@pytest.mark.parametrize("name, runs", [("triangular-n20.cfg", 160), ("triangular-n20-j2-0.cfg", 160),
                                        ("kagome18.cfg", 144), ("smoke.cfg", 1)])
def test_shipped_configs(name, runs):
    from pathlib import Path

    cfg = load_config(Path(__file__).parent.parent / "configs" / name)
    assert sum(len(v) for v in cfg["p"].values()) * cfg["seeds"] == runs


def test_lattice_validate_shipped(capsys):
    assert main(["lattice", "validate", str(default_kagome_path())]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "18 sites, 36 edges, 12 triangles" in out


def test_lattice_validate_dangling_edge(tmp_path, capsys):
    spec = load_lattice(default_kagome_path())
    spec.edges.append((2, 99, 1.0))
    dump_lattice(spec, tmp_path / "bad.yaml")
    assert main(["lattice", "validate", str(tmp_path / "bad.yaml")]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] edges reference valid sites: dangling edges [(2, 99, 1.0)]" in out


def test_lattice_validate_imperfect_matching(tmp_path, capsys):
    spec = load_lattice(default_kagome_path())
    spec.singlet_matching = spec.singlet_matching[1:]
    dump_lattice(spec, tmp_path / "bad.yaml")
    assert main(["lattice", "validate", str(tmp_path / "bad.yaml")]) == 1
    fails = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[FAIL]")]
    assert len(fails) == 1 and "singlet matching is perfect" in fails[0]


def test_lattice_validate_parse_error(tmp_path, capsys):
    (tmp_path / "bad.yaml").write_text("edges: [[0, 1\n")
    assert main(["lattice", "validate", str(tmp_path / "bad.yaml")]) == 1
    assert "bad.yaml" in capsys.readouterr().err


def test_export_schur(tmp_path, monkeypatch, capsys):
    assert main(["export-schur", "3", "-o", str(tmp_path / "s3.csv")]) == 0
    assert np.array_equal(load_schur_csv(tmp_path / "s3.csv"), build_schur(3).matrix)
    monkeypatch.setenv("SPINNET_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["export-schur", "2"]) == 0
    assert (tmp_path / "env" / "schur-2.csv").exists()


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "spinnet.cli", "export-schur", "1", "-o", "-"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "1,0" in out.stdout
