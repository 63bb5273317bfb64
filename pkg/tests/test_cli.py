import json

import pytest

from jchom.cli import main
from jchom.sweep import COLUMNS, read_rows


def test_sweep_from_config_file(tmp_path):
    cfg = {"observable": "gamma_lin", "params": {"delta": 1.0, "kappa": 0.2, "xi": 0.02},
           "axes": [{"name": "e0", "start": -1, "stop": 1, "num": 5}]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(path), "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 5 and all(r.status == "ok" for r in rows)
    assert all(0 <= r.value <= 1 for r in rows)


def test_figure_preset_with_overrides(tmp_path, capsys):
    args = ["figure", "fig3a", "--param", "delta.num=2", "--param", "e0.num=2",
            "--format", "jsonl"]
    assert main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4 and set(json.loads(lines[0])) == set(COLUMNS)


def test_threads_flag_gives_same_output(tmp_path):
    base = ["figure", "fig2b", "--param", "delta.num=3", "--param", "e0.num=7"]
    assert main(base + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(base + ["--threads", "2", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert main(["sweep"]) == 2
    assert main(["sweep", "--preset", "fig3a", "--param", "observable=entropy"]) == 2
    assert main(["sweep", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["sweep", "--config", str(bad)]) == 2
    assert main(["figure", "fig3a", "--param", "delta.num=2", "--param", "e0.num=2",
                 "--out", str(tmp_path / "no" / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert "nope.json" in err and "x.csv" in err
    with pytest.raises(SystemExit):
        main(["figure", "fig9"])


def test_failed_points_warn_but_succeed(tmp_path, capsys):
    args = ["sweep", "--preset", "fig3a", "--param", "delta.num=2",
            "--param", "e0.num=2", "--param", "xi.values=[-0.01, 0.01]"]
    # xi is not an axis of the preset, so the override is refused
    assert main(args) == 2
    cfg = {"observable": "gamma", "params": {"kappa": 0.1},
           "axes": [{"name": "xi", "values": [-0.01, 0.01]}]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "o.csv")]) == 0
    assert "1 of 2 points" in capsys.readouterr().err


def test_check_verb_passes(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8
