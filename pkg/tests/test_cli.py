from __future__ import annotations

import json
import subprocess
import sys

import pytest

from uniplan.cli import main
from uniplan.gridworld import parse_env


def test_digits_champernowne(capsys):
    assert main(["digits", "--source", "champernowne", "--count", "36"]) == 0
    out = capsys.readouterr().out.strip()
    assert len(out) == 36
    assert out.startswith("0123101112132021222330313233100101")


def test_digits_pi(capsys):
    assert main(["digits", "--count", "17"]) == 0
    assert capsys.readouterr().out.strip() == "30210033312222020"


def test_digits_pseudorandom_base10(capsys):
    main(["digits", "--source", "pseudorandom", "--seed", "3", "--base", "10", "--count", "50"])
    out = capsys.readouterr().out.strip()
    assert len(out) == 50 and set(out) <= set("0123456789")


def test_digits_from_offset(capsys):
    main(["digits", "--source", "champernowne", "--from", "5", "--count", "4"])
    assert capsys.readouterr().out.strip() == "1011"


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["digits", "--count", "-1"],
    ["digits", "--base", "10"],
    ["verify", "--suite", "huge"],
    ["run"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("env = maze:5x5:1\nunknown = 3\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_missing_config_exits_3(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 3


def test_run_writes_csv_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("env = maze:9x9:2\nbudget = 50000\n")
    out = tmp_path / "res.csv"
    assert main(["run", "--config", str(cfg), "--trials", "4", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 4 + 2
    assert "# trials=4" in capsys.readouterr().out


def test_gen_maze_roundtrip(tmp_path, capsys):
    assert main(["gen-maze", "--width", "11", "--height", "7", "--seed", "3"]) == 0
    env = parse_env(capsys.readouterr().out)
    assert (env.width, env.height) == (11, 7)
    out = tmp_path / "m.txt"
    main(["gen-maze", "--width", "11", "--height", "7", "--seed", "3", "--out", str(out)])
    assert parse_env(out.read_text()).free_cells == env.free_cells


def test_gen_maze_even_size_exits_2():
    assert main(["gen-maze", "--width", "10", "--height", "7"]) == 2


def test_learn_corridor(tmp_path, capsys):
    grid = tmp_path / "g.txt"
    grid.write_text("S.G\n")
    assert main(["learn", "--env", str(grid), "--budget", "10000"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.split()
               if "=" in line)
    assert out["best_plan"] == "RR" and out["best_length"] == "2" and out["bfs_length"] == "2"


def test_learn_rejects_continuous_env(tmp_path):
    f = tmp_path / "c.env"
    f.write_text("rect 1 1\ngoal 1/2 1/2 1/4\n")
    with pytest.raises(SystemExit) as exc:
        main(["learn", "--env", str(f)])
    assert exc.value.code == 2


def test_render_from_env(tmp_path, capsys):
    grid = tmp_path / "g.txt"
    grid.write_text("S..\n..G\n")
    out = tmp_path / "r.svg"
    assert main(["render", "--env", str(grid), "--source", "champernowne", "--out", str(out)]) == 0
    assert out.read_text().startswith("<?xml")
    assert "outcome=goal" in capsys.readouterr().out


def test_render_continuous(tmp_path):
    f = tmp_path / "c.env"
    f.write_text("rect 2 2\ndisc 1 1 1/4\ngoal 3/2 3/2 1/4\nstart 1/4 1/4\n")
    out = tmp_path / "c.svg"
    assert main(["render", "--env", str(f), "--budget", "2000", "--out", str(out)]) == 0
    assert "data-exponent" in out.read_text()


def test_verify_small_suite(tmp_path, capsys):
    report = tmp_path / "v.jsonl"
    assert main(["verify", "--suite", "small", "--out", str(report)]) == 0
    records = [json.loads(line) for line in report.read_text().splitlines()]
    assert records and all(r["pass"] for r in records)
    assert {"name", "instance", "pass", "witness"} <= set(records[0])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "uniplan", "digits", "--source", "champernowne",
                          "--count", "8"], capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "01231011"
