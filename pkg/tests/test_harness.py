from __future__ import annotations

import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from uniplan.digits import DOWN, RIGHT, DigitStream
from uniplan.errors import InvalidArgument, ParseError
from uniplan.gridworld import PlanTrace, generate_maze, parse_env, replay
from uniplan.harness.config import ExperimentConfig, load_config, parse_config
from uniplan.harness.render import render_trace_svg, trace_for_config
from uniplan.harness.runner import (CSV_HEADER, TrialRow, TrialStats, inset_goal, parse_csv,
                                    run_trial, run_trials)
from uniplan.scalefree import execute_scalefree, format_continuous_env
from uniplan.catalog import random_continuous_env

SVG = "{http://www.w3.org/2000/svg}"


def write_config(tmp_path, body: str, name: str = "exp.cfg"):
    path = tmp_path / name
    path.write_text(body)
    return load_config(path)


# -- configuration --------------------------------------------------------------------

def test_config_defaults_and_offsets(tmp_path):
    (tmp_path / "g.txt").write_text("SG\n")
    cfg = write_config(tmp_path, "env = g.txt\nstride = 10\noffset = 5\n")
    assert cfg.kind == "grid" and cfg.source == "pi4" and cfg.trials == 100
    assert [cfg.trial_offset(i) for i in (1, 2, 3)] == [5, 15, 25]


def test_config_rational_fields():
    cfg = parse_config("kind = continuous\nenv = maze:5x5:1\nw = 3/2\nstart = 1/2 3/4\n")
    assert cfg.w == Fraction(3, 2) and cfg.start == (Fraction(1, 2), Fraction(3, 4))


@pytest.mark.parametrize("text,error", [
    ("env = maze:5x5:1\nbogus = 1\n", ParseError),
    ("env = maze:5x5:1\ntrials\n", ParseError),
    ("env = maze:5x5:1\ntrials = many\n", ParseError),
    ("env = maze:5x5:1\nkind = teleport\n", InvalidArgument),
    ("env = maze:5x5:1\ntrials = 0\n", InvalidArgument),
    ("env = maze:5x5:1\nstride = 0\n", InvalidArgument),
    ("kind = grid\n", InvalidArgument),
    ("env = missing.txt\n", InvalidArgument),
])
def test_config_errors(text, error, tmp_path):
    with pytest.raises(error):
        parse_config(text, tmp_path)


def test_config_comments_ignored():
    cfg = parse_config("# header\nenv = maze:5x5:1   # inline\n\nbudget = 1_000\n")
    assert cfg.budget == 1000


# -- trial runs ---------------------------------------------------------------------

def test_single_trial_corridor(tmp_path):
    (tmp_path / "g.txt").write_text("SG\n")
    (tmp_path / "d.txt").write_text("1\n")
    cfg = write_config(tmp_path, "env = g.txt\nsource = file:d.txt\ntrials = 1\nbudget = 5\n")
    stats = run_trials(cfg)
    assert stats.rows == [TrialRow(1, 1, 1, "goal", 2, 2)]
    text = (tmp_path / "trials.csv").read_text()
    assert text.splitlines()[0] == CSV_HEADER
    assert text.splitlines()[1] == "1,1,1,goal,2,2"


def test_file_stream_exhaustion_is_an_error_row(tmp_path):
    (tmp_path / "g.txt").write_text("S..G\n")
    (tmp_path / "d.txt").write_text("0011")
    cfg = write_config(tmp_path, "env = g.txt\nsource = file:d.txt\ntrials = 3\nstride = 1\n"
                                 "budget = 10\n")
    stats = run_trials(cfg, write=False)
    assert all(r.outcome.startswith("error:") for r in stats.rows)
    assert stats.errors == 3 and stats.successes == [] and stats.failures == 0
    assert "," not in stats.rows[0].outcome


def test_budget_row(tmp_path):
    (tmp_path / "d.txt").write_text("0" * 20)
    (tmp_path / "g.txt").write_text("S.G\n")
    cfg = write_config(tmp_path, "env = g.txt\nsource = file:d.txt\ntrials = 1\nbudget = 7\n")
    assert run_trial(cfg, 1) == TrialRow(1, 1, 7, "budget", 1, 3)


def test_aggregates_recomputed_from_rows(tmp_path):
    cfg = write_config(tmp_path, "env = obstacles:30x30:600:2\nstride = 1000\ntrials = 100\n"
                                 "budget = 200000\n")
    stats = run_trials(cfg)
    again, footer = parse_csv((tmp_path / "trials.csv").read_text())
    assert again.rows == stats.rows and len(again.rows) == 100
    ok = [r.steps for r in again.rows if r.outcome == "goal"]
    assert int(footer["trials"]) == 100
    assert int(footer["successes"]) == len(ok)
    assert int(footer["failures"]) == sum(r.outcome == "budget" for r in again.rows)
    assert int(footer["errors"]) == 0
    assert float(footer["steps_avg"]) == pytest.approx(sum(ok) / len(ok), abs=5e-5)
    assert int(footer["steps_min"]) == min(ok) and int(footer["steps_max"]) == max(ok)
    assert [r.offset for r in again.rows] == [1 + 1000 * i for i in range(100)]


def test_empty_aggregates_footer():
    stats = TrialStats([TrialRow(1, 1, 5, "budget")])
    assert stats.footer()[1] == "# steps_avg= steps_min= steps_max="


def test_rerun_and_parallel_are_byte_identical(tmp_path):
    base = "env = maze:15x15:3\nsource = pseudorandom\nseed = 11\ntrials = 12\nbudget = 20000\n"
    serial = write_config(tmp_path, base + "out = a.csv\n")
    again = write_config(tmp_path, base + "out = b.csv\n")
    parallel = write_config(tmp_path, base + "out = c.csv\nworkers = 3\n")
    for cfg in (serial, again, parallel):
        run_trials(cfg)
    a, b, c = ((tmp_path / n).read_bytes() for n in ("a.csv", "b.csv", "c.csv"))
    assert a == b == c


def test_learn_rows(tmp_path):
    cfg = write_config(tmp_path, "kind = learn\nenv = polyomino:8:3\nsource = champernowne\n"
                                 "trials = 2\nstride = 50\nbudget = 1000000\n")
    for row in run_trials(cfg, write=False).rows:
        assert row.outcome == "goal" and row.visited == row.total


def test_continuous_rows(tmp_path):
    env = random_continuous_env(4)
    (tmp_path / "c.env").write_text(format_continuous_env(env))
    cfg = write_config(tmp_path, "kind = continuous\nenv = c.env\ntrials = 3\nbudget = 1000000\n")
    rows = run_trials(cfg, write=False).rows
    ref = execute_scalefree(env, env.starts[0], DigitStream.pi(), max_steps=10**6, record=False)
    assert rows[0].steps == ref.steps and rows[0].outcome == ref.outcome
    adaptive = cfg.with_overrides(kind="continuous-adaptive")
    assert all(r.outcome == "goal" for r in run_trials(adaptive, write=False).rows)


def test_inset_goal_picks_nearest_free_cell():
    env = generate_maze(11, 11, seed=1)
    moved = inset_goal(env, 2)
    (g,) = moved.goals
    assert g in env.free_cells
    best = min(abs(c[0] - 8) + abs(c[1] - 2) for c in env.free_cells)
    assert abs(g[0] - 8) + abs(g[1] - 2) == best


# -- SVG rendering ----------------------------------------------------------------

def classes(path):
    root = ET.parse(path).getroot()
    out: dict[str, list] = {}
    for el in root.iter():
        c = el.get("class")
        if c:
            out.setdefault(c, []).append(el)
    return root, out


def test_zero_action_trace_has_one_start_and_goal(tmp_path):
    env = parse_env("S.G\n")
    trace = PlanTrace(states=[env.start], actions=[], blocked=[], total=3)
    _, cl = classes(render_trace_svg(env, trace, tmp_path / "t.svg"))
    assert len(cl["start"]) == 1 and len(cl["goal"]) == 1
    assert "trace" not in cl and len(cl["visited"]) == 1


def test_blocked_trace_visits_two_cells(tmp_path):
    env = parse_env("S#\n.G")
    actions = [RIGHT] * 4 + [DOWN]
    states = replay(env, env.start, actions)
    trace = PlanTrace(states=states, actions=actions, blocked=[True] * 4 + [False], total=3)
    root, cl = classes(render_trace_svg(env, trace, tmp_path / "fig.svg"))
    assert root.tag == SVG + "svg"
    assert len(cl["visited"]) == 2
    assert len(cl["trace"][0].get("points").split()) == 2
    assert len(cl["free"]) == 3


def test_config_svg_written(tmp_path):
    cfg = write_config(tmp_path, "env = maze:9x9:1\ntrials = 1\nbudget = 500\nsvg = out/t.svg\n")
    run_trials(cfg)
    root, cl = classes(tmp_path / "out" / "t.svg")
    assert len(cl["start"]) == 1


def test_continuous_svg_colours_by_exponent(tmp_path):
    env = random_continuous_env(6)
    (tmp_path / "c.env").write_text(format_continuous_env(env))
    cfg = write_config(tmp_path, "kind = continuous\nenv = c.env\nbudget = 300\ntrials = 1\n")
    env, trace = trace_for_config(cfg)
    _, cl = classes(render_trace_svg(env, trace, tmp_path / "c.svg"))
    exps = [int(p.get("data-exponent")) for p in cl["trace"]]
    assert set(exps) <= set(trace.exponents) and len(set(exps)) > 1
    assert len(cl["obstacle"]) == len(env.discs) and len(cl["goal"]) == 1
