"""Batch trials with per-trial digit offsets, CSV output and aggregates."""

from __future__ import annotations

import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .. import pi4
from ..catalog import obstacle_grid, random_grid_env
from ..errors import ResourceLimitError
from ..gridworld import GridEnv, generate_maze, parse_env, run_steps
from ..learner import bfs_shortest, learn_optimal
from ..scalefree.env import ContinuousEnv, is_continuous_env_text, parse_continuous_env
from ..scalefree.execute import execute_adaptive, execute_scalefree
from .config import ExperimentConfig

log = logging.getLogger(__name__)

CSV_HEADER = "trial,offset,steps,outcome,visited,total"


@dataclass(frozen=True)
class TrialRow:
    trial: int
    offset: int
    steps: int | None
    outcome: str
    visited: int | None = None
    total: int | None = None

    def to_csv(self) -> str:
        cells = [self.trial, self.offset, self.steps, self.outcome, self.visited, self.total]
        return ",".join("" if c is None else str(c) for c in cells)


@dataclass
class TrialStats:
    rows: list[TrialRow] = field(default_factory=list)

    @property
    def successes(self) -> list[TrialRow]:
        return [r for r in self.rows if r.outcome == "goal"]

    @property
    def failures(self) -> int:
        return sum(r.outcome == "budget" for r in self.rows)

    @property
    def errors(self) -> int:
        return sum(r.outcome.startswith("error") for r in self.rows)

    @property
    def step_counts(self) -> list[int]:
        return [r.steps for r in self.successes]

    @property
    def average(self) -> float | None:
        s = self.step_counts
        return sum(s) / len(s) if s else None

    @property
    def minimum(self) -> int | None:
        return min(self.step_counts, default=None)

    @property
    def maximum(self) -> int | None:
        return max(self.step_counts, default=None)

    def footer(self) -> list[str]:
        avg = "" if self.average is None else f"{self.average:.4f}"
        mn = "" if self.minimum is None else str(self.minimum)
        mx = "" if self.maximum is None else str(self.maximum)
        return [
            f"# trials={len(self.rows)} successes={len(self.successes)} "
            f"failures={self.failures} errors={self.errors}",
            f"# steps_avg={avg} steps_min={mn} steps_max={mx}",
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(r.to_csv() + "\n")
        for line in self.footer():
            buf.write(line + "\n")
        return buf.getvalue()


def parse_csv(text: str) -> tuple[TrialStats, dict[str, str]]:
    """Rows and footer key/values of a CSV written by ``TrialStats.to_csv``."""
    stats = TrialStats()
    footer: dict[str, str] = {}
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not a trial CSV")
    for line in lines[1:]:
        if line.startswith("#"):
            footer.update(kv.split("=", 1) for kv in line[1:].split())
            continue
        t, off, steps, outcome, vis, tot = line.split(",")
        stats.rows.append(TrialRow(int(t), int(off), int(steps) if steps else None, outcome,
                                   int(vis) if vis else None, int(tot) if tot else None))
    return stats, footer


@lru_cache(maxsize=8)
def _grid_from_spec(spec: str, base_dir: str, inset: int | None) -> GridEnv:
    head, _, rest = spec.partition(":")
    if head == "maze":
        dims, seed = rest.split(":")
        w, h = (int(v) for v in dims.lower().split("x"))
        env = generate_maze(w, h, int(seed))
    elif head == "obstacles":
        dims, free, seed = rest.split(":")
        w, h = (int(v) for v in dims.lower().split("x"))
        env = obstacle_grid(w, h, int(free), int(seed))
    elif head == "polyomino":
        n, seed = rest.split(":")
        env = random_grid_env(int(n), int(seed))
    else:
        path = Path(spec) if Path(spec).is_absolute() else Path(base_dir) / spec
        env = parse_env(path.read_text())
    if inset is not None:
        env = inset_goal(env, inset)
    return env


def inset_goal(env: GridEnv, k: int) -> GridEnv:
    """Same grid with the single goal at the free cell closest to (W-1-k, k)."""
    tx, ty = env.width - 1 - k, k
    goal = min(env.free_cells, key=lambda c: (abs(c[0] - tx) + abs(c[1] - ty), c))
    return env.with_task(env.start, [goal])


@lru_cache(maxsize=8)
def _continuous_from_file(path: str) -> ContinuousEnv:
    return parse_continuous_env(Path(path).read_text())


def load_environment(cfg: ExperimentConfig):
    if cfg.kind in ("continuous", "continuous-adaptive"):
        return _continuous_from_file(str(cfg.resolve(cfg.env)))
    if cfg.kind == "maze" and not cfg.env.startswith("maze:"):
        text = cfg.resolve(cfg.env).read_text()
        if is_continuous_env_text(text):
            raise ValueError("maze kind needs a grid environment")
    return _grid_from_spec(cfg.env, cfg.base_dir, cfg.goal_inset)


def run_trial(cfg: ExperimentConfig, i: int) -> TrialRow:
    """Trial i (1-based); digit-range exhaustion becomes an error row."""
    if cfg.pi_max_digits:
        pi4.raise_limit(cfg.pi_max_digits)
    offset = cfg.trial_offset(i)
    stream, amap = cfg.stream(), cfg.action_map()
    env = load_environment(cfg)
    try:
        if cfg.kind in ("grid", "maze"):
            r = run_steps(env, stream, amap, offset, cfg.budget)
            return TrialRow(i, offset, r.steps, "goal" if r.reached_goal else "budget",
                            r.visited, r.total)
        if cfg.kind == "learn":
            st = learn_optimal(env, stream, amap, offset, cfg.budget)
            optimal = len(bfs_shortest(env, env.start, env.goals))
            if st.best_plan is None:
                return TrialRow(i, offset, None, "budget")
            outcome = "goal" if st.best_length == optimal else "suboptimal"
            return TrialRow(i, offset, st.found_at, outcome, st.best_length, optimal)
        start = cfg.start or (env.starts[0] if env.starts else None)
        if start is None:
            raise ValueError("continuous config needs a start point")
        run = execute_adaptive if cfg.kind == "continuous-adaptive" else execute_scalefree
        kw = {} if cfg.kind == "continuous-adaptive" else {"w": cfg.w}
        tr = run(env, start, stream, amap, offset=offset, max_steps=cfg.budget, record=False, **kw)
        return TrialRow(i, offset, tr.steps, tr.outcome)
    except ResourceLimitError as exc:
        return TrialRow(i, offset, None, "error:" + str(exc).replace(",", ";").replace("\n", " "))


def _run_many(args) -> list[TrialRow]:
    cfg, indices = args
    return [run_trial(cfg, i) for i in indices]


def run_trials(cfg: ExperimentConfig, write: bool = True) -> TrialStats:
    """Execute all trials, optionally writing ``cfg.out`` (and ``cfg.svg``)."""
    indices = list(range(1, cfg.trials + 1))
    if cfg.workers == 1:
        rows = _run_many((cfg, indices))
    else:
        batches = [(cfg, indices[k::cfg.workers]) for k in range(cfg.workers)]
        rows = []
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for part in pool.map(_run_many, batches):
                rows.extend(part)
    rows.sort(key=lambda r: r.trial)
    stats = TrialStats(rows)
    if write:
        out = cfg.resolve(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(stats.to_csv())
        if cfg.svg:
            from .render import render_config_trial
            render_config_trial(cfg, 1, cfg.resolve(cfg.svg))
    return stats
