"""Discrete robot grid search: environments, the stay-put transition, plan
execution, coverage and maze generation.

Coordinates: x grows to the right, y grows upward.  In the text format the
last row of the file is y = 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .digits import ACTION_SYMBOLS, ACTIONS, ActionMap, DigitStream, pseudorandom_digit
from .errors import (
    DisconnectedEnvironmentError,
    InvalidArgument,
    InvalidState,
    MissingGoalError,
    MissingStartError,
    ParseError,
    RaggedRowsError,
    ResourceLimitError,
)

Cell = tuple[int, int]

CHUNK = 1 << 16


def _neighbors(c: Cell) -> Iterable[Cell]:
    x, y = c
    for dx, dy in ACTIONS:
        yield (x + dx, y + dy)


def is_connected(cells: Iterable[Cell]) -> bool:
    """True iff the cells form one 4-neighbour component (empty counts)."""
    cells = set(cells)
    if not cells:
        return True
    first = next(iter(cells))
    seen = {first}
    todo = [first]
    while todo:
        c = todo.pop()
        for nb in _neighbors(c):
            if nb in cells and nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class GridEnv:
    free_cells: frozenset
    start: Cell
    goals: frozenset
    width: int
    height: int

    def __post_init__(self):
        free = frozenset((int(x), int(y)) for x, y in self.free_cells)
        goals = frozenset((int(x), int(y)) for x, y in self.goals)
        start = (int(self.start[0]), int(self.start[1]))
        object.__setattr__(self, "free_cells", free)
        object.__setattr__(self, "goals", goals)
        object.__setattr__(self, "start", start)
        if not free:
            raise InvalidArgument("environment has no free cells")
        if start not in free:
            raise InvalidState(f"start {start} is not a free cell")
        if not goals:
            raise MissingGoalError("goal set is empty")
        if not goals <= free:
            raise InvalidState(f"goals {sorted(goals - free)} are not free cells")
        if not is_connected(free):
            raise DisconnectedEnvironmentError("free space is not 4-connected")

    @classmethod
    def from_cells(cls, cells: Iterable[Cell], start: Cell, goals: Iterable[Cell]) -> "GridEnv":
        cells = frozenset(cells)
        xs = [c[0] for c in cells] or [0]
        ys = [c[1] for c in cells] or [0]
        return cls(cells, start, frozenset(goals), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)

    def with_task(self, start: Cell, goals: Iterable[Cell]) -> "GridEnv":
        return GridEnv(self.free_cells, start, frozenset(goals), self.width, self.height)

    # -- indexed view used by the kernels ---------------------------------

    @cached_property
    def cells(self) -> list[Cell]:
        return sorted(self.free_cells)

    @cached_property
    def index(self) -> dict[Cell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    @cached_property
    def table(self) -> np.ndarray:
        """Successor index for every (state index, action index)."""
        idx = self.index
        t = np.empty((len(self.cells), 4), dtype=np.int64)
        for i, c in enumerate(self.cells):
            for a, nb in enumerate(_neighbors(c)):
                t[i, a] = idx.get(nb, i)
        return t

    @cached_property
    def goal_mask(self) -> np.ndarray:
        m = np.zeros(len(self.cells), dtype=np.bool_)
        for g in self.goals:
            m[self.index[g]] = True
        return m

    def __len__(self) -> int:
        return len(self.free_cells)


def parse_env(text: str) -> GridEnv:
    """Read a grid from text: ``#`` obstacle, ``.`` free, ``S`` start,
    ``G`` goal (any number), ``B`` start that is also a goal."""
    rows = [r.rstrip("\r") for r in text.strip("\n").split("\n")]
    rows = [r for r in rows if r.strip() and not r.lstrip().startswith(";")]
    if not rows:
        raise ParseError("empty environment")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise RaggedRowsError("rows have different lengths")
    height = len(rows)
    free, goals, starts = set(), set(), []
    for row_i, row in enumerate(rows):
        y = height - 1 - row_i
        for x, ch in enumerate(row):
            if ch == "#":
                continue
            if ch not in ".SGB":
                raise ParseError(f"unexpected character {ch!r} at row {row_i + 1}")
            free.add((x, y))
            if ch in "SB":
                starts.append((x, y))
            if ch in "GB":
                goals.add((x, y))
    if not starts:
        raise MissingStartError("no start cell 'S'")
    if len(starts) > 1:
        raise ParseError("more than one start cell")
    if not goals:
        raise MissingGoalError("no goal cell 'G'")
    return GridEnv(frozenset(free), starts[0], frozenset(goals), width, height)


def env_to_text(env: GridEnv) -> str:
    xs = [c[0] for c in env.free_cells]
    ys = [c[1] for c in env.free_cells]
    x0, y0 = min(min(xs), 0), min(min(ys), 0)
    x1 = max(max(xs), x0 + env.width - 1)
    y1 = max(max(ys), y0 + env.height - 1)
    lines = []
    for y in range(y1, y0 - 1, -1):
        row = []
        for x in range(x0, x1 + 1):
            c = (x, y)
            if c not in env.free_cells:
                row.append("#")
            elif c == env.start:
                row.append("B" if c in env.goals else "S")
            elif c in env.goals:
                row.append("G")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def step(env: GridEnv, x: Cell, u: Sequence[int]) -> Cell:
    """Move by ``u`` if the target cell is free, otherwise stay put."""
    if x not in env.free_cells:
        raise InvalidState(f"{x} is not a free cell")
    u = (int(u[0]), int(u[1]))
    if u not in ACTIONS:
        raise InvalidArgument(f"{u} is not a unit action")
    nxt = (x[0] + u[0], x[1] + u[1])
    return nxt if nxt in env.free_cells else x


def apply_actions(env: GridEnv, x: Cell, actions: Iterable[Sequence[int]]) -> Cell:
    for u in actions:
        x = step(env, x, u)
    return x


def _available(stream: DigitStream, start: int, count: int) -> int:
    n = stream.available(start, count)
    if n == 0:
        raise ResourceLimitError(f"{stream.describe()} has no digit at index {start}")
    return n


@dataclass
class PlanTrace:
    """States x_1 .. x_{K+1} visited under actions u_1 .. u_K.

    ``outcome`` is ``"goal"`` (a goal state was reached at stage
    ``goal_stage``, 1-based, so stage 1 is the initial state) or
    ``"budget"``.  ``total`` is the number of free cells of the environment.
    """

    states: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    blocked: list = field(default_factory=list)
    outcome: str = "budget"
    goal_stage: int | None = None
    offset: int = 1
    total: int = 0

    @property
    def steps_taken(self) -> int:
        return len(self.actions)

    @property
    def reached_goal(self) -> bool:
        return self.outcome == "goal"


def execute(env: GridEnv, stream: DigitStream, amap: ActionMap | None = None,
            offset: int = 1, max_steps: int = 10**6) -> PlanTrace:
    """Apply the plan c(a_offset), c(a_offset+1), ... until a goal is hit.

    Records every state; use ``run_steps`` when only the count matters.
    """
    if max_steps < 0:
        raise InvalidArgument("max_steps must be >= 0")
    amap = amap or ActionMap.default()
    table = {d: amap(d) for d in range(stream.base) if d in amap.table}
    x = env.start
    trace = PlanTrace(states=[x], offset=offset, total=len(env))
    if x in env.goals:
        trace.outcome, trace.goal_stage = "goal", 1
        return trace
    free, goals = env.free_cells, env.goals
    done = 0
    while done < max_steps:
        n = _available(stream, offset + done, min(CHUNK, max_steps - done))
        for d in stream.block(offset + done, n).tolist():
            u = table.get(d)
            if u is None:
                raise InvalidArgument(f"digit {d} outside action map domain")
            nxt = (x[0] + u[0], x[1] + u[1])
            moved = nxt in free
            if moved:
                x = nxt
            trace.actions.append(u)
            trace.blocked.append(not moved)
            trace.states.append(x)
            if x in goals:
                trace.outcome, trace.goal_stage = "goal", len(trace.states)
                return trace
        done += n
    return trace


@dataclass
class RunResult:
    """Outcome of a long execution without the per-step record."""

    steps: int
    reached_goal: bool
    final: Cell
    visited: int
    total: int


def run_steps(env: GridEnv, stream: DigitStream, amap: ActionMap | None = None,
              offset: int = 1, max_steps: int = 10**6, chunk: int = 1 << 20) -> RunResult:
    """Compiled equivalent of ``execute`` returning counts only.

    Finite streams that run out raise ResourceLimitError, like ``execute``.
    """
    if max_steps < 0:
        raise InvalidArgument("max_steps must be >= 0")
    amap = amap or ActionMap.default()
    aidx = amap.index_array(stream.base)
    state = env.index[env.start]
    visited = np.zeros(len(env), dtype=np.bool_)
    visited[state] = True
    if env.goal_mask[state]:
        return RunResult(0, True, env.start, 1, len(env))
    table, goal_mask = env.table, env.goal_mask
    done = 0
    hit = False
    while done < max_steps and not hit:
        n = _available(stream, offset + done, min(chunk, max_steps - done))
        digits = stream.block(offset + done, n)
        used, state, hit = kernels.walk(table, aidx, digits, state, goal_mask, visited)
        done += used
    return RunResult(done, bool(hit), env.cells[state], int(visited.sum()), len(env))


def coverage(trace: PlanTrace) -> tuple[int, int]:
    return len(set(trace.states)), trace.total


def replay(env: GridEnv, start: Cell, actions: Iterable[Sequence[int]]) -> list[Cell]:
    states = [start]
    for u in actions:
        states.append(step(env, states[-1], u))
    return states


def trace_to_text(trace: PlanTrace) -> str:
    """One ``x,y action blocked`` line per step, then the final state."""
    lines = [f"# outcome={trace.outcome} stage={trace.goal_stage} "
             f"offset={trace.offset} total={trace.total}"]
    for s, u, b in zip(trace.states, trace.actions, trace.blocked):
        lines.append(f"{s[0]},{s[1]} {ACTION_SYMBOLS[tuple(u)]} {int(b)}")
    last = trace.states[-1]
    lines.append(f"{last[0]},{last[1]} - -")
    return "\n".join(lines) + "\n"


def trace_from_text(text: str) -> PlanTrace:
    by_symbol = {v: k for k, v in ACTION_SYMBOLS.items()}
    trace = PlanTrace()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = dict(kv.split("=", 1) for kv in line[1:].split())
            trace.outcome = meta.get("outcome", "budget")
            stage = meta.get("stage", "None")
            trace.goal_stage = None if stage == "None" else int(stage)
            trace.offset = int(meta.get("offset", 1))
            trace.total = int(meta.get("total", 0))
            continue
        pos, act, blocked = line.split()
        x, y = (int(v) for v in pos.split(","))
        trace.states.append((x, y))
        if act != "-":
            trace.actions.append(by_symbol[act])
            trace.blocked.append(blocked == "1")
    return trace


def bfs_path(env: GridEnv, source: Cell, targets: Iterable[Cell]) -> list[Cell]:
    """Shortest action sequence from ``source`` into ``targets``.

    Neighbours are expanded in the fixed order left, right, up, down, so
    the result is deterministic.  Moves that would be blocked are never
    useful in a shortest path, so plain 4-neighbour BFS is exact.
    """
    targets = set(targets)
    if source not in env.free_cells:
        raise InvalidState(f"{source} is not a free cell")
    if source in targets:
        return []
    parent: dict[Cell, tuple[Cell, Cell]] = {source: None}
    queue = deque([source])
    while queue:
        c = queue.popleft()
        for u in ACTIONS:
            nb = (c[0] + u[0], c[1] + u[1])
            if nb in env.free_cells and nb not in parent:
                parent[nb] = (c, u)
                if nb in targets:
                    path = []
                    while parent[nb] is not None:
                        nb, act = parent[nb]
                        path.append(act)
                    return path[::-1]
                queue.append(nb)
    raise InvalidState("no target reachable")  # unreachable for a valid GridEnv


def bfs_distances(env: GridEnv, source: Cell) -> dict[Cell, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        c = queue.popleft()
        for nb in _neighbors(c):
            if nb in env.free_cells and nb not in dist:
                dist[nb] = dist[c] + 1
                queue.append(nb)
    return dist


def generate_maze(width: int, height: int, seed: int = 0) -> GridEnv:
    """Perfect maze by iterative depth-first backtracking.

    Rooms sit at odd text coordinates inside a one-cell outer wall.  Each
    branching choice draws ``pseudorandom_digit(seed, k, n)`` for the
    n-th choice among k unvisited neighbours.  Start is the top-left room,
    goal the bottom-right room.
    """
    if width < 3 or height < 3 or width % 2 == 0 or height % 2 == 0:
        raise InvalidArgument("maze width and height must be odd and >= 3")
    rooms_x = range(1, width - 1, 2)
    rooms_y = range(1, height - 1, 2)
    top = max(rooms_y)
    first = (1, top)
    free = {first}
    stack = [first]
    draws = 0
    while stack:
        cx, cy = stack[-1]
        options = [(cx + 2 * dx, cy + 2 * dy) for dx, dy in ACTIONS
                   if (cx + 2 * dx) in rooms_x and (cy + 2 * dy) in rooms_y
                   and (cx + 2 * dx, cy + 2 * dy) not in free]
        if not options:
            stack.pop()
            continue
        if len(options) == 1:
            nxt = options[0]
        else:
            draws += 1
            nxt = options[pseudorandom_digit(seed, len(options), draws)]
        free.add(((cx + nxt[0]) // 2, (cy + nxt[1]) // 2))
        free.add(nxt)
        stack.append(nxt)
    goal = (max(rooms_x), min(rooms_y))
    return GridEnv(frozenset(free), first, frozenset([goal]), width, height)
