"""Seeded instance generators used by the verification suite and experiments.

Everything here is deterministic in its seed (``random.Random`` is stable
across platforms for integer seeds).
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

from .gridworld import Cell, GridEnv, generate_maze
from .scalefree.env import ContinuousEnv, Disc
from .scalefree.grids import check_degenerate, estimate_sufficient_scaling


def random_polyomino(n: int, rng: random.Random) -> frozenset:
    """n cells grown from the origin by adding random frontier cells."""
    cells = {(0, 0)}
    frontier = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    while len(cells) < n:
        c = frontier.pop(rng.randrange(len(frontier)))
        if c in cells:
            continue
        cells.add(c)
        x, y = c
        for nb in ((x - 1, y), (x + 1, y), (x, y + 1), (x, y - 1)):
            if nb not in cells:
                frontier.append(nb)
    return frozenset(cells)


def _rect(w: int, h: int) -> frozenset:
    return frozenset((x, y) for x in range(w) for y in range(h))


def random_grid_env(n: int, seed: int) -> GridEnv:
    """Random n-cell polyomino with a random start and a distinct goal."""
    rng = random.Random(seed)
    cells = random_polyomino(n, rng)
    order = sorted(cells)
    start = order[rng.randrange(len(order))]
    others = [c for c in order if c != start] or [start]
    goal = others[rng.randrange(len(others))]
    return GridEnv.from_cells(cells, start, [goal])


def small_grid_catalog(count: int = 24, max_cells: int = 12, seed: int = 2024) -> list[GridEnv]:
    """Hand-picked shapes followed by random polyominoes, all <= max_cells."""
    shapes = [
        _rect(1, 1), _rect(2, 1), _rect(3, 1), _rect(2, 2), _rect(3, 3),
        _rect(6, 2), _rect(12, 1), _rect(4, 3),
        _rect(3, 3) - {(1, 1)},                                  # ring
        frozenset({(0, 0), (1, 0), (2, 0), (1, 1), (1, 2)}),     # T
        frozenset({(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)}),     # L
        frozenset({(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2)}),  # stairs
    ]
    shapes = [s for s in shapes if len(s) <= max_cells]
    rng = random.Random(seed)
    while len(shapes) < count:
        shapes.append(random_polyomino(rng.randint(2, max_cells), rng))
    envs = []
    for cells in shapes[:count]:
        order = sorted(cells)
        envs.append(GridEnv.from_cells(cells, order[0], [order[-1]]))
    return envs


def obstacle_grid(width: int, height: int, free_count: int, seed: int) -> GridEnv:
    """width x height grid with exactly ``free_count`` connected free cells.

    Random rectangular blocks are dropped while the component holding the
    top-left corner stays above ``free_count`` cells, then leaves of a BFS
    tree are trimmed (removing a leaf never disconnects the rest) until the
    count is exact.  Start is the top-left cell, goal the bottom-right one.
    """
    if not 2 <= free_count <= width * height:
        raise ValueError("free_count out of range")
    rng = random.Random(seed)
    start, goal = (0, height - 1), (width - 1, 0)
    free = set(_rect(width, height))
    slack = max(1, width * height // 100)
    attempts = 0
    while len(free) > free_count + slack and attempts < 20 * width * height:
        attempts += 1
        bw = rng.randint(1, max(1, width // 8))
        bh = rng.randint(1, max(1, height // 8))
        x0, y0 = rng.randrange(width), rng.randrange(height)
        block = {(x, y) for x in range(x0, min(width, x0 + bw))
                 for y in range(y0, min(height, y0 + bh))}
        if start in block or goal in block:
            continue
        reach = _bfs_parents(free - block, start)
        if goal in reach and len(reach) >= free_count:
            free = set(reach)
    while len(free) > free_count:
        parent = _bfs_parents(free, start)
        has_child = {p for p in parent.values() if p is not None}
        leaves = sorted(c for c in free if c not in has_child and c not in (start, goal))
        rng.shuffle(leaves)
        for c in leaves[:len(free) - free_count]:
            free.discard(c)
    return GridEnv(frozenset(free), start, frozenset([goal]), width, height)


def _bfs_parents(cells: set, start: Cell) -> dict:
    parent = {start: None}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        x, y = c
        for nb in ((x - 1, y), (x + 1, y), (x, y + 1), (x, y - 1)):
            if nb in cells and nb not in parent:
                parent[nb] = c
                queue.append(nb)
    return parent


def maze(width: int, height: int, seed: int) -> GridEnv:
    return generate_maze(width, height, seed)


def random_continuous_env(seed: int, n_discs: int | None = None, size: int = 4) -> ContinuousEnv:
    """Square [0,size]^2 with disjoint discs, a goal ball and four starts.

    Coordinates are multiples of 1/20; discs keep a gap of at least 1/10
    from each other and from the walls so the environment is never
    degenerate.
    """
    rng = random.Random(seed)
    grid = Fraction(1, 20)
    side = Fraction(size)
    if n_discs is None:
        n_discs = rng.randint(2, 7)
    discs: list[Disc] = []
    tries = 0
    while len(discs) < n_discs and tries < 2000:
        tries += 1
        r = grid * rng.randint(4, 12)
        cx = grid * rng.randint(int((r + Fraction(1, 10)) / grid), int((side - r - Fraction(1, 10)) / grid))
        cy = grid * rng.randint(int((r + Fraction(1, 10)) / grid), int((side - r - Fraction(1, 10)) / grid))
        d = Disc(cx, cy, r)
        if all((d.cx - o.cx) ** 2 + (d.cy - o.cy) ** 2 >= (d.r + o.r + Fraction(1, 10)) ** 2
               for o in discs):
            discs.append(d)

    def free_point() -> tuple[Fraction, Fraction]:
        while True:
            p = (Fraction(rng.randint(1, 100 * size - 1), 100), Fraction(rng.randint(1, 100 * size - 1), 100))
            if all(o.dist2(p) > (o.r + Fraction(1, 20)) ** 2 for o in discs):
                return p

    goal = free_point()
    goal_radius = Fraction(rng.choice([1, 2]), 8)
    starts = tuple(free_point() for _ in range(4))
    return ContinuousEnv(side, side, tuple(discs), goal, goal_radius, starts)


def continuous_catalog(count: int = 25, seed: int = 5) -> list[ContinuousEnv]:
    envs = []
    for i in range(count):
        env = random_continuous_env(seed * 1000 + i)
        check_degenerate(env)
        estimate_sufficient_scaling(env)
        envs.append(env)
    return envs


__all__ = [
    "continuous_catalog", "maze", "obstacle_grid", "random_continuous_env",
    "random_grid_env", "random_polyomino", "small_grid_catalog",
]
