from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniplan.catalog import random_grid_env, small_grid_catalog
from uniplan.digits import ACTIONS, RIGHT, DigitStream
from uniplan.errors import InvalidArgument
from uniplan.gridworld import GridEnv, apply_actions, bfs_distances, step
from uniplan.learner import bfs_shortest, learn_optimal


def corridor(n: int) -> GridEnv:
    return GridEnv.from_cells([(x, 0) for x in range(n)], (0, 0), [(n - 1, 0)])


def learner_oracle(env: GridEnv, digits: list[int], cap: int):
    """Plain-Python replay of the learner rules; returns (best length, found_at).

    Recording restarts on every visit to the start, stops on reaching a goal
    and is abandoned once it grows past ``cap``.
    """
    x = env.start
    buf = 0  # None while not recording
    best, found = None, None
    for t, d in enumerate(digits, 1):
        if buf is not None:
            buf += 1
            if buf > cap:
                buf = None
        x = step(env, x, ACTIONS[d])
        if x == env.start:
            buf = 0
        elif x in env.goals and buf is not None:
            if best is None or buf < best:
                best, found = buf, t
            buf = None
    return best, found


def test_start_in_goal_gives_empty_plan():
    env = GridEnv.from_cells([(0, 0), (1, 0)], (0, 0), [(0, 0)])
    st_ = learn_optimal(env, DigitStream.champernowne(4), budget=100)
    assert st_.best_plan == [] and st_.found_at == 0 and st_.steps_consumed == 0


def test_corridor_learns_two_step_plan():
    res = learn_optimal(corridor(3), DigitStream.champernowne(4), budget=10**5)
    assert res.best_plan == [RIGHT, RIGHT]
    assert res.best_length == len(bfs_shortest(corridor(3), (0, 0), [(2, 0)])) == 2


def test_bfs_shortest_basics():
    env = corridor(3)
    assert bfs_shortest(env, (2, 0), env.goals) == []
    assert len(bfs_shortest(env, (0, 0), env.goals)) == 2


@pytest.mark.parametrize("env", small_grid_catalog(), ids=lambda e: f"{len(e)}cells")
def test_bfs_shortest_executes_in_its_length(env):
    path = bfs_shortest(env, env.start, env.goals)
    assert apply_actions(env, env.start, path) in env.goals
    assert len(path) == min(bfs_distances(env, env.start)[g] for g in env.goals)


def test_plans_are_verified_and_non_increasing():
    env = random_grid_env(20, 3)
    res = learn_optimal(env, DigitStream.pi(), budget=10**6)
    lengths = [length for _, length in res.history]
    assert lengths == sorted(lengths, reverse=True)
    assert len(set(lengths)) == len(lengths)
    assert apply_actions(env, env.start, res.best_plan) in env.goals
    assert [at for at, _ in res.history] == sorted(at for at, _ in res.history)


def test_no_optimality_flag():
    res = learn_optimal(corridor(3), DigitStream.champernowne(4), budget=1000)
    assert not any("optimal" in name for name in vars(res))


def test_negative_budget_rejected():
    with pytest.raises(InvalidArgument):
        learn_optimal(corridor(2), DigitStream.champernowne(4), budget=-1)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 12), offset=st.integers(1, 10**6),
       budget=st.integers(0, 3000), chunk=st.integers(1, 700))
@settings(max_examples=60, deadline=None)
def test_compiled_learner_matches_oracle(seed, n, offset, budget, chunk):
    env = random_grid_env(n, seed)
    stream = DigitStream.pseudorandom(seed, 4)
    cap = 4 * n
    res = learn_optimal(env, stream, offset=offset, budget=budget, chunk=chunk)
    if env.start in env.goals:
        assert res.best_plan == []
        return
    best, found = learner_oracle(env, stream.block(offset, budget).tolist() if budget else [], cap)
    assert res.best_length == best
    if best is not None:
        assert res.found_at == found
        # the plan is exactly the digits that produced it
        assert apply_actions(env, env.start, res.best_plan) in env.goals


def test_cap_hits_are_counted():
    env = GridEnv.from_cells([(x, y) for x in range(3) for y in range(2)], (0, 0), [(2, 0)])
    # up, shuffle along the top row without touching the start, then right, right, down
    stream = DigitStream.from_string("2" + "10" * 6 + "113")
    res = learn_optimal(env, stream, budget=16, cap=10)
    assert res.cap_hits == 1 and res.best_plan is None
    res = learn_optimal(env, stream, budget=16, cap=16)
    assert res.cap_hits == 0 and res.best_length == 16


@pytest.mark.parametrize("i", range(6))
def test_converges_to_bfs_on_small_grids(i):
    rng = random.Random(40 + i)
    env = random_grid_env(rng.randint(5, 15), 900 + i)
    optimal = len(bfs_shortest(env, env.start, env.goals))
    res = learn_optimal(env, DigitStream.champernowne(4), budget=10**7)
    assert res.best_length == optimal
