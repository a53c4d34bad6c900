from __future__ import annotations

import random
import statistics
from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniplan.catalog import continuous_catalog, random_continuous_env
from uniplan.digits import ACTIONS, DigitStream
from uniplan.errors import (DegenerateEnvironment, DisconnectedEnvironmentError, InvalidArgument,
                            InvalidState, ParseError, ResourceLimitError)
from uniplan.scalefree import (ContinuousEnv, Disc, DyadicPoint, enumerate_grid_classes,
                               estimate_sufficient_scaling, execute_adaptive, execute_scalefree,
                               format_continuous_env, goal_equivalent, grid_at_resolution,
                               grid_search_equivalent, is_connected_at, parse_continuous_env,
                               step_continuous)
from uniplan.scalefree.schedule import schedule_for

UNIT = ContinuousEnv(1, 1, (), (F(1, 2), F(1, 2)), F(1, 8))


def square(side=1, discs=(), goal=None, r=F(1, 8)):
    goal = goal or (F(side, 2), F(side, 2))
    return ContinuousEnv(side, side, tuple(discs), goal, r)


# -- environment --------------------------------------------------------------------

def test_parse_format_roundtrip():
    env = random_continuous_env(17)
    again = parse_continuous_env(format_continuous_env(env))
    assert again == env and again.starts == env.starts


@pytest.mark.parametrize("text", [
    "goal 1/2 1/2 1/4\n",
    "rect 1 1\n",
    "rect 1 1\ngoal 1/2 1/2 1/4\nblob 1\n",
    "rect 1 1\ngoal 1/2 1/2\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_continuous_env(text)


def test_goal_must_be_interior():
    with pytest.raises(InvalidArgument):
        ContinuousEnv(1, 1, (), (0, F(1, 2)), F(1, 4))


def test_disc_must_fit_rectangle():
    with pytest.raises(InvalidArgument):
        ContinuousEnv(1, 1, (Disc(F(1, 10), F(1, 2), F(1, 5)),), (F(3, 4), F(1, 2)), F(1, 8))


def test_wall_to_wall_disc_is_disconnected():
    with pytest.raises(DisconnectedEnvironmentError):
        parse_continuous_env("rect 2 1\ndisc 1 1/2 1/2\ngoal 1/4 1/2 1/8\n")


# -- transition ------------------------------------------------------------------

def test_step_free_move():
    p = DyadicPoint((F(1, 2), F(1, 2)))
    q = step_continuous(UNIT, p, (1, 0), 3)
    assert q.value() == (F(5, 8), F(1, 2))


def test_step_into_disc_stays():
    env = square(2, [Disc(F(3, 2), 1, F(1, 4))], goal=(F(1, 4), F(1, 4)))
    p = DyadicPoint((F(1), F(1)))
    assert step_continuous(env, p, (1, 0), 1) == p  # endpoint (3/2, 1) is the disc centre


def test_step_onto_disc_boundary_allowed():
    env = square(3, [Disc(F(7, 4), 1, F(1, 4))], goal=(F(1, 4), F(1, 4)))
    p = DyadicPoint((F(1, 2), F(1)))
    q = step_continuous(env, p, (1, 0), 0)  # endpoint (3/2, 1): squared distance == r^2
    assert q.value() == (F(3, 2), F(1))


def test_step_onto_wall_allowed_and_past_wall_blocked():
    p = DyadicPoint((F(1, 2), F(1, 2)))
    assert step_continuous(UNIT, p, (1, 0), 1).value() == (F(1), F(1, 2))
    assert step_continuous(UNIT, p, (1, 0), 0) == p


def test_step_rejects_point_outside():
    with pytest.raises(InvalidState):
        step_continuous(UNIT, DyadicPoint((F(2), F(2))), (1, 0), 1)


@given(st.lists(st.tuples(st.sampled_from(ACTIONS), st.integers(0, 40)), max_size=30))
def test_dyadic_moves_are_exact(moves):
    p = DyadicPoint((F(1, 3), F(2, 7)))
    x, y = F(1, 3), F(2, 7)
    for u, m in moves:
        p = p.moved(u, m)
        x, y = x + F(u[0], 2 ** m), y + F(u[1], 2 ** m)
    assert p.value() == (x, y)


# -- lattice grids -------------------------------------------------------------------

def test_unit_square_m1_lattice():
    g = grid_at_resolution(UNIT, (F(1, 4), F(1, 4)), 1)
    assert g.nodes() == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert g.components() == 1


def test_narrow_gap_splits_coarse_lattice():
    env = ContinuousEnv(2, 1, (Disc(1, F(1, 2), F(9, 20)),), (F(1, 4), F(1, 2)), F(1, 8))
    g = grid_at_resolution(env, (F(1, 4), F(1, 4)), 1)
    assert g.components() == 2
    assert not is_connected_at(env, (F(1, 4), F(1, 4)), 1)
    assert is_connected_at(env, (F(1, 4), F(1, 4)), 7)


@given(ax=st.integers(1, 1023), ay=st.integers(1, 1023), m=st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_convex_env_always_connected(ax, ay, m):
    assert is_connected_at(UNIT, (F(ax, 1024), F(ay, 1024)), m)


def test_single_node_grid_connected():
    g = grid_at_resolution(UNIT, (F(1, 3), F(2, 3)), 0)
    assert g.size == 1 and is_connected_at(UNIT, (F(1, 3), F(2, 3)), 0)


def test_node_limit():
    with pytest.raises(ResourceLimitError):
        grid_at_resolution(UNIT, (F(1, 2), F(1, 2)), 12, limit=1000)


def test_lattice_matches_pointwise_membership():
    env = random_continuous_env(3)
    anchor = env.starts[0]
    g = grid_at_resolution(env, anchor, 3)
    s = F(1, 8)
    brute = set()
    for i in range(-40, 41):
        for j in range(-40, 41):
            p = (anchor[0] + i * s, anchor[1] + j * s)
            if env.in_interior(p):
                brute.add((i, j))
    assert g.nodes() == brute
    goal = {(i, j) for i, j in brute if env.in_goal((anchor[0] + i * s, anchor[1] + j * s))}
    assert g.goal_nodes() == goal


# -- scaling estimate --------------------------------------------------------------------

def test_scaling_empty_unit_square():
    assert estimate_sufficient_scaling(UNIT, F(1, 2)) == 3


def test_scaling_single_centred_disc():
    env = square(1, [Disc(F(1, 2), F(1, 2), F(1, 4))], goal=(F(1, 8), F(1, 8)), r=F(1, 16))
    # clearance 1/4 (radius and wall gaps), r = 1 -> 2^-m <= 1/16
    assert estimate_sufficient_scaling(env, 1) == 4


def test_scaling_overlapping_discs_degenerate():
    env = square(4, [Disc(1, 1, F(1, 2)), Disc(F(3, 2), 1, F(1, 2))], goal=(3, 3))
    with pytest.raises(DegenerateEnvironment):
        estimate_sufficient_scaling(env)


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_scaling_is_smallest_satisfying_m(seed):
    env = random_continuous_env(seed)
    m = estimate_sufficient_scaling(env)
    from uniplan.scalefree.grids import clearance
    bound = min(clearance(env), float(env.goal_radius))
    assert 4 * 2.0 ** -m <= bound + 1e-12
    assert m == 0 or 4 * 2.0 ** -(m - 1) > bound - 1e-12


@pytest.mark.parametrize("env", continuous_catalog(count=5), ids=lambda e: f"{len(e.discs)}discs")
def test_connected_at_sufficient_scaling(env):
    m = estimate_sufficient_scaling(env)
    rng = random.Random(1)
    for _ in range(20):
        while True:
            a = (F(rng.randrange(1, 4096), 1024), F(rng.randrange(1, 4096), 1024))
            if env.in_interior(a):
                break
        assert is_connected_at(env, a, m) and is_connected_at(env, a, m + 1)


# -- grid classes and equivalence ----------------------------------------------------

def test_unit_square_m0_single_class():
    anchors = [(F(i, 7), F(j, 5)) for i in range(1, 7) for j in range(1, 5)]
    assert enumerate_grid_classes(UNIT, 0, anchors) == 1


def test_class_count_stable_under_resampling():
    env = square(1, [Disc(F(1, 2), F(1, 2), F(1, 5))], goal=(F(1, 8), F(1, 8)), r=F(1, 16))
    rng = random.Random(4)

    def sample(k):
        out = []
        while len(out) < k:
            a = (F(rng.randrange(1, 2**20), 2**20), F(rng.randrange(1, 2**20), 2**20))
            if env.in_interior(a):
                out.append(a)
        return out

    assert enumerate_grid_classes(env, 2, sample(1000)) == enumerate_grid_classes(env, 2, sample(1000))


def test_lattice_translates_share_canonical_form():
    env = random_continuous_env(8)
    a = env.starts[0]
    g1 = grid_at_resolution(env, a, 3)
    g2 = grid_at_resolution(env, (a[0] + F(2, 8), a[1] - F(1, 8)), 3)
    assert g1.canonical() == g2.canonical()
    assert g1.nodes() == {(i + 2, j - 1) for i, j in g2.nodes()}


def test_self_equivalence():
    g = grid_at_resolution(random_continuous_env(2), random_continuous_env(2).starts[1], 3)
    assert goal_equivalent(g, g) and grid_search_equivalent(g, g)


def test_translated_grid_with_translated_anchor():
    g = grid_at_resolution(random_continuous_env(2), random_continuous_env(2).starts[1], 3)
    shifted = replace(g, anchor=(g.anchor[0] + F(1, 8), g.anchor[1]))
    assert goal_equivalent(g, shifted)
    assert grid_search_equivalent(g, shifted)
    # same node picture, but the anchor moved without the nodes: not search-equivalent
    moved_anchor = replace(g, anchor=(g.anchor[0] + F(1, 8), g.anchor[1]), i0=g.i0 - 1)
    assert goal_equivalent(g, moved_anchor) and not grid_search_equivalent(g, moved_anchor)


def test_shifted_goal_breaks_goal_equivalence():
    env = random_continuous_env(2)
    g = grid_at_resolution(env, env.starts[1], 3)
    gm = np.zeros_like(g.goal_mask)
    a, b = np.nonzero(g.mask & ~g.goal_mask)
    gm[a[0], b[0]] = True
    assert not goal_equivalent(g, replace(g, goal_mask=gm))


# -- scale-free execution --------------------------------------------------------------

def test_start_in_goal_zero_steps():
    tr = execute_scalefree(UNIT, (F(1, 2), F(17, 32)), DigitStream.pi())
    assert tr.reached_goal and tr.steps == 0


def test_goal_covering_rectangle_succeeds_at_first_stage():
    env = square(1, r=F(1))
    for start in [(F(1, 10), F(1, 10)), (F(9, 10), F(1, 2))]:
        tr = execute_scalefree(env, start, DigitStream.champernowne(4))
        assert tr.reached_goal and tr.steps == 0


def test_start_must_be_interior():
    with pytest.raises(InvalidArgument):
        execute_scalefree(UNIT, (0, F(1, 2)), DigitStream.pi())


def replay_scalefree(env, start, digits, w, offset):
    """Fraction-only reference executor."""
    s = schedule_for(w)
    x, y = start
    points = [(x, y)]
    if env.in_goal((x, y)):
        return points
    for t, d in enumerate(digits):
        m = s.exponent(offset + t)
        u = ACTIONS[d]
        q = (x + F(u[0], 2 ** m), y + F(u[1], 2 ** m))
        if env.contains(q):
            x, y = q
        points.append((x, y))
        if env.in_goal((x, y)) and q == (x, y):
            break
    return points


@given(seed=st.integers(0, 10**4), offset=st.integers(1, 10**5),
       w=st.sampled_from([F(1), F(1, 2), F(2)]), k=st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_trace_replays_exactly(seed, offset, w, k):
    env = random_continuous_env(seed)
    start = env.starts[k]
    stream = DigitStream.pseudorandom(seed, 4)
    tr = execute_scalefree(env, start, stream, w=w, offset=offset, max_steps=400)
    ref = replay_scalefree(env, start, stream.block(offset, 400).tolist(), w, offset)
    assert tr.points() == ref
    assert tr.final_point() == ref[-1]
    sched = schedule_for(w)
    assert tr.exponents == [sched.exponent(offset + i) for i in range(len(tr.exponents))]


def test_confinement_to_coarsest_lattice():
    env = random_continuous_env(11)
    tr = execute_scalefree(env, env.starts[0], DigitStream.pi(), offset=50, max_steps=3000)
    pts = tr.points()
    # stages 1.. of segment runs: between changes, all points share a lattice
    i = 0
    while i < len(tr.exponents):
        j = i
        M = tr.exponents[i]
        while j < len(tr.exponents) and tr.exponents[j] <= M:
            j += 1
        entry = pts[i]
        for p in pts[i:j + 1]:
            assert ((p[0] - entry[0]) * 2 ** M).denominator == 1
            assert ((p[1] - entry[1]) * 2 ** M).denominator == 1
        i = j if j > i else i + 1


def test_scalefree_deterministic():
    env = random_continuous_env(5005)
    a = execute_scalefree(env, env.starts[2], DigitStream.pi(), offset=777, max_steps=10**5)
    b = execute_scalefree(env, env.starts[2], DigitStream.pi(), offset=777, max_steps=10**5)
    assert a.positions == b.positions and a.steps == b.steps and a.outcome == b.outcome


def test_record_flag_does_not_change_result():
    env = random_continuous_env(5006)
    a = execute_scalefree(env, env.starts[1], DigitStream.pi(), max_steps=10**5)
    b = execute_scalefree(env, env.starts[1], DigitStream.pi(), max_steps=10**5, record=False)
    assert (a.steps, a.outcome, a.final_point()) == (b.steps, b.outcome, b.final_point())


# -- adaptive execution ----------------------------------------------------------------

def test_adaptive_halving_digits():
    env = square(4, goal=(F(7, 2), F(7, 2)), r=F(1, 100))
    tr = execute_adaptive(env, (1, 1), DigitStream.from_string("13" * 10), max_steps=10)
    assert tr.exponents == list(range(10))
    assert tr.unit == 2


def test_adaptive_size_pinned_at_cap():
    env = square(4, goal=(F(7, 2), F(7, 2)), r=F(1, 100))
    tr = execute_adaptive(env, (1, 1), DigitStream.from_string("00" * 10), max_steps=10)
    assert tr.exponents == [0] * 10
    # left steps of W/2 = 2 from x = 1 are all blocked
    assert all(tr.blocked)


def test_adaptive_doubling_after_halving():
    env = square(4, goal=(F(7, 2), F(7, 2)), r=F(1, 100))
    tr = execute_adaptive(env, (1, 1), DigitStream.from_string("13130101"), max_steps=4)
    assert tr.exponents == [0, 1, 2, 1]


def test_adaptive_beats_scalefree_on_median():
    envs = continuous_catalog()
    fixed, adaptive = [], []
    for env in envs:
        for start in env.starts:
            fixed.append(execute_scalefree(env, start, DigitStream.pi(), max_steps=10**6,
                                           record=False).steps)
            adaptive.append(execute_adaptive(env, start, DigitStream.pi(), max_steps=10**6,
                                             record=False).steps)
    assert len(fixed) >= 100
    assert statistics.median(adaptive) <= statistics.median(fixed)
