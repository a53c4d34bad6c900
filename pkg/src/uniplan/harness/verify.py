"""Catalog self-checks emitted as JSON-lines records.

Each record is ``{"name", "instance", "pass", "witness"}``.  The ``small``
suite runs in seconds; ``full`` covers the complete catalogs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from ..automata import (essential_classes, grid_to_dfa, product_automaton,
                        synchronizing_sequence, verify_exhaustive, verify_synchronizing)
from ..catalog import continuous_catalog, random_grid_env, small_grid_catalog
from ..digits import DigitStream, champernowne_digit
from ..gridworld import GridEnv, run_steps
from ..learner import bfs_shortest, learn_optimal
from ..pi4 import pi_digit_base4
from ..scalefree.grids import estimate_sufficient_scaling, is_connected_at
from ..scalefree.schedule import L_w, beta_phi

CHAMPERNOWNE_PREFIX = "0123101112132021222330313233100101"
PI_PREFIX = "30210033312222020"


@dataclass(frozen=True)
class Check:
    name: str
    instance: str
    passed: bool
    witness: object = None

    def to_json(self) -> str:
        return json.dumps({"name": self.name, "instance": self.instance,
                           "pass": bool(self.passed), "witness": self.witness},
                          sort_keys=True, default=str)


def describe_grid(env: GridEnv) -> str:
    cells = ";".join(f"{x},{y}" for x, y in env.cells)
    return f"grid[{len(env)}] start={env.start} goals={sorted(env.goals)} cells={cells}"


def check_digits() -> Iterator[Check]:
    champ = "".join(str(champernowne_digit(4, n)) for n in range(1, len(CHAMPERNOWNE_PREFIX) + 1))
    yield Check("champernowne_prefix", "base=4", champ == CHAMPERNOWNE_PREFIX, champ)
    pi = "".join(str(pi_digit_base4(n)) for n in range(1, len(PI_PREFIX) + 1))
    yield Check("pi_prefix", "base=4", pi == PI_PREFIX, pi)


def check_schedule() -> Iterator[Check]:
    got = [beta_phi(n) for n in range(1, 10)]
    want = list(zip((1, 1, 2, 2, 2, 3, 3, 3, 3), (0, 1, 0, 1, 2, 0, 1, 2, 3)))
    yield Check("beta_phi_table", "n=1..9", got == want, got)
    # independent recomputation with plain integers: ceil(1 * sum) == sum
    ref, total = [1], 1
    for _ in range(19):
        ref.append(total)
        total += ref[-1]
    got = [L_w(n) for n in range(1, 21)]
    yield Check("L_recursion", "w=1 n=1..20", got == ref, got)


def check_universality(envs: list[GridEnv], budget: int = 10**6) -> Iterator[Check]:
    stream = DigitStream.champernowne(4)
    for env in envs:
        worst, failures = 0, []
        for s in env.cells:
            for g in env.cells:
                if s == g:
                    continue
                r = run_steps(env.with_task(s, [g]), stream, max_steps=budget)
                if not r.reached_goal:
                    failures.append((s, g))
                worst = max(worst, r.steps)
        yield Check("universality", describe_grid(env), not failures,
                    {"max_steps": worst, "failures": failures[:5]})


def _open_grid(w: int, h: int) -> GridEnv:
    cells = [(x, y) for x in range(w) for y in range(h)]
    return GridEnv.from_cells(cells, (0, 0), [(w - 1, h - 1)])


def check_exhaustive(sizes=((2, 2), (3, 3)), ks=(1, 2), horizon: int = 10**6) -> Iterator[Check]:
    stream = DigitStream.champernowne(4)
    for w, h in sizes:
        for k in ks:
            unseen = verify_exhaustive(_open_grid(w, h), stream, k=k, horizon=horizon)
            yield Check("exhaustive", f"open {w}x{h} k={k}", not unseen,
                        {"unseen": len(unseen), "example": sorted(unseen)[:3]})


def check_synchronizing(envs: list[GridEnv]) -> Iterator[Check]:
    for env in envs:
        seq = synchronizing_sequence(env)
        yield Check("synchronizing", describe_grid(env), verify_synchronizing(env, seq),
                    {"length": len(seq)})


def check_essential(envs: list[GridEnv], product_max: int = 9) -> Iterator[Check]:
    for env in envs:
        dfa = grid_to_dfa(env)
        classes = essential_classes(dfa)
        ok = classes == [frozenset(dfa.states)]
        yield Check("essential_classes", describe_grid(env), ok, [len(c) for c in classes])
        if len(env) <= product_max:
            prod = product_automaton(dfa, 1)
            pc = essential_classes(prod)
            ok = len(pc) == 1 and len(pc[0]) == 4 * len(env)
            yield Check("essential_product_k1", describe_grid(env), ok, [len(c) for c in pc])


def random_anchor(env, rng: random.Random) -> tuple[Fraction, Fraction]:
    """Uniform interior point on a 1/1024 lattice (keeps exact arithmetic small)."""
    while True:
        a = (Fraction(rng.randrange(1, int(env.width * 1024)), 1024),
             Fraction(rng.randrange(1, int(env.height * 1024)), 1024))
        if env.in_interior(a):
            return a


def check_scaling(envs, anchors: int = 100, seed: int = 9) -> Iterator[Check]:
    rng = random.Random(seed)
    for i, env in enumerate(envs):
        m = estimate_sufficient_scaling(env)
        bad = []
        for _ in range(anchors):
            # anchors on a 1/1024 lattice keep the exact arithmetic small
            a = random_anchor(env, rng)
            for mm in (m, m + 1):
                if not is_connected_at(env, a, mm):
                    bad.append((str(a[0]), str(a[1]), mm))
        yield Check("gcgr_connected", f"continuous#{i} m={m}", not bad, bad[:3])


def check_learner(envs: list[GridEnv], budget: int = 10**7, max_budget: int = 10**9) -> Iterator[Check]:
    stream = DigitStream.champernowne(4)
    for env in envs:
        optimal = len(bfs_shortest(env, env.start, env.goals))
        b = budget
        while True:
            st = learn_optimal(env, stream, budget=b)
            if st.best_length == optimal or b >= max_budget:
                break
            b *= 10
        yield Check("learner_optimal", describe_grid(env), st.best_length == optimal,
                    {"learned": st.best_length, "bfs": optimal, "budget": b,
                     "found_at": st.found_at})


def random_sync_catalog(count: int = 20, max_cells: int = 25, seed: int = 5) -> list[GridEnv]:
    rng = random.Random(seed)
    return [random_grid_env(rng.randint(2, max_cells), seed * 1000 + i) for i in range(count)]


def learner_catalog(count: int = 20, seed: int = 8) -> list[GridEnv]:
    rng = random.Random(seed)
    return [random_grid_env(rng.randint(10, 30), 800 + i) for i in range(count)]


def suite(name: str) -> list[Callable[[], Iterator[Check]]]:
    if name == "small":
        grids = small_grid_catalog(count=12, max_cells=8)
        return [
            check_digits, check_schedule,
            lambda: check_universality(grids),
            lambda: check_exhaustive(sizes=((2, 2),)),
            lambda: check_synchronizing(random_sync_catalog(count=8, max_cells=12)),
            lambda: check_essential(grids),
            lambda: check_scaling(continuous_catalog(count=3), anchors=10),
        ]
    if name == "full":
        grids = small_grid_catalog()
        return [
            check_digits, check_schedule,
            lambda: check_universality(grids),
            check_exhaustive,
            lambda: check_synchronizing(random_sync_catalog()),
            lambda: check_essential(grids),
            lambda: check_scaling(continuous_catalog()),
            lambda: check_learner(learner_catalog()),
        ]
    raise ValueError(f"unknown suite {name!r}; expected 'small' or 'full'")


def run_suite(name: str, emit: Callable[[str], None] = print) -> bool:
    """Run every check, emitting one JSON line each; True when all pass."""
    ok = True
    for group in suite(name):
        for check in group():
            emit(check.to_json())
            ok &= check.passed
    return ok

