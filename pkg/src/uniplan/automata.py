"""Automaton view of grid search problems.

A grid problem is a DFA whose states are the free cells and whose letters
are the four unit actions.  This module finds essential classes (terminal
strongly connected components), builds window product automata, checks
that a plan tries every (state, action window) pair, and constructs
synchronizing sequences by repeated pairwise chasing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import kernels
from .digits import ACTIONS, ActionMap, DigitStream
from .errors import InvalidArgument, ResourceLimitError
from .gridworld import Cell, GridEnv, apply_actions, bfs_path

DEFAULT_PRODUCT_LIMIT = 2_000_000


@dataclass(frozen=True)
class Dfa:
    states: tuple
    alphabet: tuple
    transition: dict
    start: Hashable
    accepts: frozenset

    def __post_init__(self):
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.transition:
                    raise InvalidArgument(f"transition undefined for ({q!r}, {a!r})")

    def __call__(self, q, a):
        return self.transition[(q, a)]

    def successors(self, q) -> list:
        return [self.transition[(q, a)] for a in self.alphabet]


def grid_to_dfa(env: GridEnv) -> Dfa:
    table = env.table
    cells = env.cells
    delta = {}
    for i, c in enumerate(cells):
        for a, u in enumerate(ACTIONS):
            delta[(c, u)] = cells[table[i, a]]
    return Dfa(tuple(cells), ACTIONS, delta, env.start, env.goals)


def strongly_connected_components(nodes: Sequence, successors) -> list[list]:
    """Tarjan's algorithm, iterative so deep product graphs do not recurse."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def essential_classes(dfa: Dfa) -> list[frozenset]:
    """Terminal SCCs: mutually reachable state sets that no letter leaves."""
    comps = strongly_connected_components(dfa.states, dfa.successors)
    classes = []
    for comp in comps:
        members = frozenset(comp)
        if all(s in members for q in comp for s in dfa.successors(q)):
            classes.append(members)
    classes.sort(key=lambda c: min(map(repr, c)))
    return classes


def product_automaton(dfa: Dfa, k: int, limit: int = DEFAULT_PRODUCT_LIMIT) -> Dfa:
    """Automaton on (state, last-k-letter window) pairs.

    On letter ``a`` the pair (x, (u1..uk)) moves to (x.u1, (u2..uk, a)):
    the oldest buffered letter is applied and ``a`` joins the window.
    """
    if k < 1:
        raise InvalidArgument("window length k must be >= 1")
    size = len(dfa.states) * len(dfa.alphabet) ** k
    if size > limit:
        raise ResourceLimitError(f"product automaton would have {size} states (limit {limit})")
    windows = list(product(dfa.alphabet, repeat=k))
    states = tuple((q, w) for q in dfa.states for w in windows)
    delta = {}
    for q, w in states:
        head = dfa(q, w[0])
        for a in dfa.alphabet:
            delta[((q, w), a)] = (head, w[1:] + (a,))
    accepts = frozenset(s for s in states if s[0] in dfa.accepts)
    return Dfa(states, dfa.alphabet, delta, (dfa.start, windows[0]), accepts)


def verify_exhaustive(env: GridEnv, stream: DigitStream, amap: ActionMap | None = None,
                      k: int = 1, horizon: int = 10**6, offset: int = 1,
                      limit: int = DEFAULT_PRODUCT_LIMIT) -> set[tuple[Cell, tuple]]:
    """(cell, next-k-actions) pairs the plan has not exercised within ``horizon``.

    The plan starts at ``env.start`` and ignores goals.  An empty result
    certifies that every length-k action word was applied from every cell.
    """
    if k < 1:
        raise InvalidArgument("window length k must be >= 1")
    if horizon < 0:
        raise InvalidArgument("horizon must be >= 0")
    size = len(env) * 4 ** k
    if size > limit:
        raise ResourceLimitError(f"{size} (state, window) pairs exceed limit {limit}")
    amap = amap or ActionMap.default()
    seen = np.zeros((len(env), 4 ** k), dtype=np.bool_)
    if horizon:
        digits = stream.block(offset, horizon + k - 1)
        kernels.mark_windows(env.table, amap.index_array(stream.base), digits,
                             env.index[env.start], k, horizon, seen)
    unseen = set()
    for i, j in zip(*np.nonzero(~seen)):
        word = []
        code = int(j)
        for _ in range(k):
            code, r = divmod(code, 4)
            word.append(ACTIONS[r])
        unseen.add((env.cells[i], tuple(reversed(word))))
    return unseen


def chase_segments(env: GridEnv, x: Cell, x2: Cell, max_rounds: int | None = None) -> list[list]:
    """Rounds of the pairwise chase: each round is a shortest path from the
    first robot to where the second robot currently is, applied to both."""
    if max_rounds is None:
        max_rounds = len(env) ** 2
    rounds = []
    while x != x2:
        if len(rounds) >= max_rounds:
            raise ResourceLimitError(f"chase did not merge within {max_rounds} rounds")
        path = bfs_path(env, x, [x2])
        x = x2 if path else x
        x2 = apply_actions(env, x2, path)
        rounds.append(path)
    return rounds


def merge_pair(env: GridEnv, x: Cell, x2: Cell) -> list[tuple[int, int]]:
    """Action sequence after which robots started at x and x2 coincide."""
    for c in (x, x2):
        if c not in env.free_cells:
            raise InvalidArgument(f"{c} is not a free cell")
    return [u for seg in chase_segments(env, x, x2) for u in seg]


def synchronizing_sequence(env: GridEnv) -> list[tuple[int, int]]:
    """Merge the two smallest remaining candidate states until one is left."""
    current = set(env.free_cells)
    seq: list[tuple[int, int]] = []
    while len(current) > 1:
        a, b = sorted(current)[:2]
        part = merge_pair(env, a, b)
        seq.extend(part)
        current = {apply_actions(env, c, part) for c in current}
    return seq


def verify_synchronizing(env: GridEnv, seq: Iterable[Sequence[int]]) -> bool:
    seq = list(seq)
    return len({apply_actions(env, c, seq) for c in env.free_cells}) == 1
