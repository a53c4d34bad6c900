"""Compiled inner loops for long plan executions.

All kernels work on integer-indexed grids: ``table[s, a]`` is the successor
of state ``s`` under action index ``a`` (ACTIONS order) and ``amap[d]`` is
the action index of digit ``d``.  Digit arrays are consumed chunk by chunk
so callers can stream billions of digits through bounded memory.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def walk(table, amap, digits, state, goal_mask, visited):
    """Advance through ``digits`` until a goal state is entered.

    Returns (digits consumed, final state, goal reached).
    """
    for i in range(digits.shape[0]):
        state = table[state, amap[digits[i]]]
        visited[state] = True
        if goal_mask[state]:
            return i + 1, state, True
    return digits.shape[0], state, False


@njit(cache=True)
def mark_windows(table, amap, digits, state, k, horizon, seen):
    """Mark (state, next-k-action code) pairs over ``horizon`` stages.

    ``digits`` must hold at least horizon + k - 1 entries.  Returns the
    state after ``horizon`` steps.
    """
    n = digits.shape[0]
    acts = np.empty(n, dtype=np.int64)
    for i in range(n):
        acts[i] = amap[digits[i]]
    code = 0
    mod = 4 ** k
    for i in range(k - 1):
        code = code * 4 + acts[i]
    for t in range(horizon):
        code = (code * 4 + acts[t + k - 1]) % mod
        seen[state, code] = True
        state = table[state, acts[t]]
    return state


@njit(cache=True)
def learn_chunk(table, amap, digits, state, start_state, goal_mask,
                buf_len, buf_start, best_len, best_start, cap, cap_hits, base_index):
    """Anytime shortest-plan recorder over one chunk of digits.

    ``buf_len`` is -1 while no recording is active.  ``buf_start`` and
    ``best_start`` are absolute digit indices of the first recorded action.
    ``base_index`` is the absolute index of ``digits[0]``.
    """
    for i in range(digits.shape[0]):
        if buf_len >= 0:
            buf_len += 1
            if buf_len > cap:
                buf_len = -1
                cap_hits += 1
        state = table[state, amap[digits[i]]]
        if state == start_state:
            buf_len = 0
            buf_start = base_index + i + 1
        if goal_mask[state] and buf_len >= 0:
            if best_len < 0 or buf_len < best_len:
                best_len = buf_len
                best_start = buf_start
            buf_len = -1
    return state, buf_len, buf_start, best_len, best_start, cap_hits
